//! Numerical checks of the interpolation argument: the random walk of
//! occupied sites, its stopping time and Azuma bound, the exact increment
//! identities for adding an edge or a site, the step inequality, the bound
//! on the pairing correction Z, and the Δ_q error budget.
//!
//! Every check that can be done by exhaustive enumeration is; only the walk
//! statistics are sampled.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::confgraph::{free_counts, graph_law, HyperGraph, Matching, ENUMERATION_STUB_CAP};
use crate::distributions::{ConfigurationProfile, DiscreteDist};
use crate::error::{Error, Result};
use crate::mc::{self, stream_rng, McConfig, DEFAULT_CHUNK_SIZE};
use crate::model::{
    e_avg, CompiledHamiltonian, FieldDraw, HamiltonianRealization, Model, SiteDraw, ThetaDraw,
    DEFAULT_MOMENT_N_MAX,
};

/// Largest N for the exact Gibbs computations of this module.
pub const EXACT_N_CAP: usize = 12;

/// Largest number of (θ, x) atom combinations enumerated exactly.
pub const ATOM_COMBINATION_CAP: usize = 100_000;

/// Largest number of vertex tuples enumerated for pairing laws.
pub const TUPLE_CAP: usize = 1_000_000;

/// Default cap on joint Hamiltonian atom combinations in the demo.
pub const DEFAULT_DEMO_COMBINATION_CAP: usize = 4096;

/// ⌈√(S log S)⌉.
pub fn default_delta(s_q: usize) -> usize {
    let s = s_q as f64;
    (s * s.ln()).sqrt().ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WalkParams {
    pub q: usize,
    pub s_q: usize,
    pub delta: usize,
    pub tau: usize,
    /// Set when S_q < max(15, 2q²) was accepted on request.
    pub q_rule_waived: bool,
}

impl WalkParams {
    /// δ defaults to ⌈√(S_q log S_q)⌉. S_q ≥ max(15, 2q²) is required
    /// unless `waive_q_rule` is set.
    pub fn new(q: usize, s_q: usize, delta: Option<usize>, waive_q_rule: bool) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParams(format!("q = {q} is below 2")));
        }
        let delta = delta.unwrap_or_else(|| default_delta(s_q));
        if delta == 0 {
            return Err(Error::InvalidParams("δ must be positive".into()));
        }
        if s_q <= 2 * delta {
            return Err(Error::InvalidParams(format!(
                "τ = S_q − 2δ = {s_q} − {} is not positive",
                2 * delta
            )));
        }
        let rule = s_q >= 15.max(2 * q * q);
        if !rule && !waive_q_rule {
            return Err(Error::InvalidParams(format!(
                "S_q = {s_q} is below max(15, 2q²) = {}",
                15.max(2 * q * q)
            )));
        }
        Ok(Self {
            q,
            s_q,
            delta,
            tau: s_q - 2 * delta,
            q_rule_waived: !rule,
        })
    }

    #[inline]
    fn c(&self, e: usize, t: usize) -> i64 {
        (self.q * e + self.tau - t) as i64
    }

    #[inline]
    fn stops(&self, c: i64) -> bool {
        (c - self.tau as i64).unsigned_abs() as usize >= self.delta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkTrajectory {
    /// X_1..X_τ.
    pub x: Vec<u8>,
    /// E_q^t for t = 0..τ.
    pub e_q: Vec<usize>,
    /// S_q^t = τ − t.
    pub s_q: Vec<usize>,
    /// C_t = q E_q^t + S_q^t.
    pub c: Vec<i64>,
    /// First t with |C_t − τ| ≥ δ, if any t ≤ τ.
    pub stopping_time: Option<usize>,
}

impl WalkTrajectory {
    /// C_{t ∧ T}.
    pub fn stopped_c(&self, t: usize) -> i64 {
        self.c[self.stopping_time.map_or(t, |s| s.min(t))]
    }
}

/// Runs the walk on a given sequence X_1, X_2, …; at least τ values are
/// needed.
pub fn run_walk_with(
    params: &WalkParams,
    xs: impl IntoIterator<Item = bool>,
) -> Result<WalkTrajectory> {
    let x: Vec<u8> = xs.into_iter().take(params.tau).map(u8::from).collect();
    if x.len() < params.tau {
        return Err(Error::InvalidParams(format!(
            "{} increments for τ = {}",
            x.len(),
            params.tau
        )));
    }
    let mut e_q = vec![0];
    let mut c = vec![params.c(0, 0)];
    let mut stopping_time = None;
    for (t, &xt) in x.iter().enumerate() {
        let e = e_q[t] + usize::from(xt);
        e_q.push(e);
        c.push(params.c(e, t + 1));
        if stopping_time.is_none() && params.stops(c[t + 1]) {
            stopping_time = Some(t + 1);
        }
    }
    Ok(WalkTrajectory {
        x,
        e_q,
        s_q: (0..=params.tau).map(|t| params.tau - t).collect(),
        c,
        stopping_time,
    })
}

pub fn run_walk<R: Rng + ?Sized>(params: &WalkParams, rng: &mut R) -> WalkTrajectory {
    let p = 1.0 / params.q as f64;
    let xs: Vec<bool> = (0..params.tau).map(|_| rng.gen_bool(p)).collect();
    run_walk_with(params, xs).expect("τ increments drawn")
}

fn stopping_time<R: Rng + ?Sized>(params: &WalkParams, rng: &mut R) -> Option<usize> {
    let p = 1.0 / params.q as f64;
    let mut e = 0;
    for t in 1..=params.tau {
        e += usize::from(rng.gen_bool(p));
        if params.stops(params.c(e, t)) {
            return Some(t);
        }
    }
    None
}

/// Histogram of T over `n` walks; the last bin counts T = ∞.
fn stopping_histogram(params: &WalkParams, n: usize, seed: u64) -> Vec<u64> {
    let chunks = n.div_ceil(DEFAULT_CHUNK_SIZE);
    let partial: Vec<Vec<u64>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let len = DEFAULT_CHUNK_SIZE.min(n - k * DEFAULT_CHUNK_SIZE);
            let mut hist = vec![0u64; params.tau + 2];
            for _ in 0..len {
                let idx = stopping_time(params, &mut rng).unwrap_or(params.tau + 1);
                hist[idx] += 1;
            }
            hist
        })
        .collect();
    let mut hist = vec![0u64; params.tau + 2];
    for h in partial {
        for (a, b) in hist.iter_mut().zip(h) {
            *a += b;
        }
    }
    hist
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleReport {
    pub params: WalkParams,
    pub n_walks: usize,
    pub seed: u64,
    pub mean_increment: f64,
    pub std_error: f64,
    /// Largest |mean/SE| of the increment C_{t+1} − C_t over the strata t.
    pub max_abs_z: f64,
    pub passed: bool,
}

/// Empirical check that C_t has mean-zero increments, overall and for each
/// t separately.
pub fn martingale_check(params: &WalkParams, n_walks: usize, seed: u64) -> Result<MartingaleReport> {
    if n_walks < 2 {
        return Err(Error::InvalidParams("need at least two walks".into()));
    }
    let tau = params.tau;
    let chunks = n_walks.div_ceil(DEFAULT_CHUNK_SIZE);
    let partial: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let len = DEFAULT_CHUNK_SIZE.min(n_walks - k * DEFAULT_CHUNK_SIZE);
            let (mut s, mut s2) = (vec![0.0; tau], vec![0.0; tau]);
            for _ in 0..len {
                let w = run_walk(params, &mut rng);
                for t in 0..tau {
                    let inc = (w.c[t + 1] - w.c[t]) as f64;
                    s[t] += inc;
                    s2[t] += inc * inc;
                }
            }
            (s, s2)
        })
        .collect();
    let (mut s, mut s2) = (vec![0.0; tau], vec![0.0; tau]);
    for (a, b) in partial {
        for t in 0..tau {
            s[t] += a[t];
            s2[t] += b[t];
        }
    }
    let n = n_walks as f64;
    let se_of = |sum: f64, sum_sq: f64, n: f64| {
        let mean = sum / n;
        (((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) / n).sqrt()
    };
    let mut max_abs_z: f64 = 0.0;
    for t in 0..tau {
        let se = se_of(s[t], s2[t], n);
        if se > 0.0 {
            max_abs_z = max_abs_z.max((s[t] / n / se).abs());
        }
    }
    let total: f64 = s.iter().sum();
    let total_sq: f64 = s2.iter().sum();
    let m = n * tau as f64;
    let mean_increment = total / m;
    let std_error = se_of(total, total_sq, m);
    // Overall 4σ; per-stratum threshold corrected for the τ comparisons.
    let stratum_limit = 4.0 + (2.0 * (tau as f64).ln()).sqrt();
    Ok(MartingaleReport {
        params: *params,
        n_walks,
        seed,
        mean_increment,
        std_error,
        max_abs_z,
        passed: mean_increment.abs() <= 4.0 * std_error && max_abs_z <= stratum_limit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AzumaRow {
    pub t: usize,
    pub empirical: f64,
    pub bound: f64,
    /// Binomial standard deviation of the empirical frequency at the bound.
    pub sigma: f64,
    /// Empirical frequency above bound + 4σ.
    pub exceeds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AzumaReport {
    pub params: WalkParams,
    pub n_trials: usize,
    pub seed: u64,
    pub rows: Vec<AzumaRow>,
    pub passed: bool,
}

/// 2 exp(−δ²/(2 t q²)).
pub fn azuma_bound(params: &WalkParams, t: usize) -> f64 {
    if t == 0 {
        return 0.0;
    }
    let d = params.delta as f64;
    let q = params.q as f64;
    2.0 * (-d * d / (2.0 * t as f64 * q * q)).exp()
}

/// Empirical P(T ≤ t) against the Azuma bound at every t in `t_grid`
/// (every t ≤ τ when empty).
pub fn azuma_check(
    params: &WalkParams,
    n_trials: usize,
    t_grid: &[usize],
    seed: u64,
) -> Result<AzumaReport> {
    if n_trials == 0 {
        return Err(Error::InvalidParams("need at least one trial".into()));
    }
    if let Some(&t) = t_grid.iter().find(|&&t| t > params.tau) {
        return Err(Error::InvalidParams(format!("t = {t} exceeds τ = {}", params.tau)));
    }
    let hist = stopping_histogram(params, n_trials, seed);
    let mut cumulative = vec![0u64; params.tau + 1];
    let mut acc = 0;
    for t in 0..=params.tau {
        acc += hist[t];
        cumulative[t] = acc;
    }
    let grid: Vec<usize> = if t_grid.is_empty() {
        (1..=params.tau).collect()
    } else {
        t_grid.to_vec()
    };
    let n = n_trials as f64;
    let rows: Vec<AzumaRow> = grid
        .into_iter()
        .map(|t| {
            let empirical = cumulative[t] as f64 / n;
            let bound = azuma_bound(params, t);
            let b = bound.min(1.0);
            let sigma = (b * (1.0 - b) / n).sqrt();
            AzumaRow {
                t,
                empirical,
                bound,
                sigma,
                exceeds: empirical > bound + 4.0 * sigma,
            }
        })
        .collect();
    let passed = rows.iter().all(|r| !r.exceeds);
    Ok(AzumaReport {
        params: *params,
        n_trials,
        seed,
        rows,
        passed,
    })
}

/// All ordered vertex tuples of a random p-edge-pairing with free counts
/// `c`, with their probabilities Π_k (c_{i_k} − δ_k)/(χ − k + 1).
pub fn pairing_tuples(c: &[usize], p: usize) -> Result<Vec<(Vec<usize>, f64)>> {
    let chi: usize = c.iter().sum();
    if chi < p {
        return Err(Error::Capacity(format!("{chi} free stubs for a {p}-edge")));
    }
    let mut out = Vec::new();
    let mut tuple = Vec::with_capacity(p);
    fn rec(
        c: &[usize],
        p: usize,
        chi: usize,
        tuple: &mut Vec<usize>,
        w: f64,
        out: &mut Vec<(Vec<usize>, f64)>,
    ) {
        if tuple.len() == p {
            out.push((tuple.clone(), w));
            return;
        }
        let k = tuple.len();
        for i in 0..c.len() {
            let used = tuple.iter().filter(|&&j| j == i).count();
            if c[i] <= used {
                continue;
            }
            tuple.push(i);
            rec(c, p, chi, tuple, w * (c[i] - used) as f64 / (chi - k) as f64, out);
            tuple.pop();
        }
    }
    if c.len().checked_pow(p as u32).is_none_or(|v| v > TUPLE_CAP) {
        return Err(Error::Capacity(format!("{}^{p} vertex tuples", c.len())));
    }
    rec(c, p, chi, &mut tuple, 1.0, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZReport {
    pub p: usize,
    pub chi: usize,
    pub tuples: usize,
    /// Σ |Z_{i_1..i_p}|.
    pub sum_abs: f64,
    /// 2 Σ_{k<p} k/(χ − k).
    pub bound_sum: f64,
    /// 2p²/(χ − p).
    pub bound_simple: f64,
    pub holds: bool,
}

/// Σ|Z| over all of V^p, where Z is the gap between the product law
/// c_{i_1}⋯c_{i_p}/χ^p and the sequential pairing law.
pub fn z_sum_bound_check(c: &[usize], p: usize) -> Result<ZReport> {
    if p == 0 {
        return Err(Error::InvalidParams("p must be positive".into()));
    }
    let chi: usize = c.iter().sum();
    if chi <= p {
        return Err(Error::InvalidParams(format!("χ = {chi} must exceed p = {p}")));
    }
    let n = c.len();
    let count = n
        .checked_pow(p as u32)
        .filter(|&v| v <= TUPLE_CAP)
        .ok_or_else(|| Error::Capacity(format!("{n}^{p} vertex tuples")))?;
    let chi_f = chi as f64;
    let sum_abs: f64 = (0..count)
        .into_par_iter()
        .map(|code| {
            let mut rest = code;
            let mut prod = 1.0;
            let mut seq = 1.0;
            let mut seen: Vec<usize> = Vec::with_capacity(p);
            for k in 0..p {
                let i = rest % n;
                rest /= n;
                let used = seen.iter().filter(|&&j| j == i).count() as f64;
                prod *= c[i] as f64 / chi_f;
                seq *= (c[i] as f64 - used) / (chi_f - k as f64);
                seen.push(i);
            }
            (prod - seq).abs()
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    let bound_sum = 2.0 * (1..p).map(|k| k as f64 / (chi_f - k as f64)).sum::<f64>();
    let bound_simple = 2.0 * (p * p) as f64 / (chi_f - p as f64);
    Ok(ZReport {
        p,
        chi,
        tuples: count,
        sum_abs,
        bound_sum,
        bound_simple,
        holds: sum_abs <= bound_sum + 1e-12 && bound_sum <= bound_simple + 1e-12,
    })
}

/// x^p − p x y^{p−1} + (p − 1) y^p.
pub fn polynomial_core(x: f64, y: f64, p: u32) -> f64 {
    let p_i = p as i32;
    x.powi(p_i) - p as f64 * x * y.powi(p_i - 1) + (p as f64 - 1.0) * y.powi(p_i)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Budget {
    pub q: usize,
    pub s_q: usize,
    pub delta: usize,
    pub kappa: f64,
    /// κ(7 S e^{−δ²/(2Sq²)} + 3δ/q + 1 + 2δ + 2qS/(δ − q)).
    pub bound: f64,
    /// bound / S_q.
    pub normalized: f64,
}

pub fn delta_error_budget(q: usize, s_q: usize, kappa: f64) -> Result<Budget> {
    delta_error_budget_with(q, s_q, default_delta(s_q), kappa)
}

pub fn delta_error_budget_with(q: usize, s_q: usize, delta: usize, kappa: f64) -> Result<Budget> {
    if delta <= q {
        return Err(Error::Domain(format!("δ = {delta} must exceed q = {q}")));
    }
    if s_q == 0 || !(kappa >= 0.0) {
        return Err(Error::InvalidParams("S_q must be positive and κ nonnegative".into()));
    }
    let (qf, s, d) = (q as f64, s_q as f64, delta as f64);
    let inner = 7.0 * s * (-d * d / (2.0 * s * qf * qf)).exp()
        + 3.0 * d / qf
        + 1.0
        + 2.0 * d
        + 2.0 * qf * s / (d - qf);
    let bound = kappa * inner;
    Ok(Budget {
        q,
        s_q,
        delta,
        kappa,
        bound,
        normalized: bound / s,
    })
}

/// Largest normalized budget over a grid, i.e. one constant C valid for
/// every (q, S_q) in it.
pub fn budget_constant(qs: &[usize], s_grid: &[usize], kappa: f64) -> Result<f64> {
    let mut c: f64 = 0.0;
    for &q in qs {
        for &s in s_grid {
            c = c.max(delta_error_budget(q, s, kappa)?.normalized);
        }
    }
    Ok(c)
}

fn x_tuples(zeta: &DiscreteDist<f64>, k: usize) -> Vec<(Vec<f64>, f64)> {
    let mut out = vec![(Vec::new(), 1.0)];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|(xs, w)| {
                zeta.iter().map(move |(&x, wx)| {
                    let mut next = xs.clone();
                    next.push(x);
                    (next, w * wx)
                })
            })
            .filter(|&(_, w)| w > 0.0)
            .collect();
    }
    out
}

fn edge_atoms(model: &Model, p: usize) -> Result<Vec<(ThetaDraw, f64)>> {
    let law = model.family.law(p)?;
    if law.enumeration_size(p) > ATOM_COMBINATION_CAP {
        return Err(Error::Capacity(format!(
            "{} atom combinations for a {p}-edge",
            law.enumeration_size(p)
        )));
    }
    Ok(law.enumerate(p))
}

fn site_atoms(model: &Model, zeta: &DiscreteDist<f64>, p: usize) -> Result<Vec<(SiteDraw, f64)>> {
    let law = model.family.law(p)?;
    let size = law.enumeration_size(p) as f64 * (zeta.len() as f64).powi(p as i32 - 1);
    if size > ATOM_COMBINATION_CAP as f64 {
        return Err(Error::Capacity(format!("{size} atom combinations for a {p}-site")));
    }
    let xs = x_tuples(zeta, p - 1);
    let mut out = Vec::new();
    for (theta, w) in law.enumerate(p) {
        for (x, wx) in &xs {
            out.push((SiteDraw::new(theta.clone(), x.clone())?, w * wx));
        }
    }
    Ok(out)
}

/// E log⟨E_p⟩_x over θ_p atoms and x ∈ ζ^p.
pub fn expected_log_e_avg(model: &Model, zeta: &DiscreteDist<f64>, p: usize) -> Result<f64> {
    let xs = x_tuples(zeta, p);
    let thetas = edge_atoms(model, p)?;
    if thetas.len() * xs.len() > ATOM_COMBINATION_CAP {
        return Err(Error::Capacity("too many atoms for E log⟨E_p⟩".into()));
    }
    let mut acc = 0.0;
    for (theta, w) in &thetas {
        for (x, wx) in &xs {
            acc += w * wx * e_avg(theta, x)?.ln();
        }
    }
    Ok(acc)
}

/// Draws θ for each labeled edge, (θ, x) for each labeled site and h for
/// each vertex of a profile.
pub fn draw_for_profile<R: Rng + ?Sized>(
    profile: &ConfigurationProfile,
    model: &Model,
    zeta: &DiscreteDist<f64>,
    rng: &mut R,
) -> Result<HamiltonianRealization> {
    let mut edges = BTreeMap::new();
    for (&p, &count) in &profile.edges {
        let law = model.family.law(p)?;
        edges.insert(p, (0..count).map(|_| law.sample(p, rng)).collect());
    }
    let mut sites = BTreeMap::new();
    for (&p, &count) in &profile.sites {
        let law = model.family.law(p)?;
        let mut list = Vec::with_capacity(count);
        for _ in 0..count {
            let theta = law.sample(p, rng);
            let x = (1..p).map(|_| *zeta.sample(rng)).collect();
            list.push(SiteDraw::new(theta, x)?);
        }
        sites.insert(p, list);
    }
    let fields = (0..profile.n()).map(|_| model.field.sample(rng)).collect();
    Ok(HamiltonianRealization { edges, sites, fields })
}

fn check_exact_size(profile: &ConfigurationProfile, extra_stubs: usize) -> Result<()> {
    if profile.n() > EXACT_N_CAP {
        return Err(Error::Capacity(format!(
            "N = {} exceeds {EXACT_N_CAP} for exact Gibbs averages",
            profile.n()
        )));
    }
    if profile.stub_demand() + extra_stubs > ENUMERATION_STUB_CAP {
        return Err(Error::Capacity(format!(
            "{} edge and site stubs exceed {ENUMERATION_STUB_CAP}",
            profile.stub_demand() + extra_stubs
        )));
    }
    Ok(())
}

fn log_z(g: &HyperGraph, r: &HamiltonianRealization) -> Result<f64> {
    CompiledHamiltonian::new(g, r)?.log_partition()
}

/// Free counts c_i of a graph drawn from `profile`.
fn graph_free_counts(profile: &ConfigurationProfile, g: &HyperGraph) -> Vec<usize> {
    profile
        .degrees
        .iter()
        .zip(g.used_degrees())
        .map(|(d, u)| d - u)
        .collect()
}

/// ⟨f(σ_tuple)⟩ for a weight table indexed by endpoint bitmask.
fn gibbs_table_average(table: &crate::model::GibbsTable, tuple: &[usize], weights: &[f64]) -> f64 {
    table
        .marginal(tuple)
        .iter()
        .zip(weights)
        .map(|(m, w)| m * w)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Increment {
    Edge,
    Site,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncrementReport {
    pub kind: Increment,
    pub p: usize,
    pub seed: u64,
    /// Averaged F after the addition minus F before.
    pub lhs: f64,
    /// (1/|M|) Σ_𝔪 E log⟨exp θ⟩_𝔪 (or exp U for a site).
    pub rhs: f64,
    pub diff: f64,
    pub n_graphs: usize,
    pub passed: bool,
}

/// Exact check of the increment identities: adding a p-edge (or p-site) to
/// a uniform matching changes F by the average log Gibbs expectation of
/// the new factor.
///
/// The Hamiltonian draws of existing items are frozen (from `seed`); the new
/// item is averaged over its atoms.
pub fn increment_identity_check(
    profile: &ConfigurationProfile,
    model: &Model,
    zeta: &DiscreteDist<f64>,
    p: usize,
    kind: Increment,
    seed: u64,
) -> Result<IncrementReport> {
    profile.check_feasible()?;
    let extra = match kind {
        Increment::Edge => p,
        Increment::Site => 1,
    };
    check_exact_size(profile, extra)?;
    let after = match kind {
        Increment::Edge => profile.with_edge_delta(p, 1),
        Increment::Site => profile.with_site_delta(p, 1),
    };
    after.check_feasible()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = draw_for_profile(profile, model, zeta, &mut rng)?;
    let law = graph_law(profile)?;
    let law_after = graph_law(&after)?;
    let f_before: f64 = law
        .iter()
        .map(|(g, w)| Ok(w * log_z(g, &base)?))
        .sum::<Result<f64>>()?;

    let mut lhs = 0.0;
    let mut rhs = 0.0;
    match kind {
        Increment::Edge => {
            let atoms = edge_atoms(model, p)?;
            for (theta, w) in &atoms {
                let mut r = base.clone();
                r.edges.entry(p).or_default().push(theta.clone());
                let f_after: f64 = law_after
                    .iter()
                    .map(|(g, wg)| Ok(wg * log_z(g, &r)?))
                    .sum::<Result<f64>>()?;
                lhs += w * f_after;
            }
            for (g, wg) in &law {
                let table = CompiledHamiltonian::new(g, &base)?.gibbs()?;
                let tuples = pairing_tuples(&graph_free_counts(profile, g), p)?;
                for (theta, w) in &atoms {
                    let weights = theta.weight_table();
                    for (tuple, wt) in &tuples {
                        rhs += wg * w * wt * gibbs_table_average(&table, tuple, &weights).ln();
                    }
                }
            }
        }
        Increment::Site => {
            let atoms = site_atoms(model, zeta, p)?;
            for (site, w) in &atoms {
                let mut r = base.clone();
                r.sites.entry(p).or_default().push(site.clone());
                let f_after: f64 = law_after
                    .iter()
                    .map(|(g, wg)| Ok(wg * log_z(g, &r)?))
                    .sum::<Result<f64>>()?;
                lhs += w * f_after;
            }
            for (g, wg) in &law {
                let table = CompiledHamiltonian::new(g, &base)?.gibbs()?;
                let c = graph_free_counts(profile, g);
                let chi: usize = c.iter().sum();
                for (i, &ci) in c.iter().enumerate() {
                    if ci == 0 {
                        continue;
                    }
                    let marg = table.marginal(&[i]);
                    for (site, w) in &atoms {
                        let avg = marg[0] * site.weight[0] + marg[1] * site.weight[1];
                        rhs += wg * w * ci as f64 / chi as f64 * avg.ln();
                    }
                }
            }
        }
    }
    lhs -= f_before;
    let diff = lhs - rhs;
    Ok(IncrementReport {
        kind,
        p,
        seed,
        lhs,
        rhs,
        diff,
        n_graphs: law.len(),
        passed: diff.abs() <= 1e-10 * (1.0 + lhs.abs()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub p: usize,
    pub delta: usize,
    pub chi: usize,
    #[serde(serialize_with = "ser_kappa")]
    pub kappa: f64,
    pub mode: CheckMode,
    /// E[(1/p) log⟨exp θ⟩ − log⟨exp U⟩].
    pub lhs: f64,
    /// −((p−1)/p) E log⟨E_p⟩_x + 2pκ/(δ − p).
    #[serde(serialize_with = "ser_kappa")]
    pub rhs: f64,
    #[serde(serialize_with = "ser_kappa")]
    pub gap: f64,
    pub std_error: f64,
    pub holds: bool,
    /// Product-law sum minus p times the site term plus (p−1) E log⟨E_p⟩;
    /// must be ≤ 0. Exact mode only.
    pub core_value: Option<f64>,
    /// |E_e log⟨exp θ⟩ − product-law sum| and its bound 2p²κ/(χ − p).
    pub z_deviation: Option<f64>,
    #[serde(serialize_with = "ser_opt_kappa")]
    pub z_bound: Option<f64>,
    pub e_log_e_avg: f64,
}

fn ser_kappa<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

fn ser_opt_kappa<S: serde::Serializer>(
    v: &Option<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => ser_kappa(x, s),
        None => s.serialize_none(),
    }
}

/// Checks the step inequality on a fixed matching 𝔪. Exact over atoms
/// when the (θ, x) combinations fit [`ATOM_COMBINATION_CAP`], otherwise
/// Monte Carlo with `mc_budget` draws and a 3σ allowance.
pub fn step_inequality_check(
    m: &Matching,
    model: &Model,
    zeta: &DiscreteDist<f64>,
    p: usize,
    delta: usize,
    mc_budget: usize,
    seed: u64,
) -> Result<StepReport> {
    let profile = m.profile();
    if profile.n() > EXACT_N_CAP {
        return Err(Error::Capacity(format!("N = {} exceeds {EXACT_N_CAP}", profile.n())));
    }
    let (c, chi) = free_counts(m);
    if delta <= p || chi < delta {
        return Err(Error::InvalidParams(format!(
            "need χ ≥ δ > p, got χ = {chi}, δ = {delta}, p = {p}"
        )));
    }
    let kappa = model.family.validate(&model.field, DEFAULT_MOMENT_N_MAX)?.kappa;
    let g = m.to_hypergraph();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = draw_for_profile(profile, model, zeta, &mut rng)?;
    let table = CompiledHamiltonian::new(&g, &base)?.gibbs()?;
    let tuples = pairing_tuples(&c, p)?;
    let chi_f = chi as f64;
    let pf = p as f64;
    let slack = 2.0 * pf * kappa / (delta as f64 - pf);
    let z_bound = 2.0 * pf * pf * kappa / (chi_f - pf);

    let exact = edge_atoms(model, p)
        .and_then(|e| site_atoms(model, zeta, p).map(|s| (e, s)))
        .and_then(|(e, s)| expected_log_e_avg(model, zeta, p).map(|l| (e, s, l)));
    match exact {
        Ok((edge_atoms, site_atoms, e_log)) => {
            let mut edge_term = 0.0;
            let mut product_term = 0.0;
            for (theta, w) in &edge_atoms {
                let weights = theta.weight_table();
                for (tuple, wt) in &tuples {
                    edge_term += w * wt * gibbs_table_average(&table, tuple, &weights).ln();
                }
                // Product law over all of V^p.
                let n = c.len();
                for code in 0..n.pow(p as u32) {
                    let mut rest = code;
                    let mut tuple = Vec::with_capacity(p);
                    let mut wprod = 1.0;
                    for _ in 0..p {
                        let i = rest % n;
                        rest /= n;
                        wprod *= c[i] as f64 / chi_f;
                        tuple.push(i);
                    }
                    if wprod > 0.0 {
                        product_term += w * wprod * gibbs_table_average(&table, &tuple, &weights).ln();
                    }
                }
            }
            let mut site_term = 0.0;
            for (i, &ci) in c.iter().enumerate() {
                if ci == 0 {
                    continue;
                }
                let marg = table.marginal(&[i]);
                for (site, w) in &site_atoms {
                    let avg = marg[0] * site.weight[0] + marg[1] * site.weight[1];
                    site_term += w * ci as f64 / chi_f * avg.ln();
                }
            }
            let lhs = edge_term / pf - site_term;
            let rhs = -(pf - 1.0) / pf * e_log + slack;
            let core = product_term - pf * site_term + (pf - 1.0) * e_log;
            Ok(StepReport {
                p,
                delta,
                chi,
                kappa,
                mode: CheckMode::Exact,
                lhs,
                rhs,
                gap: rhs - lhs,
                std_error: 0.0,
                holds: lhs <= rhs + 1e-10,
                core_value: Some(core),
                z_deviation: Some((edge_term - product_term).abs()),
                z_bound: Some(z_bound),
                e_log_e_avg: e_log,
            })
        }
        Err(Error::Capacity(_)) => {
            let law = model.family.law(p)?;
            let cfg = McConfig::new(mc_budget, seed);
            let moments = mc::run(&cfg, |rng| {
                let theta = law.sample(p, rng);
                let weights = theta.weight_table();
                let tuple = &tuples[sample_weighted(&tuples, rng)].0;
                let edge = gibbs_table_average(&table, tuple, &weights).ln();
                let site_theta = law.sample(p, rng);
                let x: Vec<f64> = (1..p).map(|_| *zeta.sample(rng)).collect();
                let site = SiteDraw::new(site_theta, x)?;
                let i = sample_vertex(&c, chi, rng);
                let marg = table.marginal(&[i]);
                let s = (marg[0] * site.weight[0] + marg[1] * site.weight[1]).ln();
                let e_theta = law.sample(p, rng);
                let xe: Vec<f64> = (0..p).map(|_| *zeta.sample(rng)).collect();
                let e = e_avg(&e_theta, &xe)?.ln();
                let lhs = edge / pf - s;
                Ok((lhs + (pf - 1.0) / pf * e, [lhs, e]))
            })?;
            let lhs = moments.part_mean(0);
            let e_log = moments.part_mean(1);
            let rhs = -(pf - 1.0) / pf * e_log + slack;
            let se = moments.std_error();
            Ok(StepReport {
                p,
                delta,
                chi,
                kappa,
                mode: CheckMode::Sampled,
                lhs,
                rhs,
                gap: rhs - lhs,
                std_error: se,
                holds: moments.mean() <= slack + 3.0 * se,
                core_value: None,
                z_deviation: None,
                z_bound: None,
                e_log_e_avg: e_log,
            })
        }
        Err(e) => Err(e),
    }
}

fn sample_weighted<T, R: Rng + ?Sized>(items: &[(T, f64)], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (k, (_, w)) in items.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    items.len() - 1
}

fn sample_vertex<R: Rng + ?Sized>(c: &[usize], chi: usize, rng: &mut R) -> usize {
    let mut u = rng.gen_range(0..chi);
    for (i, &ci) in c.iter().enumerate() {
        if u < ci {
            return i;
        }
        u -= ci;
    }
    unreachable!("u < χ")
}

/// Hamiltonian-averaged F for a profile: Σ_R P(R) Σ_G P(G) log Z(G, R),
/// enumerating every atom of every labeled item and vertex field.
pub fn averaged_free_energy(
    profile: &ConfigurationProfile,
    model: &Model,
    zeta: &DiscreteDist<f64>,
    combination_cap: usize,
) -> Result<f64> {
    check_exact_size(profile, 0)?;
    let law = graph_law(profile)?;
    let mut edge_lists: Vec<(usize, Vec<(ThetaDraw, f64)>)> = Vec::new();
    for (&p, &count) in &profile.edges {
        let atoms = edge_atoms(model, p)?;
        edge_lists.extend((0..count).map(|_| (p, atoms.clone())));
    }
    let mut site_lists: Vec<(usize, Vec<(SiteDraw, f64)>)> = Vec::new();
    for (&p, &count) in &profile.sites {
        let atoms = site_atoms(model, zeta, p)?;
        site_lists.extend((0..count).map(|_| (p, atoms.clone())));
    }
    let field_atoms: Vec<(FieldDraw, f64)> = model.field.enumerate();
    let n = profile.n();
    let mut sizes: Vec<usize> = edge_lists.iter().map(|l| l.1.len()).collect();
    sizes.extend(site_lists.iter().map(|l| l.1.len()));
    sizes.extend(std::iter::repeat(field_atoms.len()).take(n));
    let combos = sizes
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .filter(|&v| v <= combination_cap)
        .ok_or_else(|| {
            Error::Capacity(format!("Hamiltonian atom combinations exceed {combination_cap}"))
        })?;
    let values: Vec<f64> = (0..combos)
        .into_par_iter()
        .map(|code| {
            let mut rest = code;
            let mut idx = Vec::with_capacity(sizes.len());
            for &s in &sizes {
                idx.push(rest % s);
                rest /= s;
            }
            let mut weight = 1.0;
            let mut r = HamiltonianRealization {
                edges: BTreeMap::new(),
                sites: BTreeMap::new(),
                fields: Vec::with_capacity(n),
            };
            let mut k = 0;
            for (p, atoms) in &edge_lists {
                let (theta, w) = &atoms[idx[k]];
                weight *= w;
                r.edges.entry(*p).or_default().push(theta.clone());
                k += 1;
            }
            for (p, atoms) in &site_lists {
                let (site, w) = &atoms[idx[k]];
                weight *= w;
                r.sites.entry(*p).or_default().push(site.clone());
                k += 1;
            }
            for _ in 0..n {
                let (h, w) = field_atoms[idx[k]];
                weight *= w;
                r.fields.push(h);
                k += 1;
            }
            let mut acc = 0.0;
            for (g, wg) in &law {
                acc += wg * log_z(g, &r)?;
            }
            Ok(weight * acc)
        })
        .collect::<Result<_>>()?;
    Ok(values.iter().sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoStep {
    pub t: usize,
    /// P(T > t).
    pub p_alive: f64,
    pub increment: f64,
    #[serde(serialize_with = "ser_kappa")]
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndpointCheck {
    pub distance: f64,
    #[serde(serialize_with = "ser_kappa")]
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub params: WalkParams,
    #[serde(serialize_with = "ser_kappa")]
    pub kappa: f64,
    pub e_log_e_avg: f64,
    /// E I_t for t = 0..τ.
    pub expected_i: Vec<f64>,
    pub steps: Vec<DemoStep>,
    /// |F(E, S) − I_0| ≤ 2κδ.
    pub start: EndpointCheck,
    /// E|F(E', S') − I_τ| ≤ κ(6 S_q e^{−δ²/(2τq²)} + 3δ/q + 1).
    pub end: EndpointCheck,
    /// Every state satisfied χ ≥ δ > q.
    pub slack_ok: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoConfig {
    pub q: usize,
    pub delta: Option<usize>,
    pub waive_q_rule: bool,
    pub combination_cap: usize,
}

/// Runs the stopped interpolation along coordinate q on a tiny instance,
/// computing E I_t exactly from the law of the walk and the averaged F.
///
/// `profile` supplies the degrees, the other coordinates, and S_q; its
/// E_q must be zero.
pub fn interpolation_demo(
    profile: &ConfigurationProfile,
    model: &Model,
    zeta: &DiscreteDist<f64>,
    cfg: &DemoConfig,
) -> Result<DemoReport> {
    let q = cfg.q;
    if profile.edge_count(q) != 0 {
        return Err(Error::InvalidParams(format!("E_q must be 0 for q = {q}")));
    }
    profile.check_feasible()?;
    let params = WalkParams::new(q, profile.site_count(q), cfg.delta, cfg.waive_q_rule)?;
    if params.delta <= q {
        return Err(Error::InvalidParams(format!("δ = {} must exceed q", params.delta)));
    }
    let kappa = model.family.validate(&model.field, DEFAULT_MOMENT_N_MAX)?.kappa;
    let e_log = expected_log_e_avg(model, zeta, q)?;
    let (tau, delta) = (params.tau, params.delta);

    let state = |k: usize, s: usize| {
        let mut p = profile.clone();
        p.edges.remove(&q);
        p.sites.remove(&q);
        if k > 0 {
            p.edges.insert(q, k);
        }
        if s > 0 {
            p.sites.insert(q, s);
        }
        p
    };
    let supply = profile.stub_supply();
    let others = profile.stub_demand() - params.s_q;
    let mut cache: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut f_bar = |k: usize, s: usize| -> Result<f64> {
        if let Some(&v) = cache.get(&(k, s)) {
            return Ok(v);
        }
        let v = averaged_free_energy(&state(k, s), model, zeta, cfg.combination_cap)?;
        cache.insert((k, s), v);
        Ok(v)
    };

    // Law of the walk: alive mass by E_q, plus frozen mass by (E_q, T).
    let up = 1.0 / q as f64;
    let mut alive: BTreeMap<usize, f64> = BTreeMap::from([(0, 1.0)]);
    let mut frozen: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut slack_ok = true;
    let mut expected_i = Vec::with_capacity(tau + 1);
    let mut p_alive = Vec::with_capacity(tau + 1);
    for t in 0..=tau {
        let mut e_i = 0.0;
        for (&k, &w) in &alive {
            e_i += w * f_bar(k, tau - t)?;
            let used = others + q * k + (tau - t);
            slack_ok &= supply >= used + delta;
        }
        for (&(k, s), &w) in &frozen {
            e_i += w * f_bar(k, tau - s)?;
        }
        expected_i.push(e_i);
        p_alive.push(alive.values().sum::<f64>());
        if t == tau {
            break;
        }
        let mut next: BTreeMap<usize, f64> = BTreeMap::new();
        for (&k, &w) in &alive {
            for (k2, w2) in [(k + 1, w * up), (k, w * (1.0 - up))] {
                if params.stops(params.c(k2, t + 1)) {
                    *frozen.entry((k2, t + 1)).or_default() += w2;
                } else {
                    *next.entry(k2).or_default() += w2;
                }
            }
        }
        alive = next;
    }
    let per_step = -(q as f64 - 1.0) / q as f64 * e_log + 2.0 * q as f64 * kappa / (delta as f64 - q as f64);
    let steps: Vec<DemoStep> = (0..tau)
        .map(|t| {
            let increment = expected_i[t + 1] - expected_i[t];
            let bound = p_alive[t] * per_step;
            DemoStep {
                t,
                p_alive: p_alive[t],
                increment,
                bound,
                holds: increment <= bound + 1e-10,
            }
        })
        .collect();

    let f_start = f_bar(0, params.s_q)?;
    let start_bound = 2.0 * kappa * delta as f64;
    let start_distance = (f_start - expected_i[0]).abs();
    let f_end = f_bar(params.s_q / q, 0)?;
    let mut end_distance = 0.0;
    for (&k, &w) in &alive {
        end_distance += w * (f_end - f_bar(k, 0)?).abs();
    }
    for (&(k, s), &w) in &frozen {
        end_distance += w * (f_end - f_bar(k, tau - s)?).abs();
    }
    let (qf, d) = (q as f64, delta as f64);
    let end_bound = kappa
        * (6.0 * params.s_q as f64 * (-d * d / (2.0 * tau as f64 * qf * qf)).exp() + 3.0 * d / qf + 1.0);
    let start = EndpointCheck {
        distance: start_distance,
        bound: start_bound,
        holds: start_distance <= start_bound + 1e-10,
    };
    let end = EndpointCheck {
        distance: end_distance,
        bound: end_bound,
        holds: end_distance <= end_bound + 1e-10,
    };
    let passed = steps.iter().all(|s| s.holds) && start.holds && end.holds;
    Ok(DemoReport {
        params,
        kappa,
        e_log_e_avg: e_log,
        expected_i,
        steps,
        start,
        end,
        slack_ok,
        passed,
    })
}

/// Small instances shared by the command line and the test suites.
pub mod bundled {
    use super::*;
    use crate::confgraph::{p_edge_pairing, p_site_pairing};
    use crate::model::{ExternalField, HardCoreSpec, Relaxation, ThetaFamily, ThetaLaw};

    pub struct IncrementInstance {
        pub name: &'static str,
        pub profile: ConfigurationProfile,
        pub model: Model,
        pub zeta: DiscreteDist<f64>,
        pub p: usize,
        pub kind: Increment,
    }

    pub struct StepInstance {
        pub name: &'static str,
        pub matching: Matching,
        pub model: Model,
        pub zeta: DiscreteDist<f64>,
        pub p: usize,
        pub delta: usize,
    }

    pub fn relaxed_hard_core(lambda: f64, a: f64) -> Model {
        HardCoreSpec::new(lambda, Relaxation::Finite(a))
            .expect("λ > 1")
            .model()
    }

    /// Pair interaction 1 + b σσ' with random sign of b and a random field.
    pub fn signed_pair_model() -> Model {
        let law = ThetaLaw {
            a: DiscreteDist::dirac(1.0),
            b: DiscreteDist::from_pairs(vec![(-0.4, 0.5), (0.4, 0.5)]).expect("valid"),
            f: DiscreteDist::dirac([-1.0, 1.0]),
        };
        Model {
            family: ThetaFamily { laws: BTreeMap::from([(2, law)]), hard: false },
            field: ExternalField {
                mu: DiscreteDist::from_pairs(vec![(-0.2, 0.5), (0.5, 0.5)]).expect("valid"),
                nu: DiscreteDist::dirac(0.1),
            },
        }
    }

    /// Triple interaction with nonnegative f.
    pub fn triple_model() -> Model {
        let law = ThetaLaw {
            a: DiscreteDist::dirac(1.3),
            b: DiscreteDist::dirac(-0.2),
            f: DiscreteDist::from_pairs(vec![([0.5, 1.5], 0.5), ([1.0, 0.2], 0.5)]).expect("valid"),
        };
        Model {
            family: ThetaFamily { laws: BTreeMap::from([(3, law)]), hard: false },
            field: ExternalField {
                mu: DiscreteDist::from_pairs(vec![(-0.3, 0.5), (0.4, 0.5)]).expect("valid"),
                nu: DiscreteDist::dirac(0.0),
            },
        }
    }

    fn two_point() -> DiscreteDist<f64> {
        DiscreteDist::from_pairs(vec![(-0.3, 0.5), (0.9, 0.5)]).expect("valid")
    }

    pub fn increment_instances() -> Vec<IncrementInstance> {
        let hard = HardCoreSpec::hard(3.0).expect("λ > 1").model();
        let mixed = ConfigurationProfile::new(vec![2, 2, 2, 1], [(2, 2)], [(2, 1)]);
        let mut out = vec![IncrementInstance {
            name: "two-free-vertices-site",
            profile: ConfigurationProfile::new(vec![1, 1], [], []),
            model: relaxed_hard_core(2.0, 1.5),
            zeta: two_point(),
            p: 2,
            kind: Increment::Site,
        }];
        for (name, model) in [("relaxed", relaxed_hard_core(3.0, 0.8)), ("hard", hard)] {
            for kind in [Increment::Edge, Increment::Site] {
                out.push(IncrementInstance {
                    name,
                    profile: mixed.clone(),
                    model: model.clone(),
                    zeta: two_point(),
                    p: 2,
                    kind,
                });
            }
        }
        for kind in [Increment::Edge, Increment::Site] {
            out.push(IncrementInstance {
                name: "signed-pair",
                profile: ConfigurationProfile::new(vec![2, 2, 2], [(2, 1)], [(2, 1)]),
                model: signed_pair_model(),
                zeta: two_point(),
                p: 2,
                kind,
            });
            out.push(IncrementInstance {
                name: "triple",
                profile: ConfigurationProfile::new(vec![2, 2, 1, 1, 1], [(3, 1)], []),
                model: triple_model(),
                zeta: two_point(),
                p: 3,
                kind,
            });
        }
        out
    }

    pub fn step_instances(seed: u64) -> Result<Vec<StepInstance>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut grown = Matching::empty(vec![3, 3, 2, 2, 2, 2]);
        grown = p_edge_pairing(&grown, 2, &mut rng)?;
        grown = p_edge_pairing(&grown, 2, &mut rng)?;
        grown = p_site_pairing(&grown, 2, &mut rng)?;
        let zeta = DiscreteDist::from_pairs(vec![(-0.3, 0.3), (0.4, 0.3), (1.5, 0.4)])?;
        Ok(vec![
            StepInstance {
                name: "empty-relaxed",
                matching: Matching::empty(vec![2; 6]),
                model: relaxed_hard_core(2.0, 2.0),
                zeta: two_point(),
                p: 2,
                delta: 5,
            },
            StepInstance {
                name: "grown-weak",
                matching: grown.clone(),
                model: relaxed_hard_core(1.5, 0.6),
                zeta: zeta.clone(),
                p: 2,
                delta: 3,
            },
            StepInstance {
                name: "grown-strong",
                matching: grown.clone(),
                model: relaxed_hard_core(4.0, 3.0),
                zeta,
                p: 2,
                delta: 3,
            },
            StepInstance {
                name: "grown-hard",
                matching: grown.clone(),
                model: HardCoreSpec::hard(2.0)?.model(),
                zeta: two_point(),
                p: 2,
                delta: 3,
            },
            StepInstance {
                name: "signed-pair",
                matching: grown,
                model: signed_pair_model(),
                zeta: two_point(),
                p: 2,
                delta: 3,
            },
            StepInstance {
                name: "triple",
                matching: Matching::empty(vec![2; 6]),
                model: triple_model(),
                zeta: two_point(),
                p: 3,
                delta: 4,
            },
        ])
    }

    /// N = 4, degree 2, eight 2-sites, q = 2, δ = 3, τ = 2.
    pub fn demo_instance() -> (ConfigurationProfile, Model, DiscreteDist<f64>, DemoConfig) {
        (
            ConfigurationProfile::new(vec![2; 4], [], [(2, 8)]),
            relaxed_hard_core(2.0, 1.0),
            DiscreteDist::from_pairs(vec![(0.2, 0.5), (1.0, 0.5)]).expect("valid"),
            DemoConfig {
                q: 2,
                delta: Some(3),
                waive_q_rule: true,
                combination_cap: DEFAULT_DEMO_COMBINATION_CAP,
            },
        )
    }
}

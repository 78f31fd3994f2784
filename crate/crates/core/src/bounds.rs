//! Monte Carlo evaluation of the RS, 1-RSB and r-RSB functionals.
//!
//! Every outer sample draws d ∼ μ, p_i ∼ ρ, fresh interaction and field
//! draws, and one ζ^(r) per cavity slot from ζ^(r+1). The nested power means
//! T_l below ζ^(r) are evaluated exactly over the joint atom tree of all
//! slots whenever that tree is small enough, so the only sampled layer is
//! the outer one. Larger trees fall back to inner sampling, which biases the
//! result; the report then carries a warning.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{DiscreteDist, HierMeasure};
use crate::error::{Error, Result};
use crate::mc::{self, McConfig, McRng, Moments};
use crate::model::{e_avg_unchecked, u_weight, FieldDraw, Model, ThetaDraw, DEFAULT_MOMENT_N_MAX};

/// Default cap on the number of joint leaves evaluated exactly per T_0.
pub const DEFAULT_EXACT_LEAF_CAP: f64 = (1u64 << 20) as f64;

/// Inner sample sizes used when the caller gives none and the exact tree is
/// too large.
pub const DEFAULT_INNER_BUDGET: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct RsbParams {
    /// m_1 < … < m_r in (0, 1); empty for the RS functional.
    pub m: Vec<f64>,
    /// ζ^(r+1).
    pub zeta: HierMeasure,
}

impl RsbParams {
    pub fn new(m: Vec<f64>, zeta: HierMeasure) -> Result<Self> {
        for (l, &ml) in m.iter().enumerate() {
            if !(ml > 0.0 && ml < 1.0) {
                return Err(Error::InvalidParams(format!("m_{} = {ml} is outside (0, 1)", l + 1)));
            }
        }
        if m.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams(format!("m = {m:?} is not strictly increasing")));
        }
        if zeta.level() != m.len() + 1 {
            return Err(Error::InvalidParams(format!(
                "r = {} needs a level-{} measure, got level {}",
                m.len(),
                m.len() + 1,
                zeta.level()
            )));
        }
        Ok(Self { m, zeta })
    }

    pub fn rs(zeta: DiscreteDist<f64>) -> Self {
        Self {
            m: Vec::new(),
            zeta: HierMeasure::leaf(zeta),
        }
    }

    pub fn r(&self) -> usize {
        self.m.len()
    }
}

/// How the inner expectations E_l are computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerConfig {
    /// Largest joint atom tree (in leaves) summed exactly.
    #[serde(default = "default_leaf_cap")]
    pub exact_leaf_cap: f64,
    /// Samples per level n_1..n_r for the sampled fallback.
    #[serde(default)]
    pub budgets: Option<Vec<usize>>,
    /// Sample the inner levels even when exact summation is possible.
    #[serde(default)]
    pub force_sampled: bool,
}

fn default_leaf_cap() -> f64 {
    DEFAULT_EXACT_LEAF_CAP
}

impl Default for InnerConfig {
    fn default() -> Self {
        Self {
            exact_leaf_cap: DEFAULT_EXACT_LEAF_CAP,
            budgets: None,
            force_sampled: false,
        }
    }
}

impl InnerConfig {
    fn budgets_for(&self, r: usize) -> Result<Vec<usize>> {
        match &self.budgets {
            Some(b) if b.len() != r => Err(Error::InvalidParams(format!(
                "{} inner budgets for r = {r}",
                b.len()
            ))),
            Some(b) if b.contains(&0) => {
                Err(Error::InvalidParams("inner budgets must be positive".into()))
            }
            Some(b) => Ok(b.clone()),
            None => Ok(vec![DEFAULT_INNER_BUDGET; r]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub estimate: f64,
    pub std_error: f64,
    pub n_outer: usize,
    pub seed: u64,
    pub chunk_size: usize,
    /// Mean of the vertex (log T_0 Σ_σ …) term.
    pub vertex_term: f64,
    /// Mean of E[d]·((p−1)/p)·log T_0⟨E_p⟩; the estimate is the vertex term
    /// minus this.
    pub edge_term: f64,
    /// Fraction of outer samples whose inner levels were sampled.
    pub inner_sampled_fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_budgets: Option<Vec<usize>>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl BoundResult {
    pub fn from_moments<const K: usize>(
        m: &Moments<K>,
        cfg: &McConfig,
        vertex_term: f64,
        edge_term: f64,
    ) -> Self {
        Self {
            estimate: m.mean(),
            std_error: m.std_error(),
            n_outer: m.n,
            seed: cfg.seed,
            chunk_size: cfg.chunk_size,
            vertex_term,
            edge_term,
            inner_sampled_fraction: 0.0,
            inner_budgets: None,
            warnings: Vec::new(),
        }
    }
}

/// log Σ exp(v_i), with −∞ entries ignored.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Number of root-to-leaf paths of a hierarchical measure.
fn leaf_paths(z: &HierMeasure) -> f64 {
    match z {
        HierMeasure::Leaf(d) => d.len() as f64,
        HierMeasure::Node { dist, .. } => dist.atoms().iter().map(|a| leaf_paths(&a.v)).sum(),
    }
}

/// Visits every joint choice of one atom per slot, with its probability.
fn for_each_combo(
    sizes: &[usize],
    weight: impl Fn(usize, usize) -> f64,
    mut visit: impl FnMut(&[usize], f64) -> Result<()>,
) -> Result<()> {
    let mut idx = vec![0usize; sizes.len()];
    if sizes.contains(&0) {
        return Ok(());
    }
    loop {
        let w: f64 = idx.iter().enumerate().map(|(k, &i)| weight(k, i)).product();
        if w > 0.0 {
            visit(&idx, w)?;
        }
        let mut k = 0;
        loop {
            if k == sizes.len() {
                return Ok(());
            }
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn check_log_w(v: f64) -> Result<f64> {
    if v.is_nan() {
        return Err(Error::Domain("W is negative or undefined".into()));
    }
    if v == f64::INFINITY {
        return Err(Error::Numeric("W overflowed".into()));
    }
    Ok(v)
}

/// Power mean (Σ w_c e^{m L_c})^{1/m} in log space.
fn log_power_mean(terms: &[(f64, f64)], m: f64) -> f64 {
    let logs: Vec<f64> = terms
        .iter()
        .map(|&(w, l)| if l == f64::NEG_INFINITY { l } else { w.ln() + m * l })
        .collect();
    log_sum_exp(&logs) / m
}

fn log_t_exact<F: Fn(&[f64]) -> f64>(
    slots: &[&HierMeasure],
    m: &[f64],
    log_w: &F,
) -> Result<f64> {
    let mut terms = Vec::new();
    match slots.first() {
        None => return check_log_w(log_w(&[])),
        Some(HierMeasure::Leaf(_)) => {
            let leaves: Vec<&DiscreteDist<f64>> = slots
                .iter()
                .map(|s| match s {
                    HierMeasure::Leaf(d) => d,
                    HierMeasure::Node { .. } => unreachable!("slots share a level"),
                })
                .collect();
            let sizes: Vec<usize> = leaves.iter().map(|d| d.len()).collect();
            let mut xs = vec![0.0; slots.len()];
            for_each_combo(
                &sizes,
                |k, i| leaves[k].atoms()[i].w,
                |idx, w| {
                    for (k, &i) in idx.iter().enumerate() {
                        xs[k] = leaves[k].atoms()[i].v;
                    }
                    terms.push((w, check_log_w(log_w(&xs))?));
                    Ok(())
                },
            )?;
        }
        Some(HierMeasure::Node { .. }) => {
            let nodes: Vec<&DiscreteDist<HierMeasure>> = slots
                .iter()
                .map(|s| match s {
                    HierMeasure::Node { dist, .. } => dist,
                    HierMeasure::Leaf(_) => unreachable!("slots share a level"),
                })
                .collect();
            let sizes: Vec<usize> = nodes.iter().map(|d| d.len()).collect();
            let mut children: Vec<&HierMeasure> = slots.to_vec();
            for_each_combo(
                &sizes,
                |k, i| nodes[k].atoms()[i].w,
                |idx, w| {
                    for (k, &i) in idx.iter().enumerate() {
                        children[k] = &nodes[k].atoms()[i].v;
                    }
                    terms.push((w, log_t_exact(&children, &m[1..], log_w)?));
                    Ok(())
                },
            )?;
        }
    }
    Ok(log_power_mean(&terms, m[0]))
}

fn log_t_sampled<F: Fn(&[f64]) -> f64, R: Rng + ?Sized>(
    slots: &[&HierMeasure],
    m: &[f64],
    budgets: &[usize],
    log_w: &F,
    rng: &mut R,
) -> Result<f64> {
    if slots.is_empty() {
        return check_log_w(log_w(&[]));
    }
    let n = budgets[0];
    let mut terms = Vec::with_capacity(n);
    let w = 1.0 / n as f64;
    for _ in 0..n {
        let value = match slots[0] {
            HierMeasure::Leaf(_) => {
                let xs: Vec<f64> = slots
                    .iter()
                    .map(|s| match s {
                        HierMeasure::Leaf(d) => *d.sample(rng),
                        HierMeasure::Node { .. } => unreachable!("slots share a level"),
                    })
                    .collect();
                check_log_w(log_w(&xs))?
            }
            HierMeasure::Node { .. } => {
                let children: Vec<&HierMeasure> = slots
                    .iter()
                    .map(|s| s.sample_child(rng).expect("node has children"))
                    .collect();
                log_t_sampled(&children, &m[1..], &budgets[1..], log_w, rng)?
            }
        };
        terms.push((w, value));
    }
    Ok(log_power_mean(&terms, m[0]))
}

/// Whether an inner evaluation was exact or sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InnerMode {
    Exact,
    Sampled,
}

/// log T_0 W for one outer draw.
///
/// `slots` holds the ζ^(r) of every cavity slot (all of level r = `m.len()`),
/// and `log_w` maps the slot reals x to log W. W = 0 (log W = −∞) is allowed.
pub fn log_t_transform<F: Fn(&[f64]) -> f64, R: Rng + ?Sized>(
    slots: &[&HierMeasure],
    m: &[f64],
    log_w: &F,
    inner: &InnerConfig,
    rng: &mut R,
) -> Result<(f64, InnerMode)> {
    let r = m.len();
    if r == 0 {
        return Err(Error::InvalidParams("T_0 needs r ≥ 1; use W directly".into()));
    }
    if let Some(s) = slots.iter().find(|s| s.level() != r) {
        return Err(Error::InvalidParams(format!(
            "slot measure of level {} for r = {r}",
            s.level()
        )));
    }
    let leaves: f64 = slots.iter().map(|s| leaf_paths(s)).product();
    if !inner.force_sampled && leaves <= inner.exact_leaf_cap {
        Ok((log_t_exact(slots, m, log_w)?, InnerMode::Exact))
    } else {
        let budgets = inner.budgets_for(r)?;
        Ok((log_t_sampled(slots, m, &budgets, log_w, rng)?, InnerMode::Sampled))
    }
}

/// T_0 W for a W given in linear scale; a negative W is a domain error.
pub fn t_transform<F: Fn(&[f64]) -> f64, R: Rng + ?Sized>(
    slots: &[&HierMeasure],
    m: &[f64],
    w: &F,
    inner: &InnerConfig,
    rng: &mut R,
) -> Result<f64> {
    let log_w = |xs: &[f64]| {
        let v = w(xs);
        if v < 0.0 {
            f64::NAN
        } else {
            v.ln()
        }
    };
    Ok(log_t_transform(slots, m, &log_w, inner, rng)?.0.exp())
}

/// Per-slot draws for one outer sample: reals when r = 0, else ζ^(r).
enum Slots<'a> {
    Reals(Vec<f64>),
    Measures(Vec<&'a HierMeasure>),
}

fn draw_slots<'a, R: Rng + ?Sized>(zeta: &'a HierMeasure, k: usize, rng: &mut R) -> Slots<'a> {
    match zeta {
        HierMeasure::Leaf(d) => Slots::Reals((0..k).map(|_| *d.sample(rng)).collect()),
        HierMeasure::Node { dist, .. } => Slots::Measures((0..k).map(|_| dist.sample(rng)).collect()),
    }
}

fn eval_slots<F: Fn(&[f64]) -> f64, R: Rng + ?Sized>(
    slots: &Slots,
    m: &[f64],
    log_w: &F,
    inner: &InnerConfig,
    rng: &mut R,
) -> Result<(f64, InnerMode)> {
    match slots {
        Slots::Reals(xs) => Ok((check_log_w(log_w(xs))?, InnerMode::Exact)),
        Slots::Measures(ms) => log_t_transform(ms, m, log_w, inner, rng),
    }
}

fn vertex_log_w(thetas: &[ThetaDraw], h: &FieldDraw, xs: &[f64]) -> f64 {
    let mut acc = [h.h(-1), h.h(1)];
    let mut off = 0;
    for theta in thetas {
        let k = theta.p() - 1;
        for (s, sigma) in [(0, -1i8), (1, 1i8)] {
            let w = u_weight(theta, &xs[off..off + k], sigma).unwrap_or(f64::NAN);
            acc[s] += if w > 0.0 { w.ln() } else if w == 0.0 { f64::NEG_INFINITY } else { f64::NAN };
        }
        off += k;
    }
    if acc.iter().any(|v| v.is_nan()) {
        return f64::NAN;
    }
    log_sum_exp(&acc)
}

fn edge_log_w(theta: &ThetaDraw, xs: &[f64]) -> f64 {
    let w = e_avg_unchecked(theta, xs);
    if w > 0.0 {
        w.ln()
    } else if w == 0.0 {
        f64::NEG_INFINITY
    } else {
        f64::NAN
    }
}

fn check_laws(mu: &DiscreteDist<usize>, rho: &DiscreteDist<usize>, model: &Model) -> Result<()> {
    model.family.validate(&model.field, DEFAULT_MOMENT_N_MAX)?;
    for (&p, w) in rho.iter() {
        if w > 0.0 {
            model.family.law(p)?;
        }
    }
    if rho.iter().any(|(&p, w)| w > 0.0 && p < 2) {
        return Err(Error::InvalidDistribution("ρ must be supported on p ≥ 2".into()));
    }
    let _ = mu;
    Ok(())
}

/// One outer sample: (value, [vertex, edge, sampled flag]).
fn outer_sample(
    mu: &DiscreteDist<usize>,
    rho: &DiscreteDist<usize>,
    model: &Model,
    params: &RsbParams,
    inner: &InnerConfig,
    mean_d: f64,
    rng: &mut McRng,
) -> Result<(f64, [f64; 3])> {
    let d = *mu.sample(rng);
    let mut thetas = Vec::with_capacity(d);
    for _ in 0..d {
        let p = *rho.sample(rng);
        thetas.push(model.family.sample(p, rng)?);
    }
    let h = model.field.sample(rng);
    let k: usize = thetas.iter().map(|t| t.p() - 1).sum();
    let slots = draw_slots(&params.zeta, k, rng);
    let (vertex, mode_v) = eval_slots(
        &slots,
        &params.m,
        &|xs: &[f64]| vertex_log_w(&thetas, &h, xs),
        inner,
        rng,
    )?;

    let p = *rho.sample(rng);
    let theta = model.family.sample(p, rng)?;
    let slots = draw_slots(&params.zeta, p, rng);
    let (log_e, mode_e) =
        eval_slots(&slots, &params.m, &|xs: &[f64]| edge_log_w(&theta, xs), inner, rng)?;
    if log_e == f64::NEG_INFINITY {
        return Err(Error::Numeric("⟨E_p⟩ vanished on the whole inner tree".into()));
    }
    let edge = mean_d * (p as f64 - 1.0) / p as f64 * log_e;
    let sampled = f64::from(u8::from(mode_v == InnerMode::Sampled || mode_e == InnerMode::Sampled));
    Ok((vertex - edge, [vertex, edge, sampled]))
}

/// Estimates
/// E log T_0(Σ_σ exp(Σ_{i≤d} U_{p_i,i}(σ; ζ) + h(σ))) − E[d]·E[((p−1)/p) log T_0⟨E_p⟩_x].
///
/// With r = 0 this is the RS functional and T_0 is the identity.
pub fn rsb_r_functional(
    mu: &DiscreteDist<usize>,
    rho: &DiscreteDist<usize>,
    model: &Model,
    params: &RsbParams,
    inner: &InnerConfig,
    cfg: &McConfig,
) -> Result<BoundResult> {
    let params = RsbParams::new(params.m.clone(), params.zeta.clone())?;
    check_laws(mu, rho, model)?;
    let mean_d = mu.mean();
    let moments = mc::run(cfg, |rng| {
        outer_sample(mu, rho, model, &params, inner, mean_d, rng)
    })?;
    let mut res = BoundResult::from_moments(
        &moments,
        cfg,
        moments.part_mean(0),
        moments.part_mean(1),
    );
    res.inner_sampled_fraction = moments.part_mean(2);
    if res.inner_sampled_fraction > 0.0 {
        let budgets = inner.budgets_for(params.r())?;
        res.warnings.push(format!(
            "inner expectations were sampled in {:.1}% of outer draws with budgets {budgets:?}; \
             log of a sampled power mean is biased",
            100.0 * res.inner_sampled_fraction
        ));
        res.inner_budgets = Some(budgets);
    }
    Ok(res)
}

/// RS functional for a level-1 measure ζ.
pub fn rs_functional(
    mu: &DiscreteDist<usize>,
    rho: &DiscreteDist<usize>,
    model: &Model,
    zeta: &DiscreteDist<f64>,
    cfg: &McConfig,
) -> Result<BoundResult> {
    rsb_r_functional(
        mu,
        rho,
        model,
        &RsbParams::rs(zeta.clone()),
        &InnerConfig::default(),
        cfg,
    )
}

/// 1-RSB functional for m ∈ (0, 1) and a level-2 measure ζ^(2).
pub fn rsb1_functional(
    mu: &DiscreteDist<usize>,
    rho: &DiscreteDist<usize>,
    model: &Model,
    m: f64,
    zeta2: &HierMeasure,
    inner: &InnerConfig,
    cfg: &McConfig,
) -> Result<BoundResult> {
    let params = RsbParams::new(vec![m], zeta2.clone())?;
    rsb_r_functional(mu, rho, model, &params, inner, cfg)
}

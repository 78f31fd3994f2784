//! Closed-form RS and 1-RSB bounds for maximum independent sets of random
//! d-regular graphs, obtained from the hard-core functionals in the
//! λ → ∞ limit.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance in α used by [`table1`].
pub const ROOT_TOL: f64 = 1e-9;

/// Grid size for the scan in q before golden-section refinement.
pub const Q_GRID: usize = 2000;

/// Left end of the α bracket.
pub const ALPHA_LO: f64 = 0.1;

/// Previously known upper bounds α_u for d = 3..7.
pub const ALPHA_UPPER_REF: [f64; 5] = [0.45537, 0.41635, 0.38443, 0.35799, 0.33567];

/// Known lower bounds α_ℓ for d = 3..7.
pub const ALPHA_LOWER_REF: [f64; 5] = [0.437575, 0.39213, 0.35930, 0.33296, 0.31068];

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::InvalidParams(format!("degree {d} is below 3")));
    }
    Ok(())
}

/// H(α) − d[(1/2)(1 − 2α) log(1 − 2α) − (1 − α) log(1 − α)].
pub fn phi_rs(d: usize, alpha: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&alpha) {
        return Err(Error::Domain(format!("α = {alpha} is outside [0, 1/2]")));
    }
    let entropy = -xlogx(alpha) - xlogx(1.0 - alpha);
    Ok(entropy - d as f64 * (0.5 * xlogx(1.0 - 2.0 * alpha) - xlogx(1.0 - alpha)))
}

/// Φ(λ, π, α) = log(1 + λ(1 − π)^d) − (d/2) log(1 − π²) − α log λ.
pub fn phi_rs_general(d: usize, lambda: f64, pi: f64, alpha: f64) -> f64 {
    let d_f = d as f64;
    (lambda * (1.0 - pi).powi(d as i32)).ln_1p() - 0.5 * d_f * (-pi * pi).ln_1p() - alpha * lambda.ln()
}

/// The stationary (π, λ) for a given α: π = α/(1 − α), λ = π/(1 − π)^d.
pub fn rs_stationary_point(d: usize, alpha: f64) -> (f64, f64) {
    let pi = alpha / (1.0 - alpha);
    (pi, pi / (1.0 - pi).powi(d as i32))
}

/// First sign change of a function on `[lo, hi]` found by a scan, then
/// bisected to `tol`.
fn first_root(f: impl Fn(f64) -> Result<f64>, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    const SCAN: usize = 400;
    if f(lo)? <= 0.0 {
        return Err(Error::Numeric(format!("no positive value at the bracket start {lo}")));
    }
    let mut a = lo;
    let mut b = None;
    for k in 1..=SCAN {
        let x = lo + (hi - lo) * k as f64 / SCAN as f64;
        if f(x)? < 0.0 {
            b = Some(x);
            break;
        }
        a = x;
    }
    let mut b = b.ok_or_else(|| Error::Numeric(format!("no sign change on [{lo}, {hi}]")))?;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if f(mid)? < 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// inf{α > 0 : Φ_d(α) < 0}.
pub fn alpha_rs(d: usize, tol: f64) -> Result<f64> {
    alpha_rs_bracket(d, ALPHA_LO, 0.5, tol)
}

pub fn alpha_rs_bracket(d: usize, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    check_d(d)?;
    first_root(|a| phi_rs(d, a), lo, hi, tol)
}

/// Φ^(1)(β, q, α) = log(1 + (β − 1)(1 − q)^d) − (d/2) log(1 − q²(1 − 1/β)) − α log β.
pub fn phi_1rsb(d: usize, beta: f64, q: f64, alpha: f64) -> Result<f64> {
    if !(beta >= 1.0) {
        return Err(Error::Domain(format!("β = {beta} is below 1")));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("q = {q} is outside [0, 1]")));
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("α = {alpha} must be positive")));
    }
    Ok(phi_1rsb_unchecked(d, beta, q, alpha))
}

fn phi_1rsb_unchecked(d: usize, beta: f64, q: f64, alpha: f64) -> f64 {
    let d_f = d as f64;
    ((beta - 1.0) * (1.0 - q).powi(d as i32)).ln_1p()
        - 0.5 * d_f * (-q * q * (1.0 - 1.0 / beta)).ln_1p()
        - alpha * beta.ln()
}

/// β = q/(1 − q)^d − q/(1 − q), the β for which q is the optimal choice.
pub fn beta_stationary(d: usize, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q = {q} is outside (0, 1)")));
    }
    Ok(beta_stationary_unchecked(d, q))
}

fn beta_stationary_unchecked(d: usize, q: f64) -> f64 {
    q / (1.0 - q).powi(d as i32) - q / (1.0 - q)
}

/// The q in (0, 1) where β_stationary(q) = 1; the admissible range is
/// q above it.
pub fn q_admissible_min(d: usize) -> Result<f64> {
    check_d(d)?;
    // β_stationary − 1 is negative near 0 and diverges at 1.
    let (mut a, mut b) = (1e-12, 1.0 - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if beta_stationary_unchecked(d, mid) < 1.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Interior minimizer of Φ^(1)(β_stationary(q), q, α) over admissible q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rsb1Point {
    pub d: usize,
    pub alpha: f64,
    pub q: f64,
    pub beta: f64,
    pub value: f64,
}

/// Map t ∈ (0, 1) onto (q0, 1), dense near both ends.
fn q_of(q0: f64, t: f64) -> f64 {
    q0 + (1.0 - q0) * t
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// min over admissible q of Φ^(1)(β_stationary(q), q, α), from a grid of
/// [`Q_GRID`] points refined by golden-section search.
pub fn phi_1rsb_min(d: usize, alpha: f64) -> Result<Rsb1Point> {
    check_d(d)?;
    let q0 = q_admissible_min(d)?;
    let eval = |t: f64| {
        let q = q_of(q0, t);
        let beta = beta_stationary_unchecked(d, q);
        if beta <= 1.0 || !beta.is_finite() {
            return f64::INFINITY;
        }
        phi_1rsb_unchecked(d, beta, q, alpha)
    };
    let h = 1.0 / (Q_GRID + 1) as f64;
    let (k_best, _) = (1..=Q_GRID)
        .map(|k| (k, eval(k as f64 * h)))
        .fold((0, f64::INFINITY), |acc, (k, v)| if v < acc.1 { (k, v) } else { acc });
    if k_best == 0 {
        return Err(Error::Numeric("no finite value on the q grid".into()));
    }
    let lo = (k_best as f64 - 1.0) * h;
    let hi = (k_best as f64 + 1.0) * h;
    let (t, value) = golden_min(eval, lo.max(h * 1e-3), hi.min(1.0 - h * 1e-3), 1e-13);
    let q = q_of(q0, t);
    Ok(Rsb1Point {
        d,
        alpha,
        q,
        beta: beta_stationary_unchecked(d, q),
        value,
    })
}

/// Two-dimensional minimization of Φ^(1)(β, q, α) over q in (0, 1) and
/// log β in (0, 60], without the stationarity substitution.
pub fn phi_1rsb_min_2d(d: usize, alpha: f64) -> Result<Rsb1Point> {
    check_d(d)?;
    const Q_STEPS: usize = 400;
    let beta_at = |q: f64| {
        let (lb, v) = golden_min(
            |lb: f64| phi_1rsb_unchecked(d, lb.exp(), q, alpha),
            1e-9,
            60.0,
            1e-12,
        );
        (lb.exp(), v)
    };
    let (mut best_q, mut best) = (0.0, f64::INFINITY);
    for k in 1..Q_STEPS {
        let q = k as f64 / Q_STEPS as f64;
        let (_, v) = beta_at(q);
        if v < best {
            best = v;
            best_q = q;
        }
    }
    let step = 1.0 / Q_STEPS as f64;
    let (q, value) = golden_min(
        |q| beta_at(q).1,
        (best_q - step).max(1e-9),
        (best_q + step).min(1.0 - 1e-9),
        1e-12,
    );
    Ok(Rsb1Point {
        d,
        alpha,
        q,
        beta: beta_at(q).0,
        value,
    })
}

/// inf{α > 0 : min_q Φ^(1)(β_stationary(q), q, α) < 0}.
pub fn alpha_1rsb(d: usize, tol: f64) -> Result<Rsb1Point> {
    alpha_1rsb_bracket(d, ALPHA_LO, 0.5, tol)
}

pub fn alpha_1rsb_bracket(d: usize, lo: f64, hi: f64, tol: f64) -> Result<Rsb1Point> {
    check_d(d)?;
    let alpha = first_root(|a| Ok(phi_1rsb_min(d, a)?.value), lo, hi, tol)?;
    phi_1rsb_min(d, alpha)
}

/// The same threshold from the ratio form: α^(1) = min over admissible q
/// of g(q)/log β(q), where Φ^(1) = g − α log β.
pub fn alpha_1rsb_ratio(d: usize) -> Result<f64> {
    check_d(d)?;
    let q0 = q_admissible_min(d)?;
    let ratio = |t: f64| {
        let q = q_of(q0, t);
        let beta = beta_stationary_unchecked(d, q);
        if beta <= 1.0 {
            return f64::INFINITY;
        }
        phi_1rsb_unchecked(d, beta, q, 0.0) / beta.ln()
    };
    let h = 1.0 / (Q_GRID + 1) as f64;
    let k = (1..=Q_GRID)
        .min_by(|&a, &b| ratio(a as f64 * h).total_cmp(&ratio(b as f64 * h)))
        .expect("grid is not empty");
    let (_, v) = golden_min(ratio, (k as f64 - 1.0) * h, (k as f64 + 1.0) * h, 1e-13);
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub d: usize,
    pub alpha_rs: f64,
    /// Stationary π = α_RS/(1 − α_RS).
    pub pi_rs: f64,
    pub alpha_1rsb: f64,
    pub q_1rsb: f64,
    pub beta_1rsb: f64,
    pub alpha_u: Option<f64>,
    pub alpha_l: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1 {
    pub tol: f64,
    pub rows: Vec<Table1Row>,
}

impl Table1 {
    /// Aligned text with one column per degree.
    pub fn to_text(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.5}"));
        let mut lines = vec![format!(
            "{:<10}{}",
            "d",
            self.rows.iter().map(|r| format!("{:>10}", r.d)).collect::<String>()
        )];
        let rows: [(&str, Box<dyn Fn(&Table1Row) -> Option<f64>>); 4] = [
            ("alpha_RS", Box::new(|r| Some(r.alpha_rs))),
            ("alpha_1", Box::new(|r| Some(r.alpha_1rsb))),
            ("alpha_u", Box::new(|r| r.alpha_u)),
            ("alpha_l", Box::new(|r| r.alpha_l)),
        ];
        for (name, get) in rows {
            lines.push(format!(
                "{name:<10}{}",
                self.rows.iter().map(|r| format!("{:>10}", fmt(get(r)))).collect::<String>()
            ));
        }
        lines.join("\n")
    }
}

pub fn table1_row(d: usize, tol: f64) -> Result<Table1Row> {
    let alpha_rs = alpha_rs(d, tol)?;
    let one = alpha_1rsb(d, tol)?;
    let reference = |r: &[f64; 5]| (3..=7).contains(&d).then(|| r[d - 3]);
    Ok(Table1Row {
        d,
        alpha_rs,
        pi_rs: rs_stationary_point(d, alpha_rs).0,
        alpha_1rsb: one.alpha,
        q_1rsb: one.q,
        beta_1rsb: one.beta,
        alpha_u: reference(&ALPHA_UPPER_REF),
        alpha_l: reference(&ALPHA_LOWER_REF),
    })
}

/// α_RS and α^(1) for d = 3..10 with the reference bounds for d ≤ 7.
pub fn table1() -> Result<Table1> {
    let rows = (3..=10)
        .into_par_iter()
        .map(|d| table1_row(d, ROOT_TOL))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table1 { tol: ROOT_TOL, rows })
}

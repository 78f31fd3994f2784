//! Diluted spin Hamiltonians of the form
//!
//! ```text
//! −H(σ) = Σ_p Σ_e θ_{p,e}(σ_∂e) + Σ_p Σ_s U_{p,s}(σ_∂s) + Σ_i h_i(σ_i)
//! ```
//!
//! with exp θ_p = a_p (1 + b_p f_{p,1}(σ_1) ⋯ f_{p,p}(σ_p)), the site terms
//! U_p built from the same factors, and exact enumeration of partition
//! functions and Gibbs averages on small graphs.
//!
//! Spins are ±1. A random function f on {−1, +1} is stored as the pair
//! `[f(−1), f(+1)]`. Spin configurations of an N-vertex graph are bitmasks
//! where bit i set means σ_i = +1.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bounds::BoundResult;
use crate::confgraph::{sample_uniform_matching, HyperGraph};
use crate::distributions::{ConfigurationProfile, DiscreteDist};
use crate::error::{Error, Result};
use crate::mc::{self, McConfig};

/// Largest N accepted by the exact enumerators.
pub const MAX_EXACT_N: usize = 24;

/// Default number of moments checked for E[(−b)^n] ≥ 0.
pub const DEFAULT_MOMENT_N_MAX: u32 = 64;

const BLOCK_BITS: usize = 12;

#[inline]
fn spin_index(s: i8) -> usize {
    usize::from(s > 0)
}

/// Spin vector of a configuration bitmask.
pub fn spins_of(mask: u64, n: usize) -> Vec<i8> {
    (0..n)
        .map(|i| if mask >> i & 1 == 1 { 1 } else { -1 })
        .collect()
}

/// One frozen draw (a, b, f_1, …, f_p) of the interaction θ_p.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaDraw {
    pub a: f64,
    pub b: f64,
    pub f: Vec<[f64; 2]>,
}

impl ThetaDraw {
    pub fn p(&self) -> usize {
        self.f.len()
    }

    /// exp θ = a (1 + b Π f_ℓ(σ_ℓ)).
    pub fn weight(&self, spins: &[i8]) -> f64 {
        let prod: f64 = self
            .f
            .iter()
            .zip(spins)
            .map(|(f, &s)| f[spin_index(s)])
            .product();
        self.a * (1.0 + self.b * prod)
    }

    /// Weights for all 2^p endpoint configurations; bit j of the index is
    /// the spin of endpoint j.
    pub fn weight_table(&self) -> Vec<f64> {
        let p = self.p();
        (0..1u64 << p)
            .map(|mask| self.weight(&spins_of(mask, p)))
            .collect()
    }
}

pub fn theta_value(draw: &ThetaDraw, spins: &[i8]) -> Result<f64> {
    if spins.len() != draw.p() {
        return Err(Error::Shape(format!(
            "{}-ary interaction given {} spins",
            draw.p(),
            spins.len()
        )));
    }
    let w = draw.weight(spins);
    if w <= 0.0 {
        return Err(Error::InvalidFamily(format!(
            "exp θ = {w} is not positive at {spins:?}"
        )));
    }
    Ok(w.ln())
}

/// Av_ε f(ε) e^{xε} / ch(x), evaluated without overflow for large |x|.
#[inline]
pub fn field_average(f: [f64; 2], x: f64) -> f64 {
    if x >= 0.0 {
        let t = (-2.0 * x).exp();
        (f[0] * t + f[1]) / (1.0 + t)
    } else {
        let t = (2.0 * x).exp();
        (f[0] + f[1] * t) / (1.0 + t)
    }
}

/// P(ε = +1) under the tilt e^{xε}, i.e. 1 / (1 + e^{−2x}).
#[inline]
pub fn tilt_plus(x: f64) -> f64 {
    field_average([0.0, 1.0], x)
}

/// Inverse of [`tilt_plus`].
pub fn x_from_pi(pi: f64) -> f64 {
    0.5 * (pi / (1.0 - pi)).ln()
}

fn check_cavity_len(draw: &ThetaDraw, x: &[f64], expected: usize) -> Result<()> {
    if x.len() != expected {
        return Err(Error::Shape(format!(
            "{}-ary interaction needs {expected} cavity fields, got {}",
            draw.p(),
            x.len()
        )));
    }
    Ok(())
}

/// exp U_p = ⟨E_p⟩⁻_x(σ) in product form:
/// a (1 + b f_p(σ) Π_{ℓ<p} Av f_ℓ(ε) e^{x_ℓ ε} / ch x_ℓ).
pub fn u_weight(draw: &ThetaDraw, x: &[f64], sigma: i8) -> Result<f64> {
    check_cavity_len(draw, x, draw.p() - 1)?;
    Ok(u_weight_unchecked(draw, x, sigma))
}

#[inline]
fn u_weight_unchecked(draw: &ThetaDraw, x: &[f64], sigma: i8) -> f64 {
    let p = draw.p();
    let prod: f64 = draw.f[..p - 1]
        .iter()
        .zip(x)
        .map(|(&f, &xl)| field_average(f, xl))
        .product();
    draw.a * (1.0 + draw.b * draw.f[p - 1][spin_index(sigma)] * prod)
}

pub fn u_value(draw: &ThetaDraw, x: &[f64], sigma: i8) -> Result<f64> {
    let w = u_weight(draw, x, sigma)?;
    if w <= 0.0 {
        return Err(Error::InvalidFamily(format!("exp U = {w} is not positive")));
    }
    Ok(w.ln())
}

/// ⟨E_p⟩⁻_x(σ) as the defining quotient: a sum over ε ∈ {±1}^{p−1} of
/// exp θ(ε, σ) weighted by e^{Σ x_ℓ ε_ℓ}, divided by the sum of the tilts.
pub fn u_weight_quotient(draw: &ThetaDraw, x: &[f64], sigma: i8) -> Result<f64> {
    check_cavity_len(draw, x, draw.p() - 1)?;
    let m = draw.p() - 1;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut spins = vec![sigma; m + 1];
    for mask in 0..1u64 << m {
        let mut tilt = 0.0;
        for (l, &xl) in x.iter().enumerate() {
            let e: i8 = if mask >> l & 1 == 1 { 1 } else { -1 };
            spins[l] = e;
            tilt += xl * f64::from(e);
        }
        // Shift by Σ|x| keeps every exponent non-positive.
        let shift: f64 = x.iter().map(|v| v.abs()).sum();
        let t = (tilt - shift).exp();
        num += t * draw.weight(&spins);
        den += t;
    }
    Ok(num / den)
}

/// ⟨E_p⟩_x = a (1 + b Π_{ℓ≤p} Av f_ℓ(ε) e^{x_ℓ ε} / ch x_ℓ).
pub fn e_avg(draw: &ThetaDraw, x: &[f64]) -> Result<f64> {
    check_cavity_len(draw, x, draw.p())?;
    Ok(e_avg_unchecked(draw, x))
}

#[inline]
pub(crate) fn e_avg_unchecked(draw: &ThetaDraw, x: &[f64]) -> f64 {
    let prod: f64 = draw
        .f
        .iter()
        .zip(x)
        .map(|(&f, &xl)| field_average(f, xl))
        .product();
    draw.a * (1.0 + draw.b * prod)
}

/// Law of θ_p: independent a_p, b_p and p i.i.d. copies of f_p.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaLaw {
    pub a: DiscreteDist<f64>,
    pub b: DiscreteDist<f64>,
    pub f: DiscreteDist<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarOrDist {
    Scalar(f64),
    Dist(DiscreteDist<f64>),
}

impl From<ScalarOrDist> for DiscreteDist<f64> {
    fn from(v: ScalarOrDist) -> Self {
        match v {
            ScalarOrDist::Scalar(x) => DiscreteDist::dirac(x),
            ScalarOrDist::Dist(d) => d,
        }
    }
}

impl<'de> Deserialize<'de> for ThetaLaw {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            a: ScalarOrDist,
            b: ScalarOrDist,
            f: DiscreteDist<[f64; 2]>,
        }
        let raw = Raw::deserialize(d)?;
        Ok(ThetaLaw {
            a: raw.a.into(),
            b: raw.b.into(),
            f: raw.f,
        })
    }
}

impl ThetaLaw {
    pub fn sample<R: Rng + ?Sized>(&self, p: usize, rng: &mut R) -> ThetaDraw {
        let a = *self.a.sample(rng);
        let b = *self.b.sample(rng);
        let f = (0..p).map(|_| *self.f.sample(rng)).collect();
        ThetaDraw { a, b, f }
    }

    /// Every atom combination (a, b, f_1..f_p) with its probability.
    pub fn enumerate(&self, p: usize) -> Vec<(ThetaDraw, f64)> {
        let mut out = Vec::new();
        for (&a, wa) in self.a.iter() {
            for (&b, wb) in self.b.iter() {
                let mut partial: Vec<(Vec<[f64; 2]>, f64)> = vec![(Vec::new(), wa * wb)];
                for _ in 0..p {
                    partial = partial
                        .into_iter()
                        .flat_map(|(fs, w)| {
                            self.f.iter().map(move |(&f, wf)| {
                                let mut next = fs.clone();
                                next.push(f);
                                (next, w * wf)
                            })
                        })
                        .collect();
                }
                out.extend(
                    partial
                        .into_iter()
                        .filter(|&(_, w)| w > 0.0)
                        .map(|(f, w)| (ThetaDraw { a, b, f }, w)),
                );
            }
        }
        out
    }

    pub fn enumeration_size(&self, p: usize) -> usize {
        self.a.len() * self.b.len() * self.f.len().pow(p as u32)
    }

    /// Smallest and largest value of Π_{ℓ≤p} f_ℓ(σ_ℓ) over atoms and spins.
    fn product_range(&self, p: usize) -> (f64, f64) {
        let values: Vec<f64> = self.f.atoms().iter().flat_map(|a| a.v).collect();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mut pmin, mut pmax) = (1.0f64, 1.0f64);
        for _ in 0..p {
            let c = [pmin * lo, pmin * hi, pmax * lo, pmax * hi];
            pmin = c.iter().copied().fold(f64::INFINITY, f64::min);
            pmax = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        }
        (pmin, pmax)
    }
}

/// The interaction laws θ_p for p ∈ P.
///
/// `hard` admits factors a(1 + bΠf) that vanish (hard constraints, as in
/// the A = ∞ hard-core model). Such families have no finite κ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaFamily {
    pub laws: BTreeMap<usize, ThetaLaw>,
    #[serde(default)]
    pub hard: bool,
}

impl ThetaFamily {
    pub fn law(&self, p: usize) -> Result<&ThetaLaw> {
        self.laws
            .get(&p)
            .ok_or_else(|| Error::InvalidFamily(format!("no interaction law for p = {p}")))
    }

    pub fn sample<R: Rng + ?Sized>(&self, p: usize, rng: &mut R) -> Result<ThetaDraw> {
        Ok(self.law(p)?.sample(p, rng))
    }

    /// Checks the structural conditions on every p and computes κ.
    pub fn validate(&self, field: &ExternalField, moment_n_max: u32) -> Result<FamilyReport> {
        let mut kappa_theta: f64 = 0.0;
        let mut per_p = BTreeMap::new();
        for (&p, law) in &self.laws {
            if p < 2 {
                return Err(Error::InvalidFamily(format!("edge size {p} is below 2")));
            }
            if law.a.atoms().iter().any(|a| !(a.v > 0.0 && a.v.is_finite())) {
                return Err(Error::InvalidFamily(format!("a_{p} must be positive")));
            }
            let (pmin, pmax) = law.product_range(p);
            let bmax = law.b.atoms().iter().map(|a| a.v.abs()).fold(0.0, f64::max);
            let sup = bmax * pmin.abs().max(pmax.abs());
            let mut zero_factor = false;
            let mut lo_g = f64::INFINITY;
            let mut hi_g = f64::NEG_INFINITY;
            for (&b, _) in law.b.iter() {
                for prod in [pmin, pmax] {
                    let inner = 1.0 + b * prod;
                    if inner <= 0.0 {
                        if self.hard && inner > -1e-15 {
                            zero_factor = true;
                            continue;
                        }
                        return Err(Error::InvalidFamily(format!(
                            "1 + b·Πf = {inner} at b = {b}, p = {p}"
                        )));
                    }
                    lo_g = lo_g.min(inner.ln());
                    hi_g = hi_g.max(inner.ln());
                }
            }
            if !self.hard && sup >= 1.0 {
                return Err(Error::InvalidFamily(format!(
                    "sup |b·Πf| = {sup} is not below 1 for p = {p}"
                )));
            }
            for n in 1..=moment_n_max {
                let m = law.b.expect(|&b| (-b).powi(n as i32));
                let scale = law.b.expect(|&b| b.abs().powi(n as i32));
                if m < -1e-12 * scale {
                    return Err(Error::InvalidFamily(format!(
                        "E[(−b_{p})^{n}] = {m} is negative"
                    )));
                }
            }
            let nonneg_f = law.f.atoms().iter().all(|a| a.v[0] >= 0.0 && a.v[1] >= 0.0);
            if p % 2 == 1 && !nonneg_f {
                return Err(Error::InvalidFamily(format!(
                    "p = {p} is odd and f_p takes negative values"
                )));
            }
            let kappa_p = if zero_factor {
                f64::INFINITY
            } else {
                let la = law.a.atoms().iter().map(|a| a.v.ln());
                let (lo_a, hi_a) = la.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
                    (l.min(v), h.max(v))
                });
                (lo_a + lo_g).abs().max((hi_a + hi_g).abs())
            };
            kappa_theta = kappa_theta.max(kappa_p);
            per_p.insert(p, kappa_p);
        }
        let kappa_field = field.sup_abs();
        Ok(FamilyReport {
            kappa: kappa_theta.max(kappa_field),
            kappa_theta,
            kappa_field,
            kappa_per_p: per_p,
            moment_n_max,
            hard: self.hard,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    /// Smallest κ with |θ_p| ≤ κ and |h| ≤ κ; infinite for hard families.
    #[serde(serialize_with = "ser_extended")]
    pub kappa: f64,
    #[serde(serialize_with = "ser_extended")]
    pub kappa_theta: f64,
    pub kappa_field: f64,
    #[serde(serialize_with = "ser_extended_map")]
    pub kappa_per_p: BTreeMap<usize, f64>,
    pub moment_n_max: u32,
    pub hard: bool,
}

fn ser_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

fn ser_extended_map<S: Serializer>(
    m: &BTreeMap<usize, f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        if v.is_finite() {
            map.serialize_entry(k, v)?;
        } else {
            map.serialize_entry(k, "inf")?;
        }
    }
    map.end()
}

/// h(σ) = μσ + ν with independent random μ and ν.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalField {
    pub mu: DiscreteDist<f64>,
    pub nu: DiscreteDist<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldDraw {
    pub mu: f64,
    pub nu: f64,
}

impl FieldDraw {
    #[inline]
    pub fn h(&self, sigma: i8) -> f64 {
        self.mu * f64::from(sigma) + self.nu
    }
}

impl ExternalField {
    pub fn zero() -> Self {
        Self {
            mu: DiscreteDist::dirac(0.0),
            nu: DiscreteDist::dirac(0.0),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldDraw {
        FieldDraw {
            mu: *self.mu.sample(rng),
            nu: *self.nu.sample(rng),
        }
    }

    pub fn enumerate(&self) -> Vec<(FieldDraw, f64)> {
        let mut out = Vec::new();
        for (&mu, wm) in self.mu.iter() {
            for (&nu, wn) in self.nu.iter() {
                if wm * wn > 0.0 {
                    out.push((FieldDraw { mu, nu }, wm * wn));
                }
            }
        }
        out
    }

    pub fn is_deterministic(&self) -> bool {
        self.mu.is_dirac() && self.nu.is_dirac()
    }

    /// sup |h| over atoms and spins.
    pub fn sup_abs(&self) -> f64 {
        self.enumerate()
            .iter()
            .map(|(d, _)| d.h(1).abs().max(d.h(-1).abs()))
            .fold(0.0, f64::max)
    }
}

/// Edge penalty A of the relaxed hard-core model; `Infinite` is the hard
/// constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relaxation {
    Finite(f64),
    Infinite,
}

impl Serialize for Relaxation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Relaxation::Finite(a) => s.serialize_f64(*a),
            Relaxation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Relaxation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(a) if a > 0.0 && a.is_finite() => Ok(Relaxation::Finite(a)),
            Raw::Num(a) => Err(D::Error::custom(format!("A = {a} must be positive"))),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => {
                Ok(Relaxation::Infinite)
            }
            Raw::Text(t) => Err(D::Error::custom(format!("unknown relaxation {t:?}"))),
        }
    }
}

/// Hard-core model with fugacity λ and edge penalty A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardCoreSpec {
    pub lambda: f64,
    #[serde(rename = "A")]
    pub relaxation: Relaxation,
}

impl HardCoreSpec {
    pub fn new(lambda: f64, relaxation: Relaxation) -> Result<Self> {
        if !(lambda > 1.0 && lambda.is_finite()) {
            return Err(Error::InvalidFamily(format!("fugacity {lambda} must exceed 1")));
        }
        Ok(Self { lambda, relaxation })
    }

    pub fn hard(lambda: f64) -> Result<Self> {
        Self::new(lambda, Relaxation::Infinite)
    }

    /// 1 − e^{−A}.
    pub fn penalty(&self) -> f64 {
        match self.relaxation {
            Relaxation::Finite(a) => -(-a).exp_m1(),
            Relaxation::Infinite => 1.0,
        }
    }

    /// a_2 = 1, b_2 = −(1 − e^{−A})/4, f_2(σ) = 1 + σ.
    pub fn family(&self) -> ThetaFamily {
        let law = ThetaLaw {
            a: DiscreteDist::dirac(1.0),
            b: DiscreteDist::dirac(-self.penalty() / 4.0),
            f: DiscreteDist::dirac([0.0, 2.0]),
        };
        ThetaFamily {
            laws: BTreeMap::from([(2, law)]),
            hard: self.relaxation == Relaxation::Infinite,
        }
    }

    /// h(σ) = (log λ / 2)(1 + σ).
    pub fn field(&self) -> ExternalField {
        let half = self.lambda.ln() / 2.0;
        ExternalField {
            mu: DiscreteDist::dirac(half),
            nu: DiscreteDist::dirac(half),
        }
    }

    /// max(log λ, A).
    pub fn kappa(&self) -> f64 {
        match self.relaxation {
            Relaxation::Finite(a) => self.lambda.ln().max(a),
            Relaxation::Infinite => f64::INFINITY,
        }
    }

    pub fn model(&self) -> Model {
        Model {
            family: self.family(),
            field: self.field(),
        }
    }
}

/// Interaction family together with its external field.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub family: ThetaFamily,
    pub field: ExternalField,
}

/// JSON model description: either the hard-core shorthand or explicit
/// per-p laws.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ModelSpec {
    HardCore {
        hardcore: HardCoreSpec,
    },
    Generic {
        theta: BTreeMap<usize, ThetaLaw>,
        #[serde(default = "ExternalField::zero")]
        field: ExternalField,
        #[serde(default)]
        hard: bool,
    },
}

// Hand-written because untagged enums buffer their input, and buffered
// string keys no longer parse as integers.
impl<'de> Deserialize<'de> for ModelSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Short {
            hardcore: HardCoreSpec,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Generic {
            theta: BTreeMap<usize, ThetaLaw>,
            #[serde(default = "ExternalField::zero")]
            field: ExternalField,
            #[serde(default)]
            hard: bool,
        }
        let value = serde_json::Value::deserialize(d)?;
        if value.get("hardcore").is_some() {
            let s: Short = serde_json::from_value(value).map_err(D::Error::custom)?;
            return Ok(ModelSpec::HardCore { hardcore: s.hardcore });
        }
        let g: Generic = serde_json::from_value(value).map_err(D::Error::custom)?;
        Ok(ModelSpec::Generic {
            theta: g.theta,
            field: g.field,
            hard: g.hard,
        })
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<Model> {
        match self {
            ModelSpec::HardCore { hardcore } => {
                Ok(HardCoreSpec::new(hardcore.lambda, hardcore.relaxation)?.model())
            }
            ModelSpec::Generic { theta, field, hard } => Ok(Model {
                family: ThetaFamily {
                    laws: theta.clone(),
                    hard: *hard,
                },
                field: field.clone(),
            }),
        }
    }
}

/// A site's frozen interaction draw, its cavity fields, and the resulting
/// weights exp U(σ) for σ = −1, +1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteDraw {
    pub theta: ThetaDraw,
    pub x: Vec<f64>,
    pub weight: [f64; 2],
}

impl SiteDraw {
    pub fn new(theta: ThetaDraw, x: Vec<f64>) -> Result<Self> {
        let weight = [u_weight(&theta, &x, -1)?, u_weight(&theta, &x, 1)?];
        Ok(Self { theta, x, weight })
    }
}

/// One frozen draw of all edge, site and vertex randomness for a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianRealization {
    pub edges: BTreeMap<usize, Vec<ThetaDraw>>,
    pub sites: BTreeMap<usize, Vec<SiteDraw>>,
    pub fields: Vec<FieldDraw>,
}

impl HamiltonianRealization {
    /// Draws θ for every edge, (θ, x) for every site with x i.i.d. from
    /// `zeta`, and h for every vertex.
    pub fn sample<R: Rng + ?Sized>(
        g: &HyperGraph,
        model: &Model,
        zeta: &DiscreteDist<f64>,
        rng: &mut R,
    ) -> Result<Self> {
        let mut edges = BTreeMap::new();
        for (&p, list) in &g.edges {
            let law = model.family.law(p)?;
            edges.insert(p, list.iter().map(|_| law.sample(p, rng)).collect());
        }
        let mut sites = BTreeMap::new();
        for (&p, list) in &g.sites {
            let law = model.family.law(p)?;
            let mut draws = Vec::with_capacity(list.len());
            for _ in list {
                let theta = law.sample(p, rng);
                let x = (1..p).map(|_| *zeta.sample(rng)).collect();
                draws.push(SiteDraw::new(theta, x)?);
            }
            sites.insert(p, draws);
        }
        let fields = (0..g.n).map(|_| model.field.sample(rng)).collect();
        Ok(Self {
            edges,
            sites,
            fields,
        })
    }

    fn check(&self, g: &HyperGraph) -> Result<()> {
        if self.fields.len() != g.n {
            return Err(Error::Shape(format!(
                "{} vertex fields for {} vertices",
                self.fields.len(),
                g.n
            )));
        }
        for (&p, list) in &g.edges {
            let draws = self.edges.get(&p).map_or(0, Vec::len);
            if draws != list.len() {
                return Err(Error::Shape(format!("{draws} draws for {} {p}-edges", list.len())));
            }
            if self.edges[&p].iter().any(|d| d.p() != p) {
                return Err(Error::Shape(format!("draw arity differs from {p}")));
            }
        }
        for (&p, list) in &g.sites {
            let draws = self.sites.get(&p).map_or(0, Vec::len);
            if draws != list.len() {
                return Err(Error::Shape(format!("{draws} draws for {} {p}-sites", list.len())));
            }
        }
        Ok(())
    }
}

/// A graph and realization flattened into log-weight tables.
#[derive(Debug, Clone)]
pub struct CompiledHamiltonian {
    n: usize,
    /// log of exp(h_i(σ)) Π_{sites at i} exp U(σ); −∞ marks a zero weight.
    vertex_log: Vec<[f64; 2]>,
    edges: Vec<(Vec<usize>, Vec<f64>)>,
}

fn safe_ln(w: f64) -> f64 {
    if w > 0.0 {
        w.ln()
    } else {
        f64::NEG_INFINITY
    }
}

impl CompiledHamiltonian {
    pub fn new(g: &HyperGraph, r: &HamiltonianRealization) -> Result<Self> {
        g.validate()?;
        r.check(g)?;
        let mut vertex_log: Vec<[f64; 2]> =
            r.fields.iter().map(|h| [h.h(-1), h.h(1)]).collect();
        for (&p, list) in &g.sites {
            for (&v, draw) in list.iter().zip(&r.sites[&p]) {
                for s in 0..2 {
                    vertex_log[v][s] += safe_ln(draw.weight[s]);
                }
            }
        }
        let mut edges = Vec::new();
        for (&p, list) in &g.edges {
            for (e, draw) in list.iter().zip(&r.edges[&p]) {
                let table = draw.weight_table().into_iter().map(safe_ln).collect();
                edges.push((e.clone(), table));
            }
        }
        Ok(Self {
            n: g.n,
            vertex_log,
            edges,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// −H(σ) for a configuration bitmask; −∞ if a hard constraint fails.
    #[inline]
    pub fn log_weight(&self, mask: u64) -> f64 {
        let mut total = 0.0;
        for (i, w) in self.vertex_log.iter().enumerate() {
            total += w[(mask >> i & 1) as usize];
        }
        if total == f64::NEG_INFINITY {
            return total;
        }
        for (ends, table) in &self.edges {
            let mut idx = 0;
            for (j, &v) in ends.iter().enumerate() {
                idx |= ((mask >> v & 1) as usize) << j;
            }
            let w = table[idx];
            if w == f64::NEG_INFINITY {
                return w;
            }
            total += w;
        }
        total
    }

    fn check_size(&self) -> Result<()> {
        if self.n > MAX_EXACT_N {
            return Err(Error::Capacity(format!(
                "exact enumeration is limited to N ≤ {MAX_EXACT_N}, got {}",
                self.n
            )));
        }
        Ok(())
    }

    /// log Σ_σ exp(−H(σ)), reduced block by block in a fixed order.
    pub fn log_partition(&self) -> Result<f64> {
        self.check_size()?;
        let total = 1u64 << self.n;
        let block = 1u64 << BLOCK_BITS.min(self.n);
        let blocks = total / block;
        let partial: Vec<(f64, f64)> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let start = b * block;
                let mut max = f64::NEG_INFINITY;
                let mut sum = 0.0;
                for mask in start..start + block {
                    let l = self.log_weight(mask);
                    if l == f64::NEG_INFINITY {
                        continue;
                    }
                    if l > max {
                        sum = sum * (max - l).exp() + 1.0;
                        max = l;
                    } else {
                        sum += (l - max).exp();
                    }
                }
                (max, sum)
            })
            .collect();
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for (m, s) in partial {
            if s == 0.0 {
                continue;
            }
            if m > max {
                sum = sum * (max - m).exp() + s;
                max = m;
            } else {
                sum += s * (m - max).exp();
            }
        }
        if sum == 0.0 {
            return Err(Error::Numeric("every configuration has zero weight".into()));
        }
        Ok(max + sum.ln())
    }

    /// Normalized Gibbs weights of all 2^N configurations.
    pub fn gibbs(&self) -> Result<GibbsTable> {
        let log_z = self.log_partition()?;
        let probs = (0..1u64 << self.n)
            .map(|mask| (self.log_weight(mask) - log_z).exp())
            .collect();
        Ok(GibbsTable {
            n: self.n,
            log_z,
            probs,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Partition {
    pub z: f64,
    pub log_z: f64,
}

/// −H_G(σ). Configurations forbidden by a hard constraint give −∞.
pub fn neg_energy(g: &HyperGraph, r: &HamiltonianRealization, spins: &[i8]) -> Result<f64> {
    if spins.len() != g.n {
        return Err(Error::Shape(format!("{} spins for {} vertices", spins.len(), g.n)));
    }
    if g.n > 64 {
        return Err(Error::Capacity("at most 64 spins per configuration".into()));
    }
    let mask = spins
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0)
        .fold(0u64, |m, (i, _)| m | 1 << i);
    Ok(CompiledHamiltonian::new(g, r)?.log_weight(mask))
}

pub fn partition_exact(g: &HyperGraph, r: &HamiltonianRealization) -> Result<Partition> {
    let log_z = CompiledHamiltonian::new(g, r)?.log_partition()?;
    Ok(Partition {
        z: log_z.exp(),
        log_z,
    })
}

/// The Gibbs measure ⟨·⟩ of a small graph, fully tabulated.
#[derive(Debug, Clone)]
pub struct GibbsTable {
    pub n: usize,
    pub log_z: f64,
    pub probs: Vec<f64>,
}

impl GibbsTable {
    pub fn expect(&self, obs: impl Fn(u64) -> f64) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(mask, &w)| w * obs(mask as u64))
            .sum()
    }

    /// Joint law of the spins at `vertices` (repeats allowed), indexed by
    /// bitmask over positions.
    pub fn marginal(&self, vertices: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; 1 << vertices.len()];
        for (mask, &w) in self.probs.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let mut idx = 0;
            for (j, &v) in vertices.iter().enumerate() {
                idx |= (mask >> v & 1) << j;
            }
            out[idx] += w;
        }
        out
    }
}

/// Σ_σ obs(σ) exp(−H(σ)) / Z.
pub fn gibbs_expect(
    g: &HyperGraph,
    r: &HamiltonianRealization,
    obs: impl Fn(&[i8]) -> f64 + Sync,
) -> Result<f64> {
    let compiled = CompiledHamiltonian::new(g, r)?;
    let log_z = compiled.log_partition()?;
    let n = compiled.n();
    let total = 1u64 << n;
    let block = 1u64 << BLOCK_BITS.min(n);
    let partial: Vec<f64> = (0..total / block)
        .into_par_iter()
        .map(|b| {
            let mut acc = 0.0;
            for mask in b * block..(b + 1) * block {
                let l = compiled.log_weight(mask);
                if l > f64::NEG_INFINITY {
                    acc += (l - log_z).exp() * obs(&spins_of(mask, n));
                }
            }
            acc
        })
        .collect();
    Ok(partial.iter().sum())
}

/// Monte Carlo estimate of F_N = (1/N) E log Z over uniform matchings of
/// `profile` (outer samples) and `n_hams` Hamiltonian draws per graph.
///
/// The standard error is taken over graphs; with a single graph it is zero.
pub fn free_energy_mc(
    profile: &ConfigurationProfile,
    model: &Model,
    zeta: &DiscreteDist<f64>,
    n_hams: usize,
    cfg: &McConfig,
) -> Result<BoundResult> {
    profile.check_feasible()?;
    if n_hams == 0 {
        return Err(Error::InvalidParams("n_hams must be positive".into()));
    }
    let n = profile.n();
    if n > MAX_EXACT_N {
        return Err(Error::Capacity(format!("N = {n} exceeds {MAX_EXACT_N}")));
    }
    let moments = mc::run(cfg, |rng| {
        let g = sample_uniform_matching(profile, rng)?.to_hypergraph();
        let mut acc = 0.0;
        for _ in 0..n_hams {
            let r = HamiltonianRealization::sample(&g, model, zeta, rng)?;
            acc += CompiledHamiltonian::new(&g, &r)?.log_partition()? / n as f64;
        }
        let value = acc / n_hams as f64;
        Ok((value, []))
    })?;
    Ok(BoundResult::from_moments(&moments, cfg, moments.mean(), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::confgraph::graph_law;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hard(lambda: f64) -> HardCoreSpec {
        HardCoreSpec::hard(lambda).unwrap()
    }

    #[test]
    fn model_spec_json() {
        let generic = r#"{"theta": {"2": {"a": 1.0,
            "b": {"atoms":[{"v":-0.4,"w":0.5},{"v":0.4,"w":0.5}]},
            "f": {"atoms":[{"v":[-1.0,1.0],"w":1}]}}},
            "field": {"mu": {"atoms":[{"v":0.2,"w":1}]}, "nu": {"atoms":[{"v":0.0,"w":1}]}}}"#;
        let spec: ModelSpec = serde_json::from_str(generic).unwrap();
        let model = spec.build().unwrap();
        assert_eq!(model.family.law(2).unwrap().b.len(), 2);
        let back: ModelSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);

        let short: ModelSpec = serde_json::from_str(r#"{"hardcore":{"lambda":2.0,"A":"inf"}}"#).unwrap();
        assert!(short.build().unwrap().family.hard);
        let finite: ModelSpec = serde_json::from_str(r#"{"hardcore":{"lambda":2.0,"A":1.5}}"#).unwrap();
        assert!(!finite.build().unwrap().family.hard);
        assert!(serde_json::from_str::<ModelSpec>(r#"{"hardcore":{"lambda":2.0,"A":1},"x":1}"#).is_err());
        assert!(serde_json::from_str::<ModelSpec>(r#"{"theta":{"two":{}}}"#).is_err());
    }

    fn simple_graph(n: usize, edges: &[(usize, usize)]) -> HyperGraph {
        let mut g = HyperGraph::empty(n);
        g.edges.insert(2, edges.iter().map(|&(a, b)| vec![a, b]).collect());
        g
    }

    fn realize(g: &HyperGraph, model: &Model) -> HamiltonianRealization {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        HamiltonianRealization::sample(g, model, &DiscreteDist::dirac(0.0), &mut rng).unwrap()
    }

    fn k4() -> HyperGraph {
        simple_graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    #[test]
    fn theta_examples() {
        let a = 1.7;
        let hc = HardCoreSpec::new(3.0, Relaxation::Finite(a)).unwrap();
        let draw = hc.family().sample(2, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(theta_value(&draw, &[-1, -1]).unwrap(), 0.0);
        assert!((theta_value(&draw, &[1, 1]).unwrap() + a).abs() < 1e-12);
        let flat = ThetaDraw {
            a: 1.0,
            b: 0.0,
            f: vec![[0.3, -2.0]; 3],
        };
        assert_eq!(theta_value(&flat, &[1, -1, 1]).unwrap(), 0.0);
        assert!(theta_value(&flat, &[1, -1]).is_err());

        let hard_draw = hard(2.0).family().sample(2, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(matches!(
            theta_value(&hard_draw, &[1, 1]),
            Err(Error::InvalidFamily(_))
        ));
    }

    #[test]
    fn u_examples() {
        let draw = hard(2.0).family().sample(2, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(u_value(&draw, &[0.37], -1).unwrap(), 0.0);
        assert!((u_value(&draw, &[0.0], 1).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        let flat = ThetaDraw {
            a: 2.5,
            b: 0.0,
            f: vec![[0.3, -2.0]; 3],
        };
        for s in [-1, 1] {
            assert!((u_value(&flat, &[0.4, -3.0], s).unwrap() - 2.5f64.ln()).abs() < 1e-15);
        }
        assert!(u_value(&flat, &[0.4], 1).is_err());
    }

    #[test]
    fn hard_core_site_weight_matches_pi_form() {
        let draw = hard(2.0).family().sample(2, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        for x in [-3.0f64, -0.2, 0.0, 0.9, 4.0] {
            let pi = 1.0 / (1.0 + (-2.0 * x).exp());
            assert!((u_weight(&draw, &[x], 1).unwrap() - (1.0 - pi)).abs() < 1e-14);
            assert!((tilt_plus(x) - pi).abs() < 1e-15);
            assert!((x_from_pi(pi) - x).abs() < 1e-12);
        }
    }

    #[test]
    fn e_avg_examples() {
        let draw = hard(2.0).family().sample(2, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!((e_avg(&draw, &[0.0, 0.0]).unwrap() - 0.75).abs() < 1e-15);
        let flat = ThetaDraw {
            a: 0.8,
            b: 0.0,
            f: vec![[1.0, 1.0]; 2],
        };
        assert_eq!(e_avg(&flat, &[1.0, 2.0]).unwrap(), 0.8);
        let a = 2.3;
        let relaxed = HardCoreSpec::new(2.0, Relaxation::Finite(a))
            .unwrap()
            .family()
            .sample(2, &mut ChaCha8Rng::seed_from_u64(0))
            .unwrap();
        assert!((e_avg(&relaxed, &[20.0, 20.0]).unwrap() - (-a).exp()).abs() < 1e-8);
        assert!(e_avg(&relaxed, &[20.0]).is_err());
    }

    #[test]
    fn hard_core_family_report() {
        let hc = HardCoreSpec::new(5.0, Relaxation::Finite(0.7)).unwrap();
        let report = hc.family().validate(&hc.field(), DEFAULT_MOMENT_N_MAX).unwrap();
        assert!((report.kappa - hc.kappa()).abs() < 1e-12);
        assert!((report.kappa - 5f64.ln()).abs() < 1e-12);
        let hc = HardCoreSpec::new(1.5, Relaxation::Finite(3.0)).unwrap();
        let report = hc.family().validate(&hc.field(), DEFAULT_MOMENT_N_MAX).unwrap();
        assert!((report.kappa - 3.0).abs() < 1e-12);
        let report = hard(2.0).family().validate(&hard(2.0).field(), 8).unwrap();
        assert!(report.kappa.is_infinite());
    }

    #[test]
    fn family_validation_rejects_violations() {
        let field = ExternalField::zero();
        let law = |b: Vec<(f64, f64)>, f: Vec<([f64; 2], f64)>| ThetaLaw {
            a: DiscreteDist::dirac(1.0),
            b: DiscreteDist::from_pairs(b).unwrap(),
            f: DiscreteDist::from_pairs(f).unwrap(),
        };
        // |b Π f| reaches 1.
        let fam = ThetaFamily {
            laws: BTreeMap::from([(2, law(vec![(-0.25, 1.0)], vec![([0.0, 2.0], 1.0)]))]),
            hard: false,
        };
        assert!(fam.validate(&field, 8).is_err());
        // E[−b] < 0.
        let fam = ThetaFamily {
            laws: BTreeMap::from([(2, law(vec![(0.5, 1.0)], vec![([1.0, -1.0], 1.0)]))]),
            hard: false,
        };
        assert!(fam.validate(&field, 8).is_err());
        // Odd p with signed f.
        let fam = ThetaFamily {
            laws: BTreeMap::from([(3, law(vec![(-0.5, 1.0)], vec![([1.0, -1.0], 1.0)]))]),
            hard: false,
        };
        assert!(fam.validate(&field, 8).is_err());
        // p-spin style, even p with signed f: fine.
        let fam = ThetaFamily {
            laws: BTreeMap::from([(
                2,
                law(vec![(-0.5, 0.5), (0.5, 0.5)], vec![([1.0, -1.0], 1.0)]),
            )]),
            hard: false,
        };
        let report = fam.validate(&field, DEFAULT_MOMENT_N_MAX).unwrap();
        assert!((report.kappa - 0.5f64.ln().abs()).abs() < 1e-12);
    }

    #[test]
    fn energy_examples() {
        let model = hard(3.0).model();
        let g = HyperGraph::empty(0);
        let r = realize(&g, &Model { family: model.family.clone(), field: ExternalField::zero() });
        assert_eq!(neg_energy(&g, &r, &[]).unwrap(), 0.0);

        let g = HyperGraph::empty(1);
        let r = realize(&g, &model);
        assert!((neg_energy(&g, &r, &[1]).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert_eq!(neg_energy(&g, &r, &[-1]).unwrap(), 0.0);

        let g = k4();
        let r = realize(&g, &model);
        assert!((neg_energy(&g, &r, &[-1, 1, -1, -1]).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert_eq!(neg_energy(&g, &r, &[1, 1, -1, -1]).unwrap(), f64::NEG_INFINITY);
        assert!(neg_energy(&g, &r, &[1, 1]).is_err());
    }

    #[test]
    fn partition_examples() {
        let lambda = 2.7;
        let model = hard(lambda).model();
        let one = HyperGraph::empty(1);
        let z = partition_exact(&one, &realize(&one, &model)).unwrap();
        assert!((z.z - (1.0 + lambda)).abs() < 1e-12);
        let edge = simple_graph(2, &[(0, 1)]);
        let z = partition_exact(&edge, &realize(&edge, &model)).unwrap();
        assert!((z.z - (1.0 + 2.0 * lambda)).abs() < 1e-12);
        let z = partition_exact(&k4(), &realize(&k4(), &model)).unwrap();
        assert!((z.z - (1.0 + 4.0 * lambda)).abs() < 1e-12);

        let big = HyperGraph::empty(MAX_EXACT_N + 1);
        assert!(matches!(
            partition_exact(&big, &realize(&big, &model)),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn product_form_matches_hard_core_weight() {
        // exp(−H) = λ^{Σ(1+σ)/2} Π_(i,j) (1 − (1 − e^{−A})(1+σ_i)(1+σ_j)/4).
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for relax in [Relaxation::Finite(0.9), Relaxation::Infinite] {
            let hc = HardCoreSpec::new(2.2, relax).unwrap();
            let profile = ConfigurationProfile::new(vec![3, 3, 2, 2, 2, 1, 1, 2], [(2, 8)], []);
            let g = sample_uniform_matching(&profile, &mut rng).unwrap().to_hypergraph();
            let r = realize(&g, &hc.model());
            let c = CompiledHamiltonian::new(&g, &r).unwrap();
            for mask in 0..1u64 << g.n {
                let s = spins_of(mask, g.n);
                let occupied = s.iter().filter(|&&v| v > 0).count() as i32;
                let mut w = hc.lambda.powi(occupied);
                for e in &g.edges[&2] {
                    let (a, b) = (f64::from(s[e[0]]), f64::from(s[e[1]]));
                    w *= 1.0 - hc.penalty() * (1.0 + a) * (1.0 + b) / 4.0;
                }
                let got = c.log_weight(mask).exp();
                assert!((got - w).abs() <= 1e-12 * w.max(1.0), "{got} vs {w}");
            }
        }
    }

    #[test]
    fn partition_is_relabeling_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let hc = HardCoreSpec::new(1.8, Relaxation::Finite(1.3)).unwrap();
        let profile = ConfigurationProfile::new(vec![3; 8], [(2, 12)], []);
        let g = sample_uniform_matching(&profile, &mut rng).unwrap().to_hypergraph();
        let r = realize(&g, &hc.model());
        let base = partition_exact(&g, &r).unwrap().log_z;
        let perm = [3, 7, 0, 5, 1, 6, 2, 4];
        let mut h = g.clone();
        for e in h.edges.get_mut(&2).unwrap() {
            for v in e.iter_mut() {
                *v = perm[*v];
            }
        }
        assert!((partition_exact(&h, &r).unwrap().log_z - base).abs() < 1e-12);
    }

    #[test]
    fn gibbs_examples() {
        let lambda = 4.0;
        let model = hard(lambda).model();
        let one = HyperGraph::empty(1);
        let r = realize(&one, &model);
        assert!((gibbs_expect(&one, &r, |_| 1.0).unwrap() - 1.0).abs() < 1e-15);
        let occ = gibbs_expect(&one, &r, |s| f64::from(1 + s[0]) / 2.0).unwrap();
        assert!((occ - lambda / (1.0 + lambda)).abs() < 1e-15);

        let mut edges = Vec::new();
        for a in 0..3 {
            for b in 3..6 {
                edges.push((a, b));
            }
        }
        let k33 = simple_graph(6, &edges);
        let model = hard(1e3).model();
        let r = realize(&k33, &model);
        let density = gibbs_expect(&k33, &r, |s| {
            s.iter().map(|&v| f64::from(1 + v) / 2.0).sum::<f64>() / 6.0
        })
        .unwrap();
        assert!((density - 0.5).abs() < 1e-2);
    }

    #[test]
    fn free_energy_without_interactions() {
        let lambda = 3.0;
        let model = hard(lambda).model();
        let profile = ConfigurationProfile::new(vec![2, 1, 3], [], []);
        let res = free_energy_mc(&profile, &model, &DiscreteDist::dirac(0.0), 1, &McConfig::new(5, 1))
            .unwrap();
        assert!((res.estimate - (1.0 + lambda).ln()).abs() < 1e-14);
    }

    #[test]
    fn free_energy_matches_exact_average() {
        let lambda = 2.0;
        let model = hard(lambda).model();
        let profile = ConfigurationProfile::new(vec![2; 4], [(2, 4)], []);
        let zeta = DiscreteDist::dirac(0.0);
        let mut exact = 0.0;
        for (g, w) in graph_law(&profile).unwrap() {
            let r = realize(&g, &model);
            exact += w * partition_exact(&g, &r).unwrap().log_z / 4.0;
        }
        let res = free_energy_mc(&profile, &model, &zeta, 1, &McConfig::new(20_000, 3)).unwrap();
        assert!((res.estimate - exact).abs() < 3.0 * res.std_error, "{res:?} vs {exact}");
    }

    #[test]
    fn unit_fugacity_counts_independent_sets() {
        let g = simple_graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        let model = Model {
            family: hard(2.0).family(),
            field: ExternalField::zero(),
        };
        // Independent sets of the 5-path: Fibonacci F(7) = 13.
        let z = partition_exact(&g, &realize(&g, &model)).unwrap();
        assert!((z.z - 13.0).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn draw_strategy(p: usize) -> impl Strategy<Value = (ThetaDraw, Vec<f64>)> {
            (
                0.1f64..3.0,
                -0.9f64..0.9,
                proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), p),
                proptest::collection::vec(-6.0f64..6.0, p),
            )
                .prop_map(|(a, b, f, x)| {
                    (
                        ThetaDraw {
                            a,
                            b,
                            f: f.into_iter().map(|(u, v)| [u, v]).collect(),
                        },
                        x,
                    )
                })
        }

        proptest! {
            #[test]
            fn product_and_quotient_forms_agree(
                (draw, x) in (2usize..6).prop_flat_map(draw_strategy),
                sigma in prop_oneof![Just(-1i8), Just(1i8)],
            ) {
                let p = draw.p();
                let prod = u_weight(&draw, &x[..p - 1], sigma).unwrap();
                let quot = u_weight_quotient(&draw, &x[..p - 1], sigma).unwrap();
                prop_assert!((prod - quot).abs() < 1e-12);
            }

            #[test]
            fn u_is_bounded_by_kappa(
                (draw, x) in prop_oneof![Just(2usize), Just(4usize)].prop_flat_map(draw_strategy),
            ) {
                let draw = ThetaDraw { b: -draw.b.abs(), ..draw };
                let p = draw.p();
                let law = ThetaLaw {
                    a: DiscreteDist::dirac(draw.a),
                    b: DiscreteDist::dirac(draw.b),
                    f: DiscreteDist::uniform(draw.f.clone()).unwrap(),
                };
                let fam = ThetaFamily { laws: BTreeMap::from([(p, law)]), hard: false };
                let report = fam.validate(&ExternalField::zero(), 0).unwrap();
                for s in [-1, 1] {
                    let u = u_value(&draw, &x[..p - 1], s).unwrap();
                    prop_assert!(u.abs() <= report.kappa + 1e-12);
                }
                let e = e_avg(&draw, &x).unwrap().ln();
                prop_assert!(e.abs() <= report.kappa + 1e-12);
            }
        }
    }
}

//! Finite probability laws: degree and edge-size laws, field distributions,
//! and the nested distributions-over-distributions used by the RSB bounds.

use std::collections::BTreeMap;

use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Weights must sum to one within this tolerance; nothing is renormalized.
pub const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom<T> {
    pub v: T,
    pub w: f64,
}

/// A probability law with finitely many weighted atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDist<T> {
    atoms: Vec<Atom<T>>,
    cumulative: Vec<f64>,
}

impl<T> DiscreteDist<T> {
    pub fn new(atoms: Vec<Atom<T>>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("atom list is empty".into()));
        }
        let mut total = 0.0;
        let mut cumulative = Vec::with_capacity(atoms.len());
        for (k, atom) in atoms.iter().enumerate() {
            if !atom.w.is_finite() || atom.w < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "atom {k} has weight {}",
                    atom.w
                )));
            }
            total += atom.w;
            cumulative.push(total);
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { atoms, cumulative })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (T, f64)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(v, w)| Atom { v, w }).collect())
    }

    pub fn dirac(v: T) -> Self {
        Self {
            atoms: vec![Atom { v, w: 1.0 }],
            cumulative: vec![1.0],
        }
    }

    /// Equal weights over `values`.
    pub fn uniform(values: Vec<T>) -> Result<Self> {
        let n = values.len() as f64;
        Self::from_pairs(values.into_iter().map(|v| (v, 1.0 / n)))
    }

    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_dirac(&self) -> bool {
        self.atoms.iter().filter(|a| a.w > 0.0).count() == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, f64)> {
        self.atoms.iter().map(|a| (&a.v, a.w))
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.atoms.len() == 1 {
            return 0;
        }
        let total = *self.cumulative.last().unwrap();
        let u = rng.gen::<f64>() * total;
        let k = self.cumulative.partition_point(|&c| c <= u);
        // Guard against rounding at the top and zero-weight tails.
        let mut k = k.min(self.atoms.len() - 1);
        while self.atoms[k].w == 0.0 && k > 0 {
            k -= 1;
        }
        k
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &T {
        &self.atoms[self.sample_index(rng)].v
    }

    pub fn expect(&self, f: impl Fn(&T) -> f64) -> f64 {
        self.atoms.iter().map(|a| a.w * f(&a.v)).sum()
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> DiscreteDist<U> {
        DiscreteDist {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { v: f(&a.v), w: a.w })
                .collect(),
            cumulative: self.cumulative.clone(),
        }
    }
}

impl DiscreteDist<f64> {
    pub fn mean(&self) -> f64 {
        self.expect(|&v| v)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expect(|&v| (v - m) * (v - m))
    }
}

impl DiscreteDist<usize> {
    pub fn mean(&self) -> f64 {
        self.expect(|&v| v as f64)
    }

    pub fn second_moment(&self) -> f64 {
        self.expect(|&v| (v * v) as f64)
    }

    pub fn max_value(&self) -> usize {
        self.atoms.iter().map(|a| a.v).max().unwrap_or(0)
    }
}

#[derive(Deserialize)]
#[serde(bound = "T: DeserializeOwned")]
struct RawDist<T> {
    atoms: Vec<Atom<T>>,
}

#[derive(Serialize)]
struct RawDistRef<'a, T> {
    atoms: &'a [Atom<T>],
}

impl<T: Serialize> Serialize for DiscreteDist<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawDistRef { atoms: &self.atoms }.serialize(s)
    }
}

impl<'de, T: DeserializeOwned> Deserialize<'de> for DiscreteDist<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawDist::<T>::deserialize(d)?;
        DiscreteDist::new(raw.atoms).map_err(serde::de::Error::custom)
    }
}

/// The size-biased law ρ(p) = p ν(p) / Σ_q q ν(q).
pub fn size_biased(nu: &DiscreteDist<usize>) -> Result<DiscreteDist<usize>> {
    let mean = nu.mean();
    if mean <= 0.0 {
        return Err(Error::InvalidDistribution(
            "size-biasing needs a positive mean".into(),
        ));
    }
    let atoms: Vec<_> = nu
        .iter()
        .map(|(&p, w)| Atom {
            v: p,
            w: p as f64 * w / mean,
        })
        .collect();
    // Summation order can leave the total a few ulps away from one.
    let total: f64 = atoms.iter().map(|a| a.w).sum();
    DiscreteDist::new(
        atoms
            .into_iter()
            .map(|a| Atom { v: a.v, w: a.w / total })
            .collect(),
    )
}

/// An element of L_ℓ: a law on reals (level 1) or a law on level-(ℓ−1)
/// measures.
#[derive(Debug, Clone, PartialEq)]
pub enum HierMeasure {
    Leaf(DiscreteDist<f64>),
    Node {
        level: usize,
        dist: DiscreteDist<HierMeasure>,
    },
}

impl HierMeasure {
    pub fn leaf(dist: DiscreteDist<f64>) -> Self {
        HierMeasure::Leaf(dist)
    }

    pub fn node(dist: DiscreteDist<HierMeasure>) -> Result<Self> {
        let level = dist.atoms()[0].v.level() + 1;
        for atom in dist.atoms() {
            if atom.v.level() + 1 != level {
                return Err(Error::InvalidDistribution(format!(
                    "level-{level} measure holds an atom of level {}",
                    atom.v.level()
                )));
            }
        }
        Ok(HierMeasure::Node { level, dist })
    }

    /// Wraps a measure in Dirac masses until it reaches `level`.
    pub fn lift_dirac(self, level: usize) -> Self {
        let mut m = self;
        while m.level() < level {
            let l = m.level() + 1;
            m = HierMeasure::Node {
                level: l,
                dist: DiscreteDist::dirac(m),
            };
        }
        m
    }

    pub fn level(&self) -> usize {
        match self {
            HierMeasure::Leaf(_) => 1,
            HierMeasure::Node { level, .. } => *level,
        }
    }

    /// Draws the next measure down the chain. Level-1 measures have no
    /// children.
    pub fn sample_child<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<&HierMeasure> {
        match self {
            HierMeasure::Leaf(_) => None,
            HierMeasure::Node { dist, .. } => Some(dist.sample(rng)),
        }
    }

    /// The law of the terminal real value once every level is integrated
    /// out.
    pub fn flatten(&self) -> DiscreteDist<f64> {
        match self {
            HierMeasure::Leaf(d) => d.clone(),
            HierMeasure::Node { dist, .. } => {
                let mut merged: Vec<Atom<f64>> = Vec::new();
                for (child, w) in dist.iter() {
                    for (&x, wx) in child.flatten().iter() {
                        merged.push(Atom { v: x, w: w * wx });
                    }
                }
                let total: f64 = merged.iter().map(|a| a.w).sum();
                for a in &mut merged {
                    a.w /= total;
                }
                DiscreteDist::new(merged).expect("mixture of valid laws")
            }
        }
    }

    pub fn is_all_dirac(&self) -> bool {
        match self {
            HierMeasure::Leaf(d) => d.is_dirac(),
            HierMeasure::Node { dist, .. } => {
                dist.is_dirac() && dist.atoms().iter().all(|a| a.w == 0.0 || a.v.is_all_dirac())
            }
        }
    }
}

/// Chain drawn by [`sample_hier`]: `chain[0]` is ζ^(r), the last entry is
/// ζ^(1), and `x` is the terminal real.
#[derive(Debug, Clone)]
pub struct HierDraw<'a> {
    pub chain: Vec<&'a HierMeasure>,
    pub x: f64,
}

pub fn sample_hier<'a, R: Rng + ?Sized>(zeta: &'a HierMeasure, rng: &mut R) -> HierDraw<'a> {
    let mut chain = Vec::with_capacity(zeta.level() - 1);
    let mut current = zeta;
    while let Some(child) = current.sample_child(rng) {
        chain.push(child);
        current = child;
    }
    let x = match current {
        HierMeasure::Leaf(d) => *d.sample(rng),
        HierMeasure::Node { .. } => unreachable!("descent stops at a leaf"),
    };
    HierDraw { chain, x }
}

#[derive(Serialize, Deserialize)]
struct HierRepr {
    level: usize,
    dist: serde_json::Value,
}

impl Serialize for HierMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let dist = match self {
            HierMeasure::Leaf(d) => serde_json::to_value(d),
            HierMeasure::Node { dist, .. } => serde_json::to_value(dist),
        }
        .map_err(serde::ser::Error::custom)?;
        HierRepr {
            level: self.level(),
            dist,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HierMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = HierRepr::deserialize(d)?;
        match repr.level {
            0 => Err(D::Error::custom("hierarchical level must be at least 1")),
            1 => serde_json::from_value::<DiscreteDist<f64>>(repr.dist)
                .map(HierMeasure::Leaf)
                .map_err(D::Error::custom),
            level => {
                let dist = serde_json::from_value::<DiscreteDist<HierMeasure>>(repr.dist)
                    .map_err(D::Error::custom)?;
                let m = HierMeasure::node(dist).map_err(D::Error::custom)?;
                if m.level() != level {
                    return Err(D::Error::custom(format!(
                        "declared level {level} but nested depth gives {}",
                        m.level()
                    )));
                }
                Ok(m)
            }
        }
    }
}

/// Degree sequence plus p-edge and p-site counts.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfigurationProfile {
    pub degrees: Vec<usize>,
    #[serde(default)]
    pub edges: BTreeMap<usize, usize>,
    #[serde(default)]
    pub sites: BTreeMap<usize, usize>,
}

impl ConfigurationProfile {
    pub fn new(
        degrees: Vec<usize>,
        edges: impl IntoIterator<Item = (usize, usize)>,
        sites: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        Self {
            degrees,
            edges: edges.into_iter().filter(|&(_, n)| n > 0).collect(),
            sites: sites.into_iter().filter(|&(_, n)| n > 0).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn stub_supply(&self) -> usize {
        self.degrees.iter().sum()
    }

    /// Σ_p (p E_p + S_p).
    pub fn stub_demand(&self) -> usize {
        self.edge_stubs() + self.sites.values().sum::<usize>()
    }

    pub fn edge_stubs(&self) -> usize {
        self.edges.iter().map(|(p, e)| p * e).sum()
    }

    pub fn edge_count(&self, p: usize) -> usize {
        self.edges.get(&p).copied().unwrap_or(0)
    }

    pub fn site_count(&self, p: usize) -> usize {
        self.sites.get(&p).copied().unwrap_or(0)
    }

    pub fn with_edge_delta(&self, p: usize, delta: isize) -> Self {
        let mut out = self.clone();
        bump(&mut out.edges, p, delta);
        out
    }

    pub fn with_site_delta(&self, p: usize, delta: isize) -> Self {
        let mut out = self.clone();
        bump(&mut out.sites, p, delta);
        out
    }

    pub fn check_kinds(&self) -> Result<()> {
        if let Some(p) = self.edges.keys().chain(self.sites.keys()).find(|&&p| p < 2) {
            return Err(Error::InvalidProfile(format!(
                "edge size {p} is below 2"
            )));
        }
        Ok(())
    }

    pub fn check_feasible(&self) -> Result<()> {
        self.check_kinds()?;
        if self.stub_demand() > self.stub_supply() {
            return Err(Error::Capacity(format!(
                "{} edge/site stubs but only {} vertex stubs",
                self.stub_demand(),
                self.stub_supply()
            )));
        }
        Ok(())
    }
}

fn bump(map: &mut BTreeMap<usize, usize>, p: usize, delta: isize) {
    let entry = map.entry(p).or_insert(0);
    *entry = (*entry as isize + delta).max(0) as usize;
    if *entry == 0 {
        map.remove(&p);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileDiagnostics {
    pub closed: bool,
    pub valid: bool,
    pub stub_supply: usize,
    pub stub_demand: usize,
    pub message: String,
    /// Empirical degree law μ_N.
    pub degree_law: Option<DiscreteDist<usize>>,
    /// Empirical edge-size law ν_N.
    pub edge_law: Option<DiscreteDist<usize>>,
    /// Size-biased edge-size law ρ_N.
    pub size_biased_law: Option<DiscreteDist<usize>>,
    /// (1/N) Σ d_i².
    pub degree_second_moment: f64,
}

fn empirical(counts: &BTreeMap<usize, usize>) -> Option<DiscreteDist<usize>> {
    let total: usize = counts.values().sum();
    if total == 0 {
        return None;
    }
    DiscreteDist::from_pairs(
        counts
            .iter()
            .filter(|&(_, &c)| c > 0)
            .map(|(&k, &c)| (k, c as f64 / total as f64)),
    )
    .ok()
}

/// Checks stub balance (closed mode: Σd = ΣpE_p; matching mode:
/// Σ(pE_p + S_p) ≤ Σd) and reports the empirical laws.
pub fn validate_profile(profile: &ConfigurationProfile, closed: bool) -> ProfileDiagnostics {
    let supply = profile.stub_supply();
    let demand = profile.stub_demand();
    let kinds_ok = profile.check_kinds().is_ok();
    let (valid, message) = if !kinds_ok {
        (false, "edge sizes must be at least 2".to_string())
    } else if closed {
        let edge_stubs = profile.edge_stubs();
        if !profile.sites.is_empty() {
            (false, "closed model has no sites".to_string())
        } else if edge_stubs == supply {
            (true, format!("{supply} = {edge_stubs}"))
        } else {
            (false, format!("{supply} != {edge_stubs}"))
        }
    } else if demand <= supply {
        (true, format!("{demand} <= {supply}"))
    } else {
        (false, format!("{demand} > {supply}"))
    };

    let mut degree_counts = BTreeMap::new();
    for &d in &profile.degrees {
        *degree_counts.entry(d).or_insert(0) += 1;
    }
    let edge_law = empirical(&profile.edges);
    let size_biased_law = edge_law.as_ref().and_then(|nu| size_biased(nu).ok());
    let n = profile.degrees.len().max(1) as f64;
    ProfileDiagnostics {
        closed,
        valid,
        stub_supply: supply,
        stub_demand: demand,
        message,
        degree_law: empirical(&degree_counts),
        edge_law,
        size_biased_law,
        degree_second_moment: profile.degrees.iter().map(|&d| (d * d) as f64).sum::<f64>() / n,
    }
}

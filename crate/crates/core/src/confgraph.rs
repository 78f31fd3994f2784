//! Half-edge matchings of the configuration model with sites.
//!
//! Vertex `i` owns stubs `(i, 0..d_i)`. Each p-edge owns `p` stubs and each
//! site owns one; a complete matching pairs every edge/site stub with a
//! distinct vertex stub, leaving some vertex stubs free. All indices are
//! zero-based internally; the JSON form of [`HyperGraph`] is one-based.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::distributions::ConfigurationProfile;
use crate::error::{Error, Result};

/// Largest |H| accepted by [`enumerate_matchings`].
pub const ENUMERATION_STUB_CAP: usize = 12;

/// Largest number of vertex assignments visited by [`graph_law`].
pub const GRAPH_LAW_CAP: u64 = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexStub {
    pub vertex: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HalfEdge {
    Vertex { vertex: usize, slot: usize },
    Edge { p: usize, index: usize, pos: usize },
    Site { p: usize, index: usize },
}

/// The half-edges of I ∪ J in canonical order: edges by (p, ℓ, j), then
/// sites by (p, ℓ).
pub fn edge_and_site_stubs(profile: &ConfigurationProfile) -> Vec<HalfEdge> {
    let mut out = Vec::with_capacity(profile.stub_demand());
    for (&p, &count) in &profile.edges {
        for index in 0..count {
            for pos in 0..p {
                out.push(HalfEdge::Edge { p, index, pos });
            }
        }
    }
    for (&p, &count) in &profile.sites {
        for index in 0..count {
            out.push(HalfEdge::Site { p, index });
        }
    }
    out
}

pub fn vertex_stubs(profile: &ConfigurationProfile) -> Vec<VertexStub> {
    profile
        .degrees
        .iter()
        .enumerate()
        .flat_map(|(vertex, &d)| (0..d).map(move |slot| VertexStub { vertex, slot }))
        .collect()
}

#[derive(Debug, Clone)]
pub struct Matching {
    profile: ConfigurationProfile,
    edges: BTreeMap<usize, Vec<Vec<VertexStub>>>,
    sites: BTreeMap<usize, Vec<VertexStub>>,
    free: Vec<VertexStub>,
}

impl PartialEq for Matching {
    fn eq(&self, other: &Self) -> bool {
        self.profile == other.profile && self.edges == other.edges && self.sites == other.sites
    }
}

impl Eq for Matching {}

impl Matching {
    /// The matching with no edges or sites.
    pub fn empty(degrees: Vec<usize>) -> Self {
        let profile = ConfigurationProfile::new(degrees, [], []);
        let free = vertex_stubs(&profile);
        Self {
            profile,
            edges: BTreeMap::new(),
            sites: BTreeMap::new(),
            free,
        }
    }

    pub fn profile(&self) -> &ConfigurationProfile {
        &self.profile
    }

    pub fn edges(&self) -> &BTreeMap<usize, Vec<Vec<VertexStub>>> {
        &self.edges
    }

    pub fn sites(&self) -> &BTreeMap<usize, Vec<VertexStub>> {
        &self.sites
    }

    pub fn free_stub_count(&self) -> usize {
        self.free.len()
    }

    /// The vertex stub paired with `stub`, if `stub` is an edge or site
    /// half-edge of this matching.
    pub fn partner(&self, stub: HalfEdge) -> Option<VertexStub> {
        match stub {
            HalfEdge::Edge { p, index, pos } => {
                self.edges.get(&p)?.get(index)?.get(pos).copied()
            }
            HalfEdge::Site { p, index } => self.sites.get(&p)?.get(index).copied(),
            HalfEdge::Vertex { .. } => None,
        }
    }

    fn take_free<R: Rng + ?Sized>(&mut self, rng: &mut R) -> VertexStub {
        let k = rng.gen_range(0..self.free.len());
        self.free.swap_remove(k)
    }

    fn add_site(&mut self, p: usize, stub: VertexStub) {
        self.sites.entry(p).or_default().push(stub);
        *self.profile.sites.entry(p).or_insert(0) += 1;
    }

    fn add_edge(&mut self, p: usize, stubs: Vec<VertexStub>) {
        self.edges.entry(p).or_default().push(stubs);
        *self.profile.edges.entry(p).or_insert(0) += 1;
    }

    fn remove_free(&mut self, stub: VertexStub) {
        let k = self
            .free
            .iter()
            .position(|&s| s == stub)
            .expect("stub is free");
        self.free.swap_remove(k);
    }

    /// Builds a matching from an explicit assignment, in the order of
    /// [`edge_and_site_stubs`].
    pub fn from_assignment(
        profile: &ConfigurationProfile,
        assignment: &[VertexStub],
    ) -> Result<Self> {
        let stubs = edge_and_site_stubs(profile);
        if stubs.len() != assignment.len() {
            return Err(Error::Shape(format!(
                "{} stubs but {} assigned vertex stubs",
                stubs.len(),
                assignment.len()
            )));
        }
        let mut m = Matching::empty(profile.degrees.clone());
        let mut pending: Vec<VertexStub> = Vec::new();
        for (stub, &target) in stubs.iter().zip(assignment) {
            if target.vertex >= profile.n() || target.slot >= profile.degrees[target.vertex] {
                return Err(Error::Shape(format!("no vertex stub {target:?}")));
            }
            if !m.free.contains(&target) {
                return Err(Error::InvalidProfile(format!(
                    "vertex stub {target:?} used twice"
                )));
            }
            m.remove_free(target);
            match *stub {
                HalfEdge::Edge { p, pos, .. } => {
                    pending.push(target);
                    if pos + 1 == p {
                        m.add_edge(p, std::mem::take(&mut pending));
                    }
                }
                HalfEdge::Site { p, .. } => m.add_site(p, target),
                HalfEdge::Vertex { .. } => unreachable!(),
            }
        }
        Ok(m)
    }

    pub fn to_hypergraph(&self) -> HyperGraph {
        HyperGraph {
            n: self.profile.n(),
            edges: self
                .edges
                .iter()
                .map(|(&p, list)| {
                    (p, list.iter().map(|e| e.iter().map(|s| s.vertex).collect()).collect())
                })
                .collect(),
            sites: self
                .sites
                .iter()
                .map(|(&p, list)| (p, list.iter().map(|s| s.vertex).collect()))
                .collect(),
        }
    }
}

/// Matches each stub of I ∪ J, in turn, to a uniformly chosen free vertex
/// stub. The result is uniform over complete matchings.
pub fn sample_uniform_matching<R: Rng + ?Sized>(
    profile: &ConfigurationProfile,
    rng: &mut R,
) -> Result<Matching> {
    profile.check_feasible()?;
    let mut m = Matching::empty(profile.degrees.clone());
    for (&p, &count) in &profile.edges {
        for _ in 0..count {
            let stubs = (0..p).map(|_| m.take_free(rng)).collect();
            m.add_edge(p, stubs);
        }
    }
    for (&p, &count) in &profile.sites {
        for _ in 0..count {
            let stub = m.take_free(rng);
            m.add_site(p, stub);
        }
    }
    Ok(m)
}

/// Every complete matching, each once, with stub labels distinguished.
pub fn enumerate_matchings(profile: &ConfigurationProfile) -> Result<Vec<Matching>> {
    profile.check_feasible()?;
    let supply = profile.stub_supply();
    if supply > ENUMERATION_STUB_CAP {
        return Err(Error::Capacity(format!(
            "|H| = {supply} exceeds the enumeration cap {ENUMERATION_STUB_CAP}"
        )));
    }
    let all = vertex_stubs(profile);
    let needed = profile.stub_demand();
    let mut used = vec![false; all.len()];
    let mut current = Vec::with_capacity(needed);
    let mut out = Vec::new();
    fn rec(
        all: &[VertexStub],
        used: &mut [bool],
        current: &mut Vec<VertexStub>,
        needed: usize,
        profile: &ConfigurationProfile,
        out: &mut Vec<Matching>,
    ) {
        if current.len() == needed {
            out.push(Matching::from_assignment(profile, current).expect("valid assignment"));
            return;
        }
        for k in 0..all.len() {
            if !used[k] {
                used[k] = true;
                current.push(all[k]);
                rec(all, used, current, needed, profile, out);
                current.pop();
                used[k] = false;
            }
        }
    }
    rec(&all, &mut used, &mut current, needed, profile, &mut out);
    Ok(out)
}

/// |M| = |H|! / (|H| − |I ∪ J|)!.
pub fn matching_count(profile: &ConfigurationProfile) -> f64 {
    let supply = profile.stub_supply();
    let demand = profile.stub_demand();
    if demand > supply {
        return 0.0;
    }
    ((supply - demand + 1)..=supply).map(|k| k as f64).product()
}

fn capacity_error(m: &Matching, need: usize) -> Error {
    Error::Capacity(format!(
        "{need} free vertex stubs needed, {} available",
        m.free.len()
    ))
}

/// Adds one p-site on a uniformly chosen free vertex stub.
pub fn p_site_pairing<R: Rng + ?Sized>(m: &Matching, p: usize, rng: &mut R) -> Result<Matching> {
    if m.free.is_empty() {
        return Err(capacity_error(m, 1));
    }
    let mut out = m.clone();
    let stub = out.take_free(rng);
    out.add_site(p, stub);
    Ok(out)
}

/// Adds one p-edge on p distinct free vertex stubs drawn without
/// replacement; the j-th draw becomes the edge's j-th endpoint.
pub fn p_edge_pairing<R: Rng + ?Sized>(m: &Matching, p: usize, rng: &mut R) -> Result<Matching> {
    if m.free.len() < p {
        return Err(capacity_error(m, p));
    }
    let mut out = m.clone();
    let stubs = (0..p).map(|_| out.take_free(rng)).collect();
    out.add_edge(p, stubs);
    Ok(out)
}

/// Per-vertex free stub counts c_i and their total χ.
pub fn free_counts(m: &Matching) -> (Vec<usize>, usize) {
    let mut c = vec![0; m.profile.n()];
    for s in &m.free {
        c[s.vertex] += 1;
    }
    let chi = m.free.len();
    (c, chi)
}

/// The hypergraph G[m]: labeled p-edges as vertex tuples and labeled
/// p-sites as single vertices, with multiset semantics.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HyperGraph {
    pub n: usize,
    pub edges: BTreeMap<usize, Vec<Vec<usize>>>,
    pub sites: BTreeMap<usize, Vec<usize>>,
}

impl HyperGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (&p, list) in &self.edges {
            for e in list {
                if e.len() != p {
                    return Err(Error::Shape(format!(
                        "{p}-edge with {} endpoints",
                        e.len()
                    )));
                }
                if e.iter().any(|&v| v >= self.n) {
                    return Err(Error::Shape(format!("edge {e:?} leaves [0, {})", self.n)));
                }
            }
        }
        if self.sites.values().flatten().any(|&v| v >= self.n) {
            return Err(Error::Shape("site vertex out of range".into()));
        }
        Ok(())
    }

    /// Number of edge and site endpoints at each vertex.
    pub fn used_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &v in self.edges.values().flatten().flatten() {
            deg[v] += 1;
        }
        for &v in self.sites.values().flatten() {
            deg[v] += 1;
        }
        deg
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().map(Vec::len).sum()
    }

    pub fn site_count(&self) -> usize {
        self.sites.values().map(Vec::len).sum()
    }
}

#[derive(Serialize, Deserialize)]
struct HyperGraphWire {
    n: usize,
    #[serde(default)]
    edges: BTreeMap<usize, Vec<Vec<usize>>>,
    #[serde(default)]
    sites: BTreeMap<usize, Vec<usize>>,
}

impl Serialize for HyperGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HyperGraphWire {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|(&p, l)| (p, l.iter().map(|e| e.iter().map(|v| v + 1).collect()).collect()))
                .collect(),
            sites: self
                .sites
                .iter()
                .map(|(&p, l)| (p, l.iter().map(|v| v + 1).collect()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HyperGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = HyperGraphWire::deserialize(d)?;
        let shift = |v: usize| {
            v.checked_sub(1)
                .ok_or_else(|| D::Error::custom("vertices are 1-based"))
        };
        let mut g = HyperGraph::empty(wire.n);
        for (p, list) in wire.edges {
            let mut out = Vec::with_capacity(list.len());
            for e in list {
                out.push(e.into_iter().map(shift).collect::<std::result::Result<Vec<_>, _>>()?);
            }
            g.edges.insert(p, out);
        }
        for (p, list) in wire.sites {
            g.sites
                .insert(p, list.into_iter().map(shift).collect::<std::result::Result<_, _>>()?);
        }
        g.validate().map_err(D::Error::custom)?;
        Ok(g)
    }
}

/// The exact law of G[m] for m uniform on complete matchings.
///
/// Walks vertex assignments of the I ∪ J stubs; an assignment placing n_i
/// stubs on vertex i arises from d_i (d_i − 1) … (d_i − n_i + 1) matchings.
/// Returned probabilities sum to one.
pub fn graph_law(profile: &ConfigurationProfile) -> Result<Vec<(HyperGraph, f64)>> {
    profile.check_feasible()?;
    let stubs = edge_and_site_stubs(profile);
    let n = profile.n();
    let total = matching_count(profile);
    let mut visits: u64 = 0;
    let mut load = vec![0usize; n];
    let mut assignment = Vec::with_capacity(stubs.len());
    let mut out = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        stubs: &[HalfEdge],
        degrees: &[usize],
        load: &mut [usize],
        assignment: &mut Vec<usize>,
        weight: f64,
        visits: &mut u64,
        out: &mut Vec<(Vec<usize>, f64)>,
    ) -> Result<()> {
        *visits += 1;
        if *visits > GRAPH_LAW_CAP {
            return Err(Error::Capacity(format!(
                "graph law enumeration exceeds {GRAPH_LAW_CAP} assignments"
            )));
        }
        if k == stubs.len() {
            out.push((assignment.clone(), weight));
            return Ok(());
        }
        for v in 0..degrees.len() {
            let remaining = degrees[v] - load[v];
            if remaining == 0 {
                continue;
            }
            load[v] += 1;
            assignment.push(v);
            rec(
                k + 1,
                stubs,
                degrees,
                load,
                assignment,
                weight * remaining as f64,
                visits,
                out,
            )?;
            assignment.pop();
            load[v] -= 1;
        }
        Ok(())
    }

    let mut raw = Vec::new();
    rec(
        0,
        &stubs,
        &profile.degrees,
        &mut load,
        &mut assignment,
        1.0,
        &mut visits,
        &mut raw,
    )?;
    for (assign, w) in raw {
        let mut g = HyperGraph::empty(n);
        let mut pending = Vec::new();
        for (stub, v) in stubs.iter().zip(assign) {
            match *stub {
                HalfEdge::Edge { p, pos, .. } => {
                    pending.push(v);
                    if pos + 1 == p {
                        g.edges.entry(p).or_default().push(std::mem::take(&mut pending));
                    }
                }
                HalfEdge::Site { p, .. } => g.sites.entry(p).or_default().push(v),
                HalfEdge::Vertex { .. } => unreachable!(),
            }
        }
        out.push((g, w / total));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn unique_matchings() {
        let profile = ConfigurationProfile::new(vec![1], [], [(2, 1)]);
        let m = sample_uniform_matching(&profile, &mut rng(0)).unwrap();
        assert_eq!(m.to_hypergraph().sites[&2], vec![0]);
        assert_eq!(enumerate_matchings(&profile).unwrap().len(), 1);

        let profile = ConfigurationProfile::new(vec![1, 1], [(2, 1)], []);
        let g = sample_uniform_matching(&profile, &mut rng(1)).unwrap().to_hypergraph();
        let mut e = g.edges[&2][0].clone();
        e.sort();
        assert_eq!(e, vec![0, 1]);
    }

    #[test]
    fn enumeration_counts() {
        let two_sites = ConfigurationProfile::new(vec![2], [], [(2, 2)]);
        assert_eq!(enumerate_matchings(&two_sites).unwrap().len(), 2);
        let triangle = ConfigurationProfile::new(vec![1, 1, 1], [(3, 1)], []);
        assert_eq!(enumerate_matchings(&triangle).unwrap().len(), 6);
        let mixed = ConfigurationProfile::new(vec![2, 2], [(2, 1)], [(2, 1)]);
        let all = enumerate_matchings(&mixed).unwrap();
        assert_eq!(all.len(), 24);
        assert_eq!(all.len() as f64, matching_count(&mixed));
        for (i, a) in all.iter().enumerate() {
            assert!(all[i + 1..].iter().all(|b| a != b));
        }
        let big = ConfigurationProfile::new(vec![5, 5, 5], [], [(2, 1)]);
        assert!(matches!(enumerate_matchings(&big), Err(Error::Capacity(_))));
    }

    fn key(m: &Matching) -> Vec<VertexStub> {
        edge_and_site_stubs(m.profile())
            .into_iter()
            .map(|s| m.partner(s).unwrap())
            .collect()
    }

    fn chi_square_uniform(counts: &HashMap<Vec<VertexStub>, usize>, cells: usize, n: usize) -> f64 {
        let expected = n as f64 / cells as f64;
        let observed: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let missing = (cells - counts.len()) as f64 * expected;
        observed + missing
    }

    #[test]
    fn sampled_matchings_are_uniform() {
        let profile = ConfigurationProfile::new(vec![2, 2], [(2, 1)], [(2, 1)]);
        let cells = enumerate_matchings(&profile).unwrap().len();
        let n = 100_000;
        let mut r = rng(7);
        let mut counts: HashMap<_, usize> = HashMap::new();
        for _ in 0..n {
            *counts.entry(key(&sample_uniform_matching(&profile, &mut r).unwrap())).or_default() += 1;
        }
        assert_eq!(counts.len(), cells);
        let expected = n as f64 / cells as f64;
        let sigma = (expected * (1.0 - 1.0 / cells as f64)).sqrt();
        for &c in counts.values() {
            assert!((c as f64 - expected).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn site_pairing_preserves_uniformity() {
        // Uniform m plus a random site pairing is uniform on the
        // enlarged space. Chi-square with 359 dof; the 99.99% quantile is 467.3.
        let base = ConfigurationProfile::new(vec![2, 2, 1, 1], [(2, 1)], [(2, 1)]);
        let enlarged = base.with_site_delta(2, 1);
        let cells = enumerate_matchings(&enlarged).unwrap().len();
        assert_eq!(cells, 6 * 5 * 4 * 3);
        let n = 200_000;
        let mut r = rng(11);
        let mut counts: HashMap<_, usize> = HashMap::new();
        for _ in 0..n {
            let m = sample_uniform_matching(&base, &mut r).unwrap();
            let m = p_site_pairing(&m, 2, &mut r).unwrap();
            *counts.entry(key(&m)).or_default() += 1;
        }
        let chi2 = chi_square_uniform(&counts, cells, n);
        assert!(chi2 < 467.3, "chi2 = {chi2}");
    }

    #[test]
    fn site_pairing_examples() {
        let m = p_site_pairing(&Matching::empty(vec![1]), 2, &mut rng(0)).unwrap();
        assert_eq!(m.to_hypergraph().sites[&2], vec![0]);
        assert!(matches!(p_site_pairing(&m, 2, &mut rng(0)), Err(Error::Capacity(_))));

        let base = Matching::empty(vec![2, 1]);
        let mut r = rng(3);
        let n = 60_000;
        let hits = (0..n)
            .filter(|_| p_site_pairing(&base, 3, &mut r).unwrap().to_hypergraph().sites[&3][0] == 0)
            .count() as f64;
        let p = 2.0 / 3.0;
        assert!((hits / n as f64 - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt());
    }

    #[test]
    fn edge_pairing_examples() {
        let g = p_edge_pairing(&Matching::empty(vec![1, 1]), 2, &mut rng(0))
            .unwrap()
            .to_hypergraph();
        let mut e = g.edges[&2][0].clone();
        e.sort();
        assert_eq!(e, vec![0, 1]);

        let g = p_edge_pairing(&Matching::empty(vec![2]), 2, &mut rng(0))
            .unwrap()
            .to_hypergraph();
        assert_eq!(g.edges[&2][0], vec![0, 0]);

        // Both endpoints on one vertex: 2 · (2/4)(1/3) = 1/3.
        let base = Matching::empty(vec![2, 2]);
        let mut r = rng(5);
        let n = 60_000;
        let loops = (0..n)
            .filter(|_| {
                let g = p_edge_pairing(&base, 2, &mut r).unwrap().to_hypergraph();
                g.edges[&2][0][0] == g.edges[&2][0][1]
            })
            .count() as f64;
        let p = 1.0 / 3.0;
        assert!((loops / n as f64 - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt());

        assert!(matches!(
            p_edge_pairing(&Matching::empty(vec![1]), 2, &mut r),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn free_count_examples() {
        let empty = Matching::empty(vec![3, 2]);
        assert_eq!(free_counts(&empty), (vec![3, 2], 5));

        let profile = ConfigurationProfile::new(vec![3, 2], [(2, 1)], []);
        let m = Matching::from_assignment(
            &profile,
            &[VertexStub { vertex: 0, slot: 0 }, VertexStub { vertex: 1, slot: 0 }],
        )
        .unwrap();
        assert_eq!(free_counts(&m), (vec![2, 1], 3));

        let profile = ConfigurationProfile::new(vec![3, 2], [], [(2, 1)]);
        let m = Matching::from_assignment(&profile, &[VertexStub { vertex: 1, slot: 1 }]).unwrap();
        assert_eq!(free_counts(&m), (vec![3, 1], 4));
    }

    #[test]
    fn pairings_consume_stubs() {
        let mut r = rng(21);
        let profile = ConfigurationProfile::new(vec![3, 3, 2, 2, 1], [(3, 1)], [(2, 2)]);
        let m = sample_uniform_matching(&profile, &mut r).unwrap();
        let (_, chi) = free_counts(&m);
        let (_, chi_e) = free_counts(&p_edge_pairing(&m, 2, &mut r).unwrap());
        let (_, chi_s) = free_counts(&p_site_pairing(&m, 3, &mut r).unwrap());
        assert_eq!(chi - chi_e, 2);
        assert_eq!(chi - chi_s, 1);

        let (c, _) = free_counts(&m);
        let used = m.to_hypergraph().used_degrees();
        for i in 0..profile.n() {
            assert_eq!(used[i], profile.degrees[i] - c[i]);
        }
    }

    #[test]
    fn graph_law_matches_enumeration() {
        let profile = ConfigurationProfile::new(vec![2, 2, 1, 1], [(2, 1)], [(2, 2), (3, 1)]);
        let law = graph_law(&profile).unwrap();
        let total: f64 = law.iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-12);

        let all = enumerate_matchings(&profile).unwrap();
        let mut counts: HashMap<HyperGraph, usize> = HashMap::new();
        for m in &all {
            *counts.entry(m.to_hypergraph()).or_default() += 1;
        }
        assert_eq!(counts.len(), law.len());
        for (g, w) in &law {
            let expect = counts[g] as f64 / all.len() as f64;
            assert!((w - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn hypergraph_json_is_one_based() {
        let mut g = HyperGraph::empty(4);
        g.edges.insert(2, vec![vec![0, 1], vec![2, 3]]);
        g.sites.insert(2, vec![0]);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"n":4,"edges":{"2":[[1,2],[3,4]]},"sites":{"2":[1]}}"#);
        let back: HyperGraph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<HyperGraph>(r#"{"n":2,"edges":{"2":[[0,1]]}}"#).is_err());
        assert!(serde_json::from_str::<HyperGraph>(r#"{"n":2,"edges":{"2":[[1,3]]}}"#).is_err());
    }
}

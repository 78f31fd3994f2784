//! Exact maximum independent sets on small sparse graphs and empirical
//! estimates of the independence ratio of random d-regular graphs.
//!
//! The exact solver is branch and reduce: isolated, pendant and dominated
//! vertices are removed, degree-2 vertices are folded, components are
//! solved separately, branching is on a maximum-degree vertex together with
//! its mirrors, and a greedy clique cover prunes hopeless branches.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::confgraph::HyperGraph;
use crate::error::{Error, Result};
use crate::hardcore;
use crate::mc::stream_rng;

pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;
pub const DEFAULT_RETRY_LIMIT: usize = 100_000;
pub const DEFAULT_SLACK: f64 = 0.02;

/// Undirected simple graph on vertices 0..n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleGraph {
    pub n: usize,
    /// Sorted, each pair with u < v.
    pub edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Shape(format!("edge ({u}, {v}) outside 0..{n}")));
            }
            if u == v {
                return Err(Error::Shape(format!("self-loop at {u}")));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if list.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Shape("parallel edges".into()));
        }
        Ok(Self { n, edges: list })
    }

    /// Keeps the 2-edges of a hypergraph. Loops and repeated pairs are
    /// dropped when `collapse` is set and rejected otherwise.
    pub fn from_hypergraph(g: &HyperGraph, collapse: bool) -> Result<Self> {
        let mut pairs = Vec::new();
        if let Some(list) = g.edges.get(&2) {
            for e in list {
                pairs.push((e[0], e[1]));
            }
        }
        if collapse {
            pairs.retain(|(u, v)| u != v);
            pairs.iter_mut().for_each(|e| *e = (e.0.min(e.1), e.0.max(e.1)));
            pairs.sort_unstable();
            pairs.dedup();
        }
        Self::new(g.n, pairs)
    }

    pub fn to_hypergraph(&self) -> HyperGraph {
        let mut g = HyperGraph::empty(self.n);
        g.edges
            .insert(2, self.edges.iter().map(|&(u, v)| vec![u, v]).collect());
        g
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency().iter().map(Vec::len).collect()
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::new(n, edges).expect("simple")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|u| (0..b).map(move |v| (u, a + v)));
        Self::new(a + b, edges).expect("simple")
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParams(format!("cycle on {n} vertices")));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (i + 5, (i + 2) % 5 + 5));
        Self::new(10, outer.chain(spokes).chain(inner)).expect("simple")
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        let mut mark = vec![false; self.n];
        for &v in set {
            mark[v] = true;
        }
        self.edges.iter().all(|&(u, v)| !(mark[u] && mark[v]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MisResult {
    /// Exact size, or the best size found when the budget ran out.
    pub size: usize,
    pub exact: bool,
    pub nodes: u64,
}

#[derive(Clone)]
struct Work {
    adj: Vec<Vec<usize>>,
    alive: Vec<bool>,
    live: usize,
}

impl Work {
    fn from_graph(g: &SimpleGraph) -> Self {
        Self {
            adj: g.adjacency(),
            alive: vec![true; g.n],
            live: g.n,
        }
    }

    fn remove(&mut self, v: usize) {
        if !self.alive[v] {
            return;
        }
        for u in std::mem::take(&mut self.adj[v]) {
            let a = &mut self.adj[u];
            if let Ok(k) = a.binary_search(&v) {
                a.remove(k);
            }
        }
        self.alive[v] = false;
        self.live -= 1;
    }

    /// Takes v into the set: removes N[v].
    fn take(&mut self, v: usize) {
        for u in self.adj[v].clone() {
            self.remove(u);
        }
        self.remove(v);
    }

    fn add_vertex(&mut self, nbrs: Vec<usize>) -> usize {
        let z = self.adj.len();
        for &u in &nbrs {
            let a = &mut self.adj[u];
            let k = a.binary_search(&z).unwrap_err();
            a.insert(k, z);
        }
        self.adj.push(nbrs);
        self.alive.push(true);
        self.live += 1;
        z
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// N[v] ⊆ N[u] for adjacent u, v.
    fn closed_subset(&self, v: usize, u: usize) -> bool {
        self.adj[v].iter().all(|&w| w == u || self.adjacent(u, w))
    }

    /// Applies reductions until none fires; returns the vertices gained.
    fn reduce(&mut self) -> usize {
        let mut gained = 0;
        loop {
            let mut changed = false;
            for v in 0..self.adj.len() {
                if !self.alive[v] {
                    continue;
                }
                match self.adj[v].len() {
                    0 | 1 => {
                        self.take(v);
                        gained += 1;
                        changed = true;
                    }
                    2 => {
                        let (u, w) = (self.adj[v][0], self.adj[v][1]);
                        if self.adjacent(u, w) {
                            self.take(v);
                        } else {
                            let mut nbrs: Vec<usize> = self.adj[u]
                                .iter()
                                .chain(&self.adj[w])
                                .copied()
                                .filter(|&x| x != v)
                                .collect();
                            nbrs.sort_unstable();
                            nbrs.dedup();
                            self.remove(v);
                            self.remove(u);
                            self.remove(w);
                            self.add_vertex(nbrs);
                        }
                        gained += 1;
                        changed = true;
                    }
                    _ => {
                        // A neighbour u with N[v] ⊆ N[u] can be left out.
                        let dominated = self.adj[v]
                            .iter()
                            .copied()
                            .find(|&u| self.adj[u].len() >= self.adj[v].len() && self.closed_subset(v, u));
                        if let Some(u) = dominated {
                            self.remove(u);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return gained;
            }
        }
    }

    fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.adj.len()];
        let mut out = Vec::new();
        for s in 0..self.adj.len() {
            if !self.alive[s] || seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut k = 0;
            while k < comp.len() {
                for &u in &self.adj[comp[k]] {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
                k += 1;
            }
            out.push(comp);
        }
        out
    }

    fn restrict(&self, keep: &[usize]) -> Work {
        let mut index = vec![usize::MAX; self.adj.len()];
        for (k, &v) in keep.iter().enumerate() {
            index[v] = k;
        }
        let adj = keep
            .iter()
            .map(|&v| {
                let mut a: Vec<usize> = self.adj[v].iter().map(|&u| index[u]).collect();
                a.sort_unstable();
                a
            })
            .collect();
        Work {
            adj,
            alive: vec![true; keep.len()],
            live: keep.len(),
        }
    }

    /// Number of cliques in a greedy clique cover; bounds α from above.
    fn clique_cover(&self) -> usize {
        let mut order: Vec<usize> = (0..self.adj.len()).filter(|&v| self.alive[v]).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(self.adj[v].len()));
        let mut cliques: Vec<Vec<usize>> = Vec::new();
        for v in order {
            match cliques
                .iter_mut()
                .find(|c| c.iter().all(|&u| self.adjacent(u, v)))
            {
                Some(c) => c.push(v),
                None => cliques.push(vec![v]),
            }
        }
        cliques.len()
    }

    /// Vertices u at distance two from v with N(v) \ N(u) a clique.
    fn mirrors(&self, v: usize) -> Vec<usize> {
        let mut second: Vec<usize> = self.adj[v]
            .iter()
            .flat_map(|&u| self.adj[u].iter().copied())
            .filter(|&u| u != v && !self.adjacent(v, u))
            .collect();
        second.sort_unstable();
        second.dedup();
        second
            .into_iter()
            .filter(|&u| {
                let rest: Vec<usize> = self.adj[v]
                    .iter()
                    .copied()
                    .filter(|&w| !self.adjacent(u, w))
                    .collect();
                rest.iter()
                    .enumerate()
                    .all(|(i, &a)| rest[i + 1..].iter().all(|&b| self.adjacent(a, b)))
            })
            .collect()
    }
}

struct Solver {
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Solver {
    /// α of `w` plus `base`, improving `best` in place.
    fn branch(&mut self, mut w: Work, base: usize, best: &mut usize) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let base = base + w.reduce();
        if w.live == 0 {
            *best = (*best).max(base);
            return;
        }
        if base + w.clique_cover() <= *best {
            return;
        }
        let comps = w.components();
        if comps.len() > 1 {
            let mut total = base;
            for comp in &comps {
                let sub = w.restrict(comp);
                let mut sub_best = 0;
                self.branch(sub, 0, &mut sub_best);
                total += sub_best;
            }
            *best = (*best).max(total);
            return;
        }
        let v = (0..w.adj.len())
            .filter(|&v| w.alive[v])
            .max_by_key(|&v| w.adj[v].len())
            .expect("nonempty");
        let mut with = w.clone();
        with.take(v);
        self.branch(with, base + 1, best);
        if self.exhausted {
            return;
        }
        for u in w.mirrors(v) {
            w.remove(u);
        }
        w.remove(v);
        self.branch(w, base, best);
    }
}

/// Exact α(G) within `node_budget` branch nodes. When the budget runs out
/// the best size found so far is returned with `exact = false`.
pub fn max_is_exact(g: &SimpleGraph, node_budget: u64) -> MisResult {
    let mut solver = Solver {
        nodes: 0,
        budget: node_budget,
        exhausted: false,
    };
    let mut best = max_is_greedy(g);
    solver.branch(Work::from_graph(g), 0, &mut best);
    MisResult {
        size: best,
        exact: !solver.exhausted,
        nodes: solver.nodes,
    }
}

/// Minimum-degree greedy independent set size.
pub fn max_is_greedy(g: &SimpleGraph) -> usize {
    let mut w = Work::from_graph(g);
    let mut size = 0;
    while w.live > 0 {
        let v = (0..w.adj.len())
            .filter(|&v| w.alive[v])
            .min_by_key(|&v| w.adj[v].len())
            .expect("nonempty");
        w.take(v);
        size += 1;
    }
    size
}

/// Uniform random simple d-regular graph on n vertices: configuration
/// model pairings are redrawn until no loop or repeated edge appears.
pub fn random_regular<R: Rng + ?Sized>(
    d: usize,
    n: usize,
    retry_limit: usize,
    rng: &mut R,
) -> Result<SimpleGraph> {
    if (n * d) % 2 == 1 || d >= n {
        return Err(Error::InvalidParams(format!("no simple {d}-regular graph on {n} vertices")));
    }
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
    for _ in 0..retry_limit {
        stubs.shuffle(rng);
        let mut edges: Vec<(usize, usize)> = stubs
            .chunks_exact(2)
            .map(|c| (c[0].min(c[1]), c[0].max(c[1])))
            .collect();
        if edges.iter().any(|(u, v)| u == v) {
            continue;
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        return SimpleGraph::new(n, edges);
    }
    Err(Error::Capacity(format!(
        "no simple {d}-regular graph on {n} vertices in {retry_limit} attempts"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaEstimate {
    pub d: usize,
    pub n: usize,
    pub n_trials: usize,
    pub seed: u64,
    pub mode: SolveMode,
    /// None when n_trials = 0.
    pub mean_density: Option<f64>,
    pub std_error: Option<f64>,
    /// Instances where the node budget ran out.
    pub partial: usize,
    pub sizes: Vec<usize>,
}

/// Mean max-IS density over `n_trials` random d-regular graphs. Instance k
/// uses stream k of `seed`.
pub fn alpha_star_estimate(
    d: usize,
    n: usize,
    n_trials: usize,
    seed: u64,
    mode: SolveMode,
    node_budget: u64,
    retry_limit: usize,
) -> Result<AlphaEstimate> {
    if (n * d) % 2 == 1 {
        return Err(Error::InvalidParams(format!("N·d = {} is odd", n * d)));
    }
    let results: Vec<(usize, bool)> = (0..n_trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let g = random_regular(d, n, retry_limit, &mut rng)?;
            Ok(match mode {
                SolveMode::Exact => {
                    let r = max_is_exact(&g, node_budget);
                    (r.size, r.exact)
                }
                SolveMode::Greedy => (max_is_greedy(&g), true),
            })
        })
        .collect::<Result<_>>()?;
    let sizes: Vec<usize> = results.iter().map(|r| r.0).collect();
    let partial = results.iter().filter(|r| !r.1).count();
    let (mean, se) = if n_trials == 0 {
        (None, None)
    } else {
        let dens: Vec<f64> = sizes.iter().map(|&s| s as f64 / n as f64).collect();
        let t = n_trials as f64;
        let mean = dens.iter().sum::<f64>() / t;
        let se = if n_trials > 1 {
            let var = dens.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1.0);
            (var / t).sqrt()
        } else {
            0.0
        };
        (Some(mean), Some(se))
    };
    Ok(AlphaEstimate {
        d,
        n,
        n_trials,
        seed,
        mode,
        mean_density: mean,
        std_error: se,
        partial,
        sizes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub estimate: AlphaEstimate,
    pub alpha_rs: f64,
    pub alpha_1rsb: f64,
    pub slack: f64,
    /// α_RS − mean density.
    pub margin_rs: Option<f64>,
    /// α^(1) − mean density.
    pub margin_1rsb: Option<f64>,
    pub flags: Vec<String>,
    pub note: String,
}

/// Confronts the empirical density with the RS and 1-RSB upper bounds.
/// A flag is raised when the mean exceeds α^(1) + `slack`.
pub fn bound_consistency_report(
    d: usize,
    n: usize,
    n_trials: usize,
    seed: u64,
    slack: f64,
    node_budget: u64,
) -> Result<ConsistencyReport> {
    let estimate = alpha_star_estimate(
        d,
        n,
        n_trials,
        seed,
        SolveMode::Exact,
        node_budget,
        DEFAULT_RETRY_LIMIT,
    )?;
    let alpha_rs = hardcore::alpha_rs(d, hardcore::ROOT_TOL)?;
    let alpha_1rsb = hardcore::alpha_1rsb(d, hardcore::ROOT_TOL)?.alpha;
    let mut flags = Vec::new();
    let margin_rs = estimate.mean_density.map(|m| alpha_rs - m);
    let margin_1rsb = estimate.mean_density.map(|m| alpha_1rsb - m);
    if let Some(m) = estimate.mean_density {
        if m > alpha_1rsb + slack {
            flags.push(format!("mean density {m:.5} exceeds α^(1) + {slack}"));
        }
        if estimate.partial > 0 {
            flags.push(format!("{} instances hit the node budget", estimate.partial));
        }
    }
    Ok(ConsistencyReport {
        estimate,
        alpha_rs,
        alpha_1rsb,
        slack,
        margin_rs,
        margin_1rsb,
        flags,
        note: format!("finite N = {n}: directional evidence only, not a limit"),
    })
}

/// Histogram of component sizes; used for the d = 2 cycle check.
pub fn component_sizes(g: &SimpleGraph) -> BTreeMap<usize, usize> {
    let w = Work::from_graph(g);
    let mut out = BTreeMap::new();
    for c in w.components() {
        *out.entry(c.len()).or_default() += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_force(g: &SimpleGraph) -> usize {
        let adj: Vec<u32> = g
            .adjacency()
            .iter()
            .map(|a| a.iter().fold(0u32, |m, &u| m | (1 << u)))
            .collect();
        fn rec(cand: u32, adj: &[u32]) -> usize {
            if cand == 0 {
                return 0;
            }
            let v = cand.trailing_zeros() as usize;
            let without = rec(cand & !(1 << v), adj);
            let with = 1 + rec(cand & !(1 << v) & !adj[v], adj);
            without.max(with)
        }
        rec(if g.n == 32 { u32::MAX } else { (1u32 << g.n) - 1 }, &adj)
    }

    #[test]
    fn small_examples() {
        assert_eq!(max_is_exact(&SimpleGraph::complete(4), 1000).size, 1);
        assert_eq!(max_is_exact(&SimpleGraph::complete_bipartite(3, 3), 1000).size, 3);
        let p = SimpleGraph::petersen();
        assert!(p.degrees().iter().all(|&d| d == 3));
        assert_eq!(brute_force(&p), 4);
        assert_eq!(max_is_exact(&p, 1000).size, 4);
        for n in 3..12 {
            assert_eq!(max_is_exact(&SimpleGraph::cycle(n).unwrap(), 1000).size, n / 2);
        }
        assert_eq!(max_is_exact(&SimpleGraph::new(5, []).unwrap(), 10).size, 5);
    }

    #[test]
    fn matches_brute_force_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let g = random_regular(3, 20, DEFAULT_RETRY_LIMIT, &mut rng).unwrap();
            let r = max_is_exact(&g, DEFAULT_NODE_BUDGET);
            assert!(r.exact);
            assert_eq!(r.size, brute_force(&g));
            assert!(max_is_greedy(&g) <= r.size);
        }
        for _ in 0..100 {
            let n = rng.gen_range(1..18);
            let p: f64 = rng.gen_range(0.05..0.6);
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .filter(|_| rng.gen_bool(p))
                .collect();
            let g = SimpleGraph::new(n, edges).unwrap();
            assert_eq!(max_is_exact(&g, DEFAULT_NODE_BUDGET).size, brute_force(&g), "{g:?}");
        }
    }

    #[test]
    fn invariances() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let g = random_regular(3, 16, DEFAULT_RETRY_LIMIT, &mut rng).unwrap();
            let a = max_is_exact(&g, DEFAULT_NODE_BUDGET).size;
            let mut perm: Vec<usize> = (0..g.n).collect();
            perm.shuffle(&mut rng);
            let relabeled =
                SimpleGraph::new(g.n, g.edges.iter().map(|&(u, v)| (perm[u], perm[v]))).unwrap();
            assert_eq!(max_is_exact(&relabeled, DEFAULT_NODE_BUDGET).size, a);
            // Delete vertex 0 by isolating it and discounting it.
            let minus =
                SimpleGraph::new(g.n, g.edges.iter().copied().filter(|&(u, v)| u != 0 && v != 0))
                    .unwrap();
            let b = max_is_exact(&minus, DEFAULT_NODE_BUDGET).size - 1;
            assert!(b <= a && a <= b + 1);
            let missing = (0..g.n)
                .flat_map(|u| (u + 1..g.n).map(move |v| (u, v)))
                .find(|e| g.edges.binary_search(e).is_err())
                .unwrap();
            let plus = SimpleGraph::new(g.n, g.edges.iter().copied().chain([missing])).unwrap();
            assert!(max_is_exact(&plus, DEFAULT_NODE_BUDGET).size <= a);
        }
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = random_regular(3, 100, DEFAULT_RETRY_LIMIT, &mut rng).unwrap();
        let r = max_is_exact(&g, 2);
        assert!(!r.exact);
        assert!(r.size >= max_is_greedy(&g));
    }

    #[test]
    fn regular_graphs_are_simple_and_regular() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in [2, 3, 4] {
            let g = random_regular(d, 30, DEFAULT_RETRY_LIMIT, &mut rng).unwrap();
            assert!(g.degrees().iter().all(|&x| x == d));
        }
        assert!(random_regular(3, 7, 10, &mut rng).is_err());
        assert!(random_regular(20, 22, 5, &mut rng).is_err());
        let g = random_regular(3, 10, DEFAULT_RETRY_LIMIT, &mut rng).unwrap();
        let back = SimpleGraph::from_hypergraph(&g.to_hypergraph(), false).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn cycles_density_approaches_half() {
        let e = alpha_star_estimate(2, 400, 20, 3, SolveMode::Exact, DEFAULT_NODE_BUDGET, 1000).unwrap();
        let m = e.mean_density.unwrap();
        assert!(m < 0.5 && m > 0.47, "{m}");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_regular(2, 60, 1000, &mut rng).unwrap();
        let expected: usize = component_sizes(&g).iter().map(|(l, c)| c * (l / 2)).sum();
        assert_eq!(max_is_exact(&g, DEFAULT_NODE_BUDGET).size, expected);
    }

    #[test]
    fn estimate_is_deterministic_and_empty_report_is_clean() {
        let a = alpha_star_estimate(3, 40, 16, 9, SolveMode::Exact, DEFAULT_NODE_BUDGET, 1000).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool
            .install(|| alpha_star_estimate(3, 40, 16, 9, SolveMode::Exact, DEFAULT_NODE_BUDGET, 1000))
            .unwrap();
        assert_eq!(a, b);
        let g = alpha_star_estimate(3, 40, 16, 9, SolveMode::Greedy, 0, 1000).unwrap();
        for (x, y) in g.sizes.iter().zip(&a.sizes) {
            assert!(x <= y);
        }
        let r = bound_consistency_report(3, 40, 0, 1, DEFAULT_SLACK, DEFAULT_NODE_BUDGET).unwrap();
        assert!(r.flags.is_empty() && r.margin_rs.is_none());
    }

    #[test]
    fn degree_four_below_rs_bound() {
        let r = bound_consistency_report(4, 80, 40, 11, DEFAULT_SLACK, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(r.estimate.partial, 0);
        assert!(r.margin_rs.unwrap() > 0.0, "{r:?}");
        assert!(r.flags.is_empty());
    }
}

//! Acceptance criteria 1–9. Each test writes one PASS/FAIL line to stderr
//! (bypassing output capture) before asserting.

use std::collections::BTreeMap;
use std::io::Write;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use diluted_core::bounds::{rs_functional, rsb1_functional, InnerConfig};
use diluted_core::confgraph::HyperGraph;
use diluted_core::distributions::{DiscreteDist, HierMeasure};
use diluted_core::hardcore::{self, ALPHA_LOWER_REF};
use diluted_core::interpolate::{self, bundled, CheckMode, WalkParams};
use diluted_core::mc::{self, McConfig, McRng};
use diluted_core::model::{
    partition_exact, u_weight, u_weight_quotient, x_from_pi, HamiltonianRealization, HardCoreSpec,
    ThetaLaw,
};
use diluted_core::oracle::{self, SimpleGraph};

const ALPHA_RS_REF: [f64; 8] = [0.45907, 0.42061, 0.38868, 0.36203, 0.33944, 0.32002, 0.30310, 0.28820];
const ALPHA_1_REF: [f64; 8] = [0.45086, 0.41120, 0.37927, 0.35299, 0.33089, 0.31198, 0.29556, 0.28113];

fn verdict(n: usize, name: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n} [{name}]: {status} ({detail})");
    assert!(ok, "criterion {n} [{name}] failed: {detail}");
}

fn cli(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_diluted"))
        .args(args)
        .output()
        .expect("binary runs");
    let code = out.status.code().unwrap_or(-1);
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, report)
}

fn regular(d: usize) -> (DiscreteDist<usize>, DiscreteDist<usize>) {
    (DiscreteDist::dirac(d), DiscreteDist::dirac(2))
}

#[test]
fn criterion_1_table_reproduction() {
    let start = Instant::now();
    let (code, report) = cli(&["hardcore", "table"]);
    let elapsed = start.elapsed().as_secs_f64();
    let rows = report["result"]["rows"].as_array().cloned().unwrap_or_default();
    let mut worst: f64 = 0.0;
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row["d"].as_u64(), Some(k as u64 + 3));
        let rs = row["alpha_rs"].as_f64().unwrap();
        let one = row["alpha_1rsb"].as_f64().unwrap();
        worst = worst.max((rs - ALPHA_RS_REF[k]).abs()).max((one - ALPHA_1_REF[k]).abs());
    }
    let ok = code == 0 && rows.len() == 8 && worst <= 1e-5 && elapsed < 5.0;
    verdict(
        1,
        "table reproduction",
        ok,
        &format!("exit {code}, 8 degrees, max deviation {worst:.3e} ≤ 1e-5, {elapsed:.2}s < 5s"),
    );
}

#[test]
fn criterion_2_ordering() {
    let table = hardcore::table1().unwrap();
    let mut ok = true;
    let mut min_gap = f64::INFINITY;
    for row in &table.rows {
        ok &= row.alpha_1rsb < row.alpha_rs;
        min_gap = min_gap.min(row.alpha_rs - row.alpha_1rsb);
    }
    let mut min_lower_gap = f64::INFINITY;
    for (k, &lower) in ALPHA_LOWER_REF.iter().enumerate() {
        let one = table.rows[k].alpha_1rsb;
        ok &= lower <= one;
        min_lower_gap = min_lower_gap.min(one - lower);
    }
    verdict(
        2,
        "ordering",
        ok,
        &format!("min α_RS − α^(1) = {min_gap:.5}, min α^(1) − α_ℓ = {min_lower_gap:.5}"),
    );
}

#[test]
fn criterion_3_generic_vs_closed_form() {
    let (d, alpha) = (3, 0.4);
    let (pi, lambda) = hardcore::rs_stationary_point(d, alpha);
    let model = HardCoreSpec::hard(lambda).unwrap().model();
    let (mu, rho) = regular(d);
    let zeta = DiscreteDist::dirac(x_from_pi(pi));
    let start = Instant::now();
    let res = rs_functional(&mu, &rho, &model, &zeta, &McConfig::new(1_000_000, 7)).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let generic = res.estimate - alpha * lambda.ln();
    let closed = hardcore::phi_rs(d, alpha).unwrap();
    let diff = (generic - closed).abs();
    // A Dirac ζ makes every outer sample identical, so SE = 0 and only
    // rounding separates the two.
    let ok = diff <= 3.0 * res.std_error + 1e-12 && res.n_outer == 1_000_000 && elapsed < 30.0;
    verdict(
        3,
        "generic vs closed form",
        ok,
        &format!("|Δ| = {diff:.2e}, SE = {:.2e}, {elapsed:.2}s < 30s", res.std_error),
    );
}

#[test]
fn criterion_4_rsb1_reductions() {
    let model = HardCoreSpec::hard(3.0).unwrap().model();
    let (mu, rho) = regular(3);
    let atoms = [(-0.4, 0.3), (0.2, 0.5), (1.1, 0.2)];
    let zeta = DiscreteDist::from_pairs(atoms.to_vec()).unwrap();
    let leaf = |x: f64| HierMeasure::leaf(DiscreteDist::dirac(x));
    let z2 = HierMeasure::node(DiscreteDist::from_pairs(atoms.iter().map(|&(x, w)| (leaf(x), w))).unwrap())
        .unwrap();
    let cfg = McConfig::new(20_000, 11);
    let rs = rs_functional(&mu, &rho, &model, &zeta, &cfg).unwrap();
    let mut worst_a: f64 = 0.0;
    let mut ok = true;
    for m in [0.1, 0.5, 0.9] {
        let one = rsb1_functional(&mu, &rho, &model, m, &z2, &InnerConfig::default(), &cfg).unwrap();
        ok &= one.inner_sampled_fraction == 0.0;
        let diff = (one.estimate - rs.estimate).abs();
        worst_a = worst_a.max(diff);
        ok &= diff <= 3.0 * rs.std_error.max(one.std_error) + 1e-12;
    }

    let spread = DiscreteDist::from_pairs(vec![(-0.4, 0.5), (0.8, 0.5)]).unwrap();
    let z2b = HierMeasure::node(DiscreteDist::dirac(HierMeasure::leaf(spread.clone()))).unwrap();
    let rs_b = rs_functional(&mu, &rho, &model, &spread, &McConfig::new(400_000, 3)).unwrap();
    let one_b = rsb1_functional(&mu, &rho, &model, 1e-3, &z2b, &InnerConfig::default(), &McConfig::new(10, 3))
        .unwrap();
    let diff_b = (one_b.estimate - rs_b.estimate).abs();
    ok &= diff_b <= 1e-2;
    verdict(
        4,
        "1-RSB reductions",
        ok,
        &format!("(a) max |Δ| = {worst_a:.2e} within 3σ, (b) |Δ| = {diff_b:.2e} ≤ 1e-2"),
    );
}

#[test]
fn criterion_5_exact_model_oracles() {
    let lambda = 2.7;
    let model = HardCoreSpec::hard(lambda).unwrap().model();
    let zeta = DiscreteDist::dirac(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let z_of = |g: &HyperGraph, rng: &mut ChaCha8Rng| {
        let r = HamiltonianRealization::sample(g, &model, &zeta, rng).unwrap();
        partition_exact(g, &r).unwrap().z
    };
    let single = HyperGraph::empty(1);
    let mut edge = HyperGraph::empty(2);
    edge.edges.insert(2, vec![vec![0, 1]]);
    let k4 = SimpleGraph::complete(4).to_hypergraph();
    let errs = [
        (z_of(&single, &mut rng) - (1.0 + lambda)).abs(),
        (z_of(&edge, &mut rng) - (1.0 + 2.0 * lambda)).abs(),
        (z_of(&k4, &mut rng) - (1.0 + 4.0 * lambda)).abs(),
    ];
    let mut ok = errs.iter().all(|&e| e <= 1e-12);

    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let p = rng.gen_range(2..6);
        let b: f64 = rng.gen_range(-0.9..0.9) / 3f64.powi(p as i32);
        let law = ThetaLaw {
            a: DiscreteDist::dirac(rng.gen_range(0.5..2.0)),
            b: DiscreteDist::dirac(b),
            f: DiscreteDist::dirac([rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)]),
        };
        let draw = law.sample(p, &mut rng);
        let x: Vec<f64> = (1..p).map(|_| rng.gen_range(-3.0..3.0)).collect();
        for sigma in [-1i8, 1] {
            let prod = u_weight(&draw, &x, sigma).unwrap();
            let quot = u_weight_quotient(&draw, &x, sigma).unwrap();
            worst = worst.max((prod - quot).abs() / prod.abs().max(1.0));
        }
    }
    ok &= worst <= 1e-12;
    verdict(
        5,
        "exact-model oracles",
        ok,
        &format!("Z errors {:.1e}/{:.1e}/{:.1e}, max U form gap {worst:.1e} over 10^4 draws", errs[0], errs[1], errs[2]),
    );
}

#[test]
fn criterion_6_proof_machinery() {
    let mut notes = Vec::new();
    let mut ok = true;

    let mut worst_inc: f64 = 0.0;
    let instances = bundled::increment_instances();
    for inst in &instances {
        let r = interpolate::increment_identity_check(&inst.profile, &inst.model, &inst.zeta, inst.p, inst.kind, 5)
            .unwrap();
        worst_inc = worst_inc.max(r.diff.abs());
        ok &= r.diff.abs() <= 1e-10;
    }
    notes.push(format!("increment: {} instances, max |Δ| {worst_inc:.1e}", instances.len()));

    let steps = bundled::step_instances(1).unwrap();
    let mut min_gap = f64::INFINITY;
    for inst in &steps {
        let r = interpolate::step_inequality_check(&inst.matching, &inst.model, &inst.zeta, inst.p, inst.delta, 0, 3)
            .unwrap();
        ok &= r.mode == CheckMode::Exact && r.holds;
        min_gap = min_gap.min(r.gap);
    }
    notes.push(format!("step: {} exact instances, min gap {min_gap:.3}", steps.len()));

    let grid: [&[usize]; 8] = [
        &[1, 1, 1],
        &[2, 2, 2],
        &[3, 1],
        &[1, 1, 1, 1, 1],
        &[4, 3, 2, 1],
        &[5, 5],
        &[1, 2, 3, 4, 5, 6],
        &[3; 10],
    ];
    let mut z_cases = 0;
    for c in grid {
        for p in [2, 3] {
            if c.iter().sum::<usize>() > p {
                ok &= interpolate::z_sum_bound_check(c, p).unwrap().holds;
                z_cases += 1;
            }
        }
    }
    notes.push(format!("zbound: {z_cases} cases"));

    let params = WalkParams::new(3, 200, None, false).unwrap();
    let az = interpolate::azuma_check(&params, 100_000, &[], 2).unwrap();
    ok &= az.passed;
    notes.push(format!("azuma: δ = {}, 10^5 trials, {} times", params.delta, az.rows.len()));

    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut violations = 0;
    for _ in 0..100_000 {
        let p = rng.gen_range(2..9u32);
        let (x, y): (f64, f64) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
        let scale = x.max(y).powi(p as i32).max(f64::MIN_POSITIVE);
        if interpolate::polynomial_core(x, y, p) < -1e-12 * scale {
            violations += 1;
        }
    }
    ok &= violations == 0;
    notes.push(format!("polynomial: {violations} violations in 10^5"));
    verdict(6, "proof machinery", ok, &notes.join("; "));
}

#[test]
fn criterion_7_walk() {
    let params = WalkParams::new(3, 200, None, false).unwrap();
    let mart = interpolate::martingale_check(&params, 100_000, 4).unwrap();
    let mut ok = mart.passed;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..1000 {
        let w = interpolate::run_walk(&params, &mut rng);
        ok &= w.s_q.iter().enumerate().all(|(t, s)| s + t == params.tau);
    }
    let grid = [1_000, 10_000, 100_000, 1_000_000];
    let mut ratios = BTreeMap::new();
    for q in [2, 3, 5] {
        let r: Vec<f64> = grid
            .iter()
            .map(|&s| interpolate::delta_error_budget(q, s, 1.0).unwrap().normalized)
            .collect();
        ok &= r.windows(2).all(|w| w[1] < w[0]);
        ratios.insert(q, r[3] / r[0]);
    }
    verdict(
        7,
        "martingale and budget",
        ok,
        &format!(
            "mean increment {:.2e} ± {:.2e}, S_q^t + t = τ on 1000 walks, |Δ_q|/S_q decreasing, 10^6 vs 10^3 ratio {:?}",
            mart.mean_increment, mart.std_error, ratios
        ),
    );
}

#[test]
fn criterion_8_oracle() {
    let start = Instant::now();
    let report = oracle::bound_consistency_report(3, 100, 200, 8, oracle::DEFAULT_SLACK, oracle::DEFAULT_NODE_BUDGET)
        .unwrap();
    let mean = report.estimate.mean_density.unwrap();
    let mut ok = report.estimate.partial == 0 && mean < report.alpha_rs && mean <= report.alpha_1rsb + 0.02;
    ok &= oracle::max_is_exact(&SimpleGraph::petersen(), 1000).size == 4;

    fn brute(g: &SimpleGraph) -> usize {
        let adj: Vec<u32> = g
            .adjacency()
            .iter()
            .map(|a| a.iter().fold(0, |m, &u| m | (1 << u)))
            .collect();
        fn rec(cand: u32, adj: &[u32]) -> usize {
            if cand == 0 {
                return 0;
            }
            let v = cand.trailing_zeros() as usize;
            let rest = cand & !(1 << v);
            rec(rest, adj).max(1 + rec(rest & !adj[v], adj))
        }
        rec((1 << g.n) - 1, &adj)
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..50 {
        let g = oracle::random_regular(3, 20, oracle::DEFAULT_RETRY_LIMIT, &mut rng).unwrap();
        ok &= oracle::max_is_exact(&g, oracle::DEFAULT_NODE_BUDGET).size == brute(&g);
    }
    let elapsed = start.elapsed().as_secs_f64();
    ok &= elapsed < 600.0;
    verdict(
        8,
        "oracle consistency",
        ok,
        &format!(
            "mean density {mean:.5} ± {:.5} < α_RS {:.5}, ≤ α^(1) + 0.02 = {:.5}; Petersen 4; 50/50 brute-force matches; {elapsed:.1}s",
            report.estimate.std_error.unwrap(),
            report.alpha_rs,
            report.alpha_1rsb + 0.02
        ),
    );
}

#[test]
fn criterion_9_determinism() {
    let dir = std::env::temp_dir().join(format!("diluted-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("rs.json");
    std::fs::write(
        &config,
        r#"{"model":{"hardcore":{"lambda":3.0,"A":"inf"}},
            "mu":{"atoms":[{"v":3,"w":0.5},{"v":4,"w":0.5}]},
            "nu":{"atoms":[{"v":2,"w":1}]},
            "zeta":{"atoms":[{"v":-0.4,"w":0.3},{"v":0.2,"w":0.5},{"v":1.1,"w":0.2}]},
            "samples":50000}"#,
    )
    .unwrap();
    let path = config.to_str().unwrap();
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_time_s");
        v
    };
    let runs: Vec<Value> = [["--threads", "1"], ["--threads", "4"], ["--threads", "4"]]
        .iter()
        .map(|t| {
            let (code, v) = cli(&["bound", "rs", "--config", path, "--seed", "42", "--chunk-size", "1000", t[0], t[1]]);
            assert_eq!(code, 0);
            strip(v)
        })
        .collect();
    let mut ok = runs[0] == runs[1] && runs[1] == runs[2];

    let (c1, a) = cli(&["oracle", "maxis", "--d", "3", "--n", "40", "--trials", "16", "--seed", "5", "--threads", "1"]);
    let (c2, b) = cli(&["oracle", "maxis", "--d", "3", "--n", "40", "--trials", "16", "--seed", "5", "--threads", "3"]);
    ok &= c1 == 0 && c2 == 0 && strip(a) == strip(b);

    let f = |rng: &mut McRng| Ok((rng.gen::<f64>().ln(), [rng.gen::<f64>()]));
    let cfg = McConfig::new(20_000, 9).with_chunk_size(777);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let many = rayon::ThreadPoolBuilder::new().num_threads(5).build().unwrap();
    let x = one.install(|| mc::run(&cfg, f)).unwrap();
    let y = many.install(|| mc::run(&cfg, f)).unwrap();
    ok &= x.sum.to_bits() == y.sum.to_bits() && x.parts[0].to_bits() == y.parts[0].to_bits();

    let (missing, _) = cli(&["bound", "rs", "--config", dir.join("missing.json").to_str().unwrap()]);
    ok &= missing == 2;
    let _ = std::fs::remove_dir_all(&dir);
    verdict(
        9,
        "determinism",
        ok,
        "bound rs identical at 1/4/4 threads, oracle identical at 1/3 threads, MC sums bit-identical, missing config exits 2",
    );
}

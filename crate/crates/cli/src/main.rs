//! `diluted`: command-line entry point for the bound evaluators, the
//! hard-core closed forms, the interpolation checks and the MIS oracle.
//!
//! Every run writes one JSON report (schema `diluted-bounds/1`) echoing its
//! inputs, their SHA-256 hash, the seed and the wall time.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use diluted_core::bounds::{self, InnerConfig, RsbParams};
use diluted_core::confgraph::{p_edge_pairing, p_site_pairing, sample_uniform_matching, Matching};
use diluted_core::distributions::{size_biased, ConfigurationProfile, DiscreteDist, HierMeasure};
use diluted_core::interpolate::{self, bundled, DemoConfig, Increment, WalkParams};
use diluted_core::mc::{stream_rng, McConfig, DEFAULT_CHUNK_SIZE};
use diluted_core::model::ModelSpec;
use diluted_core::{hardcore, oracle, Error};

const SCHEMA: &str = "diluted-bounds/1";
const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(name = "diluted", version, about = "Free-energy bounds for diluted spin systems")]
struct Cli {
    /// Master seed; overrides a seed given in a config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Samples per reproducible RNG chunk.
    #[arg(long, global = true)]
    chunk_size: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Hard-core closed forms on d-regular graphs.
    #[command(subcommand)]
    Hardcore(HardcoreCmd),
    /// Monte Carlo evaluation of the RS, 1-RSB and r-RSB functionals.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// Numerical checks of the interpolation argument.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Exact maximum independent sets on random regular graphs.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Sample graphs.
    #[command(subcommand)]
    Graph(GraphCmd),
}

#[derive(Subcommand)]
enum HardcoreCmd {
    /// α_RS and α^(1) for d = 3..10 with the reference bounds.
    Table,
    /// Root of Φ_RS for one degree.
    Rs(DegreeArgs),
    /// Root of the optimized 1-RSB functional for one degree.
    Rsb1(DegreeArgs),
}

#[derive(Args)]
struct DegreeArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = hardcore::ROOT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct ConfigArg {
    /// JSON job file.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum BoundCmd {
    Rs(ConfigArg),
    Rsb1(ConfigArg),
    Rsb(ConfigArg),
}

#[derive(Args)]
struct WalkArgs {
    #[arg(long)]
    q: usize,
    #[arg(long = "s-q")]
    s_q: usize,
    /// Default ⌈√(S_q log S_q)⌉.
    #[arg(long)]
    delta: Option<usize>,
    /// Accept S_q below max(15, 2q²).
    #[arg(long)]
    waive_q_rule: bool,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Martingale property of C_t and the bookkeeping S_q^t + t = τ.
    Walk {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long, default_value_t = 100_000)]
        walks: usize,
    },
    /// Empirical P(T ≤ t) against the Azuma bound.
    Azuma {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        /// Times to check (default: every t ≤ τ).
        #[arg(long, value_delimiter = ',')]
        t: Vec<usize>,
    },
    /// Exact increment identities (bundled instances without --config).
    Increment {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Step inequality (bundled instances without --config).
    Step {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Σ|Z| against its bound (the p ∈ {2, 3} grid without --c).
    Zbound {
        #[arg(long, value_delimiter = ',')]
        c: Vec<usize>,
        #[arg(long)]
        p: Option<usize>,
    },
    /// Δ_q error budget (an S_q grid without --s-q).
    Budget {
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 5])]
        q: Vec<usize>,
        #[arg(long = "s-q")]
        s_q: Option<usize>,
        #[arg(long)]
        delta: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
    },
    /// Nonnegativity of x^p − p x y^{p−1} + (p−1) y^p on random samples.
    Polynomial {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Full stopped interpolation on a tiny instance.
    Demo {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    Maxis {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, default_value_t = oracle::DEFAULT_SLACK)]
        slack: f64,
        /// Branch nodes per instance.
        #[arg(long, default_value_t = oracle::DEFAULT_NODE_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = oracle::DEFAULT_RETRY_LIMIT)]
        retry_limit: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Greedy,
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Uniform configuration-model matching for a profile.
    Sample {
        #[arg(long)]
        config: PathBuf,
    },
    /// Uniform simple d-regular graph.
    Regular {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = oracle::DEFAULT_RETRY_LIMIT)]
        retry_limit: usize,
    },
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = if e.is_validation() {
            (2, "validation")
        } else {
            (3, "numeric")
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

fn validation(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        kind: "validation",
        message: message.into(),
    }
}

type Outcome = Result<Value, Failure>;

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

fn read_config<T: DeserializeOwned>(path: &Path) -> Result<(T, Value), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
    let raw: Value = serde_json::from_str(&text)
        .map_err(|e| validation(format!("{}: {e}", path.display())))?;
    let parsed = serde_json::from_value(raw.clone())
        .map_err(|e| validation(format!("{}: {e}", path.display())))?;
    Ok((parsed, raw))
}

/// What a run needs besides its own arguments.
struct Ctx {
    seed: Option<u64>,
    chunk_size: usize,
}

impl Ctx {
    fn seed(&self, from_config: Option<u64>) -> u64 {
        self.seed.or(from_config).unwrap_or(DEFAULT_SEED)
    }
}

struct Run {
    name: String,
    inputs: Value,
    seed: Option<u64>,
    outcome: Outcome,
    text: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon_threads(t) {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let ctx = Ctx {
        seed: cli.seed,
        chunk_size: cli.chunk_size.unwrap_or(DEFAULT_CHUNK_SIZE),
    };
    let start = Instant::now();
    let run = dispatch(&cli.command, &ctx);
    let wall = start.elapsed().as_secs_f64();
    finish(&cli, run, wall)
}

fn rayon_threads(n: usize) -> Result<(), String> {
    if n == 0 {
        return Err("--threads must be positive".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn finish(cli: &Cli, run: Run, wall: f64) -> ExitCode {
    let canonical = serde_json::to_string(&json!({"command": run.name, "inputs": run.inputs}))
        .expect("json");
    let hash: String = Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    let (status, code) = match &run.outcome {
        Ok(_) => ("ok", 0u8),
        Err(f) => (f.kind, f.code),
    };
    let mut report = serde_json::Map::new();
    report.insert("schema".into(), json!(SCHEMA));
    report.insert("command".into(), json!(run.name));
    report.insert("inputs".into(), run.inputs);
    report.insert("config_hash".into(), json!(hash));
    report.insert("seed".into(), json!(run.seed));
    report.insert("status".into(), json!(status));
    match run.outcome {
        Ok(result) => {
            report.insert("result".into(), result);
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            report.insert("error".into(), json!(f.message));
        }
    }
    report.insert("wall_time_s".into(), json!(wall));
    let body = match (cli.format, &run.text) {
        (Format::Text, Some(text)) => text.clone(),
        _ => serde_json::to_string_pretty(&Value::Object(report)).expect("json") + "\n",
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}

fn dispatch(cmd: &Command, ctx: &Ctx) -> Run {
    let simple = |name: &str, inputs: Value, seed: Option<u64>, outcome: Outcome| Run {
        name: name.into(),
        inputs,
        seed,
        outcome,
        text: None,
    };
    match cmd {
        Command::Hardcore(HardcoreCmd::Table) => {
            let table = hardcore::table1();
            let text = table.as_ref().ok().map(|t| t.to_text());
            Run {
                name: "hardcore table".into(),
                inputs: json!({}),
                seed: None,
                outcome: table.map(|t| to_value(&t)).map_err(Failure::from),
                text,
            }
        }
        Command::Hardcore(HardcoreCmd::Rs(a)) => simple(
            "hardcore rs",
            json!({"d": a.d, "tol": a.tol}),
            None,
            hardcore_rs(a.d, a.tol),
        ),
        Command::Hardcore(HardcoreCmd::Rsb1(a)) => simple(
            "hardcore rsb1",
            json!({"d": a.d, "tol": a.tol}),
            None,
            hardcore::alpha_1rsb(a.d, a.tol)
                .map(|p| to_value(&p))
                .map_err(Failure::from),
        ),
        Command::Bound(b) => run_bound(b, ctx),
        Command::Verify(v) => run_verify(v, ctx),
        Command::Oracle(OracleCmd::Maxis {
            d,
            n,
            trials,
            mode,
            slack,
            budget,
            retry_limit,
        }) => {
            let seed = ctx.seed(None);
            let inputs = json!({
                "d": d, "n": n, "trials": trials,
                "mode": match mode { ModeArg::Exact => "exact", ModeArg::Greedy => "greedy" },
                "slack": slack, "budget": budget, "retry_limit": retry_limit,
            });
            let outcome = match mode {
                ModeArg::Exact => oracle::bound_consistency_report(*d, *n, *trials, seed, *slack, *budget)
                    .map(|r| to_value(&r)),
                ModeArg::Greedy => oracle::alpha_star_estimate(
                    *d,
                    *n,
                    *trials,
                    seed,
                    oracle::SolveMode::Greedy,
                    *budget,
                    *retry_limit,
                )
                .map(|r| to_value(&r)),
            }
            .map_err(Failure::from);
            simple("oracle maxis", inputs, Some(seed), outcome)
        }
        Command::Graph(GraphCmd::Regular { d, n, retry_limit }) => {
            let seed = ctx.seed(None);
            let mut rng = stream_rng(seed, 0);
            let outcome = oracle::random_regular(*d, *n, *retry_limit, &mut rng)
                .map(|g| to_value(&g.to_hypergraph()))
                .map_err(Failure::from);
            simple(
                "graph regular",
                json!({"d": d, "n": n, "retry_limit": retry_limit}),
                Some(seed),
                outcome,
            )
        }
        Command::Graph(GraphCmd::Sample { config }) => {
            let (inputs, seed, outcome) = match read_config::<ProfileJob>(config) {
                Ok((job, raw)) => {
                    let seed = ctx.seed(job.seed);
                    let mut rng = stream_rng(seed, 0);
                    let outcome = sample_uniform_matching(&job.profile, &mut rng)
                        .map(|m| to_value(&m.to_hypergraph()))
                        .map_err(Failure::from);
                    (raw, Some(seed), outcome)
                }
                Err(f) => (json!({"config": config}), None, Err(f)),
            };
            simple("graph sample", inputs, seed, outcome)
        }
    }
}

fn hardcore_rs(d: usize, tol: f64) -> Outcome {
    let alpha = hardcore::alpha_rs(d, tol)?;
    let (pi, lambda) = hardcore::rs_stationary_point(d, alpha);
    Ok(json!({"d": d, "alpha_rs": alpha, "pi": pi, "lambda": lambda}))
}

#[derive(Deserialize)]
struct ProfileJob {
    #[serde(flatten)]
    profile: ConfigurationProfile,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundJob {
    model: ModelSpec,
    /// Degree law.
    mu: DiscreteDist<usize>,
    /// Edge-size law; ρ is its size-biased version.
    #[serde(default)]
    nu: Option<DiscreteDist<usize>>,
    /// Size-biased edge-size law given directly.
    #[serde(default)]
    rho: Option<DiscreteDist<usize>>,
    zeta: Value,
    #[serde(default)]
    m: Option<Value>,
    samples: usize,
    #[serde(default)]
    chunk_size: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    inner: Option<InnerConfig>,
}

fn run_bound(cmd: &BoundCmd, ctx: &Ctx) -> Run {
    let (name, path) = match cmd {
        BoundCmd::Rs(c) => ("bound rs", &c.config),
        BoundCmd::Rsb1(c) => ("bound rsb1", &c.config),
        BoundCmd::Rsb(c) => ("bound rsb", &c.config),
    };
    let (job, raw) = match read_config::<BoundJob>(path) {
        Ok(v) => v,
        Err(f) => {
            return Run {
                name: name.into(),
                inputs: json!({"config": path}),
                seed: None,
                outcome: Err(f),
                text: None,
            }
        }
    };
    let seed = ctx.seed(job.seed);
    let outcome = eval_bound(cmd, &job, seed, ctx);
    Run {
        name: name.into(),
        inputs: raw,
        seed: Some(seed),
        outcome,
        text: None,
    }
}

fn parse<T: DeserializeOwned>(v: &Value, what: &str) -> Result<T, Failure> {
    serde_json::from_value(v.clone()).map_err(|e| validation(format!("{what}: {e}")))
}

fn eval_bound(cmd: &BoundCmd, job: &BoundJob, seed: u64, ctx: &Ctx) -> Outcome {
    let model = job.model.build()?;
    let rho = match (&job.nu, &job.rho) {
        (Some(nu), None) => size_biased(nu)?,
        (None, Some(rho)) => rho.clone(),
        (None, None) => DiscreteDist::dirac(2),
        (Some(_), Some(_)) => return Err(validation("give either nu or rho, not both")),
    };
    let cfg = McConfig::new(job.samples, seed).with_chunk_size(job.chunk_size.unwrap_or(ctx.chunk_size));
    let inner = job.inner.clone().unwrap_or_default();
    let result = match cmd {
        BoundCmd::Rs(_) => {
            if job.m.is_some() {
                return Err(validation("the RS functional takes no m"));
            }
            let zeta: DiscreteDist<f64> = match parse::<HierMeasure>(&job.zeta, "zeta") {
                Ok(HierMeasure::Leaf(d)) => d,
                Ok(_) => return Err(validation("zeta must have level 1")),
                Err(_) => parse(&job.zeta, "zeta")?,
            };
            bounds::rs_functional(&job.mu, &rho, &model, &zeta, &cfg)?
        }
        BoundCmd::Rsb1(_) => {
            let m: f64 = parse(job.m.as_ref().ok_or_else(|| validation("missing m"))?, "m")?;
            let zeta: HierMeasure = parse(&job.zeta, "zeta")?;
            bounds::rsb1_functional(&job.mu, &rho, &model, m, &zeta, &inner, &cfg)?
        }
        BoundCmd::Rsb(_) => {
            let m: Vec<f64> = parse(job.m.as_ref().ok_or_else(|| validation("missing m"))?, "m")?;
            let zeta: HierMeasure = parse(&job.zeta, "zeta")?;
            let params = RsbParams::new(m, zeta)?;
            bounds::rsb_r_functional(&job.mu, &rho, &model, &params, &inner, &cfg)?
        }
    };
    Ok(to_value(&result))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IncrementJob {
    model: ModelSpec,
    profile: ConfigurationProfile,
    zeta: DiscreteDist<f64>,
    p: usize,
    kind: Increment,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StepJob {
    model: ModelSpec,
    /// Degrees, plus the edges and sites paired in before the check.
    profile: ConfigurationProfile,
    zeta: DiscreteDist<f64>,
    p: usize,
    delta: usize,
    #[serde(default = "default_mc_budget")]
    mc_budget: usize,
    #[serde(default)]
    seed: Option<u64>,
}

fn default_mc_budget() -> usize {
    20_000
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DemoJob {
    model: ModelSpec,
    profile: ConfigurationProfile,
    zeta: DiscreteDist<f64>,
    q: usize,
    #[serde(default)]
    delta: Option<usize>,
    #[serde(default)]
    waive_q_rule: bool,
    #[serde(default = "default_combination_cap")]
    combination_cap: usize,
}

fn default_combination_cap() -> usize {
    interpolate::DEFAULT_DEMO_COMBINATION_CAP
}

fn walk_params(w: &WalkArgs) -> Result<WalkParams, Failure> {
    Ok(WalkParams::new(w.q, w.s_q, w.delta, w.waive_q_rule)?)
}

fn walk_inputs(w: &WalkArgs) -> BTreeMap<&'static str, Value> {
    BTreeMap::from([
        ("q", json!(w.q)),
        ("s_q", json!(w.s_q)),
        ("delta", json!(w.delta)),
        ("waive_q_rule", json!(w.waive_q_rule)),
    ])
}

/// Grows a matching from the empty one by the profile's pairings.
fn grow_matching(profile: &ConfigurationProfile, seed: u64) -> Result<Matching, Failure> {
    profile.check_feasible()?;
    let mut rng = stream_rng(seed, 0);
    let mut m = Matching::empty(profile.degrees.clone());
    for (&p, &count) in &profile.edges {
        for _ in 0..count {
            m = p_edge_pairing(&m, p, &mut rng)?;
        }
    }
    for (&p, &count) in &profile.sites {
        for _ in 0..count {
            m = p_site_pairing(&m, p, &mut rng)?;
        }
    }
    Ok(m)
}

fn all_passed(items: &[Value], key: &str) -> bool {
    items.iter().all(|v| v[key].as_bool() == Some(true))
}

fn run_verify(cmd: &VerifyCmd, ctx: &Ctx) -> Run {
    let mut run = Run {
        name: String::new(),
        inputs: json!({}),
        seed: None,
        outcome: Ok(Value::Null),
        text: None,
    };
    match cmd {
        VerifyCmd::Walk { walk, walks } => {
            let seed = ctx.seed(None);
            let mut inputs = walk_inputs(walk);
            inputs.insert("walks", json!(walks));
            run.name = "verify walk".into();
            run.inputs = to_value(&inputs);
            run.seed = Some(seed);
            run.outcome = (|| {
                let params = walk_params(walk)?;
                let report = interpolate::martingale_check(&params, *walks, seed)?;
                let sample = interpolate::run_walk(&params, &mut stream_rng(seed, u64::MAX));
                let bookkeeping = sample.s_q.iter().enumerate().all(|(t, s)| s + t == params.tau);
                Ok(json!({
                    "martingale": report,
                    "sample_walk": sample,
                    "s_q_plus_t_equals_tau": bookkeeping,
                    "passed": report.passed && bookkeeping,
                }))
            })();
        }
        VerifyCmd::Azuma { walk, trials, t } => {
            let seed = ctx.seed(None);
            let mut inputs = walk_inputs(walk);
            inputs.insert("trials", json!(trials));
            inputs.insert("t", json!(t));
            run.name = "verify azuma".into();
            run.inputs = to_value(&inputs);
            run.seed = Some(seed);
            run.outcome = walk_params(walk)
                .and_then(|p| Ok(interpolate::azuma_check(&p, *trials, t, seed)?))
                .map(|r| to_value(&r));
        }
        VerifyCmd::Increment { config } => {
            run.name = "verify increment".into();
            let seed = ctx.seed(None);
            run.seed = Some(seed);
            match config {
                Some(path) => match read_config::<IncrementJob>(path) {
                    Ok((job, raw)) => {
                        let seed = ctx.seed(job.seed);
                        run.seed = Some(seed);
                        run.inputs = raw;
                        run.outcome = job.model.build().map_err(Failure::from).and_then(|model| {
                            Ok(to_value(&interpolate::increment_identity_check(
                                &job.profile,
                                &model,
                                &job.zeta,
                                job.p,
                                job.kind,
                                seed,
                            )?))
                        });
                    }
                    Err(f) => {
                        run.inputs = json!({"config": path});
                        run.outcome = Err(f);
                    }
                },
                None => {
                    run.inputs = json!({"instances": "bundled"});
                    run.outcome = (|| {
                        let mut reports = Vec::new();
                        for inst in bundled::increment_instances() {
                            let r = interpolate::increment_identity_check(
                                &inst.profile,
                                &inst.model,
                                &inst.zeta,
                                inst.p,
                                inst.kind,
                                seed,
                            )?;
                            let mut v = to_value(&r);
                            v["name"] = json!(inst.name);
                            reports.push(v);
                        }
                        Ok(json!({"passed": all_passed(&reports, "passed"), "instances": reports}))
                    })();
                }
            }
        }
        VerifyCmd::Step { config } => {
            run.name = "verify step".into();
            let seed = ctx.seed(None);
            run.seed = Some(seed);
            match config {
                Some(path) => match read_config::<StepJob>(path) {
                    Ok((job, raw)) => {
                        let seed = ctx.seed(job.seed);
                        run.seed = Some(seed);
                        run.inputs = raw;
                        run.outcome = (|| {
                            let model = job.model.build()?;
                            let m = grow_matching(&job.profile, seed)?;
                            let r = interpolate::step_inequality_check(
                                &m,
                                &model,
                                &job.zeta,
                                job.p,
                                job.delta,
                                job.mc_budget,
                                seed,
                            )?;
                            Ok(to_value(&r))
                        })();
                    }
                    Err(f) => {
                        run.inputs = json!({"config": path});
                        run.outcome = Err(f);
                    }
                },
                None => {
                    run.inputs = json!({"instances": "bundled"});
                    run.outcome = (|| {
                        let mut reports = Vec::new();
                        for inst in bundled::step_instances(seed)? {
                            let r = interpolate::step_inequality_check(
                                &inst.matching,
                                &inst.model,
                                &inst.zeta,
                                inst.p,
                                inst.delta,
                                default_mc_budget(),
                                seed,
                            )?;
                            let mut v = to_value(&r);
                            v["name"] = json!(inst.name);
                            reports.push(v);
                        }
                        Ok(json!({"passed": all_passed(&reports, "holds"), "instances": reports}))
                    })();
                }
            }
        }
        VerifyCmd::Zbound { c, p } => {
            run.name = "verify zbound".into();
            run.inputs = json!({"c": c, "p": p});
            run.outcome = (|| {
                if !c.is_empty() {
                    let p = p.ok_or_else(|| validation("--c needs --p"))?;
                    return Ok(to_value(&interpolate::z_sum_bound_check(c, p)?));
                }
                let mut reports = Vec::new();
                for c in z_grid() {
                    for p in [2, 3] {
                        if c.iter().sum::<usize>() > p {
                            reports.push(to_value(&interpolate::z_sum_bound_check(&c, p)?));
                        }
                    }
                }
                Ok(json!({"passed": all_passed(&reports, "holds"), "cases": reports}))
            })();
        }
        VerifyCmd::Budget {
            q,
            s_q,
            delta,
            kappa,
        } => {
            run.name = "verify budget".into();
            run.inputs = json!({"q": q, "s_q": s_q, "delta": delta, "kappa": kappa});
            run.outcome = (|| {
                if let Some(s) = s_q {
                    let mut rows = Vec::new();
                    for &q in q {
                        let b = match delta {
                            Some(d) => interpolate::delta_error_budget_with(q, *s, *d, *kappa)?,
                            None => interpolate::delta_error_budget(q, *s, *kappa)?,
                        };
                        rows.push(to_value(&b));
                    }
                    return Ok(json!({"budgets": rows}));
                }
                let grid = [1_000usize, 10_000, 100_000, 1_000_000];
                let mut series = Vec::new();
                let mut monotone = true;
                for &q in q {
                    let rows: Vec<_> = grid
                        .iter()
                        .map(|&s| interpolate::delta_error_budget(q, s, *kappa))
                        .collect::<Result<_, _>>()?;
                    let dec = rows.windows(2).all(|w| w[1].normalized < w[0].normalized);
                    monotone &= dec;
                    series.push(json!({"q": q, "decreasing": dec, "rows": rows}));
                }
                let c = interpolate::budget_constant(q, &grid, *kappa)?;
                Ok(json!({"passed": monotone, "series": series, "constant": c}))
            })();
        }
        VerifyCmd::Polynomial { samples } => {
            let seed = ctx.seed(None);
            run.name = "verify polynomial".into();
            run.inputs = json!({"samples": samples});
            run.seed = Some(seed);
            run.outcome = Ok(polynomial_report(*samples, seed));
        }
        VerifyCmd::Demo { config } => {
            run.name = "verify demo".into();
            let job = match config {
                Some(path) => read_config::<DemoJob>(path).and_then(|(job, raw)| {
                    let model = job.model.build()?;
                    let cfg = DemoConfig {
                        q: job.q,
                        delta: job.delta,
                        waive_q_rule: job.waive_q_rule,
                        combination_cap: job.combination_cap,
                    };
                    Ok((job.profile, model, job.zeta, cfg, raw))
                }),
                None => {
                    let (profile, model, zeta, cfg) = bundled::demo_instance();
                    Ok((profile, model, zeta, cfg, json!({"instance": "bundled"})))
                }
            };
            match job {
                Ok((profile, model, zeta, cfg, raw)) => {
                    run.inputs = raw;
                    run.outcome = interpolate::interpolation_demo(&profile, &model, &zeta, &cfg)
                        .map(|r| to_value(&r))
                        .map_err(Failure::from);
                }
                Err(f) => {
                    run.inputs = json!({"config": config});
                    run.outcome = Err(f);
                }
            }
        }
    }
    run
}

/// Free-count vectors for the Z check.
fn z_grid() -> Vec<Vec<usize>> {
    vec![
        vec![1, 1, 1],
        vec![2, 2, 2],
        vec![3, 1],
        vec![1, 1, 1, 1, 1],
        vec![4, 3, 2, 1],
        vec![5, 5],
        vec![2, 2, 2, 2, 2, 2],
        vec![1, 2, 3, 4, 5, 6],
        vec![3; 10],
    ]
}

fn polynomial_report(samples: usize, seed: u64) -> Value {
    use rand::Rng;
    let mut rng = stream_rng(seed, 0);
    let mut min_scaled = f64::INFINITY;
    let mut violations = 0;
    for _ in 0..samples {
        let p: u32 = rng.gen_range(2..9);
        let (x, y): (f64, f64) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
        let scale = x.max(y).powi(p as i32).max(f64::MIN_POSITIVE);
        let v = interpolate::polynomial_core(x, y, p) / scale;
        min_scaled = min_scaled.min(v);
        if v < -1e-12 {
            violations += 1;
        }
    }
    json!({"samples": samples, "min_scaled_value": min_scaled, "violations": violations, "passed": violations == 0})
}

//! Command-line experiments over `isolab-core` with deterministic JSON reports.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use isolab_core::forests::{
    check_rsf_inequality, sample_ball_degrees, BallForest, BoundaryMode, DegreeStats,
};
use isolab_core::groups::{
    cayley_ball_with_cap, parse_group_spec, CayleyBall, GeneratingSet, GroupKind, GroupSpec,
};
use isolab_core::harmonic::{
    center_trace_resistance, harmonic_projector, restriction_rank_check, ChainComplex,
    DENSE_EDGE_LIMIT,
};
use isolab_core::isoperimetry::{
    ball_profile, check_comparisons, growth_rate, min_ratio_exact, ProfileRow, VertexSet,
};
use isolab_core::relsim::{
    build_hzero_graphing, check_main_inequality, compress, cost, random_scenario,
    spanning_treeing, witness_ratio, FiniteSpace, Graphing, MainReport, PartialInjection,
    WitnessFamily,
};
use isolab_core::rng::{replica_rng, DEFAULT_SEED};
use isolab_core::{Rational, DEFAULT_VERTEX_CAP};
use rand::seq::IndexedRandom;
use rand::Rng;
use serde_json::{json, Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] isolab_core::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Config(String),
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Parser)]
#[command(name = "isolab", version, about = "Isoperimetric constants, spanning forests and finite graphings")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Report path; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Treat informational checks as asserted.
    #[arg(long = "assert", global = true)]
    pub assert_all: bool,

    /// Worker threads for parallel enumeration and sampling.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Record the wall-clock time in the report.
    #[arg(long, global = true)]
    pub timestamp: bool,

    /// Hard cap on Cayley ball vertices.
    #[arg(long, global = true, env = "ISOLAB_MAX_VERTICES", default_value_t = DEFAULT_VERTEX_CAP)]
    pub max_vertices: usize,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Build a Cayley ball and print it.
    Ball(GroupArgs),
    /// Boundary ratio of the best set in a ball, with the comparison checks.
    Cheeger(CheegerArgs),
    /// Boundary ratios of the balls B(n).
    Profile(ProfileArgs),
    /// Spanning forest degree statistics at the identity.
    Forest(ForestArgs),
    /// Center traces of the harmonic projector over a radius sweep.
    Betti(BettiArgs),
    /// Finite graphing experiments.
    #[command(subcommand)]
    Relsim(RelsimCommand),
}

#[derive(Debug, Clone, Args)]
pub struct GroupArgs {
    /// F<k>, Z^<d>, Zmod<m>^<d> or (<spec>) x (<spec>).
    #[arg(long)]
    pub group: String,
    /// Comma-separated generator words; the standard generators when absent.
    #[arg(long)]
    pub gens: Option<String>,
    #[arg(long)]
    pub radius: u32,
}

#[derive(Debug, Clone, Args)]
pub struct CheegerArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value_t = 8)]
    pub max_size: usize,
    /// Search all connected interior sets instead of the inner balls only.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Also write the rows as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ForestArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value = "free")]
    pub mode: BoundaryMode,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct BettiArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub gens: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub radius: u32,
    /// Inclusive radius range `a:b`; overrides --radius.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Random sets for the restriction rank checks.
    #[arg(long, default_value_t = 10)]
    pub restr_samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Expected limit of the center trace; defaults to k - 1 for F<k> and 0
    /// for Z^<d> with standard generators.
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub target_tol: f64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum RelsimCommand {
    /// Cost 1 + ε graphing of a single orbit with a small witness ratio.
    Hzero {
        #[arg(long = "N")]
        points: usize,
        #[arg(long = "n")]
        height: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Treeing cost against the witness ratio.
    MainCheck {
        /// random, cycle or hzero.
        #[arg(long, default_value = "random")]
        scenario: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long = "N", default_value_t = 100)]
        points: usize,
        /// Witness family size minus one for cycle and hzero scenarios.
        #[arg(long = "n", default_value_t = 9)]
        height: usize,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// Number of random scenarios.
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
    /// Witness transfer from a subset Y carrying a cycle to the whole space.
    Compress {
        #[arg(long = "N", default_value_t = 200)]
        points: usize,
        #[arg(long = "Y", default_value_t = 100)]
        subset: usize,
        #[arg(long = "n", default_value_t = 10)]
        parts: usize,
        #[arg(long, default_value_t = 5)]
        k: usize,
    },
}

/// One named check in a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub asserted: bool,
    pub passed: bool,
    pub values: Value,
}

impl Check {
    pub fn asserted(name: &str, passed: bool, values: Value) -> Self {
        Check {
            name: name.into(),
            asserted: true,
            passed,
            values,
        }
    }

    pub fn info(name: &str, passed: bool, values: Value) -> Self {
        Check {
            asserted: false,
            ..Check::asserted(name, passed, values)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub timestamp: Option<u64>,
    pub checks: Vec<Check>,
    pub payload: Map<String, Value>,
    /// CSV rows for commands that produce them.
    pub csv: Option<String>,
}

impl Report {
    fn new(command: &str, config: Value) -> Self {
        Report {
            command: command.into(),
            config,
            timestamp: None,
            checks: Vec::new(),
            payload: Map::new(),
            csv: None,
        }
    }

    fn set(&mut self, key: &str, value: Value) {
        self.payload.insert(key.into(), value);
    }

    /// True when every asserted check passed.
    pub fn success(&self) -> bool {
        self.checks.iter().all(|c| !c.asserted || c.passed)
    }

    pub fn to_json(&self) -> Value {
        let mut out = self.payload.clone();
        out.insert("command".into(), json!(self.command));
        out.insert("config".into(), self.config.clone());
        out.insert("version".into(), json!(VERSION));
        out.insert("timestamp".into(), json!(self.timestamp));
        out.insert("passed".into(), json!(self.success()));
        let checks = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "asserted": c.asserted,
                    "passed": c.passed,
                    "values": c.values,
                })
            })
            .collect();
        out.insert("checks".into(), Value::Array(checks));
        Value::Object(out)
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("values serialize");
        s.push('\n');
        s
    }
}

/// Rounds to 12 significant digits; non-finite values become null.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    json!(rounded)
}

fn num_text(x: f64) -> String {
    num(x).to_string()
}

pub fn rational(r: Rational) -> Value {
    json!({"num": *r.numer(), "den": *r.denom()})
}

fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Runs a command, inside a dedicated thread pool when `--jobs` is set.
pub fn run(config: &RunConfig) -> CliResult<Report> {
    let mut report = match config.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
            pool.install(|| dispatch(config))?
        }
        None => dispatch(config)?,
    };
    if config.assert_all {
        for c in &mut report.checks {
            c.asserted = true;
        }
    }
    if config.timestamp {
        report.timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }
    Ok(report)
}

/// Writes the report to `--out` or standard output, and CSV rows to their
/// own path.
pub fn emit(report: &Report, config: &RunConfig) -> CliResult<()> {
    if let (Some(csv), Command::Profile(ProfileArgs { csv: Some(path), .. })) =
        (&report.csv, &config.command)
    {
        write_file(path, csv)?;
    }
    match &config.out {
        Some(path) => write_file(path, &report.render()),
        None => {
            print!("{}", report.render());
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn dispatch(config: &RunConfig) -> CliResult<Report> {
    let cap = config.max_vertices;
    match &config.command {
        Command::Ball(args) => ball_command(args, cap),
        Command::Cheeger(args) => cheeger_command(args, cap),
        Command::Profile(args) => profile_command(args, cap),
        Command::Forest(args) => forest_command(args, cap),
        Command::Betti(args) => betti_command(args, cap),
        Command::Relsim(cmd) => relsim_command(cmd),
    }
}

fn group_setup(group: &str, gens: Option<&str>) -> CliResult<(GroupSpec, GeneratingSet)> {
    let spec = parse_group_spec(group)?;
    let gens = match gens {
        Some(text) => GeneratingSet::from_words(&spec, text)?,
        None => GeneratingSet::standard(&spec),
    };
    Ok((spec, gens))
}

fn group_config(args: &GroupArgs, gens: &GeneratingSet) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("group".into(), json!(args.group));
    m.insert("gens".into(), json!(gens.words().join(",")));
    m.insert("radius".into(), json!(args.radius));
    m
}

/// Rank `k` when `gens` are the free generators of `F_k`.
fn free_rank(spec: &GroupSpec, gens: &GeneratingSet) -> Option<usize> {
    match spec.kind() {
        GroupKind::Free { rank } if gens.elements() == GeneratingSet::standard(spec).elements() => Some(*rank),
        _ => None,
    }
}

fn default_target(spec: &GroupSpec, gens: &GeneratingSet) -> Option<f64> {
    if let Some(k) = free_rank(spec, gens) {
        return Some(k as f64 - 1.0);
    }
    match spec.kind() {
        GroupKind::FreeAbelian { .. } if gens.elements() == GeneratingSet::standard(spec).elements() => Some(0.0),
        _ => None,
    }
}

fn labels(ball: &CayleyBall, members: &[usize]) -> Value {
    json!(members
        .iter()
        .map(|&v| ball.spec().label(&ball.vertices()[v]))
        .collect::<Vec<_>>())
}

fn ball_command(args: &GroupArgs, cap: usize) -> CliResult<Report> {
    let (spec, gens) = group_setup(&args.group, args.gens.as_deref())?;
    let ball = cayley_ball_with_cap(&spec, &gens, args.radius, cap)?;
    let mut report = Report::new("ball", Value::Object(group_config(args, &gens)));
    let sizes = ball.ball_sizes();
    let growing = sizes
        .windows(2)
        .skip_while(|w| w[1] > w[0])
        .all(|w| w[1] == w[0]);
    report.checks.push(Check::info(
        "connectivity_within_radius",
        growing,
        json!({"saturated": ball.is_saturated(), "order": spec.order()}),
    ));
    report.set("ball", ball.to_json());
    report.set("ball_sizes", json!(sizes));
    report.set("sphere_sizes", json!(ball.sphere_sizes()));
    report.set("edge_count", json!(ball.edges().len()));
    Ok(report)
}

fn cheeger_command(args: &CheegerArgs, cap: usize) -> CliResult<Report> {
    let g = &args.group;
    let (spec, gens) = group_setup(&g.group, g.gens.as_deref())?;
    if g.radius < 1 {
        return Err(CliError::Config("cheeger needs --radius of at least 1".into()));
    }
    let ball = cayley_ball_with_cap(&spec, &gens, g.radius, cap)?;
    let mut config = group_config(g, &gens);
    config.insert("max_size".into(), json!(args.max_size));
    config.insert("exact".into(), json!(args.exact));
    let mut report = Report::new("cheeger", Value::Object(config));

    let (members, nodes) = if args.exact {
        let best = min_ratio_exact(&ball, args.max_size)?;
        (best.members, Some(best.nodes))
    } else {
        let best = ball_profile(&ball)
            .into_iter()
            .filter(|row| row.ball as usize <= args.max_size)
            .min_by(|a, b| a.ratio.cmp(&b.ratio).then(a.n.cmp(&b.n)))
            .ok_or_else(|| CliError::Config("--max-size admits no inner ball".into()))?;
        ((0..best.ball as usize).collect(), None)
    };
    let growth = growth_rate(&ball.ball_sizes())?;
    let set = VertexSet::new(&ball, members.clone())?;
    let rep = check_comparisons(&set, Some(growth.estimate))?;

    report.set("group", json!(g.group));
    report.set("gens", json!(gens.words().join(",")));
    report.set("radius", json!(g.radius));
    report.set("search", json!(if args.exact { "exact" } else { "balls" }));
    report.set("minimizer", labels(&ball, &members));
    report.set("minimizer_indices", json!(members));
    report.set("size", json!(rep.size));
    report.set("edge_boundary", json!(rep.edge_boundary));
    report.set("inner_boundary", json!(rep.inner_boundary));
    report.set("ratio", rational(rep.ratio));
    report.set("folner", rational(rep.folner_ratio));
    report.set("kazhdan", num(rep.kazhdan_value));
    report.set("growth_estimate", num(growth.estimate));
    report.set("growth_bound", rep.growth_bound.map_or(Value::Null, num));
    report.set("nodes", json!(nodes));
    report.checks.push(Check::asserted(
        "sandwich",
        rep.sandwich.unwrap_or(true),
        json!({
            "skipped": rep.sandwich.is_none(),
            "factor": rep.sandwich_factor,
        }),
    ));
    report.checks.push(Check::asserted(
        "kazhdan",
        rep.kazhdan_ok,
        json!({"value": num(rep.kazhdan_value), "sqrt_ratio": num(to_f64(rep.ratio).sqrt())}),
    ));
    Ok(report)
}

fn profile_csv(rows: &[ProfileRow]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    w.write_record(["n", "ball", "boundary", "ratio_num", "ratio_den", "ratio_float"])
        .map_err(io)?;
    for row in rows {
        w.write_record([
            row.n.to_string(),
            row.ball.to_string(),
            row.boundary.to_string(),
            row.ratio.numer().to_string(),
            row.ratio.denom().to_string(),
            num_text(to_f64(row.ratio)),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn profile_command(args: &ProfileArgs, cap: usize) -> CliResult<Report> {
    let g = &args.group;
    let (spec, gens) = group_setup(&g.group, g.gens.as_deref())?;
    if g.radius < 1 {
        return Err(CliError::Config("profile needs --radius of at least 1".into()));
    }
    let ball = cayley_ball_with_cap(&spec, &gens, g.radius + 1, cap)?;
    let rows = ball_profile(&ball);
    let mut report = Report::new("profile", Value::Object(group_config(g, &gens)));
    report.set(
        "rows",
        json!(rows
            .iter()
            .map(|r| json!({
                "n": r.n,
                "ball": r.ball,
                "boundary": r.boundary,
                "ratio": rational(r.ratio),
                "ratio_float": num(to_f64(r.ratio)),
            }))
            .collect::<Vec<_>>()),
    );
    let sizes = ball.ball_sizes();
    let growth = growth_rate(&sizes[..sizes.len() - 1])?;
    report.set("growth_estimate", num(growth.estimate));
    report.set("growth_root_estimate", num(growth.root_estimate));
    report.set("sphere_ratios", json!(growth.sphere_ratios.iter().map(|&x| num(x)).collect::<Vec<_>>()));
    if let Some(k) = free_rank(&spec, &gens) {
        let floor = Rational::from_integer(2 * k as u64 - 2);
        let decreasing = rows.windows(2).all(|w| w[1].ratio < w[0].ratio);
        let above = rows.iter().all(|r| r.ratio > floor);
        report.checks.push(Check::asserted("strictly_decreasing", decreasing, json!({})));
        report.checks.push(Check::asserted(
            "above_limit",
            above,
            json!({"limit": rational(floor)}),
        ));
    }
    report.csv = Some(profile_csv(&rows)?);
    Ok(report)
}

fn forest_command(args: &ForestArgs, cap: usize) -> CliResult<Report> {
    let g = &args.group;
    let (spec, gens) = group_setup(&g.group, g.gens.as_deref())?;
    if args.samples < 1 {
        return Err(CliError::Config("--samples must be at least 1".into()));
    }
    let ball = cayley_ball_with_cap(&spec, &gens, g.radius, cap)?;
    let sampler = BallForest::new(&ball, args.mode)?;
    let degrees = sample_ball_degrees(&sampler, args.samples, args.seed);
    let stats = DegreeStats::from_degrees(&degrees)?;

    let mut config = group_config(g, &gens);
    config.insert("mode".into(), json!(args.mode.to_string()));
    config.insert("samples".into(), json!(args.samples));
    config.insert("seed".into(), json!(args.seed));
    let mut report = Report::new("forest", Value::Object(config));

    // Inner balls B(0), ..., B(r-1) as witness sets for the first samples.
    let graph = sampler.ball_graph();
    let sizes = ball.ball_sizes();
    let checked = args.samples.min(200);
    let mut rsf_ok = true;
    for replica in 0..checked {
        let sample = sampler.sample(args.seed, replica);
        for &size in &sizes[..g.radius as usize] {
            let members: Vec<usize> = (0..size as usize).collect();
            rsf_ok &= check_rsf_inequality(&sample, graph, &members)?;
        }
    }

    report.set(
        "graph",
        json!({
            "group": g.group,
            "gens": gens.words().join(","),
            "radius": g.radius,
            "vertices": ball.len(),
            "edges": ball.edges().len(),
        }),
    );
    report.set("mode", json!(args.mode.to_string()));
    report.set("samples", json!(stats.samples));
    report.set("mean_degree", num(stats.mean_degree));
    report.set("variance", num(stats.variance));
    report.set("standard_error", num(stats.standard_error));
    report.set("ci99", num(stats.ci99));
    report.set("cost_estimate", num(stats.cost_estimate));
    report.set("beta1_estimate", num(stats.beta1_estimate));
    report.set("beta1_ci99", num(stats.beta1_ci99));
    report.set("rsf_checks_passed", json!(rsf_ok));
    report.checks.push(Check::asserted(
        "rsf_per_sample",
        rsf_ok,
        json!({"samples_checked": checked, "sets": g.radius}),
    ));
    if let (Some(k), BoundaryMode::Free) = (free_rank(&spec, &gens), args.mode) {
        report.checks.push(Check::asserted(
            "tree_exact",
            stats.variance == 0.0 && stats.beta1_estimate == k as f64 - 1.0,
            json!({"expected": k - 1}),
        ));
    }
    Ok(report)
}

fn parse_sweep(text: &str) -> CliResult<Vec<u32>> {
    let bad = || CliError::Config(format!("--sweep expects a:b, got '{text}'"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a < 1 || b < a {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

fn betti_command(args: &BettiArgs, cap: usize) -> CliResult<Report> {
    let (spec, gens) = group_setup(&args.group, args.gens.as_deref())?;
    let radii = match &args.sweep {
        Some(s) => parse_sweep(s)?,
        None => vec![args.radius],
    };
    if radii.contains(&0) {
        return Err(CliError::Config("betti needs radii of at least 1".into()));
    }
    let mut traces = Vec::new();
    let mut dims = Vec::new();
    let mut routes = Vec::new();
    let mut restr_ball: Option<(CayleyBall, ChainComplex)> = None;
    for &r in &radii {
        let ball = cayley_ball_with_cap(&spec, &gens, r, cap)?;
        let cc = ChainComplex::from_ball(&ball)?;
        dims.push(cc.harmonic_dimension());
        if cc.edge_count() <= DENSE_EDGE_LIMIT {
            traces.push(harmonic_projector(&cc)?.center_trace());
            routes.push("dense");
            if r >= 2 {
                restr_ball = Some((ball, cc));
            }
        } else {
            traces.push(center_trace_resistance(&cc)?);
            routes.push("resistance");
        }
    }

    let mut restr = Vec::new();
    if let Some((ball, cc)) = &restr_ball {
        let h = harmonic_projector(cc)?;
        let r = ball.radius();
        let admissible: Vec<usize> = (0..ball.len())
            .filter(|&v| ball.sphere_of(v) + 2 <= r)
            .collect();
        let mut sets: Vec<Vec<usize>> = ball.ball_sizes()[..(r - 1) as usize]
            .iter()
            .map(|&s| (0..s as usize).collect())
            .collect();
        let mut rng = replica_rng(args.seed, 0);
        for _ in 0..args.restr_samples {
            let k = rng.random_range(1..=admissible.len().min(12));
            let mut set: Vec<usize> = admissible.choose_multiple(&mut rng, k).copied().collect();
            set.sort_unstable();
            sets.push(set);
        }
        for set in sets {
            let ranks = restriction_rank_check(&h, cc, &set)?;
            restr.push(json!({
                "A": set,
                "rank_AS": ranks.rank_as,
                "rank_bd": ranks.rank_boundary,
                "boundary_edges": ranks.boundary_edges,
                "equal": ranks.equal,
                "gap": ranks.gap_as.map_or(Value::Null, num),
                "gap_bd": ranks.gap_boundary.map_or(Value::Null, num),
            }));
        }
    }

    let mut config = Map::new();
    config.insert("group".into(), json!(args.group));
    config.insert("gens".into(), json!(gens.words().join(",")));
    config.insert("radii".into(), json!(radii));
    config.insert("restr_samples".into(), json!(args.restr_samples));
    config.insert("seed".into(), json!(args.seed));
    let mut report = Report::new("betti", Value::Object(config));
    let all_equal = restr.iter().all(|c| c["equal"] == json!(true));
    report.checks.push(Check::asserted(
        "restriction_ranks",
        all_equal,
        json!({"sets": restr.len()}),
    ));
    let last = *traces.last().expect("at least one radius");
    if let Some(target) = args.target.or_else(|| default_target(&spec, &gens)) {
        report.checks.push(Check::info(
            "trace_near_target",
            (last - target).abs() <= args.target_tol,
            json!({"target": num(target), "tolerance": num(args.target_tol), "last": num(last)}),
        ));
    }
    if spec.rank() == 1 && matches!(spec.kind(), GroupKind::FreeAbelian { .. }) && gens.len() == 1 {
        let worst = radii
            .iter()
            .zip(&traces)
            .map(|(&r, &t)| (t - 1.0 / (2.0 * r as f64)).abs())
            .fold(0.0, f64::max);
        report.checks.push(Check::asserted(
            "path_closed_form",
            worst <= 1e-8,
            json!({"max_error": num(worst)}),
        ));
    }
    report.set("radii", json!(radii));
    report.set("center_trace", json!(traces.iter().map(|&t| num(t)).collect::<Vec<_>>()));
    report.set("dims", json!(dims));
    report.set("routes", json!(routes));
    report.set("restr_checks", Value::Array(restr));
    Ok(report)
}

fn main_report_json(rep: &MainReport) -> Value {
    json!({
        "cost": rational(rep.cost),
        "cost_treeing": rational(rep.cost_treeing),
        "classes": rep.classes,
        "witness_ratio": rational(rep.witness_ratio),
        "lhs": rational(rep.lhs),
        "rhs": rational(rep.rhs),
        "holds": rep.holds,
        "degree_identity": rep.degree_identity,
        "fiberwise": rep.fiberwise,
    })
}

fn relsim_command(cmd: &RelsimCommand) -> CliResult<Report> {
    match *cmd {
        RelsimCommand::Hzero {
            points,
            height,
            eps,
        } => {
            let h = build_hzero_graphing(points, height, eps)?;
            let w = h.witness()?;
            let ratio = witness_ratio(&h.graphing, &w)?;
            let main = check_main_inequality(&h.graphing, &w)?;
            let c = cost(&h.graphing);
            let expected = Rational::new((points + h.psi_size) as u64, points as u64);
            let bound = Rational::new(4, height as u64 + 1);
            let mut report = Report::new(
                "relsim hzero",
                json!({"N": points, "n": height, "eps": num(eps)}),
            );
            report.set("N", json!(points));
            report.set("n", json!(height));
            report.set("eps", num(eps));
            report.set("psi_size", json!(h.psi_size));
            report.set("cost", rational(c));
            report.set("cost_treeing", rational(cost(&spanning_treeing(&h.graphing))));
            report.set("witness_ratio", rational(ratio));
            report.set("bound_4_over_n1", rational(bound));
            report.set("residual", json!(h.tower.residual.len()));
            report.checks.push(Check::asserted(
                "cost_exact",
                c == expected,
                json!({"expected": rational(expected)}),
            ));
            report.checks.push(Check::asserted("segment_property", h.segment_property(), json!({})));
            report.checks.push(Check::asserted("witness_bound", ratio <= bound, json!({})));
            report.checks.push(Check::asserted("main_inequality", main.passed(), main_report_json(&main)));
            Ok(report)
        }
        RelsimCommand::MainCheck {
            ref scenario,
            seed,
            points,
            height,
            eps,
            count,
        } => {
            let scenarios: Vec<(Graphing, WitnessFamily)> = match scenario.as_str() {
                "random" => (0..count)
                    .map(|i| random_scenario(points, seed, i))
                    .collect::<Result<_, _>>()?,
                "cycle" => {
                    let space = FiniteSpace::new(points)?;
                    let phi = PartialInjection::rotation(space, 1);
                    let w = WitnessFamily::powers(&phi, height)?;
                    vec![(Graphing::new(space, vec![phi])?, w)]
                }
                "hzero" => {
                    let h = build_hzero_graphing(points, height, eps)?;
                    let w = h.witness()?;
                    vec![(h.graphing, w)]
                }
                other => {
                    return Err(CliError::Config(format!(
                        "unknown scenario '{other}', expected random, cycle or hzero"
                    )))
                }
            };
            let results: Vec<MainReport> = scenarios
                .iter()
                .map(|(g, w)| check_main_inequality(g, w))
                .collect::<Result<_, _>>()?;
            let mut report = Report::new(
                "relsim main-check",
                json!({
                    "scenario": scenario,
                    "seed": seed,
                    "N": points,
                    "n": height,
                    "eps": num(eps),
                    "count": count,
                }),
            );
            let all = results.iter().all(MainReport::passed);
            report.set("results", json!(results.iter().map(main_report_json).collect::<Vec<_>>()));
            report.checks.push(Check::asserted(
                "main_inequality",
                all,
                json!({"scenarios": results.len()}),
            ));
            Ok(report)
        }
        RelsimCommand::Compress {
            points,
            subset,
            parts,
            k,
        } => {
            if k < 1 {
                return Err(CliError::Config("--k must be at least 1".into()));
            }
            let y = FiniteSpace::new(subset)?;
            let sigma = PartialInjection::rotation(y, 1);
            let graphing = Graphing::new(y, vec![sigma.clone()])?;
            let w = WitnessFamily::powers(&sigma, k - 1)?;
            let rep = compress(&graphing, &w, points, parts)?;
            let mut report = Report::new(
                "relsim compress",
                json!({"N": points, "Y": subset, "n": parts, "k": k}),
            );
            report.set("part_size", json!(rep.part_size));
            report.set("delta", rational(rep.delta));
            report.set("mu_y", rational(rep.mu_y));
            report.set("lifted_boundary", json!(rep.lifted_boundary));
            report.set("base_boundary", json!(rep.base_boundary));
            report.set("bound", json!(rep.bound));
            report.set("lifted_measure", rational(rep.lifted_measure));
            report.set("bound_measure", rational(rep.bound_measure));
            report.set("lifted_ratio", rational(rep.lifted_ratio));
            report.set("base_ratio", rational(rep.base_ratio));
            report.checks.push(Check::asserted(
                "compression_bound",
                rep.holds,
                json!({"lhs": rep.lifted_boundary, "rhs": rep.bound}),
            ));
            Ok(report)
        }
    }
}

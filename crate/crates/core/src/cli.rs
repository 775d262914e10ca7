//! Command-line front end. Every output carries the full parameter echo.
//!
//! Exit codes: 0 success, 1 usage error, 2 library or domain error, 3 a
//! verification check did not pass.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::connectivity::{conn_and_gap, ConnDefinition};
use crate::error::Error;
use crate::eval::{
    beta_sweep_experiment, cluster_metrics, seed_sweep, BetaSweepConfig, SeedSweepConfig, SeedThresholds,
};
use crate::generators::{
    chain, experiment1_graph, hard_instance, knn_graph, watts_strogatz, Experiment1Config, HardInstanceSpec,
};
use crate::graph::{VertexSet, WeightedGraph};
use crate::io::{self, fmt_real, LoadedGraph};
use crate::nibble::{
    choose_mode, nibble_both_modes, page_rank_nibble, vol0_search, NibbleMode, NibbleParams, NibbleResult,
};
use crate::oracles::{
    chain_eigen_check, check_hard_instance, hard_instance_grid_search, recipe_c0, verify_appendix_lemma,
    AppendixBoundRequest, HardInstanceCheck, Lemma,
};
use crate::pagerank::{approximate_pagerank, exact_pagerank_of, PageRankParams, PushStats, SparseMass};
use crate::sweep::{best_sweep_cut, LsCurve, SweepProfile};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "NIBBLE_OUT_DIR";

/// Largest chain eigensystem residual accepted by `verify-appendix`.
pub const EIGEN_RESIDUAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "nibble", version, about = "Local graph clustering with approximate PageRank")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic graph as an edge list (plus a labels sidecar).
    #[command(subcommand)]
    Generate(Generate),
    /// Run PageRank-Nibble from one seed vertex.
    Cluster(ClusterArgs),
    /// Run gap mode and classic mode and keep the lower conductance.
    AutoCluster(AutoClusterArgs),
    /// Internal connectivity and gap of a target set.
    Conn(ConnArgs),
    /// Sweep profile and Lovász–Simonovits curve of a mass vector.
    SweepCurve(SweepCurveArgs),
    /// Check the chain PageRank bounds on a parameter grid.
    VerifyAppendix(VerifyAppendixArgs),
    /// Check the two-chain hard instance at one point or by grid search.
    VerifyHard(VerifyHardArgs),
    /// Planted-benchmark sweep over the rewiring probability.
    BetaSweep(BetaSweepArgs),
    /// Fraction of a target set whose seeds give a good cluster.
    SeedSweep(SeedSweepArgs),
    /// Quality metrics of a cluster against a target set.
    Eval(EvalArgs),
}

#[derive(Debug, Subcommand)]
enum Generate {
    /// Watts–Strogatz small-world graph.
    Ws(WsArgs),
    /// Three-block planted benchmark (Watts–Strogatz block A, random B and C).
    Exp1(Exp1Args),
    /// Two-chain hard instance.
    Hard(HardArgs),
    /// Path on ell + 1 vertices with doubled-degree endpoints.
    Chain(ChainArgs),
    /// Gaussian k-NN graph of a points CSV.
    Knn(KnnArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args, Serialize)]
struct OutputArgs {
    /// Output file; defaults to `$NIBBLE_OUT_DIR/<command>.<ext>`, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args, Serialize)]
struct GraphOutputArgs {
    /// Edge-list output; defaults to `$NIBBLE_OUT_DIR/<command>.el`, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Labels sidecar; defaults to the edge-list path with a `.labels` extension.
    #[arg(long)]
    labels_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct WsArgs {
    #[arg(long)]
    n: usize,
    /// Mean degree (even).
    #[arg(long)]
    k: usize,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[command(flatten)]
    output: GraphOutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct Exp1Args {
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[command(flatten)]
    output: GraphOutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct HardArgs {
    #[arg(long)]
    ell: usize,
    /// `phi ell^2`; the top-chain conductance is this over `ell^2`.
    #[arg(long)]
    phi_ell2: f64,
    /// Teleport scale used to derive c0 by the recipe.
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    /// Explicit c0 instead of the recipe.
    #[arg(long)]
    c0: Option<f64>,
    #[arg(long, default_value_t = 1e10)]
    n: f64,
    #[command(flatten)]
    output: GraphOutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct ChainArgs {
    #[arg(long)]
    ell: usize,
    #[command(flatten)]
    output: GraphOutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct KnnArgs {
    /// Points CSV.
    #[arg(long)]
    points: PathBuf,
    /// The first CSV column is an integer class label.
    #[arg(long)]
    labeled: bool,
    #[arg(long, default_value_t = 20)]
    k: usize,
    /// Kernel width as a multiple of the mean squared k-th neighbor distance.
    #[arg(long, default_value_t = 0.2)]
    sigma_factor: f64,
    #[command(flatten)]
    output: GraphOutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct NibbleTuning {
    /// Connectivity estimate of the target set, in (0, 1].
    #[arg(long, required_unless_present = "alpha")]
    conn: Option<f64>,
    /// Teleport probability override.
    #[arg(long)]
    alpha: Option<f64>,
    /// Push tolerance override; defaults to 1 / (10 vol0).
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 1.0 / 9.0)]
    alpha_scale: f64,
    #[arg(long, default_value_t = 1.0 / 16.0)]
    c_min: f64,
    #[arg(long, default_value_t = 0.5)]
    c_max: f64,
}

impl NibbleTuning {
    fn params(&self, seed: usize, vol0: f64) -> NibbleParams {
        let mut p = NibbleParams::new(seed, self.conn.unwrap_or(f64::NAN), vol0);
        p.alpha_scale = self.alpha_scale;
        p.c_min = self.c_min;
        p.c_max = self.c_max;
        p.alpha_override = self.alpha;
        p.epsilon_override = self.eps;
        p
    }
}

#[derive(Debug, Args, Serialize)]
struct NibbleArgs {
    /// Edge-list file.
    #[arg(long)]
    graph: PathBuf,
    /// Seed vertex id as written in the edge list.
    #[arg(long)]
    seed_vertex: usize,
    /// Volume guess for the target set.
    #[arg(long, required_unless_present = "phi_accept")]
    vol0: Option<f64>,
    /// Search vol0 = 1, 2, 4, ... and accept the first cut with at most this conductance.
    #[arg(long, conflicts_with = "vol0")]
    phi_accept: Option<f64>,
    /// Largest vol0 tried by the search; defaults to vol(V).
    #[arg(long, requires = "phi_accept")]
    vol0_max: Option<f64>,
    #[command(flatten)]
    tuning: NibbleTuning,
}

#[derive(Debug, Args, Serialize)]
struct ClusterArgs {
    #[command(flatten)]
    nibble: NibbleArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct AutoClusterArgs {
    #[command(flatten)]
    nibble: NibbleArgs,
    /// Conductance scale of the target; classic mode uses alpha = phi_target * classic_scale.
    #[arg(long)]
    phi_target: f64,
    #[arg(long, default_value_t = 1.0)]
    classic_scale: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct TargetArgs {
    /// Vertex-set file with the target set.
    #[arg(long, required_unless_present = "labels", conflicts_with = "labels")]
    target: Option<PathBuf>,
    /// Labels sidecar; the target is every vertex labeled `--label`.
    #[arg(long, requires = "label")]
    labels: Option<PathBuf>,
    #[arg(long, requires = "labels")]
    label: Option<String>,
}

impl TargetArgs {
    fn load(&self, g: &LoadedGraph) -> Result<VertexSet, Failure> {
        if let Some(path) = &self.target {
            return Ok(g.set_from_ids(&io::load_vertex_ids(path)?)?);
        }
        let (Some(path), Some(label)) = (&self.labels, &self.label) else {
            return Err(Failure::Usage(
                "either --target or --labels with --label is required".into(),
            ));
        };
        let groups = io::load_labels(path)?;
        let ids = groups.get(label).ok_or_else(|| {
            Failure::Usage(format!(
                "label {label:?} not found; available: {}",
                groups.keys().cloned().collect::<Vec<_>>().join(", ")
            ))
        })?;
        Ok(g.set_from_ids(ids)?)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ConnDefArg {
    Mix,
    Lambda,
    PhiS,
}

impl From<ConnDefArg> for ConnDefinition {
    fn from(d: ConnDefArg) -> Self {
        match d {
            ConnDefArg::Mix => ConnDefinition::Mix,
            ConnDefArg::Lambda => ConnDefinition::Lambda,
            ConnDefArg::PhiS => ConnDefinition::PhiS,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct ConnArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    target: TargetArgs,
    #[arg(long, value_enum, default_value_t = ConnDefArg::Mix)]
    definition: ConnDefArg,
    /// Conductance used for the gap instead of the measured one.
    #[arg(long)]
    phi: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct SweepCurveArgs {
    #[arg(long)]
    graph: PathBuf,
    /// `vertex,mass` CSV to sweep.
    #[arg(long, required_unless_present = "seed_vertex", conflicts_with = "seed_vertex")]
    mass: Option<PathBuf>,
    /// Compute PageRank from this seed instead of reading a mass file.
    #[arg(long, requires = "alpha")]
    seed_vertex: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Push tolerance for the approximate vector.
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// Use exact PageRank instead of the push approximation.
    #[arg(long)]
    exact: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct VerifyAppendixArgs {
    /// Lemmas to check (A1..A4); all when omitted.
    #[arg(long, value_delimiter = ',')]
    lemma: Vec<Lemma>,
    #[arg(long, value_delimiter = ',', default_values_t = [50usize, 100, 200])]
    ell: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 4.0])]
    gamma: Vec<f64>,
    /// Constant of the lower-order slack term.
    #[arg(long, default_value_t = 10.0)]
    slack: f64,
    /// Also check the chain eigensystem residual at these ell.
    #[arg(long, value_delimiter = ',')]
    eigen_ell: Vec<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct VerifyHardArgs {
    #[arg(long, default_value_t = 100)]
    ell: usize,
    #[arg(long, default_value_t = 0.25)]
    phi_ell2: f64,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1e10)]
    n: f64,
    /// Explicit c0 instead of the recipe.
    #[arg(long)]
    c0: Option<f64>,
    /// Required min sweep conductance over phi(A) ell.
    #[arg(long, default_value_t = 0.05)]
    min_ratio: f64,
    /// Grid-search for a passing point instead of checking one.
    #[arg(long)]
    search: bool,
    #[arg(long, value_delimiter = ',', default_values_t = [100usize, 150, 200, 250, 300, 350, 400])]
    search_ell: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.025, 0.05, 0.1, 0.25])]
    search_phi_ell2: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0])]
    search_gamma: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct BetaSweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.25, 0.5, 0.75, 1.0])]
    betas: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// vol0 as a multiple of vol(A).
    #[arg(long, default_value_t = 1.0)]
    vol0_factor: f64,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 1.0 / 16.0)]
    c_min: f64,
    #[arg(long, default_value_t = 0.5)]
    c_max: f64,
    /// Per-run JSONL log; defaults to the output path with `.runs.jsonl`.
    #[arg(long)]
    runs_out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct SeedSweepArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    target: TargetArgs,
    /// Volume guess; defaults to vol(target).
    #[arg(long)]
    vol0: Option<f64>,
    #[command(flatten)]
    tuning: NibbleTuning,
    #[arg(long, default_value_t = 0.2)]
    max_vol_out: f64,
    #[arg(long, default_value_t = 0.2)]
    max_vol_miss: f64,
    /// Absolute conductance threshold.
    #[arg(long)]
    max_phi: Option<f64>,
    /// Conductance threshold as a multiple of phi(target), used without --max-phi.
    #[arg(long, default_value_t = 5.0)]
    max_phi_factor: f64,
    #[arg(long, default_value_t = 1000)]
    max_exhaustive: usize,
    #[arg(long, default_value_t = 200)]
    sample_size: usize,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct EvalArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Vertex-set file with the cluster to score.
    #[arg(long)]
    set: PathBuf,
    #[command(flatten)]
    target: TargetArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Library(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Library(Error::Io(e))
    }
}

type Outcome = Result<(), Failure>;

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Library(e)) => {
            eprintln!("error: {e}");
            2
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            3
        }
    }
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Generate(g) => run_generate(g),
        Command::Cluster(a) => run_cluster(&a),
        Command::AutoCluster(a) => run_auto_cluster(&a),
        Command::Conn(a) => run_conn(&a),
        Command::SweepCurve(a) => run_sweep_curve(&a),
        Command::VerifyAppendix(a) => run_verify_appendix(&a),
        Command::VerifyHard(a) => run_verify_hard(&a),
        Command::BetaSweep(a) => run_beta_sweep(&a),
        Command::SeedSweep(a) => run_seed_sweep(&a),
        Command::Eval(a) => run_eval(&a),
    }
}

fn default_path(out: &Option<PathBuf>, stem: &str, ext: &str) -> Option<PathBuf> {
    out.clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(|dir| PathBuf::from(dir).join(format!("{stem}.{ext}"))))
}

fn open_sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

fn echo<P: Serialize>(command: &str, params: &P) -> Result<Vec<String>, Failure> {
    Ok(vec![
        format!("command: {command}"),
        format!("parameters: {}", serde_json::to_string(params).map_err(Error::from)?),
    ])
}

/// Writes `{command, parameters, result}` as JSON, or the flattened result
/// as `key,value` CSV under `#` echo lines.
fn emit<P: Serialize, R: Serialize>(
    command: &str,
    params: &P,
    result: &R,
    output: &OutputArgs,
    default: Format,
) -> Outcome {
    let format = output.format.unwrap_or(default);
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let path = default_path(&output.out, command, ext);
    let mut sink = open_sink(path.as_deref())?;
    match format {
        Format::Json => {
            let doc = json!({
                "command": command,
                "parameters": params,
                "result": result,
            });
            serde_json::to_writer_pretty(&mut sink, &doc).map_err(Error::from)?;
            writeln!(sink)?;
        }
        Format::Csv => {
            for line in echo(command, params)? {
                writeln!(sink, "# {line}")?;
            }
            writeln!(sink, "key,value")?;
            let value = serde_json::to_value(result).map_err(Error::from)?;
            let mut rows = Vec::new();
            flatten("", &value, &mut rows);
            for (k, v) in rows {
                writeln!(sink, "{k},{v}")?;
            }
        }
    }
    sink.flush()?;
    Ok(())
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let joined: Vec<String> = items.iter().map(scalar_text).collect();
            out.push((prefix.to_string(), joined.join(" ")));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        scalar => out.push((prefix.to_string(), scalar_text(scalar))),
    }
}

fn write_graph_outputs<P: Serialize>(
    command: &str,
    params: &P,
    graph: &WeightedGraph,
    labels: Option<&[String]>,
    output: &GraphOutputArgs,
) -> Outcome {
    let header = echo(command, params)?;
    let path = default_path(&output.out, command, "el");
    let mut sink = open_sink(path.as_deref())?;
    io::write_edge_list(graph, None, &header, &mut sink)?;
    sink.flush()?;
    let labels_path = output
        .labels_out
        .clone()
        .or_else(|| path.as_ref().map(|p| p.with_extension("labels")));
    if let (Some(labels), Some(lp)) = (labels, labels_path) {
        let mut sink = open_sink(Some(&lp))?;
        io::write_labels(labels, &header, &mut sink)?;
        sink.flush()?;
    }
    Ok(())
}

fn run_generate(g: Generate) -> Outcome {
    match g {
        Generate::Ws(a) => {
            let graph = watts_strogatz(a.n, a.k, a.beta, a.rng_seed)?;
            write_graph_outputs("generate-ws", &a, &graph, None, &a.output)
        }
        Generate::Exp1(a) => {
            let gen = experiment1_graph(&Experiment1Config::new(a.beta, a.rng_seed))?;
            write_graph_outputs("generate-exp1", &a, &gen.graph, Some(&gen.labels), &a.output)
        }
        Generate::Hard(a) => {
            let c0 = match a.c0 {
                Some(c0) => c0,
                None => recipe_c0(a.gamma)?,
            };
            let spec = HardInstanceSpec {
                ell: a.ell,
                n: a.n,
                phi: a.phi_ell2 / (a.ell as f64).powi(2),
                c0,
            };
            let h = hard_instance(&spec)?;
            let params = json!({ "args": &a, "spec": spec, "multiplicities": h.multiplicities });
            write_graph_outputs(
                "generate-hard",
                &params,
                &h.generated.graph,
                Some(&h.generated.labels),
                &a.output,
            )
        }
        Generate::Chain(a) => {
            let graph = chain(a.ell)?;
            write_graph_outputs("generate-chain", &a, &graph, None, &a.output)
        }
        Generate::Knn(a) => {
            let points = io::load_points(&a.points, a.labeled)?;
            let graph = knn_graph(&points.rows, a.k, a.sigma_factor)?;
            let labels: Option<Vec<String>> = points.labels.map(|ls| ls.iter().map(|l| l.to_string()).collect());
            write_graph_outputs("generate-knn", &a, &graph, labels.as_deref(), &a.output)
        }
    }
}

/// Cluster output with vertex ids as written in the input file.
#[derive(Debug, Serialize)]
struct ClusterOutput {
    set: Vec<usize>,
    size: usize,
    volume: f64,
    phi: f64,
    mode: NibbleMode,
    alpha: f64,
    epsilon: f64,
    vol0: f64,
    seed_vertex: usize,
    candidates: usize,
    stats: PushStats,
}

impl ClusterOutput {
    fn new(g: &LoadedGraph, r: &NibbleResult) -> Self {
        Self {
            set: g.external_ids(&r.output_set),
            size: r.output_set.len(),
            volume: r.output_set.volume(),
            phi: r.phi,
            mode: r.mode,
            alpha: r.alpha,
            epsilon: r.epsilon,
            vol0: r.params.vol0,
            seed_vertex: g.external(r.params.seed),
            candidates: r.candidates,
            stats: r.stats,
        }
    }
}

fn emit_cluster<P: Serialize>(
    command: &str,
    params: &P,
    result: &Value,
    set: &[usize],
    output: &OutputArgs,
) -> Outcome {
    match output.format.unwrap_or(Format::Json) {
        Format::Json => emit(command, params, result, output, Format::Json),
        Format::Csv => {
            let path = default_path(&output.out, command, "csv");
            let mut sink = open_sink(path.as_deref())?;
            let mut header = echo(command, params)?;
            header.push(format!(
                "result: {}",
                serde_json::to_string(result).map_err(Error::from)?
            ));
            io::write_vertex_ids(set, &header, &mut sink)?;
            sink.flush()?;
            Ok(())
        }
    }
}

fn run_nibble(g: &LoadedGraph, a: &NibbleArgs) -> Result<NibbleResult, Failure> {
    let seed = g.internal(a.seed_vertex)?;
    match (a.vol0, a.phi_accept) {
        (Some(vol0), _) => Ok(page_rank_nibble(&g.graph, &a.tuning.params(seed, vol0))?),
        (None, Some(phi_accept)) => {
            let cap = a.vol0_max.unwrap_or(g.graph.total_volume());
            Ok(vol0_search(&g.graph, &a.tuning.params(seed, 1.0), phi_accept, cap)?)
        }
        (None, None) => Err(Failure::Usage("either --vol0 or --phi-accept is required".into())),
    }
}

fn run_cluster(a: &ClusterArgs) -> Outcome {
    let g = io::load_graph(&a.nibble.graph)?;
    let r = run_nibble(&g, &a.nibble)?;
    let out = ClusterOutput::new(&g, &r);
    let value = serde_json::to_value(&out).map_err(Error::from)?;
    emit_cluster("cluster", a, &value, &out.set, &a.output)
}

#[derive(Debug, Serialize)]
struct ModeSummary {
    alpha: f64,
    phi: Option<f64>,
    error: Option<String>,
}

impl ModeSummary {
    fn new(alpha: f64, r: &crate::error::Result<NibbleResult>) -> Self {
        match r {
            Ok(r) => Self {
                alpha,
                phi: Some(r.phi),
                error: None,
            },
            Err(e) => Self {
                alpha,
                phi: None,
                error: Some(e.to_string()),
            },
        }
    }
}

fn run_auto_cluster(a: &AutoClusterArgs) -> Outcome {
    let Some(vol0) = a.nibble.vol0 else {
        return Err(Failure::Usage(
            "auto-cluster needs --vol0 (no vol0 search in two-mode runs)".into(),
        ));
    };
    let g = io::load_graph(&a.nibble.graph)?;
    let params = a.nibble.tuning.params(g.internal(a.nibble.seed_vertex)?, vol0);
    let (gap, classic) = nibble_both_modes(&g.graph, &params, a.phi_target, a.classic_scale)?;
    let summaries = (
        ModeSummary::new(params.alpha(), &gap),
        ModeSummary::new(a.phi_target * a.classic_scale, &classic),
    );
    let chosen = choose_mode(gap, classic)?;
    let out = ClusterOutput::new(&g, &chosen);
    let value = json!({
        "chosen": &out,
        "gap_mode": summaries.0,
        "classic_mode": summaries.1,
    });
    emit_cluster("auto-cluster", a, &value, &out.set, &a.output)
}

fn run_conn(a: &ConnArgs) -> Outcome {
    let g = io::load_graph(&a.graph)?;
    let set = a.target.load(&g)?;
    let report = conn_and_gap(&g.graph, &set, a.definition.into(), a.phi)?;
    emit("conn", a, &report, &a.output, Format::Json)
}

#[derive(Debug, Serialize)]
struct SweepRow {
    rank: usize,
    vertex: usize,
    normalized_value: f64,
    prefix_volume: f64,
    prefix_mass: f64,
    prefix_cut: f64,
    prefix_conductance: Option<f64>,
}

fn run_sweep_curve(a: &SweepCurveArgs) -> Outcome {
    let g = io::load_graph(&a.graph)?;
    let p = match (&a.mass, a.seed_vertex, a.alpha) {
        (Some(path), _, _) => {
            let entries = io::load_mass(path)?
                .into_iter()
                .map(|(id, m)| Ok((g.internal(id)?, m)))
                .collect::<crate::error::Result<Vec<_>>>()?;
            SparseMass::from_entries(entries)?
        }
        (None, Some(seed), Some(alpha)) => {
            let s = SparseMass::indicator(g.internal(seed)?);
            if a.exact {
                SparseMass::from_dense(&exact_pagerank_of(&g.graph, &s, alpha, 1e-12)?)
            } else {
                approximate_pagerank(&g.graph, &s, PageRankParams::new(alpha, a.eps)?)?.p
            }
        }
        _ => return Err(Failure::Usage("give --mass, or --seed-vertex with --alpha".into())),
    };
    let profile = SweepProfile::build(&g.graph, &p)?;
    match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let path = default_path(&a.output.out, "sweep-curve", "csv");
            let mut sink = open_sink(path.as_deref())?;
            for line in echo("sweep-curve", a)? {
                writeln!(sink, "# {line}")?;
            }
            profile.write_csv(g.ids.as_deref(), &mut sink)?;
            sink.flush()?;
            Ok(())
        }
        Format::Json => {
            let rows: Vec<SweepRow> = (0..profile.len())
                .map(|j| SweepRow {
                    rank: j + 1,
                    vertex: g.external(profile.order()[j]),
                    normalized_value: profile.values()[j],
                    prefix_volume: profile.prefix_volume(j),
                    prefix_mass: profile.prefix_mass(j),
                    prefix_cut: profile.prefix_cut(j),
                    prefix_conductance: profile.prefix_conductance(j),
                })
                .collect();
            let curve = LsCurve::from_profile(&profile);
            let breakpoints: Vec<(f64, f64)> = curve.breakpoints().collect();
            let best = best_sweep_cut(&profile, None)
                .ok()
                .map(|c| json!({ "phi": c.phi, "prefix_len": c.prefix_len, "set": g.external_ids(&c.set) }));
            let value = json!({
                "mass": p.l1(),
                "total_volume": profile.total_volume(),
                "rows": rows,
                "ls_breakpoints": breakpoints,
                "best_cut": best,
            });
            emit("sweep-curve", a, &value, &a.output, Format::Json)
        }
    }
}

#[derive(Debug, Serialize)]
struct AppendixRow {
    check: String,
    ell: usize,
    gamma: Option<f64>,
    alpha: Option<f64>,
    measured: f64,
    bound: Option<f64>,
    slack_constant: Option<f64>,
    threshold: f64,
    truncation: Option<f64>,
    margin: f64,
    pass: bool,
}

fn run_verify_appendix(a: &VerifyAppendixArgs) -> Outcome {
    let lemmas = if a.lemma.is_empty() {
        vec![Lemma::A1, Lemma::A2, Lemma::A3, Lemma::A4]
    } else {
        a.lemma.clone()
    };
    let mut rows = Vec::new();
    for &lemma in &lemmas {
        for &ell in &a.ell {
            for &gamma in &a.gamma {
                let c = verify_appendix_lemma(&AppendixBoundRequest { lemma, ell, gamma }, a.slack)?;
                rows.push(AppendixRow {
                    check: format!("{lemma:?}"),
                    ell,
                    gamma: Some(gamma),
                    alpha: Some(c.alpha),
                    measured: c.measured,
                    bound: Some(c.bound),
                    slack_constant: Some(c.slack_constant),
                    threshold: c.threshold,
                    truncation: Some(c.truncation),
                    margin: c.margin,
                    pass: c.pass,
                });
            }
        }
    }
    for &ell in &a.eigen_ell {
        let residual = chain_eigen_check(ell)?;
        rows.push(AppendixRow {
            check: "chain-eigen".into(),
            ell,
            gamma: None,
            alpha: None,
            measured: residual,
            bound: None,
            slack_constant: None,
            threshold: EIGEN_RESIDUAL_TOLERANCE,
            truncation: None,
            margin: EIGEN_RESIDUAL_TOLERANCE - residual,
            pass: residual < EIGEN_RESIDUAL_TOLERANCE,
        });
    }
    match a.output.format.unwrap_or(Format::Csv) {
        Format::Json => emit("verify-appendix", a, &rows, &a.output, Format::Json)?,
        Format::Csv => {
            let path = default_path(&a.output.out, "verify-appendix", "csv");
            let mut sink = open_sink(path.as_deref())?;
            for line in echo("verify-appendix", a)? {
                writeln!(sink, "# {line}")?;
            }
            writeln!(
                sink,
                "check,ell,gamma,alpha,measured,bound,slack_constant,threshold,truncation,margin,pass"
            )?;
            let opt = |x: Option<f64>| x.map_or_else(String::new, fmt_real);
            for r in &rows {
                writeln!(
                    sink,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.check,
                    r.ell,
                    r.gamma.map_or_else(String::new, |g| g.to_string()),
                    opt(r.alpha),
                    fmt_real(r.measured),
                    opt(r.bound),
                    r.slack_constant.map_or_else(String::new, |s| s.to_string()),
                    fmt_real(r.threshold),
                    opt(r.truncation),
                    fmt_real(r.margin),
                    if r.pass { "PASS" } else { "FAIL" }
                )?;
            }
            sink.flush()?;
        }
    }
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{} ell={} gamma={:?}", r.check, r.ell, r.gamma))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed.join("; ")))
    }
}

fn hard_passes(c: &HardInstanceCheck, min_ratio: f64) -> bool {
    c.lemma51.pass && c.scan.ratio >= min_ratio
}

fn run_verify_hard(a: &VerifyHardArgs) -> Outcome {
    if a.search {
        let (found, evaluated) =
            hard_instance_grid_search(&a.search_ell, &a.search_phi_ell2, &a.search_gamma, a.n, a.min_ratio)?;
        let value = json!({ "found": &found, "evaluated": evaluated });
        emit("verify-hard", a, &value, &a.output, Format::Json)?;
        return match found {
            Some(_) => Ok(()),
            None => Err(Failure::Verification("no grid point passes".into())),
        };
    }
    let c0 = match a.c0 {
        Some(c0) => c0,
        None => recipe_c0(a.gamma)?,
    };
    let spec = HardInstanceSpec {
        ell: a.ell,
        n: a.n,
        phi: a.phi_ell2 / (a.ell as f64).powi(2),
        c0,
    };
    let check = check_hard_instance(&spec, a.gamma)?;
    let pass = hard_passes(&check, a.min_ratio);
    let value = json!({ "check": &check, "pass": pass });
    emit("verify-hard", a, &value, &a.output, Format::Json)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "normalized pagerank d > c: {}, sweep ratio {:.4} (need >= {})",
            check.lemma51.pass, check.scan.ratio, a.min_ratio
        )))
    }
}

fn run_beta_sweep(a: &BetaSweepArgs) -> Outcome {
    let mut config = BetaSweepConfig::new(a.betas.clone(), a.runs, a.rng_seed);
    config.vol0_factor = a.vol0_factor;
    config.epsilon = a.eps;
    config.c_min = a.c_min;
    config.c_max = a.c_max;
    let table = beta_sweep_experiment(&config)?;
    let format = a.output.format.unwrap_or(Format::Csv);
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let path = default_path(&a.output.out, "beta-sweep", ext);
    let runs_path = a
        .runs_out
        .clone()
        .or_else(|| path.as_ref().map(|p| p.with_extension("runs.jsonl")));
    if let Some(rp) = runs_path {
        let mut sink = open_sink(Some(&rp))?;
        for run in &table.runs {
            serde_json::to_writer(&mut sink, run).map_err(Error::from)?;
            writeln!(sink)?;
        }
        sink.flush()?;
    }
    match format {
        Format::Json => emit("beta-sweep", a, &table, &a.output, Format::Json),
        Format::Csv => {
            let mut sink = open_sink(path.as_deref())?;
            for line in echo("beta-sweep", a)? {
                writeln!(sink, "# {line}")?;
            }
            writeln!(sink, "# alpha_grid: {:?}", table.config.alpha_grid)?;
            writeln!(
                sink,
                "beta,mean_ratio,ci_ratio,mean_acc,ci_acc,failures,runs,mean_phi_a,ci_phi_a"
            )?;
            let opt = |x: Option<f64>| x.map_or_else(String::new, fmt_real);
            for r in &table.rows {
                writeln!(
                    sink,
                    "{},{},{},{},{},{},{},{},{}",
                    r.beta,
                    opt(r.mean_ratio),
                    opt(r.ci_ratio),
                    opt(r.mean_accuracy),
                    opt(r.ci_accuracy),
                    r.failures,
                    r.runs,
                    opt(r.mean_phi_a),
                    opt(r.ci_phi_a)
                )?;
            }
            sink.flush()?;
            Ok(())
        }
    }
}

fn run_seed_sweep(a: &SeedSweepArgs) -> Outcome {
    let g = io::load_graph(&a.graph)?;
    let set = a.target.load(&g)?;
    let phi_a = g.graph.conductance(&set)?;
    let thresholds = SeedThresholds {
        vol_out: a.max_vol_out,
        vol_miss: a.max_vol_miss,
        phi: a.max_phi.unwrap_or(a.max_phi_factor * phi_a),
    };
    let params = a.tuning.params(0, a.vol0.unwrap_or(set.volume()));
    let mut config = SeedSweepConfig::new(params, thresholds);
    config.max_exhaustive = a.max_exhaustive;
    config.sample_size = a.sample_size;
    config.rng_seed = a.rng_seed;
    let report = seed_sweep(&g.graph, &set, &config)?;
    let outcomes: Vec<Value> = report
        .outcomes
        .iter()
        .map(|o| {
            json!({
                "seed_vertex": g.external(o.seed),
                "good": o.good,
                "report": o.report,
                "error": o.error,
            })
        })
        .collect();
    let value = json!({
        "fraction": report.fraction,
        "exhaustive": report.exhaustive,
        "phi_target": phi_a,
        "thresholds": thresholds,
        "config": report.config,
        "outcomes": outcomes,
    });
    emit("seed-sweep", a, &value, &a.output, Format::Json)
}

fn run_eval(a: &EvalArgs) -> Outcome {
    let g = io::load_graph(&a.graph)?;
    let s = g.set_from_ids(&io::load_vertex_ids(&a.set)?)?;
    let target = a.target.load(&g)?;
    let report = cluster_metrics(&g.graph, &s, &target)?;
    emit("eval", a, &report, &a.output, Format::Json)
}

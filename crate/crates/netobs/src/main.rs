//! netobs command line: reproducible observability runs emitting CSV/JSON.
//!
//! Every stochastic command takes a seed (flag, else OBS_SEED, else 0) and
//! produces byte-identical output for identical command lines, regardless
//! of --workers. Outputs embed the toolkit version and the resolved
//! configuration so a result file is enough to rerun it.
//!
//! Exit codes: 0 success, 2 usage, 3 invalid input data, 4 resource budget.

use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use netobs::city::{self, CityBlocks, CityProfile, CitySource, LnoFit};
use netobs::curves::{self, format_significant, ObservabilityCurve};
use netobs::error::Error;
use netobs::generators::{self, Family, GeneratorSpec};
use netobs::graph::Graph;
use netobs::ingest;
use netobs::mc::{self, MetricLevel, MetricTarget, ObservationScope};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
enum CliError {
    Usage(String),
    Run(Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(Error::Budget(_)) => 4,
            CliError::Run(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Run(Error::Io(e))
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Parser, Debug)]
#[command(
    name = "netobs",
    version,
    about = "Observability metrics for node-based network intrusions",
    propagate_version = true
)]
struct Cli {
    /// Cap on worker threads (0 = one per core); never affects results
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic graph and write it as an edge list
    Generate(GenerateArgs),
    /// Estimate one metric value on a graph
    Observe(ObserveArgs),
    /// Sweep the compromised fraction and report the curve with its AUOC
    Curve(CurveArgs),
    /// Sweep time-window lengths over an event log
    Sweep(SweepArgs),
    /// Bucket co-location sightings by hour and cell and measure each bucket
    Colocate(ColocateArgs),
    /// Estimate city-scale observability from census blocks or a profile
    City(CityArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TargetArg {
    Edge,
    Node,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum LevelArg {
    Global,
    Local,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FamilyArg {
    Complete,
    Er,
    Ba,
    Ws,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Complete => Family::Complete,
            FamilyArg::Er => Family::Er,
            FamilyArg::Ba => Family::Ba,
            FamilyArg::Ws => Family::Ws,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct ScopeArgs {
    /// What is being observed
    #[arg(long, value_enum, default_value_t = TargetArg::Edge)]
    target: TargetArg,

    /// Average over everything (global) or per non-compromised node (local)
    #[arg(long, value_enum, default_value_t = LevelArg::Global)]
    level: LevelArg,

    /// Hop count k >= 1
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    hops: u32,
}

impl ScopeArgs {
    fn scope(&self) -> ObservationScope {
        let target = match self.target {
            TargetArg::Edge => MetricTarget::Edge,
            TargetArg::Node => MetricTarget::Node,
        };
        let level = match self.level {
            LevelArg::Global => MetricLevel::Global,
            LevelArg::Local => MetricLevel::Local,
        };
        ObservationScope::new(target, level, self.hops as usize)
            .expect("hops >= 1 enforced by the parser")
    }

    fn config(&self, doc: &mut Map<String, Value>) {
        let scope = self.scope();
        doc.insert("target".into(), json!(scope.target));
        doc.insert("level".into(), json!(scope.level));
        doc.insert("hops".into(), json!(scope.hops));
    }
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Graph family
    #[arg(long, value_enum)]
    family: FamilyArg,

    /// Node count
    #[arg(long)]
    n: usize,

    /// Target density; picks family parameters automatically
    #[arg(long, conflicts_with_all = ["p", "m", "k"])]
    density: Option<f64>,

    /// Edge probability (er) or rewiring probability (ws)
    #[arg(long)]
    p: Option<f64>,

    /// Edges added per arriving node (ba)
    #[arg(long)]
    m: Option<usize>,

    /// Ring-lattice neighbor count (ws); odd values round down
    #[arg(long)]
    k: Option<usize>,

    /// RNG seed
    #[arg(long, env = "OBS_SEED", default_value_t = 0)]
    seed: u64,

    /// Output edge-list path; a JSON sidecar lands at <out>.json
    #[arg(long, short = 'o')]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ObserveArgs {
    /// Edge-list graph file
    graph: PathBuf,

    #[command(flatten)]
    scope: ScopeArgs,

    /// Compromised node count
    #[arg(long, conflicts_with = "fraction")]
    nc: Option<usize>,

    /// Compromised fraction of n, rounded to a count
    #[arg(long)]
    fraction: Option<f64>,

    /// Monte-Carlo trials (ignored when a closed form applies)
    #[arg(long, default_value_t = 500)]
    trials: usize,

    /// RNG seed
    #[arg(long, env = "OBS_SEED", default_value_t = 0)]
    seed: u64,

    /// Output path, - for stdout
    #[arg(long, short = 'o', default_value = "-")]
    out: String,
}

#[derive(Args, Debug)]
struct CurveArgs {
    /// Edge-list graph file (omitted with --selftest-linear)
    #[arg(required_unless_present = "selftest_linear")]
    graph: Option<PathBuf>,

    #[command(flatten)]
    scope: ScopeArgs,

    /// Evenly spaced grid points over the compromised fraction
    #[arg(long, default_value_t = 21, value_parser = clap::value_parser!(u32).range(2..))]
    grid_points: u32,

    /// Monte-Carlo trials per grid point
    #[arg(long, default_value_t = 500)]
    trials: usize,

    /// RNG seed shared by all grid points
    #[arg(long, env = "OBS_SEED", default_value_t = 0)]
    seed: u64,

    /// Curve label in the output (defaults to the graph file stem)
    #[arg(long)]
    label: Option<String>,

    /// Emit the exact linear baseline instead of reading a graph; its AUOC
    /// must come out 0.5
    #[arg(long)]
    selftest_linear: bool,

    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Output path, - for stdout
    #[arg(long, short = 'o', default_value = "-")]
    out: String,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Event CSV: src,dst,timestamp
    events: PathBuf,

    /// Ascending window lengths, comma separated; s/m/h/d suffixes allowed
    #[arg(long, required = true, value_delimiter = ',')]
    windows: Vec<String>,

    #[command(flatten)]
    scope: ScopeArgs,

    /// Compromised fraction of the id universe
    #[arg(long, default_value_t = 0.01)]
    fraction: f64,

    /// Monte-Carlo trials per window and grid point
    #[arg(long, default_value_t = 500)]
    trials: usize,

    /// RNG seed shared by all windows
    #[arg(long, env = "OBS_SEED", default_value_t = 0)]
    seed: u64,

    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Output path, - for stdout
    #[arg(long, short = 'o', default_value = "-")]
    out: String,
}

#[derive(Args, Debug)]
struct ColocateArgs {
    /// Sightings CSV: a,b,timestamp,cell
    sightings: PathBuf,

    #[command(flatten)]
    scope: ScopeArgs,

    /// Compromised fraction of each bucket's devices
    #[arg(long, default_value_t = 0.01)]
    fraction: f64,

    /// Monte-Carlo trials per bucket
    #[arg(long, default_value_t = 500)]
    trials: usize,

    /// RNG seed shared by all buckets
    #[arg(long, env = "OBS_SEED", default_value_t = 0)]
    seed: u64,

    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Output path, - for stdout
    #[arg(long, short = 'o', default_value = "-")]
    out: String,
}

#[derive(Args, Debug)]
struct CityArgs {
    /// Census block densities, one per line
    #[arg(long, conflicts_with_all = ["population", "area"])]
    blocks: Option<PathBuf>,

    /// Total population (exponential model, with --area)
    #[arg(long, requires = "area")]
    population: Option<f64>,

    /// City area in km² (exponential model, with --population)
    #[arg(long, requires = "population")]
    area: Option<f64>,

    /// Single compromised fraction
    #[arg(long, conflicts_with = "grid")]
    fraction: Option<f64>,

    /// Comma-separated fraction grid for a full curve
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,

    /// Block samples drawn under the exponential model
    #[arg(long, default_value_t = 100_000)]
    samples: usize,

    /// RNG seed (exponential model)
    #[arg(long, env = "OBS_SEED", default_value_t = 0)]
    seed: u64,

    /// Fit slope on ln(devices per km²)
    #[arg(long, default_value_t = 0.13, allow_hyphen_values = true)]
    lno_slope: f64,

    /// Fit intercept
    #[arg(long, default_value_t = -0.05, allow_hyphen_values = true)]
    lno_intercept: f64,

    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Output path, - for stdout
    #[arg(long, short = 'o', default_value = "-")]
    out: String,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build()
            .map_err(|e| usage(format!("--workers: {e}")))?;
        pool.install(|| dispatch(cli.command))
    } else {
        dispatch(cli.command)
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(args) => cmd_generate(args),
        Command::Observe(args) => cmd_observe(args),
        Command::Curve(args) => cmd_curve(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Colocate(args) => cmd_colocate(args),
        Command::City(args) => cmd_city(args),
    }
}

fn open_output(path: &str) -> Result<Box<dyn Write>, CliError> {
    if path == "-" {
        Ok(Box::new(io::stdout().lock()))
    } else {
        let file = File::create(path)
            .map_err(|e| CliError::Run(Error::Io(io::Error::new(e.kind(), format!("{path}: {e}")))))?;
        Ok(Box::new(BufWriter::new(file)))
    }
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let file = File::open(path).map_err(|e| {
        CliError::Run(Error::Io(io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        )))
    })?;
    Ok(Graph::read_edge_list(BufReader::new(file))?)
}

fn open_input(path: &Path) -> Result<BufReader<File>, CliError> {
    let file = File::open(path).map_err(|e| {
        CliError::Run(Error::Io(io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        )))
    })?;
    Ok(BufReader::new(file))
}

/// Standard output document: version and command first, resolved config,
/// then the command's own fields. Key order in the file is alphabetical
/// (serde_json maps are sorted), which keeps bytes stable.
fn envelope(command: &str, config: Map<String, Value>, body: Map<String, Value>) -> Value {
    let mut doc = Map::new();
    doc.insert("version".into(), json!(VERSION));
    doc.insert("command".into(), json!(command));
    doc.insert("config".into(), Value::Object(config));
    doc.extend(body);
    Value::Object(doc)
}

fn write_json(doc: &Value, out: &mut dyn Write) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, doc)
        .map_err(|e| CliError::Run(Error::input(format!("serializing output: {e}"))))?;
    writeln!(out)?;
    Ok(())
}

/// One-line `#` provenance comment for CSV outputs.
fn csv_meta(command: &str, config: &Map<String, Value>) -> String {
    let compact = serde_json::to_string(config).expect("config serializes");
    format!("# netobs {VERSION} {command} config={compact}")
}

fn resolve_count(n: usize, nc: Option<usize>, fraction: Option<f64>) -> Result<usize, CliError> {
    match (nc, fraction) {
        (Some(c), None) => Ok(c),
        (None, Some(x)) => {
            if !x.is_finite() || !(0.0..=1.0).contains(&x) {
                return Err(CliError::Run(Error::input(format!(
                    "fraction {x} outside [0, 1]"
                ))));
            }
            Ok((x * n as f64).round() as usize)
        }
        (None, None) => Err(usage("one of --nc or --fraction is required")),
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    }
}

fn parse_window_seconds(text: &str) -> Result<u64, CliError> {
    let text = text.trim();
    let (digits, multiplier) = match text.as_bytes().last() {
        Some(b's') => (&text[..text.len() - 1], 1u64),
        Some(b'm') => (&text[..text.len() - 1], 60),
        Some(b'h') => (&text[..text.len() - 1], 3600),
        Some(b'd') => (&text[..text.len() - 1], 86400),
        _ => (text, 1),
    };
    digits
        .parse::<u64>()
        .ok()
        .and_then(|v| v.checked_mul(multiplier))
        .ok_or_else(|| usage(format!("bad window length {text:?} (digits with optional s/m/h/d)")))
}

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let family = Family::from(args.family);
    let spec = match args.density {
        Some(d) => generators::params_for_density(family, args.n, d)?,
        None => match family {
            Family::Complete => GeneratorSpec::Complete { n: args.n },
            Family::Er => GeneratorSpec::ErdosRenyi {
                n: args.n,
                p: args.p.ok_or_else(|| usage("--family er needs --p or --density"))?,
            },
            Family::Ba => GeneratorSpec::BarabasiAlbert {
                n: args.n,
                m: args.m.ok_or_else(|| usage("--family ba needs --m or --density"))?,
            },
            Family::Ws => GeneratorSpec::WattsStrogatz {
                n: args.n,
                k: args.k.ok_or_else(|| usage("--family ws needs --k or --density"))?,
                p: args.p.unwrap_or(generators::DEFAULT_REWIRE_P),
            },
        },
    };
    let graph = spec.generate(args.seed)?;

    let mut writer = BufWriter::new(File::create(&args.out).map_err(|e| {
        CliError::Run(Error::Io(io::Error::new(
            e.kind(),
            format!("{}: {e}", args.out.display()),
        )))
    })?);
    graph.write_edge_list(&mut writer)?;
    writer.flush()?;

    let mut config = match serde_json::to_value(spec) {
        Ok(Value::Object(map)) => map,
        _ => Map::new(),
    };
    config.insert("seed".into(), json!(args.seed));
    config.insert("out".into(), json!(args.out.display().to_string()));
    let mut body = Map::new();
    body.insert(
        "result".into(),
        json!({
            "n": graph.node_count(),
            "edges": graph.edge_count(),
            "density": graph.density().ok(),
        }),
    );
    let sidecar_path = format!("{}.json", args.out.display());
    let mut sidecar = open_output(&sidecar_path)?;
    write_json(&envelope("generate", config, body), sidecar.as_mut())?;
    sidecar.flush()?;
    log::info!(
        "wrote {} nodes, {} edges to {}",
        graph.node_count(),
        graph.edge_count(),
        args.out.display()
    );
    Ok(())
}

fn cmd_observe(args: ObserveArgs) -> Result<(), CliError> {
    let graph = load_graph(&args.graph)?;
    let n = graph.node_count();
    let n_c = resolve_count(n, args.nc, args.fraction)?;
    let scope = args.scope.scope();

    let (value, stderr, trials, method) = if scope.has_closed_form() {
        let result = match scope.level {
            MetricLevel::Global => netobs::exact::global_edge_observability(n, n_c)?,
            MetricLevel::Local => netobs::exact::local_edge_observability(n, n_c)?,
        };
        (result.value, 0.0, 0usize, "closed-form")
    } else {
        let est = mc::estimate(&graph, scope, n_c, args.trials, args.seed)?;
        (est.mean, est.stderr, est.trials, "monte-carlo")
    };

    let mut config = Map::new();
    config.insert("graph".into(), json!(args.graph.display().to_string()));
    args.scope.config(&mut config);
    config.insert("nc".into(), json!(n_c));
    config.insert("trials".into(), json!(args.trials));
    config.insert("seed".into(), json!(args.seed));
    let mut body = Map::new();
    body.insert(
        "result".into(),
        json!({
            "n": n,
            "nc": n_c,
            "value": value,
            "stderr": stderr,
            "trials": trials,
            "method": method,
        }),
    );
    let mut out = open_output(&args.out)?;
    write_json(&envelope("observe", config, body), out.as_mut())?;
    out.flush()?;
    Ok(())
}

fn selftest_curve(scope: ObservationScope, points: usize) -> Result<ObservabilityCurve, Error> {
    let pts = (0..points)
        .map(|i| {
            let x = i as f64 / (points - 1) as f64;
            curves::CurvePoint {
                x,
                value: x,
                stderr: 0.0,
            }
        })
        .collect();
    ObservabilityCurve::new(scope, "selftest-linear", pts)
}

fn cmd_curve(args: CurveArgs) -> Result<(), CliError> {
    let scope = args.scope.scope();
    let grid_points = args.grid_points as usize;

    let (curve, graph_name) = if args.selftest_linear {
        let curve = selftest_curve(scope, grid_points)?;
        (curve, "selftest-linear".to_string())
    } else {
        let path = args.graph.as_ref().expect("clap requires a graph here");
        let graph = load_graph(path)?;
        let grid = curves::default_grid(graph.node_count(), grid_points, scope.is_local())?;
        let label = args.label.clone().unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "graph".to_string())
        });
        let curve = curves::build_curve(&graph, scope, &grid, args.trials, args.seed, &label)?;
        (curve, path.display().to_string())
    };
    let area = curves::auoc(&curve)?;
    if args.selftest_linear && (area - 0.5).abs() > 1e-9 {
        return Err(CliError::Run(Error::undefined(format!(
            "selftest expected AUOC 0.5, got {area}"
        ))));
    }

    let mut config = Map::new();
    config.insert("graph".into(), json!(graph_name));
    args.scope.config(&mut config);
    config.insert("grid_points".into(), json!(grid_points));
    config.insert("trials".into(), json!(args.trials));
    config.insert("seed".into(), json!(args.seed));
    config.insert("selftest_linear".into(), json!(args.selftest_linear));

    let mut out = open_output(&args.out)?;
    match args.format {
        FormatArg::Json => {
            let mut body = Map::new();
            body.insert("label".into(), json!(curve.label));
            body.insert("auoc".into(), json!(area));
            body.insert("points".into(), serde_json::to_value(&curve.points).unwrap());
            write_json(&envelope("curve", config, body), out.as_mut())?;
        }
        FormatArg::Csv => {
            writeln!(out, "{}", csv_meta("curve", &config))?;
            writeln!(out, "# auoc={}", format_significant(area, 6))?;
            curves::write_curve_csv(&curve, out.as_mut())?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let mut windows = Vec::with_capacity(args.windows.len());
    for w in &args.windows {
        windows.push(parse_window_seconds(w)?);
    }
    let parsed = ingest::parse_events(open_input(&args.events)?)?;
    if !parsed.rejected.is_empty() {
        log::warn!(
            "{} malformed event lines rejected (first: line {}: {})",
            parsed.rejected.len(),
            parsed.rejected[0].line,
            parsed.rejected[0].reason
        );
    }
    let scope = args.scope.scope();
    let points = ingest::temporal_sweep(
        &parsed.records,
        &windows,
        scope,
        args.fraction,
        args.trials,
        args.seed,
    )?;

    let mut config = Map::new();
    config.insert("events".into(), json!(args.events.display().to_string()));
    config.insert("windows".into(), json!(windows));
    args.scope.config(&mut config);
    config.insert("fraction".into(), json!(args.fraction));
    config.insert("trials".into(), json!(args.trials));
    config.insert("seed".into(), json!(args.seed));
    config.insert("rejected_lines".into(), json!(parsed.rejected.len()));

    let mut out = open_output(&args.out)?;
    match args.format {
        FormatArg::Json => {
            let rows: Vec<Value> = points
                .iter()
                .map(|p| {
                    json!({
                        "window_seconds": p.duration,
                        "mean": p.estimate.mean,
                        "stderr": p.estimate.stderr,
                        "trials": p.estimate.trials,
                        "auoc": p.auoc,
                    })
                })
                .collect();
            let mut body = Map::new();
            body.insert("points".into(), Value::Array(rows));
            write_json(&envelope("sweep", config, body), out.as_mut())?;
        }
        FormatArg::Csv => {
            writeln!(out, "{}", csv_meta("sweep", &config))?;
            writeln!(out, "window_seconds,mean,stderr,auoc")?;
            for p in &points {
                writeln!(
                    out,
                    "{},{},{},{}",
                    p.duration,
                    format_significant(p.estimate.mean, 6),
                    format_significant(p.estimate.stderr, 6),
                    format_significant(p.auoc, 6)
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_colocate(args: ColocateArgs) -> Result<(), CliError> {
    let parsed = ingest::parse_sightings(open_input(&args.sightings)?)?;
    if !parsed.rejected.is_empty() {
        log::warn!(
            "{} malformed sighting lines rejected (first: line {}: {})",
            parsed.rejected.len(),
            parsed.rejected[0].line,
            parsed.rejected[0].reason
        );
    }
    if !args.fraction.is_finite() || !(0.0..=1.0).contains(&args.fraction) {
        return Err(CliError::Run(Error::input(format!(
            "fraction {} outside [0, 1]",
            args.fraction
        ))));
    }
    let scope = args.scope.scope();
    let buckets = ingest::colocation_graphs(&parsed.records);

    struct Row {
        hour: u64,
        cell: String,
        nodes: usize,
        edges: usize,
        n_c: usize,
        mean: f64,
        stderr: f64,
    }
    let mut rows = Vec::with_capacity(buckets.len());
    for (key, bucket) in &buckets {
        let n = bucket.graph.node_count();
        let n_c = (args.fraction * n as f64).round() as usize;
        let est = mc::estimate(&bucket.graph, scope, n_c, args.trials, args.seed)?;
        rows.push(Row {
            hour: key.hour,
            cell: key.cell.clone(),
            nodes: n,
            edges: bucket.graph.edge_count(),
            n_c,
            mean: est.mean,
            stderr: est.stderr,
        });
    }

    let mut config = Map::new();
    config.insert(
        "sightings".into(),
        json!(args.sightings.display().to_string()),
    );
    args.scope.config(&mut config);
    config.insert("fraction".into(), json!(args.fraction));
    config.insert("trials".into(), json!(args.trials));
    config.insert("seed".into(), json!(args.seed));
    config.insert("rejected_lines".into(), json!(parsed.rejected.len()));

    let mut out = open_output(&args.out)?;
    match args.format {
        FormatArg::Json => {
            let array: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "hour": r.hour,
                        "cell": r.cell,
                        "nodes": r.nodes,
                        "edges": r.edges,
                        "nc": r.n_c,
                        "mean": r.mean,
                        "stderr": r.stderr,
                    })
                })
                .collect();
            let mut body = Map::new();
            body.insert("buckets".into(), Value::Array(array));
            write_json(&envelope("colocate", config, body), out.as_mut())?;
        }
        FormatArg::Csv => {
            writeln!(out, "{}", csv_meta("colocate", &config))?;
            writeln!(out, "hour,cell,nodes,edges,nc,mean,stderr")?;
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.hour,
                    r.cell,
                    r.nodes,
                    r.edges,
                    r.n_c,
                    format_significant(r.mean, 6),
                    format_significant(r.stderr, 6)
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_city(args: CityArgs) -> Result<(), CliError> {
    let fit = LnoFit::new(args.lno_slope, args.lno_intercept)?;
    let source = match (&args.blocks, args.population, args.area) {
        (Some(path), None, None) => CitySource::Census(CityBlocks::read(open_input(path)?)?),
        (None, Some(population), Some(area)) => CitySource::Exponential {
            profile: CityProfile::new(population, area)?,
            samples: args.samples,
            seed: args.seed,
        },
        _ => return Err(usage("need --blocks or both --population and --area")),
    };

    let mut config = Map::new();
    match &args.blocks {
        Some(path) => {
            config.insert("blocks".into(), json!(path.display().to_string()));
        }
        None => {
            config.insert("population".into(), json!(args.population));
            config.insert("area_km2".into(), json!(args.area));
            config.insert("samples".into(), json!(args.samples));
            config.insert("seed".into(), json!(args.seed));
        }
    }
    config.insert("method".into(), json!(source.method_name()));
    config.insert("lno_slope".into(), json!(fit.slope));
    config.insert("lno_intercept".into(), json!(fit.intercept));

    let mut out = open_output(&args.out)?;
    match (args.fraction, &args.grid) {
        (Some(x), None) => {
            let value = source.estimate(x, &fit)?;
            config.insert("fraction".into(), json!(x));
            let mut body = Map::new();
            body.insert(
                "result".into(),
                json!({
                    "x": x,
                    "estimate": value,
                    "method": source.method_name(),
                }),
            );
            write_json(&envelope("city", config, body), out.as_mut())?;
        }
        (None, Some(grid)) => {
            let curve = city::city_sweep(&source, grid, &fit)?;
            let area = curves::auoc(&curve)?;
            config.insert("grid".into(), json!(grid));
            match args.format {
                FormatArg::Json => {
                    let mut body = Map::new();
                    body.insert("method".into(), json!(source.method_name()));
                    body.insert("auoc".into(), json!(area));
                    body.insert(
                        "points".into(),
                        serde_json::to_value(&curve.points).unwrap(),
                    );
                    write_json(&envelope("city", config, body), out.as_mut())?;
                }
                FormatArg::Csv => {
                    writeln!(out, "{}", csv_meta("city", &config))?;
                    writeln!(out, "# auoc={}", format_significant(area, 6))?;
                    curves::write_curve_csv(&curve, out.as_mut())?;
                }
            }
        }
        (None, None) => return Err(usage("need --fraction or --grid")),
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    }
    out.flush()?;
    Ok(())
}

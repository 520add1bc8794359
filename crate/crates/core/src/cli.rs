//! Command-line front end. Every subcommand reads and writes plain files,
//! so stages can be run, cached and inspected independently.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytics::{
    group_summaries, in_degree_trend, mdi_overview, temporal_report, write_summaries_csv,
    GroupSummaries, MdiOverview, TemporalReport, TrendFit, TrendOptions, DEFAULT_PERIOD_BOUNDARIES,
};
use crate::disruption::{
    mdi_sweep, write_mdi_csv, MdiResult, DEFAULT_EPSILON, MAIN_WINDOW_DAYS, SENSITIVITY_WINDOWS,
};
use crate::ingest::{fetch_live, read_dump, FetchOptions, IngestError, IngestStats, Snapshot, Strictness};
use crate::lineage::export::{read_exports, write_exports};
use crate::lineage::{build_graph, Census, CleaningReport, GraphError, LineageGraph};
use crate::structure::{fit_power_law, in_degrees, weakly_connected_components, DegreeScope, PowerLawFit, WccSummary};
use crate::synth::{generate, Attachment, SynthOptions};
use crate::time::parse_date;

pub const DEFAULT_ENDPOINT: &str = "https://huggingface.co/api/models";
pub const ENDPOINT_ENV: &str = "HUB_LINEAGE_ENDPOINT";

pub const MDI_FILE: &str = "mdi.csv";
pub const CLEANING_FILE: &str = "cleaning.json";
pub const BUNDLE_FILE: &str = "report.json";

#[derive(Debug, Parser)]
#[command(name = "hub-lineage", version, about = "Model lineage graphs and the Model Disruption Index")]
pub struct Cli {
    /// Worker threads for parallel stages (default: available processors).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Harvest model metadata into a snapshot file.
    Ingest(IngestArgs),
    /// Build the lineage graph from a snapshot and export it.
    Build(BuildArgs),
    /// Compute MDI for every intermediate model of an exported graph.
    Mdi(MdiArgs),
    /// Structure, MDI and analytics over an exported graph.
    Report(ReportArgs),
    /// Full pipeline from a snapshot or dump to a report bundle.
    Analyze(AnalyzeArgs),
    /// Generate a seeded synthetic snapshot.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Api,
    Dump,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long, value_enum)]
    pub source: SourceKind,
    /// Newline-delimited JSON dump (with --source dump).
    #[arg(long)]
    pub dump_path: Option<PathBuf>,
    #[arg(long, env = ENDPOINT_ENV, default_value = DEFAULT_ENDPOINT)]
    pub endpoint: String,
    #[arg(long, default_value_t = crate::ingest::MAX_PAGE_SIZE)]
    pub page_size: usize,
    #[arg(long)]
    pub max_records: Option<usize>,
    /// Requests per second; 0 disables throttling.
    #[arg(long, default_value_t = 5.0)]
    pub rate_limit: f64,
    #[arg(long, default_value_t = 2)]
    pub retries: u32,
    /// Continue an interrupted harvest from --checkpoint-dir.
    #[arg(long)]
    pub resume: bool,
    #[arg(long)]
    pub checkpoint_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Strictness::Lenient)]
    pub strictness: Strictness,
    /// Snapshot file to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub snapshot: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Strictness::Lenient)]
    pub strictness: Strictness,
}

#[derive(Debug, Args)]
pub struct MdiArgs {
    /// Directory holding edges.tsv and nodes.tsv.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = SENSITIVITY_WINDOWS)]
    pub windows: Vec<u32>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Args)]
pub struct AnalysisArgs {
    #[arg(long, value_delimiter = ',', default_values_t = SENSITIVITY_WINDOWS)]
    pub windows: Vec<u32>,
    /// Window used for the trend, group and temporal summaries (default:
    /// 90 if listed, else the largest listed window).
    #[arg(long)]
    pub main_window: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, value_delimiter = ',', default_values = DEFAULT_PERIOD_BOUNDARIES)]
    pub period_boundaries: Vec<String>,
    #[arg(long, default_value_t = 0.3)]
    pub lowess_frac: f64,
    #[arg(long, default_value_t = 2)]
    pub lowess_iters: usize,
    /// Smooth MDI against log in-degree.
    #[arg(long)]
    pub log_x: bool,
    /// Upper end of the power-law x_min search (default: 95th percentile).
    #[arg(long)]
    pub xmin_max: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Snapshot or raw dump.
    #[arg(long)]
    pub snapshot: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Strictness::Lenient)]
    pub strictness: Strictness,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Attachment::Preferential)]
    pub attachment: Attachment,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(err: IngestError) -> Self {
        match err {
            IngestError::InvalidOptions(_) => CliError::Usage(err.to_string()),
            IngestError::Write { .. } => CliError::Internal(err.to_string()),
            _ => CliError::Data(err.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(err: GraphError) -> Self {
        CliError::Data(err.to_string())
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 1 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_env("HUB_LINEAGE_LOG")
        .try_init();

    match execute(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Internal(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Build(a) => cmd_build(a),
        Command::Mdi(a) => cmd_mdi(a),
        Command::Report(a) => cmd_report(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Synth(a) => cmd_synth(a),
    })
}

pub fn cmd_ingest(args: &IngestArgs) -> Result<(), CliError> {
    ensure_parent(&args.out, "--out")?;
    let snapshot = match args.source {
        SourceKind::Dump => {
            let path = args
                .dump_path
                .as_deref()
                .ok_or_else(|| CliError::Usage("--dump-path is required with --source dump".into()))?;
            ensure_file(path, "--dump-path")?;
            let mut snap = read_dump(path, args.strictness)?;
            if let Some(cap) = args.max_records {
                let keep: Vec<String> = snap.records.keys().take(cap).cloned().collect();
                snap.records.retain(|k, _| keep.binary_search(k).is_ok());
            }
            snap
        }
        SourceKind::Api => {
            if args.resume && args.checkpoint_dir.is_none() {
                return Err(CliError::Usage("--resume requires --checkpoint-dir".into()));
            }
            if let Some(dir) = &args.checkpoint_dir {
                fs::create_dir_all(dir).map_err(|e| {
                    CliError::Usage(format!("--checkpoint-dir {}: {e}", dir.display()))
                })?;
            }
            let mut opts = FetchOptions::new(args.endpoint.clone());
            opts.page_size = args.page_size;
            opts.rate_limit = args.rate_limit;
            opts.max_records = args.max_records;
            opts.retries = args.retries;
            opts.retry_backoff = Duration::from_millis(500);
            opts.checkpoint_dir = args.checkpoint_dir.clone();
            opts.resume = args.resume;
            fetch_live(&opts)?
        }
    };
    snapshot.persist(&args.out)?;
    print_json(&IngestSummary {
        records: snapshot.len(),
        out: &args.out,
        stats: &snapshot.stats,
    })
}

#[derive(Serialize)]
struct IngestSummary<'a> {
    records: usize,
    out: &'a Path,
    stats: &'a IngestStats,
}

pub fn cmd_build(args: &BuildArgs) -> Result<(), CliError> {
    ensure_file(&args.snapshot, "--snapshot")?;
    ensure_dir(&args.out_dir, "--out-dir")?;
    let snapshot = read_dump(&args.snapshot, args.strictness)?;
    let (graph, report) = build_graph(&snapshot);
    export_graph(&graph, &report, &args.out_dir)?;
    print_json(&report)
}

pub fn cmd_mdi(args: &MdiArgs) -> Result<(), CliError> {
    ensure_dir_exists(&args.graph, "--graph")?;
    ensure_dir(&args.out_dir, "--out-dir")?;
    let graph = read_exports(&args.graph)?;
    let rows = sweep(&graph, &args.windows, args.epsilon)?;
    write_file(&args.out_dir.join(MDI_FILE), |w| write_mdi_csv(&rows, w))?;
    log::info!("{} MDI rows written", rows.len());
    Ok(())
}

pub fn cmd_report(args: &ReportArgs) -> Result<(), CliError> {
    ensure_dir_exists(&args.graph, "--graph")?;
    ensure_dir(&args.out_dir, "--out-dir")?;
    let settings = AnalysisSettings::resolve(&args.analysis)?;
    let graph = read_exports(&args.graph)?;
    let config = RunConfig {
        command: "report",
        input: args.graph.clone(),
        strictness: None,
        analysis: settings.clone(),
    };
    let bundle = analyze_graph(&graph, &settings, config, None, None, &args.out_dir)?;
    write_json(&args.out_dir.join(BUNDLE_FILE), &bundle)
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    ensure_file(&args.snapshot, "--snapshot")?;
    ensure_dir(&args.out_dir, "--out-dir")?;
    let settings = AnalysisSettings::resolve(&args.analysis)?;
    let snapshot = read_dump(&args.snapshot, args.strictness)?;
    let (graph, cleaning) = build_graph(&snapshot);
    export_graph(&graph, &cleaning, &args.out_dir)?;
    let config = RunConfig {
        command: "analyze",
        input: args.snapshot.clone(),
        strictness: Some(args.strictness),
        analysis: settings.clone(),
    };
    let bundle = analyze_graph(
        &graph,
        &settings,
        config,
        Some(snapshot.stats.clone()),
        Some(cleaning),
        &args.out_dir,
    )?;
    write_json(&args.out_dir.join(BUNDLE_FILE), &bundle)
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    ensure_parent(&args.out, "--out")?;
    let mut opts = SynthOptions::new(args.nodes, args.seed);
    opts.attachment = args.attachment;
    let snapshot: Snapshot = generate(&opts);
    snapshot.persist(&args.out)?;
    log::info!("{} synthetic records written to {}", snapshot.len(), args.out.display());
    Ok(())
}

/// Analysis parameters after defaults and validation, echoed into every
/// bundle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisSettings {
    pub windows: Vec<u32>,
    pub main_window: u32,
    pub epsilon: f64,
    pub period_boundaries: Vec<String>,
    #[serde(skip)]
    pub boundary_secs: Vec<i64>,
    pub lowess: TrendOptions,
    pub xmin_max: Option<u64>,
}

impl AnalysisSettings {
    pub fn resolve(args: &AnalysisArgs) -> Result<Self, CliError> {
        let mut windows = args.windows.clone();
        windows.sort_unstable();
        windows.dedup();
        if windows.is_empty() || windows[0] == 0 {
            return Err(CliError::Usage("--windows must list positive day counts".into()));
        }
        let main_window = match args.main_window {
            Some(w) if windows.contains(&w) => w,
            Some(w) => {
                return Err(CliError::Usage(format!(
                    "--main-window {w} is not among --windows"
                )))
            }
            None if windows.contains(&MAIN_WINDOW_DAYS) => MAIN_WINDOW_DAYS,
            None => *windows.last().expect("non-empty"),
        };
        if !(args.epsilon.is_finite() && args.epsilon > 0.0) {
            return Err(CliError::Usage("--epsilon must be a positive number".into()));
        }
        let mut boundary_secs = Vec::new();
        for raw in &args.period_boundaries {
            boundary_secs.push(parse_date(raw).ok_or_else(|| {
                CliError::Usage(format!("--period-boundaries: {raw:?} is not a YYYY-MM-DD date"))
            })?);
        }
        if boundary_secs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Usage(
                "--period-boundaries must be strictly increasing".into(),
            ));
        }
        if !(args.lowess_frac > 0.0 && args.lowess_frac <= 1.0) {
            return Err(CliError::Usage("--lowess-frac must be in (0, 1]".into()));
        }
        if args.xmin_max == Some(0) {
            return Err(CliError::Usage("--xmin-max must be at least 1".into()));
        }
        Ok(AnalysisSettings {
            windows,
            main_window,
            epsilon: args.epsilon,
            period_boundaries: args.period_boundaries.clone(),
            boundary_secs,
            lowess: TrendOptions {
                frac: args.lowess_frac,
                robust_iters: args.lowess_iters,
                log_x: args.log_x,
            },
            xmin_max: args.xmin_max,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub input: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strictness: Option<Strictness>,
    pub analysis: AnalysisSettings,
}

/// Either a computed value or the reason it could not be computed.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Outcome<T> {
    Ok(T),
    Unavailable { error: String },
}

impl<T, E: std::fmt::Display> From<Result<T, E>> for Outcome<T> {
    fn from(r: Result<T, E>) -> Self {
        match r {
            Ok(v) => Outcome::Ok(v),
            Err(e) => Outcome::Unavailable { error: e.to_string() },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeEntry {
    pub scope: &'static str,
    pub file: String,
    pub nodes: u64,
    pub edges: u64,
    pub max_degree: Option<u64>,
    pub power_law: Outcome<PowerLawFit>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureSection {
    pub census: Census,
    pub degrees: Vec<DegreeEntry>,
    pub components: WccSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct MdiSection {
    pub file: &'static str,
    pub eligible_focal_models: usize,
    pub windows: Vec<MdiOverview>,
}

/// Everything the figures need, in one JSON document.
#[derive(Debug, Clone, Serialize)]
pub struct ReportBundle {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ingest: Option<IngestStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cleaning: Option<CleaningReport>,
    pub structure: StructureSection,
    pub mdi: MdiSection,
    pub trend: Outcome<TrendFit>,
    pub groups: GroupSummaries,
    pub temporal: Outcome<TemporalReport>,
    /// CSV files written next to the bundle.
    pub files: BTreeMap<&'static str, String>,
}

fn analyze_graph(
    graph: &LineageGraph,
    settings: &AnalysisSettings,
    config: RunConfig,
    ingest: Option<IngestStats>,
    cleaning: Option<CleaningReport>,
    out_dir: &Path,
) -> Result<ReportBundle, CliError> {
    let mut files = BTreeMap::new();

    let mut degrees = Vec::new();
    for scope in DegreeScope::ALL {
        let dist = in_degrees(graph, scope);
        let file = format!("degree_{}.csv", scope.as_str());
        write_file(&out_dir.join(&file), |w| dist.write_csv(w))?;
        let range = settings.xmin_max.map(|hi| 1..=hi);
        degrees.push(DegreeEntry {
            scope: scope.as_str(),
            nodes: dist.node_count(),
            edges: dist.edge_count(),
            max_degree: dist.max_degree(),
            power_law: fit_power_law(&dist, range).into(),
            file,
        });
    }
    let components = weakly_connected_components(graph);
    write_file(&out_dir.join("components.csv"), |w| components.write_csv(w))?;
    files.insert("components", "components.csv".to_string());

    let rows = sweep(graph, &settings.windows, settings.epsilon)?;
    write_file(&out_dir.join(MDI_FILE), |w| write_mdi_csv(&rows, w))?;
    files.insert("mdi", MDI_FILE.to_string());
    let main_rows: Vec<MdiResult> = rows
        .iter()
        .filter(|r| r.window_days == settings.main_window)
        .cloned()
        .collect();

    let trend: Outcome<TrendFit> = in_degree_trend(&main_rows, graph, settings.lowess).into();
    if let Outcome::Ok(fit) = &trend {
        write_file(&out_dir.join("trend.csv"), |w| fit.write_csv(w))?;
        files.insert("trend", "trend.csv".to_string());
    }

    let groups = group_summaries(&main_rows, graph);
    write_file(&out_dir.join("groups_scale.csv"), |w| {
        write_summaries_csv("scale", &groups.by_scale, w)
    })?;
    write_file(&out_dir.join("groups_relation.csv"), |w| {
        write_summaries_csv("relation", &groups.by_relation, w)
    })?;
    files.insert("groups_scale", "groups_scale.csv".to_string());
    files.insert("groups_relation", "groups_relation.csv".to_string());

    let temporal: Outcome<TemporalReport> =
        temporal_report(&rows, graph, &settings.boundary_secs, settings.main_window).into();
    if let Outcome::Ok(t) = &temporal {
        write_file(&out_dir.join("monthly.csv"), |w| t.write_monthly_csv(w))?;
        write_file(&out_dir.join("periods.csv"), |w| t.write_periods_csv(w))?;
        write_file(&out_dir.join("windows.csv"), |w| t.write_windows_csv(w))?;
        files.insert("monthly", "monthly.csv".to_string());
        files.insert("periods", "periods.csv".to_string());
        files.insert("windows", "windows.csv".to_string());
    }

    let eligible_focal_models = main_rows.len();
    Ok(ReportBundle {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config,
        ingest,
        cleaning,
        structure: StructureSection {
            census: graph.census(),
            degrees,
            components,
        },
        mdi: MdiSection {
            file: MDI_FILE,
            eligible_focal_models,
            windows: settings
                .windows
                .iter()
                .map(|&w| mdi_overview(&rows, w))
                .collect(),
        },
        trend,
        groups,
        temporal,
        files,
    })
}

fn sweep(graph: &LineageGraph, windows: &[u32], epsilon: f64) -> Result<Vec<MdiResult>, CliError> {
    mdi_sweep(graph, windows, epsilon).map_err(|e| CliError::Usage(e.to_string()))
}

fn export_graph(graph: &LineageGraph, report: &CleaningReport, dir: &Path) -> Result<(), CliError> {
    write_exports(graph, dir)
        .map_err(|e| CliError::Internal(format!("cannot write graph to {}: {e}", dir.display())))?;
    write_json(&dir.join(CLEANING_FILE), report)
}

fn ensure_file(path: &Path, flag: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{flag}: {} is not a readable file", path.display())))
    }
}

fn ensure_dir_exists(path: &Path, flag: &str) -> Result<(), CliError> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{flag}: {} is not a directory", path.display())))
    }
}

fn ensure_dir(path: &Path, flag: &str) -> Result<(), CliError> {
    fs::create_dir_all(path)
        .map_err(|e| CliError::Usage(format!("{flag}: cannot create {}: {e}", path.display())))
}

fn ensure_parent(path: &Path, flag: &str) -> Result<(), CliError> {
    if path.is_dir() {
        return Err(CliError::Usage(format!("{flag}: {} is a directory", path.display())));
    }
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => ensure_dir(p, flag),
        _ => Ok(()),
    }
}

fn write_file<F>(path: &Path, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let err = |e: std::io::Error| CliError::Internal(format!("cannot write {}: {e}", path.display()));
    let file = File::create(path).map_err(err)?;
    let mut w = BufWriter::new(file);
    body(&mut w).map_err(err)?;
    w.flush().map_err(err)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_file(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    })
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Internal(format!("cannot serialize summary: {e}")))?;
    println!("{text}");
    Ok(())
}

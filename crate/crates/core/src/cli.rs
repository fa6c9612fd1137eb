//! Command-line front end: `run`, `stats` and `synth`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arff;
use crate::error::{Error, Result};
use crate::evaluation::{prequential_run, write_windows_csv, Metrics, RunOutcome};
use crate::model::{Model, ModelConfig, ModelKind};
use crate::stats::{self, Direction, RankMatrix, TieMethod};
use crate::synth::{self, SyntheticStreamConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "gooweml", version, about = "Multi-label stream classification experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prequential evaluation of every (dataset, model) pair.
    Run(RunArgs),
    /// Friedman test and Nemenyi critical distance over run summaries.
    Stats(StatsArgs),
    /// Write a synthetic multi-label ARFF stream.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// ARFF file (optionally .gz); repeatable.
    #[arg(long = "dataset", required = true)]
    pub datasets: Vec<PathBuf>,
    /// Model id; repeatable. One of goowe-br, goowe-cc, goowe-ps, ebr, ecc, eps, eabr, eacc, eaps.
    #[arg(long = "model", required = true)]
    pub models: Vec<String>,
    /// Ensemble size.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Chunk size.
    #[arg(long, default_value_t = 500)]
    pub chunk: usize,
    /// Evaluation window; defaults to the chunk size.
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, env = "GOOWEML_OUT", default_value = ".")]
    pub out: PathBuf,
    /// Concurrent runs; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DirectionArg {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TiesArg {
    Average,
    Min,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Glob of JSON run summaries.
    #[arg(long)]
    pub summaries: String,
    #[arg(long, default_value = "f1_ex")]
    pub metric: String,
    #[arg(long, value_enum, default_value = "max")]
    pub direction: DirectionArg,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "average")]
    pub ties: TiesArg,
    /// Where to write the diagram JSON; defaults to `cd_<metric>.json` in the output directory.
    #[arg(long)]
    pub diagram: Option<PathBuf>,
    #[arg(long, env = "GOOWEML_OUT", default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub labels: usize,
    #[arg(long, default_value_t = 10)]
    pub features: usize,
    #[arg(long, default_value_t = 1000)]
    pub instances: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub drift_point: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub shift: f64,
    #[arg(long)]
    pub flip_labels: bool,
    #[arg(long, default_value_t = 0.3)]
    pub label_density: f64,
    #[arg(long, default_value_t = 0.0)]
    pub label_correlation: f64,
    #[arg(long, default_value_t = 1.0)]
    pub signal: f64,
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    #[arg(long)]
    pub binary_features: bool,
}

/// Deterministic per-run summary. Wall-clock figures live in the
/// `.timing.json` sidecar so reruns produce identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub dataset: String,
    pub model: String,
    pub seed: u64,
    pub ensemble_size: usize,
    pub chunk_size: usize,
    pub window_size: usize,
    pub instances_seen: u64,
    pub warmup: u64,
    pub instances: u64,
    pub metrics: Metrics,
    pub model_bytes: usize,
    pub windows: Vec<WindowSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSummary {
    pub window_index: usize,
    pub instances_seen: u64,
    pub instances: u64,
    pub metrics: Metrics,
    pub model_bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTiming {
    pub elapsed_seconds: f64,
    pub window_elapsed_seconds: Vec<f64>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let outcome = std::panic::catch_unwind(|| execute(cli));
    match outcome {
        Ok(Ok(())) => ExitCode::from(EXIT_OK),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL),
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Contract(_) | Error::DimensionMismatch { .. } => EXIT_USAGE,
        Error::Stats(_) => EXIT_DATA,
        e if e.is_data_error() => EXIT_DATA,
        _ => EXIT_INTERNAL,
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(a) => run(&a).map(|_| ()),
        Command::Stats(a) => {
            let report = stats_command(&a)?;
            print!("{report}");
            Ok(())
        }
        Command::Synth(a) => synth_command(&a),
    }
}

/// `yeast.arff.gz` -> `yeast`
pub fn dataset_name(path: &Path) -> String {
    let mut name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    for ext in [".gz", ".arff"] {
        if let Some(s) = name.strip_suffix(ext) {
            name = s.to_string();
        }
    }
    name
}

/// Runs the grid and returns the summaries in (dataset, model) order.
pub fn run(args: &RunArgs) -> Result<Vec<RunSummary>> {
    let kinds: Vec<ModelKind> = args.models.iter().map(|m| m.parse()).collect::<Result<_>>()?;
    if args.k < 2 {
        return Err(Error::contract(format!("--k must be at least 2, got {}", args.k)));
    }
    if args.chunk == 0 {
        return Err(Error::contract("--chunk must be positive"));
    }
    let window = args.window.unwrap_or(args.chunk);
    if window == 0 || window > args.chunk {
        return Err(Error::contract(format!("--window must lie in 1..={}, got {window}", args.chunk)));
    }
    let config = ModelConfig {
        ensemble_size: args.k,
        chunk_size: args.chunk,
        seed: args.seed,
    };
    let jobs: Vec<(&PathBuf, ModelKind)> =
        args.datasets.iter().flat_map(|d| kinds.iter().map(move |&k| (d, k))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers)
        .build()
        .map_err(|e| Error::contract(format!("worker pool: {e}")))?;
    let results: Vec<Result<(RunSummary, RunOutcome)>> =
        pool.install(|| jobs.par_iter().map(|&(path, kind)| run_one(path, kind, config, window)).collect());

    fs::create_dir_all(&args.out)?;
    let mut summaries = Vec::new();
    let mut first_error = None;
    for result in results {
        match result {
            Ok((summary, outcome)) => {
                write_artifacts(&args.out, &summary, &outcome)?;
                summaries.push(summary);
            }
            // the first failure is reported by the caller
            Err(e) if first_error.is_none() => first_error = Some(e),
            Err(e) => eprintln!("error: {e}"),
        }
    }
    match first_error {
        Some(e) => Err(e),
        None => Ok(summaries),
    }
}

fn run_one(path: &Path, kind: ModelKind, config: ModelConfig, window: usize) -> Result<(RunSummary, RunOutcome)> {
    let reader = arff::open(path)?;
    let header = reader.header().clone();
    let mut model = Model::build(kind, header.schema(), header.label_count, config)?;
    let outcome = prequential_run(&mut model, reader, window).map_err(|e| e.in_file(path))?;
    let dataset = dataset_name(path);
    info!("{dataset} {kind}: {} instances", outcome.instances_seen);
    let summary = RunSummary {
        dataset,
        model: kind.id(),
        seed: config.seed,
        ensemble_size: config.ensemble_size,
        chunk_size: config.chunk_size,
        window_size: window,
        instances_seen: outcome.instances_seen,
        warmup: outcome.warmup,
        instances: outcome.cumulative.instances,
        metrics: outcome.cumulative.metrics,
        model_bytes: outcome.cumulative.model_bytes,
        windows: outcome
            .windows
            .iter()
            .map(|w| WindowSummary {
                window_index: w.window_index,
                instances_seen: w.instances_seen,
                instances: w.report.instances,
                metrics: w.report.metrics,
                model_bytes: w.report.model_bytes,
            })
            .collect(),
    };
    Ok((summary, outcome))
}

pub fn artifact_stem(summary: &RunSummary) -> String {
    format!("{}_{}_{}", summary.dataset, summary.model, summary.seed)
}

fn write_artifacts(dir: &Path, summary: &RunSummary, outcome: &RunOutcome) -> Result<()> {
    let stem = artifact_stem(summary);
    let mut csv = BufWriter::new(File::create(dir.join(format!("{stem}.csv")))?);
    write_windows_csv(&mut csv, &outcome.windows)?;
    csv.flush()?;

    let mut json = BufWriter::new(File::create(dir.join(format!("{stem}.json")))?);
    serde_json::to_writer_pretty(&mut json, summary)?;
    writeln!(json)?;
    json.flush()?;

    let timing = RunTiming {
        elapsed_seconds: outcome.cumulative.elapsed_seconds,
        window_elapsed_seconds: outcome.windows.iter().map(|w| w.report.elapsed_seconds).collect(),
    };
    let mut t = BufWriter::new(File::create(dir.join(format!("{stem}.timing.json")))?);
    serde_json::to_writer_pretty(&mut t, &timing)?;
    writeln!(t)?;
    t.flush()?;
    Ok(())
}

/// Looks `metric` up in a summary: first under `metrics`, then at the top
/// level, then in the timing sidecar next to the file.
fn lookup_metric(path: &Path, doc: &serde_json::Value, metric: &str) -> Option<f64> {
    if let Some(v) = doc.get("metrics").and_then(|m| m.get(metric)).and_then(|v| v.as_f64()) {
        return Some(v);
    }
    if let Some(v) = doc.get(metric).and_then(|v| v.as_f64()) {
        return Some(v);
    }
    let sidecar = path.with_extension("timing.json");
    let text = fs::read_to_string(sidecar).ok()?;
    let timing: serde_json::Value = serde_json::from_str(&text).ok()?;
    timing.get(metric).and_then(|v| v.as_f64())
}

/// Collects a dataset-by-model score grid from summary files.
pub fn load_grid(pattern: &str, metric: &str, direction: Direction) -> Result<RankMatrix> {
    let paths = glob::glob(pattern).map_err(|e| Error::contract(format!("bad glob '{pattern}': {e}")))?;
    let mut cells: BTreeMap<(String, String), f64> = BTreeMap::new();
    for entry in paths {
        let path = entry.map_err(|e| Error::Io(e.into()))?;
        if path.to_string_lossy().ends_with(".timing.json") {
            continue;
        }
        let text = fs::read_to_string(&path).map_err(|e| Error::from(e).in_file(&path))?;
        let doc: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::from(e).in_file(&path))?;
        let field = |k: &str| doc.get(k).and_then(|v| v.as_str()).map(str::to_string);
        let (Some(dataset), Some(model)) = (field("dataset"), field("model")) else {
            return Err(Error::Stats(format!("{}: summary lacks dataset/model fields", path.display())));
        };
        let value = lookup_metric(&path, &doc, metric)
            .ok_or_else(|| Error::Stats(format!("{}: no metric '{metric}'", path.display())))?;
        if cells.insert((dataset.clone(), model.clone()), value).is_some() {
            return Err(Error::Stats(format!("duplicate summary for {dataset} / {model}")));
        }
    }
    if cells.is_empty() {
        return Err(Error::Stats(format!("no summaries match '{pattern}'")));
    }
    let datasets: BTreeSet<&String> = cells.keys().map(|(d, _)| d).collect();
    let models: BTreeSet<&String> = cells.keys().map(|(_, m)| m).collect();
    let mut gaps = Vec::new();
    let mut scores = Vec::new();
    for d in &datasets {
        let mut row = Vec::new();
        for m in &models {
            match cells.get(&((*d).clone(), (*m).clone())) {
                Some(&v) => row.push(v),
                None => gaps.push(format!("{d}/{m}")),
            }
        }
        scores.push(row);
    }
    if !gaps.is_empty() {
        return Err(Error::Stats(format!("ragged grid; missing cells: {}", gaps.join(", "))));
    }
    RankMatrix::new(
        models.into_iter().cloned().collect(),
        datasets.into_iter().cloned().collect(),
        scores,
        direction,
    )
}

/// Runs the rank analysis, writes the diagram JSON and returns the text report.
pub fn stats_command(args: &StatsArgs) -> Result<String> {
    use std::fmt::Write as _;
    let direction = match args.direction {
        DirectionArg::Max => Direction::Maximize,
        DirectionArg::Min => Direction::Minimize,
    };
    let ties = match args.ties {
        TiesArg::Average => TieMethod::Average,
        TiesArg::Min => TieMethod::Min,
    };
    let matrix = load_grid(&args.summaries, &args.metric, direction)?.with_ties(ties);
    let ranks = matrix.ranks();
    let avg = stats::average_ranks(&matrix);
    let friedman = stats::friedman_statistic(&matrix);
    let cd = stats::nemenyi_cd(matrix.model_count(), matrix.dataset_count(), args.alpha)?;
    let diagram = stats::cd_diagram_data(&matrix.models, &avg, cd);

    let mut out = String::new();
    let width = matrix.datasets.iter().map(String::len).max().unwrap_or(0).max(9);
    let _ = write!(out, "{:<width$}", "dataset");
    for m in &matrix.models {
        let _ = write!(out, " {m:>10}");
    }
    let _ = writeln!(out);
    for (d, row) in matrix.datasets.iter().zip(&ranks) {
        let _ = write!(out, "{d:<width$}");
        for r in row {
            let _ = write!(out, " {r:>10.2}");
        }
        let _ = writeln!(out);
    }
    let _ = write!(out, "{:<width$}", "avg. rank");
    for r in &avg {
        let _ = write!(out, " {r:>10.2}");
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "friedman chi2 = {:.4}, df = {}, p = {:.6}",
        friedman.statistic, friedman.degrees_of_freedom, friedman.p_value
    );
    let _ = writeln!(out, "nemenyi alpha = {}, CD = {cd:.3}", args.alpha);
    out.push_str(&diagram.render());

    let path = args
        .diagram
        .clone()
        .unwrap_or_else(|| args.out.join(format!("cd_{}.json", args.metric)));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let doc = serde_json::json!({
        "metric": args.metric,
        "alpha": args.alpha,
        "models": matrix.models,
        "datasets": matrix.datasets,
        "average_ranks": avg,
        "friedman": friedman,
        "diagram": diagram,
    });
    fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(out)
}

pub fn synth_command(args: &SynthArgs) -> Result<()> {
    let config = SyntheticStreamConfig {
        labels: args.labels,
        features: args.features,
        instances: args.instances,
        seed: args.seed,
        drift_point: args.drift_point,
        shift: args.shift,
        flip_labels: args.flip_labels,
        label_density: args.label_density,
        label_correlation: args.label_correlation,
        signal: args.signal,
        noise: args.noise,
        binary_features: args.binary_features,
    };
    config.validate()?;
    if let Some(parent) = args.output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut out = BufWriter::new(File::create(&args.output)?);
    synth::write_arff(&mut out, &config)?;
    out.flush()?;
    Ok(())
}

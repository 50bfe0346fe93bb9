//! `divsub` command-line entry point.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use divsub::data::{
    generate_synthesized, load_dense_csv, load_sparse_multilabel, read_dense_csv,
    read_sparse_multilabel, DenseCsvOptions, SparseOptions,
};
use divsub::oracle::{approximation_report, OracleInstance, DEFAULT_BUDGET};
use divsub::{
    centralized_select, default_machine_count, distributed_select, multilabel_metrics,
    streaming_select, BinningSpec, BinningStrategy, DataError, Dataset, DatasetStream,
    GreedyVariant, ObjectiveParams, PredictionMatrix, RunReport, SelectError,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Budget(_) => 4,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e.to_string())
    }
}

/// Maps a selection failure to an exit class, prefixing the flag it came from.
fn select_error(e: SelectError) -> CliError {
    match e {
        SelectError::BudgetExceeded { .. } => CliError::Budget(format!("--budget: {e}")),
        SelectError::InvalidK { .. } | SelectError::KTooLarge { .. } => {
            CliError::Usage(format!("--k: {e}"))
        }
        SelectError::NoMachines => CliError::Usage(format!("--machines: {e}")),
        SelectError::InvalidConfig(_) => CliError::Usage(e.to_string()),
        _ => CliError::Data(e.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "divsub",
    version,
    about = "Diverse, label-relevant feature selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Select k features and print a run report.
    Select(SelectArgs),
    /// Compare Greedy, AltGreedy and the distributed pipeline with the exhaustive optimum.
    Oracle(OracleArgs),
    /// Score 0/1 predictions against ground truth.
    EvalMetrics(MetricsArgs),
    /// Write the synthesized benchmark dataset as dense CSV.
    GenSynth(SynthArgs),
    /// Objective value and runtime per mode and k.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    DenseCsv,
    SparseMl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Binning {
    EqualFrequency,
    EqualWidth,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Centralized,
    Distributed,
    Streaming,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Greedy,
    Altgreedy,
}

impl From<Algorithm> for GreedyVariant {
    fn from(a: Algorithm) -> Self {
        match a {
            Algorithm::Greedy => GreedyVariant::Greedy,
            Algorithm::Altgreedy => GreedyVariant::AltGreedy,
        }
    }
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Dataset path; stdin when absent or `-`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "dense-csv")]
    format: Format,
    /// Number of trailing label columns (dense CSV).
    #[arg(long)]
    labels: Option<usize>,
    /// Feature count (sparse).
    #[arg(long)]
    n_features: Option<usize>,
    /// Label count (sparse).
    #[arg(long)]
    n_labels: Option<usize>,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..))]
    bins: u64,
    #[arg(long, value_enum, default_value = "equal-frequency")]
    binning: Binning,
    /// Columns with at most this many distinct values are kept as categories.
    #[arg(long, default_value_t = 32)]
    max_raw_categories: usize,
    /// The dense CSV starts with a header row.
    #[arg(long)]
    header: bool,
    /// Accept label columns with values other than 0/1.
    #[arg(long)]
    permissive_labels: bool,
}

#[derive(Debug, Args)]
struct ObjectiveArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    #[arg(long, default_value_t = 0.5, value_parser = parse_lambda)]
    lambda: f64,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    p: u64,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output path; stdout when absent or `-`.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    objective: ObjectiveArgs,
    #[arg(long, value_enum, default_value = "centralized")]
    mode: Mode,
    /// Centralized mode only.
    #[arg(long, value_enum)]
    algorithm: Option<Algorithm>,
    /// Defaults to ceil(sqrt(d / k)).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    machines: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for distributed mode; defaults to the available cores.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    parallelism: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    objective: ObjectiveArgs,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    machines: Option<u64>,
    /// Comma separated partition seeds for the distributed runs.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    /// Largest number of subsets the exhaustive search may enumerate.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    /// Ground-truth 0/1 CSV, no header.
    #[arg(long)]
    truth: PathBuf,
    /// Predicted 0/1 CSV, no header.
    #[arg(long)]
    pred: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Omit the header row.
    #[arg(long)]
    no_header: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_delimiter = ',', default_value = "10,50",
          value_parser = clap::value_parser!(u64).range(1..))]
    k: Vec<u64>,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "centralized,distributed"
    )]
    modes: Vec<Mode>,
    #[arg(long, default_value_t = 0.5, value_parser = parse_lambda)]
    lambda: f64,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    p: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    machines: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the distributed rows; defaults to the available cores.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    parallelism: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_lambda(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

impl InputArgs {
    fn check(&self) -> Result<(), CliError> {
        match self.format {
            Format::DenseCsv => {
                if self.labels.is_none() {
                    return Err(CliError::Usage(
                        "--labels is required for --format dense-csv".into(),
                    ));
                }
                if self.n_features.is_some() || self.n_labels.is_some() {
                    return Err(CliError::Usage(
                        "--n-features/--n-labels apply only to --format sparse-ml".into(),
                    ));
                }
            }
            Format::SparseMl => {
                if self.n_features.is_none() || self.n_labels.is_none() {
                    return Err(CliError::Usage(
                        "--n-features and --n-labels are required for --format sparse-ml".into(),
                    ));
                }
                if self.labels.is_some() || self.header {
                    return Err(CliError::Usage(
                        "--labels/--header apply only to --format dense-csv".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn binning(&self) -> BinningSpec {
        BinningSpec {
            strategy: match self.binning {
                Binning::EqualFrequency => BinningStrategy::EqualFrequency,
                Binning::EqualWidth => BinningStrategy::EqualWidth,
                Binning::None => BinningStrategy::None,
            },
            bins: self.bins as usize,
            max_raw_categories: self.max_raw_categories,
        }
    }

    fn path(&self) -> Option<&Path> {
        self.input.as_deref().filter(|p| p.as_os_str() != "-")
    }

    fn load(&self) -> Result<Dataset, CliError> {
        let binning = self.binning();
        let data = match self.format {
            Format::DenseCsv => {
                let opts = DenseCsvOptions::new(self.labels.unwrap_or_default())
                    .header(self.header)
                    .binning(binning)
                    .permissive_labels(self.permissive_labels);
                match self.path() {
                    Some(p) => load_dense_csv(p, &opts)?,
                    None => read_dense_csv(io::stdin().lock(), "<stdin>", &opts)?,
                }
            }
            Format::SparseMl => {
                let opts = SparseOptions {
                    n_features: self.n_features.unwrap_or_default(),
                    n_labels: self.n_labels.unwrap_or_default(),
                    binning,
                };
                match self.path() {
                    Some(p) => load_sparse_multilabel(p, &opts)?,
                    None => read_sparse_multilabel(io::stdin().lock(), "<stdin>", &opts)?,
                }
            }
        };
        Ok(data)
    }

    fn bins_echo(&self) -> Option<usize> {
        (self.binning != Binning::None).then_some(self.bins as usize)
    }
}

impl ObjectiveArgs {
    fn params(&self) -> ObjectiveParams<f64> {
        ObjectiveParams {
            lambda: self.lambda,
            p: self.p as usize,
            k: self.k as usize,
        }
    }
}

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn open_output(out: &OutputArgs) -> Result<Box<dyn Write>, CliError> {
    match out.output.as_deref().filter(|p| p.as_os_str() != "-") {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| CliError::Data(format!("--output {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn write_json<S: Serialize>(out: &OutputArgs, value: &S) -> Result<(), CliError> {
    let mut w = open_output(out)?;
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| CliError::Data(format!("writing output: {e}")))?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::Data(format!("writing output: {e}")))
}

fn machines_for(d: usize, k: usize, flag: Option<u64>) -> Result<usize, CliError> {
    match flag {
        Some(m) => Ok(m as usize),
        None => default_machine_count(d, k).map_err(select_error),
    }
}

fn run_mode(
    data: &Dataset,
    mode: Mode,
    params: ObjectiveParams<f64>,
    variant: GreedyVariant,
    machines: Option<u64>,
    seed: u64,
    parallelism: usize,
) -> Result<RunReport, CliError> {
    if params.k > data.d() {
        return Err(CliError::Usage(format!(
            "--k: {} exceeds the {} features in the dataset",
            params.k,
            data.d()
        )));
    }
    let report = match mode {
        Mode::Centralized => centralized_select(data, params, variant),
        Mode::Distributed => {
            let m = machines_for(data.d(), params.k, machines)?;
            distributed_select(data, params, m, seed, parallelism)
        }
        Mode::Streaming => {
            let m = machines_for(data.d(), params.k, machines)?;
            streaming_select(&mut DatasetStream::new(data), params, m, seed)
        }
    };
    report.map_err(select_error)
}

fn select(args: SelectArgs) -> Result<(), CliError> {
    args.input.check()?;
    if args.algorithm.is_some() && args.mode != Mode::Centralized {
        return Err(CliError::Usage(
            "--algorithm applies only to --mode centralized".into(),
        ));
    }
    if args.machines.is_some() && args.mode == Mode::Centralized {
        return Err(CliError::Usage(
            "--machines applies only to --mode distributed or streaming".into(),
        ));
    }
    if args.parallelism.is_some() && args.mode != Mode::Distributed {
        return Err(CliError::Usage(
            "--parallelism applies only to --mode distributed".into(),
        ));
    }
    let parallelism = args
        .parallelism
        .map_or_else(default_parallelism, |p| p as usize);
    let variant = args.algorithm.map_or(GreedyVariant::AltGreedy, Into::into);
    let data = args.input.load()?;
    let mut report = run_mode(
        &data,
        args.mode,
        args.objective.params(),
        variant,
        args.machines,
        args.seed,
        parallelism,
    )?;
    report.config.bins = args.input.bins_echo();
    write_json(&args.output, &report)
}

fn oracle(args: OracleArgs) -> Result<(), CliError> {
    args.input.check()?;
    let data = args.input.load()?;
    let params = args.objective.params();
    if params.k > data.d() {
        return Err(CliError::Usage(format!(
            "--k: {} exceeds the {} features in the dataset",
            params.k,
            data.d()
        )));
    }
    let mut instance = OracleInstance::new(&data, params);
    instance.machines = args.machines.map(|m| m as usize);
    instance.budget = args.budget;
    let report = approximation_report(&instance, &args.seeds).map_err(select_error)?;
    write_json(&args.output, &report)
}

fn eval_metrics(args: MetricsArgs) -> Result<(), CliError> {
    let truth = PredictionMatrix::load_csv(&args.truth)?;
    let pred = PredictionMatrix::load_csv(&args.pred)?;
    let scores = multilabel_metrics(&truth, &pred).map_err(|e| {
        CliError::Data(format!(
            "{} vs {}: {e}",
            args.truth.display(),
            args.pred.display()
        ))
    })?;
    write_json(&args.output, &scores)
}

fn gen_synth(args: SynthArgs) -> Result<(), CliError> {
    let data = generate_synthesized(args.seed);
    let mut w = open_output(&args.output)?;
    data.write_dense_csv(&mut w, !args.no_header)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::Data(format!("writing output: {e}")))
}

#[derive(Debug, Serialize)]
struct BenchRow {
    mode: Mode,
    k: usize,
    machines: Option<usize>,
    objective: f64,
    runtime_ms: f64,
    selected: Vec<usize>,
}

#[derive(Debug, Serialize)]
struct BenchReport {
    n: usize,
    d: usize,
    t: usize,
    lambda: f64,
    p: usize,
    seed: u64,
    parallelism: usize,
    rows: Vec<BenchRow>,
}

fn bench(args: BenchArgs) -> Result<(), CliError> {
    args.input.check()?;
    let parallelism = args
        .parallelism
        .map_or_else(default_parallelism, |p| p as usize);
    let data = args.input.load()?;
    let mut rows = Vec::new();
    for &k in &args.k {
        let params = ObjectiveParams {
            lambda: args.lambda,
            p: args.p as usize,
            k: k as usize,
        };
        for &mode in &args.modes {
            let machines = match mode {
                Mode::Centralized => None,
                _ => Some(machines_for(data.d(), params.k, args.machines)?),
            };
            let start = Instant::now();
            let report = run_mode(
                &data,
                mode,
                params,
                GreedyVariant::AltGreedy,
                machines.map(|m| m as u64),
                args.seed,
                parallelism,
            )?;
            rows.push(BenchRow {
                mode,
                k: params.k,
                machines,
                objective: report.objective.h,
                runtime_ms: start.elapsed().as_secs_f64() * 1e3,
                selected: report.selected_ids(),
            });
        }
    }
    let report = BenchReport {
        n: data.n(),
        d: data.d(),
        t: data.t(),
        lambda: args.lambda,
        p: args.p as usize,
        seed: args.seed,
        parallelism,
        rows,
    };
    write_json(&args.output, &report)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Select(a) => select(a),
        Command::Oracle(a) => oracle(a),
        Command::EvalMetrics(a) => eval_metrics(a),
        Command::GenSynth(a) => gen_synth(a),
        Command::Bench(a) => bench(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

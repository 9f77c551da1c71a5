//! Command-line front end: `fit`, `predict`, `simulate` and `evaluate`.
//!
//! Settings come from flags, then an optional TOML config file, then
//! defaults. Exit codes: 0 success, 2 configuration, 3 data, 4 numeric.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::dataio::{self, Dataset};
use crate::error::{Error, ErrorKind, Result};
use crate::model::{self, FitConfig, PredictOptions, SigmaMethod};
use crate::rng;
use crate::simbench::{self, DesignDistribution, SimulationScenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "wavereg", version, about = "Wavelet least-squares additive regression")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit a model to a CSV file and write the model file.
    Fit(FitArgs),
    /// Predict with a saved model.
    Predict(PredictArgs),
    /// Run the Monte-Carlo benchmark and emit an RMSE table.
    Simulate(SimulateArgs),
    /// Cross-validated (or repeated hold-out) RMSE on a CSV file.
    Evaluate(EvaluateArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct EstimatorArgs {
    /// Scaling filter: haar, db4tap, coif24tap [default: coif24tap]
    #[arg(long)]
    pub filter: Option<String>,
    /// Resolution level J (overrides the sample-size rule)
    #[arg(long = "level", visible_alias = "J")]
    pub level: Option<u32>,
    /// Truncation threshold on the standardized scale
    #[arg(long)]
    pub beta: Option<f64>,
    /// Noise estimate for the threshold: mad_detail or sample_sd [default: mad_detail]
    #[arg(long)]
    pub sigma_method: Option<String>,
    /// Ridge penalty; omitted means minimum-norm least squares
    #[arg(long)]
    pub ridge: Option<f64>,
    /// Restrict training to the central quantile box with this coverage (e.g. 0.95)
    #[arg(long)]
    pub quantile_coverage: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    /// Training CSV with a header row
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Response column
    #[arg(long)]
    pub target: Option<String>,
    /// Comma-separated feature columns [default: all but the target]
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    /// Model file to write
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the fit report here instead of stdout
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// TOML config file with the same keys as the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
}

#[derive(Args, Debug, Clone)]
pub struct PredictArgs {
    /// Model file written by `fit`
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// CSV with the feature columns
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Comma-separated feature columns, in model order [default: all columns but --target]
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    /// Column to exclude when features are not listed
    #[arg(long)]
    pub target: Option<String>,
    /// Predictions CSV [default: stdout]
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Reject rows outside the training range instead of clipping them
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    /// uniform or beta_3half [default: uniform]
    #[arg(long)]
    pub design: Option<String>,
    /// Scaling filter [default: coif24tap]
    #[arg(long)]
    pub filter: Option<String>,
    /// Comma-separated noise variances [default: 0.25]
    #[arg(long, value_delimiter = ',')]
    pub sigma2: Option<Vec<f64>>,
    /// Comma-separated sample sizes [default: 1024]
    #[arg(long = "n", value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Monte-Carlo replications [default: 25]
    #[arg(long)]
    pub replications: Option<usize>,
    /// Full grid: 200 replications, n = 256..4096, sigma2 = 0.25,0.75
    #[arg(long)]
    pub full: bool,
    /// Noise estimate for the threshold [default: mad_detail]
    #[arg(long)]
    pub sigma_method: Option<String>,
    /// Base seed [default: $WAVEREG_SEED or built-in]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for replications [default: 1]
    #[arg(long)]
    pub threads: Option<usize>,
    /// Table output [default: stdout]
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Aligned text instead of CSV
    #[arg(long)]
    pub pretty: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    /// Number of folds [default: 2]
    #[arg(long)]
    pub folds: Option<usize>,
    /// Independent reshuffles [default: 10]
    #[arg(long)]
    pub repetitions: Option<usize>,
    /// Use repeated train/test splits with this train fraction instead of k-fold
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Summary CSV [default: stdout]
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
}

/// Keys accepted in a config file; every one mirrors a flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    input: Option<PathBuf>,
    output: Option<PathBuf>,
    report: Option<PathBuf>,
    model: Option<PathBuf>,
    target: Option<String>,
    features: Option<Vec<String>>,
    filter: Option<String>,
    level: Option<u32>,
    beta: Option<f64>,
    sigma_method: Option<String>,
    ridge: Option<f64>,
    quantile_coverage: Option<f64>,
    design: Option<String>,
    sigma2: Option<Vec<f64>>,
    n: Option<Vec<usize>>,
    replications: Option<usize>,
    seed: Option<u64>,
    threads: Option<usize>,
    folds: Option<usize>,
    repetitions: Option<usize>,
    train_fraction: Option<f64>,
    strict: Option<bool>,
    pretty: Option<bool>,
}

fn read_config(path: Option<&Path>) -> Result<ConfigFile> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("--{flag} is required")))
}

fn estimator_config(args: &EstimatorArgs, file: &ConfigFile) -> Result<FitConfig> {
    let defaults = FitConfig::default();
    let sigma_method = match args.sigma_method.clone().or_else(|| file.sigma_method.clone()) {
        Some(s) => s.parse()?,
        None => defaults.sigma_method,
    };
    let filter = args
        .filter
        .clone()
        .or_else(|| file.filter.clone())
        .unwrap_or(defaults.filter);
    crate::wavelet::make_filter(&filter)?;
    let quantile_restrict = args.quantile_coverage.or(file.quantile_coverage);
    if let Some(c) = quantile_restrict {
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::Config(format!("--quantile-coverage must be in (0, 1], got {c}")));
        }
    }
    let beta = args.beta.or(file.beta);
    if let Some(b) = beta {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::Config(format!("--beta must be positive, got {b}")));
        }
    }
    let ridge_lambda = args.ridge.or(file.ridge);
    if let Some(l) = ridge_lambda {
        if !(l >= 0.0) || !l.is_finite() {
            return Err(Error::Config(format!("--ridge must be non-negative, got {l}")));
        }
    }
    Ok(FitConfig {
        filter,
        level: args.level.or(file.level),
        beta,
        sigma_method,
        ridge_lambda,
        quantile_restrict,
    })
}

fn open_output<'a>(path: Option<&Path>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    match path {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|e| Error::io(p, e))?;
            Ok(Box::new(std::io::BufWriter::new(f)))
        }
        None => Ok(Box::new(stdout)),
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("<output>", e)
}

fn cmd_fit(args: FitArgs, stdout: &mut dyn Write) -> Result<()> {
    let file = read_config(args.config.as_deref())?;
    let config = estimator_config(&args.estimator, &file)?;
    let input = required(args.input.or(file.input), "input")?;
    let target = required(args.target.or(file.target), "target")?;
    let output = required(args.output.or(file.output), "output")?;
    let features = args.features.or(file.features).unwrap_or_default();
    let data = dataio::load_csv(&input, &target, &features)?;
    let (fitted, report) = model::fit(&data.x, &data.y, &config)?;
    model::save_model(&fitted, &output)?;

    let mut out = open_output(args.report.or(file.report).as_deref(), stdout)?;
    let lines = [
        ("model", output.display().to_string()),
        ("features", data.feature_names.join(",")),
        ("filter", config.filter.clone()),
        ("level", report.level.to_string()),
        ("columns", report.columns.to_string()),
        ("effective_rank", report.effective_rank.to_string()),
        ("rows_used", report.rows_used.to_string()),
        ("dropped_rows", report.dropped_rows.to_string()),
        ("sigma_method", config.sigma_method.to_string()),
        ("sigma_hat", format!("{}", report.sigma_hat)),
        ("sigma_floored", report.sigma_floored.to_string()),
        ("beta_n", format!("{}", report.beta_n)),
        ("y_mean", format!("{}", fitted.y_mean())),
        ("y_std", format!("{}", fitted.y_std())),
    ];
    for (k, v) in lines {
        writeln!(out, "{k} = {v}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

fn cmd_predict(args: PredictArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let file = read_config(args.config.as_deref())?;
    let model_path = required(args.model.or(file.model), "model")?;
    let input = required(args.input.or(file.input), "input")?;
    let features = args.features.or(file.features).unwrap_or_default();
    let target = args.target.or(file.target);
    let strict = args.strict || file.strict.unwrap_or(false);
    let fitted = model::load_model(&model_path)?;
    let (x, _) = dataio::load_features(&input, &features, target.as_deref())?;
    let pred = fitted.predict_with(&x, PredictOptions { strict })?;
    let mut out = open_output(args.output.or(file.output).as_deref(), stdout)?;
    writeln!(out, "row_id,prediction").map_err(io_err)?;
    for (i, v) in pred.values.iter().enumerate() {
        writeln!(out, "{i},{v}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    if pred.clipped_rows > 0 {
        writeln!(
            stderr,
            "warning: {} input rows were clipped to the training range",
            pred.clipped_rows
        )
        .map_err(io_err)?;
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let file = read_config(args.config.as_deref())?;
    let design: DesignDistribution = args.design.or(file.design).as_deref().unwrap_or("uniform").parse()?;
    let filter = args.filter.or(file.filter).unwrap_or_else(|| "coif24tap".into());
    crate::wavelet::make_filter(&filter)?;
    let sigma_method: SigmaMethod = match args.sigma_method.or(file.sigma_method) {
        Some(s) => s.parse()?,
        None => SigmaMethod::MadDetail,
    };
    let (default_n, default_s2, default_b) = if args.full {
        (
            vec![256, 512, 1024, 2048, 4096],
            vec![0.25, 0.75],
            simbench::FULL_REPLICATIONS,
        )
    } else {
        (vec![1024], vec![0.25], simbench::DESK_REPLICATIONS)
    };
    let ns = args.n.or(file.n).unwrap_or(default_n);
    let sigma2 = args.sigma2.or(file.sigma2).unwrap_or(default_s2);
    let replications = args.replications.or(file.replications).unwrap_or(default_b);
    let seed = args.seed.or(file.seed).unwrap_or_else(rng::default_seed);
    let threads = args.threads.or(file.threads).unwrap_or(1);
    if ns.is_empty() || sigma2.is_empty() {
        return Err(Error::Config("--n and --sigma2 need at least one value".into()));
    }
    if threads == 0 {
        return Err(Error::Config("--threads must be at least 1".into()));
    }
    let mut results = Vec::new();
    for &s2 in &sigma2 {
        for &n in &ns {
            let mut s = SimulationScenario::new(design, s2, n, &filter)
                .with_replications(replications)
                .with_seed(seed);
            s.sigma_method = sigma_method;
            results.push(simbench::run_scenario_with_threads(&s, threads)?);
        }
    }
    let mut out = open_output(args.output.or(file.output).as_deref(), stdout)?;
    if args.pretty || file.pretty.unwrap_or(false) {
        simbench::write_table_pretty(&results, &mut out)?;
    } else {
        simbench::write_table_csv(&results, &mut out)?;
    }
    out.flush().map_err(io_err)
}

/// Per-split RMSE values and their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationSummary {
    /// `(repetition, fold, rmse)`.
    pub splits: Vec<(usize, usize, f64)>,
    pub mean_rmse: f64,
}

/// Repeated k-fold cross-validation; repetition `r` shuffles with seed
/// `seed + r`.
pub fn cross_validate(
    data: &Dataset,
    config: &FitConfig,
    folds: usize,
    repetitions: usize,
    seed: u64,
) -> Result<EvaluationSummary> {
    if repetitions == 0 {
        return Err(Error::Config("--repetitions must be at least 1".into()));
    }
    let mut splits = Vec::new();
    for r in 0..repetitions {
        let assignment = dataio::kfold(data.len(), folds, seed.wrapping_add(r as u64))?;
        for fold in 0..folds {
            let train: Vec<usize> = (0..data.len()).filter(|&i| assignment[i] != fold).collect();
            let test: Vec<usize> = (0..data.len()).filter(|&i| assignment[i] == fold).collect();
            let train = data.subset(&train);
            let test = data.subset(&test);
            let (fitted, _) = model::fit(&train.x, &train.y, config)?;
            splits.push((r, fold, dataio::evaluate(&fitted, &test)?));
        }
    }
    let mean_rmse = splits.iter().map(|s| s.2).sum::<f64>() / splits.len() as f64;
    Ok(EvaluationSummary { splits, mean_rmse })
}

/// Repeated random train/test splits.
pub fn holdout_validate(
    data: &Dataset,
    config: &FitConfig,
    train_fraction: f64,
    repetitions: usize,
    seed: u64,
) -> Result<EvaluationSummary> {
    if repetitions == 0 {
        return Err(Error::Config("--repetitions must be at least 1".into()));
    }
    let mut splits = Vec::new();
    for r in 0..repetitions {
        let (train, test) = dataio::split(data, train_fraction, seed.wrapping_add(r as u64))?;
        let (fitted, _) = model::fit(&train.x, &train.y, config)?;
        splits.push((r, 0, dataio::evaluate(&fitted, &test)?));
    }
    let mean_rmse = splits.iter().map(|s| s.2).sum::<f64>() / splits.len() as f64;
    Ok(EvaluationSummary { splits, mean_rmse })
}

fn cmd_evaluate(args: EvaluateArgs, stdout: &mut dyn Write) -> Result<()> {
    let file = read_config(args.config.as_deref())?;
    let config = estimator_config(&args.estimator, &file)?;
    let input = required(args.input.or(file.input), "input")?;
    let target = required(args.target.or(file.target), "target")?;
    let features = args.features.or(file.features).unwrap_or_default();
    let folds = args.folds.or(file.folds).unwrap_or(2);
    let repetitions = args.repetitions.or(file.repetitions).unwrap_or(10);
    let seed = args.seed.or(file.seed).unwrap_or_else(rng::default_seed);
    let train_fraction = args.train_fraction.or(file.train_fraction);
    let data = dataio::load_csv(&input, &target, &features)?;
    if train_fraction.is_none() && folds > data.len() {
        return Err(Error::Config(format!(
            "--folds {folds} exceeds the {} rows",
            data.len()
        )));
    }
    let summary = match train_fraction {
        Some(f) => holdout_validate(&data, &config, f, repetitions, seed)?,
        None => cross_validate(&data, &config, folds, repetitions, seed)?,
    };
    let mut out = open_output(args.output.or(file.output).as_deref(), stdout)?;
    writeln!(out, "repetition,fold,rmse").map_err(io_err)?;
    for (r, f, v) in &summary.splits {
        writeln!(out, "{r},{f},{v}").map_err(io_err)?;
    }
    writeln!(out, "mean,,{}", summary.mean_rmse).map_err(io_err)?;
    out.flush().map_err(io_err)
}

pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Config => EXIT_CONFIG,
        ErrorKind::Data => EXIT_DATA,
        ErrorKind::Numeric => EXIT_NUMERIC,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(a, stdout),
        Command::Predict(a) => cmd_predict(a, stdout, stderr),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Evaluate(a) => cmd_evaluate(a, stdout),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn main_with_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use samfit::check::run_check;
use samfit::io::{
    dataset_from_csv, dataset_from_json, map_fit_to_json, oracle_to_json, report_to_csv, report_to_json,
    ScenarioFile,
};
use samfit::map::{estimate_tau, map_fit_with, marginal_spectra, validate_priors, TieBreak};
use samfit::simulation::{run_scenario, ScenarioConfig, SpamLambda};
use samfit::spam::lambda_grid;
use samfit::{AveragedData, EnergyConvention, Error, PriorConfig};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;

#[derive(Parser)]
#[command(name = "samfit", version, about = "Sparse additive MAP estimation on regular lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a marginal dataset and write the fit as JSON.
    Fit(FitArgs),
    /// Run the Monte-Carlo study and write the report table.
    Simulate(SimulateArgs),
    /// Like `simulate`, always including SPAM rows (oracle lambda unless --lambda).
    Compare(SimulateArgs),
    /// Compare the MAP procedure with exhaustive search on random small instances.
    Check(CheckArgs),
    /// Print the robust noise estimate of a marginal dataset.
    EstimateNoise(DataArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Energy {
    TwoSided,
    PositiveOnly,
}

impl From<Energy> for EnergyConvention {
    fn from(e: Energy) -> Self {
        match e {
            Energy::TwoSided => EnergyConvention::TwoSided,
            Energy::PositiveOnly => EnergyConvention::PositiveOnly,
        }
    }
}

#[derive(Args)]
struct DataArgs {
    /// Dataset file; `.csv` is read as columns x1..xd, anything else as JSON.
    #[arg(long)]
    data: PathBuf,
    /// Grand mean for CSV input.
    #[arg(long)]
    overall_mean: Option<f64>,
}

#[derive(Args)]
struct PriorArgs {
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// One value for every axis or a comma-separated list with one value per axis.
    #[arg(long, value_delimiter = ',')]
    qj: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    energy: Option<Energy>,
}

impl PriorArgs {
    fn apply(&self, prior: &mut PriorConfig) {
        if let Some(g) = self.gamma {
            prior.gamma = g;
        }
        if let Some(q) = self.q {
            prior.q = q;
        }
        if let Some(qj) = &self.qj {
            prior.q_axis = qj.clone();
        }
        if let Some(e) = self.energy {
            prior.energy = e.into();
        }
    }
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    prior: PriorArgs,
    /// Effective noise variance; skips the dataset value and the robust estimate.
    #[arg(long)]
    tau2: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario JSON; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated SNR levels; `inf` runs noise-free.
    #[arg(long, value_delimiter = ',')]
    snr: Option<Vec<f64>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    prior: PriorArgs,
    /// Fixed effective noise variance for every fit.
    #[arg(long)]
    tau2: Option<f64>,
    /// Use the true noise variance instead of estimating it.
    #[arg(long)]
    known_noise: bool,
    /// Add SPAM rows.
    #[arg(long)]
    spam: bool,
    /// SPAM lambda, one value or one per SNR level; the oracle is used when absent.
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    /// Oracle grid as start:stop:step.
    #[arg(long)]
    lambda_grid: Option<String>,
    /// Report CSV path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON mirror of the report.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Include per-replication records in the JSON mirror.
    #[arg(long, requires = "json")]
    detail: bool,
    /// Oracle curves as JSON, one object per SNR level.
    #[arg(long)]
    oracle_out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 200)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Flip the tie-breaking rule of the MAP procedure.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

enum Failure {
    Usage(String),
    Degenerate(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ZeroTau => Failure::Degenerate(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CmdResult {
    fs::write(path, contents).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_dataset(args: &DataArgs) -> Result<AveragedData, Failure> {
    let text = read(&args.data)?;
    let is_csv = args.data.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let mean = args
            .overall_mean
            .ok_or_else(|| Failure::Usage("--overall-mean is required for CSV input".into()))?;
        Ok(dataset_from_csv(&text, mean, None)?)
    } else {
        if args.overall_mean.is_some() {
            return Err(Failure::Usage("--overall-mean applies only to CSV input".into()));
        }
        Ok(dataset_from_json(&text)?)
    }
}

fn cmd_fit(args: FitArgs) -> CmdResult {
    let data = load_dataset(&args.data)?;
    let mut prior = PriorConfig::default();
    args.prior.apply(&mut prior);
    let report = validate_priors(&prior, data.design())?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let fit = map_fit_with(&data, &prior, args.tau2, TieBreak::default())?;
    println!("selected: {:?}", fit.selected);
    for (axis, k) in &fit.cutpoints {
        println!("cutpoint[{axis}]: {k}");
    }
    println!("tau_hat: {}", fit.tau2.sqrt());
    println!("objective: {}", fit.objective);
    if let Some(out) = &args.out {
        write(out, &map_fit_to_json(&fit))?;
    }
    Ok(())
}

fn scenario(args: &SimulateArgs, force_spam: bool) -> Result<ScenarioConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => ScenarioFile::from_json(&read(path)?)?.into_config()?,
        None => ScenarioConfig::default(),
    };
    if let Some(d) = args.d {
        cfg.d = d;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(snr) = &args.snr {
        cfg.snr_levels = snr.clone();
    }
    if let Some(reps) = args.reps {
        cfg.reps = reps;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    args.prior.apply(&mut cfg.prior);
    if args.tau2.is_some() {
        cfg.tau2_override = args.tau2;
    }
    if args.known_noise {
        cfg.known_noise = true;
    }
    if let Some(text) = &args.lambda_grid {
        cfg.lambda_grid = parse_grid(text)?;
    }
    if let Some(l) = &args.lambda {
        cfg.spam = Some(SpamLambda::Fixed(l.clone()));
    } else if (args.spam || force_spam) && cfg.spam.is_none() {
        cfg.spam = Some(SpamLambda::Oracle);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Failure::Usage(format!("--lambda-grid expects start:stop:step, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(lambda_grid(nums[0], nums[1], nums[2])?)
}

fn cmd_simulate(args: SimulateArgs, force_spam: bool) -> CmdResult {
    let cfg = scenario(&args, force_spam)?;
    let report = run_scenario(&cfg)?;
    let csv = report_to_csv(&report.rows);
    match &args.out {
        Some(out) => write(out, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.json {
        write(path, &report_to_json(&report, args.detail))?;
    }
    if let Some(path) = &args.oracle_out {
        let curves: Vec<_> = report.oracle.iter().flatten().collect();
        if curves.is_empty() {
            return Err(Failure::Usage("--oracle-out needs an oracle run (--spam without --lambda)".into()));
        }
        let body = curves.iter().map(|c| oracle_to_json(c)).collect::<Vec<_>>().join(",\n");
        write(path, &format!("[\n{body}\n]\n"))?;
    }
    Ok(())
}

fn cmd_check(args: CheckArgs) -> CmdResult {
    let tie = if args.inject_fault { TieBreak::Reversed } else { TieBreak::Parsimonious };
    let mismatches = run_check(args.instances, args.seed, tie)?;
    match mismatches.first() {
        None => {
            println!("check: {} instances, all agree", args.instances);
            Ok(())
        }
        Some(m) => {
            let detail = serde_json::to_string_pretty(m).expect("serializable");
            Err(Failure::Check(format!(
                "check: {} of {} instances disagree; first counterexample:\n{detail}",
                mismatches.len(),
                args.instances
            )))
        }
    }
}

fn cmd_estimate_noise(args: DataArgs) -> CmdResult {
    let data = load_dataset(&args)?;
    let tau = estimate_tau(&marginal_spectra(&data)?)?;
    println!("tau_hat: {tau}");
    println!("tau2_hat: {}", tau * tau);
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("SAMFIT_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Usage(format!("SAMFIT_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Simulate(a) => cmd_simulate(a, false),
        Command::Compare(a) => cmd_simulate(a, true),
        Command::Check(a) => cmd_check(a),
        Command::EstimateNoise(a) => cmd_estimate_noise(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Degenerate(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DEGENERATE)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_CHECK_FAILED)
        }
    }
}

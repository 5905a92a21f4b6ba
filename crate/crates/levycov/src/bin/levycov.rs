//! Command-line front end: simulation, single-shot estimation, benchmarking,
//! rate analysis, and class checking.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use levycov::harness::{fit_rate, run_experiment, RateTarget};
use levycov::io::{
    self, CheckClassDoc, EstimateResultDoc, EstimatorDoc, PlanDoc, RateFitDoc, RatesDoc,
    ReportSidecarDoc, SimulateDoc,
};
use levycov::model::{check_class_membership, ClassParams, LevyModelSpec};
use levycov::simulate::simulate_path;
use levycov::{Estimator, Plan};

#[derive(Parser)]
#[command(name = "levycov", version, about = "Co-integrated volatility toolkit for bivariate Lévy processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config file for this subcommand
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory (created if missing); all files are written here
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Master seed; overrides the seed in the config file
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Thread cap for parallel replications (fallback: LEVYCOV_THREADS)
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a path and write increments/jump-log CSVs
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Estimate co-integrated volatility from an increments CSV
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Increments CSV (header `j,dx1,dx2`)
        #[arg(long, value_name = "PATH")]
        input: PathBuf,
    },
    /// Run a Monte Carlo benchmark plan and write report CSV/JSON
    Benchmark {
        #[command(flatten)]
        common: Common,
        /// Also write the raw per-replication estimates
        #[arg(long)]
        emit_raw: bool,
        /// Bypass the class-membership gate
        #[arg(long)]
        force: bool,
    },
    /// Run a benchmark and fit convergence-rate slopes
    Rates {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        emit_raw: bool,
        #[arg(long)]
        force: bool,
    },
    /// Check class membership of a model and print the report
    CheckClass {
        #[command(flatten)]
        common: Common,
    },
}

/// Errors classified by exit status: validation problems (bad config,
/// missing inputs) exit 1, runtime/numerical failures exit 2.
enum CliError {
    Validation(String),
    Runtime(String),
}

impl From<io::IoError> for CliError {
    fn from(e: io::IoError) -> Self {
        match e {
            io::IoError::Core(inner) => CliError::Runtime(format!("levycov-core: {inner}")),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<levycov::Error> for CliError {
    fn from(e: levycov::Error) -> Self {
        match e {
            levycov::Error::QuadratureNonConvergence(_)
            | levycov::Error::SeriesCapExceeded { .. }
            | levycov::Error::DegenerateRegression(_) => {
                CliError::Runtime(format!("levycov-core: {e}"))
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { common } => {
            setup(&common)?;
            cmd_simulate(&common)
        }
        Command::Estimate { common, input } => {
            setup(&common)?;
            cmd_estimate(&common, &input)
        }
        Command::Benchmark { common, emit_raw, force } => {
            setup(&common)?;
            cmd_benchmark(&common, emit_raw, force)
        }
        Command::Rates { common, emit_raw, force } => {
            setup(&common)?;
            cmd_rates(&common, emit_raw, force)
        }
        Command::CheckClass { common } => {
            setup(&common)?;
            cmd_check_class(&common)
        }
    }
}

fn setup(common: &Common) -> CliResult<()> {
    std::fs::create_dir_all(&common.out)
        .map_err(|e| CliError::Validation(format!("cannot create {}: {e}", common.out.display())))?;
    let threads = common.threads.or_else(|| {
        std::env::var("LEVYCOV_THREADS").ok().and_then(|v| v.parse::<usize>().ok())
    });
    if let Some(threads) = threads {
        if threads == 0 {
            return Err(CliError::Validation("--threads must be positive".into()));
        }
        // Ignore the error if a pool already exists (e.g. repeated setup in tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

fn out_path(common: &Common, name: &str) -> PathBuf {
    common.out.join(name)
}

fn cmd_simulate(common: &Common) -> CliResult<()> {
    let mut doc: SimulateDoc = io::read_json(&common.config)?;
    if let Some(seed) = common.seed {
        doc.seed = seed;
    }
    let model: LevyModelSpec<f64> = (&doc.model).try_into().map_err(CliError::from)?;
    let sim_cfg = (&doc.sim).into();
    let sample = simulate_path(&model, &sim_cfg, doc.n, doc.seed)?;
    io::write_increments_csv(&out_path(common, "increments.csv"), &sample)?;
    io::write_jump_log_csv(&out_path(common, "jump_log.csv"), &sample.jump_log)?;
    // Provenance echo with the seed actually applied.
    io::write_json(&out_path(common, "simulate.json"), &doc)?;
    println!(
        "simulated n = {} increments (seed {}), {} jump events",
        sample.n,
        doc.seed,
        sample.jump_log.len()
    );
    Ok(())
}

fn cmd_estimate(common: &Common, input: &Path) -> CliResult<()> {
    let doc: EstimatorDoc = io::read_json(&common.config)?;
    let estimator = Estimator::try_from(&doc)?;
    let sample = io::read_increments_csv(input)?;
    let n = sample.n;
    let result = match &estimator {
        Estimator::Spectral(cfg) => {
            let est = levycov::spectral_estimate(&sample, cfg)?;
            EstimateResultDoc {
                value: est.valid.then_some(est.value),
                valid: est.valid,
                u_used: Some(est.u_used),
                n,
            }
        }
        Estimator::Trc { u_exp } => {
            let cfg = levycov::TrcConfig::for_sample_size(n, *u_exp)?;
            EstimateResultDoc {
                value: Some(levycov::trc_estimate(&sample, &cfg)),
                valid: true,
                u_used: None,
                n,
            }
        }
        Estimator::RealizedCovariance => EstimateResultDoc {
            value: Some(levycov::realized_covariance(&sample)),
            valid: true,
            u_used: None,
            n,
        },
    };
    io::write_json(&out_path(common, "estimate.json"), &result)?;
    match result.value {
        Some(v) => println!("{} estimate over n = {n}: {v}", estimator.name()),
        None => println!("{} estimate over n = {n}: invalid (ECF modulus underflow)", estimator.name()),
    }
    Ok(())
}

fn load_plan(common: &Common, doc: &mut PlanDoc) -> CliResult<Plan> {
    if let Some(seed) = common.seed {
        doc.master_seed = seed;
    }
    Ok(Plan::try_from(&*doc)?)
}

fn cmd_benchmark(common: &Common, emit_raw: bool, force: bool) -> CliResult<()> {
    let mut doc: PlanDoc = io::read_json(&common.config)?;
    let plan = load_plan(common, &mut doc)?;
    let report = run_experiment(&plan, force, emit_raw)?;
    io::write_report_csv(&out_path(common, "report.csv"), &report)?;
    if emit_raw {
        io::write_raw_csv(&out_path(common, "raw.csv"), &report)?;
    }
    let sidecar = ReportSidecarDoc { plan: doc, true_c12: report.true_c12, rate_fits: Vec::new() };
    io::write_json(&out_path(common, "report.json"), &sidecar)?;
    for cell in &report.cells {
        println!(
            "{:>9}  n = {:>7}  mean = {:>12.6}  rmse = {:>12.6}  invalid = {}",
            cell.estimator, cell.n, cell.mean, cell.rmse, cell.invalid
        );
    }
    Ok(())
}

fn cmd_rates(common: &Common, emit_raw: bool, force: bool) -> CliResult<()> {
    let mut doc: RatesDoc = io::read_json(&common.config)?;
    let plan = load_plan(common, &mut doc.plan)?;
    let report = run_experiment(&plan, force, emit_raw)?;
    io::write_report_csv(&out_path(common, "report.csv"), &report)?;
    if emit_raw {
        io::write_raw_csv(&out_path(common, "raw.csv"), &report)?;
    }
    let mut fits = Vec::new();
    for target in &doc.targets {
        let curve = report.rmse_curve(&target.estimator);
        if curve.is_empty() {
            return Err(CliError::Validation(format!(
                "rate target names estimator {:?} absent from the plan",
                target.estimator
            )));
        }
        let fit = fit_rate(&curve, RateTarget::for_activity_index(target.r), target.slope_tolerance)?;
        println!(
            "{:>9}  slope = {:>8.4}  predicted = {:>8.4}  r^2 = {:.4}  {}",
            target.estimator,
            fit.slope,
            fit.predicted_exponent,
            fit.r_squared,
            if fit.pass { "pass" } else { "FAIL" }
        );
        fits.push(RateFitDoc::new(&target.estimator, &fit));
    }
    let sidecar =
        ReportSidecarDoc { plan: doc.plan, true_c12: report.true_c12, rate_fits: fits };
    io::write_json(&out_path(common, "report.json"), &sidecar)?;
    Ok(())
}

#[derive(Serialize)]
struct MembershipDoc {
    covariance_norm: f64,
    cojump_term: Option<f64>,
    large_jump_mass: f64,
    total: Option<f64>,
    #[serde(rename = "M")]
    m: f64,
    passes: bool,
    reason: Option<String>,
}

fn cmd_check_class(common: &Common) -> CliResult<()> {
    let doc: CheckClassDoc = io::read_json(&common.config)?;
    let model: LevyModelSpec<f64> = (&doc.model).try_into().map_err(CliError::from)?;
    let params = ClassParams::new(doc.m, doc.r)?;
    let report = check_class_membership(&model, &params)?;
    let out = MembershipDoc {
        covariance_norm: report.covariance_norm,
        cojump_term: report.cojump_term,
        large_jump_mass: report.large_jump_mass,
        total: report.total,
        m: report.m,
        passes: report.passes,
        reason: report.reason.clone(),
    };
    io::write_json(&out_path(common, "membership.json"), &out)?;
    println!("covariance norm:  {:.6}", report.covariance_norm);
    match report.cojump_term {
        Some(v) => println!("co-jump term:     {v:.6}"),
        None => println!("co-jump term:     divergent"),
    }
    println!("large-jump mass:  {:.6}", report.large_jump_mass);
    match report.total {
        Some(t) => println!("total:            {t:.6}  (M = {})", report.m),
        None => println!("total:            undefined  (M = {})", report.m),
    }
    println!("membership:       {}", if report.passes { "pass" } else { "fail" });
    if let Some(reason) = &report.reason {
        println!("reason:           {reason}");
    }
    Ok(())
}

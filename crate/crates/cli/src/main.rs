//! Command-line front end for per-instance evaluation of stochastic
//! optimizers: tally analysis, sample-size planning, adaptive repeat
//! control, synthetic simulations, WalkSAT-SKC experiments, and CETS
//! optimization. Every command prints one JSON report to stdout; bulk data
//! goes to CSV files named by flags.

mod commands;
mod csvio;
mod errors;
mod report;

use clap::{Args, Parser, Subcommand};
use repeatstat::ci::CiMethod;
use std::path::PathBuf;

fn parse_method(s: &str) -> Result<CiMethod, String> {
    s.parse().map_err(|e| format!("{e}"))
}

#[derive(Parser)]
#[command(
    name = "repeatstat",
    version,
    about = "Statistics for benchmarking stochastic optimizers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a success tally: intervals, R_c, and CETS with uncertainty
    Analyze(AnalyzeArgs),
    /// Sample-size formulas for a target estimation accuracy
    Plan {
        #[command(subcommand)]
        variant: PlanCmd,
    },
    /// Adaptively grow the repeat count until the error bound is met
    Adaptive(AdaptiveArgs),
    /// Synthetic Monte Carlo studies
    Simulate {
        #[command(subcommand)]
        study: SimulateCmd,
    },
    /// Run WalkSAT-SKC repeats on a CNF instance and derive metrics
    Walksat(WalksatArgs),
    /// Optimize CETS over iteration budgets from curve or record data
    Cets(CetsArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Observed successes
    #[arg(long)]
    successes: u64,
    /// Total repeats
    #[arg(long)]
    trials: u64,
    /// Significance level of the interval
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Interval method: wald | wilson | agresti-coull | jeffreys
    #[arg(long, value_parser = parse_method, default_value = "agresti-coull")]
    method: CiMethod,
    /// Confidence target of R_c
    #[arg(long, default_value_t = 0.99)]
    c: f64,
    /// Effort per iteration for the CETS value
    #[arg(long = "e-itr", default_value_t = 1.0)]
    e_itr: f64,
    /// Iteration budget the tally refers to
    #[arg(long, default_value_t = 1)]
    i: u64,
}

#[derive(Subcommand)]
enum PlanCmd {
    /// Repeats guaranteeing a worst-case absolute error
    WorstCase {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Use the z ≈ 2 simplification ceil(1/eps^2 - 4)
        #[arg(long)]
        simplified: bool,
    },
    /// Repeats for an absolute error at an anticipated p-hat
    Target {
        #[arg(long = "p-hat")]
        p_hat: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Lower bound L(p-hat) for a target relative error of R_c
    Relative {
        #[arg(long = "p-hat")]
        p_hat: f64,
        /// Target maximum relative error e_T
        #[arg(long)]
        target: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Apply the piecewise scaling correction
        #[arg(long)]
        scaled: bool,
    },
    /// Exact smallest n meeting the relative-error target (root finding)
    Exact {
        #[arg(long = "p-hat")]
        p_hat: f64,
        #[arg(long)]
        target: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0.99)]
        c: f64,
    },
}

#[derive(Args)]
struct AdaptiveArgs {
    /// Synthetic Bernoulli oracle with this success probability
    #[arg(long = "synthetic-p")]
    synthetic_p: Option<f64>,
    /// External solver template; {seed} is replaced per invocation
    #[arg(long)]
    cmd: Option<String>,
    /// Success exit code for the external solver
    #[arg(long = "success-exit", default_value_t = 0)]
    success_exit: i32,
    /// Timeout per invocation in seconds; a timeout counts as failure
    #[arg(long = "timeout-sec", default_value_t = 60.0)]
    timeout_sec: f64,
    /// Run each batch of subprocess invocations in parallel
    #[arg(long)]
    parallel: bool,
    /// DIMACS CNF file for a WalkSAT oracle
    #[arg(long)]
    cnf: Option<PathBuf>,
    /// Generated instance spec for a WalkSAT oracle, e.g. k=4,vars=50,clauses=499
    #[arg(long)]
    generate: Option<String>,
    /// WalkSAT walk probability
    #[arg(long, default_value_t = 0.5)]
    w: f64,
    /// WalkSAT flip budget per repeat
    #[arg(long = "max-flips", default_value_t = 5000)]
    max_flips: u64,
    /// Target maximum relative error e_T
    #[arg(long, default_value_t = 0.1)]
    target: f64,
    #[arg(long = "n-init", default_value_t = 100)]
    n_init: u64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Use the scaled lower bound
    #[arg(long)]
    scaled: bool,
    #[arg(long = "n-cap", default_value_t = repeatstat::planner::DEFAULT_N_CAP)]
    n_cap: u64,
    #[arg(long, env = "REPEATSTAT_SEED", default_value_t = 42)]
    seed: u64,
}

#[derive(Subcommand)]
enum SimulateCmd {
    /// Two-optimizer comparison over a (p1, p2) x n grid
    Compare {
        /// Probability pairs as p1:p2[,p1:p2...]; default is the published grid
        #[arg(long)]
        pairs: Option<String>,
        /// Repeat counts, comma separated
        #[arg(long = "n-grid")]
        n_grid: Option<String>,
        #[arg(long, default_value_t = repeatstat::sim::DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0.99)]
        c: f64,
        #[arg(long, env = "REPEATSTAT_SEED", default_value_t = 42)]
        seed: u64,
        /// Write the grid as CSV (p1,p2,n,frac_correct_order,frac_no_overlap)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Relative-error distribution of the adaptive controller
    Relerr {
        /// p_true range as start..end, or a single value
        #[arg(long, default_value = "0.1..0.9")]
        p: String,
        #[arg(long = "p-step", default_value_t = 0.1)]
        p_step: f64,
        #[arg(long, default_value_t = 0.1)]
        target: f64,
        #[arg(long)]
        scaled: bool,
        #[arg(long, default_value_t = repeatstat::sim::DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long = "n-init", default_value_t = 100)]
        n_init: u64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0.99)]
        c: f64,
        #[arg(long, env = "REPEATSTAT_SEED", default_value_t = 42)]
        seed: u64,
        /// Write long-format CSV (p_true,trial,rel_error)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Chunked empirical distribution versus the Jeffreys beta band
    Chunked {
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        draws: u64,
        #[arg(long = "chunk-size", default_value_t = 100)]
        chunk_size: u64,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, env = "REPEATSTAT_SEED", default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Args)]
struct WalksatArgs {
    /// DIMACS CNF input file
    #[arg(long)]
    cnf: Option<PathBuf>,
    /// Generated instance spec, e.g. k=4,vars=50,clauses=499
    #[arg(long)]
    generate: Option<String>,
    /// Walk probability
    #[arg(long, default_value_t = 0.5)]
    w: f64,
    #[arg(long = "max-flips", default_value_t = 5000)]
    max_flips: u64,
    #[arg(long, default_value_t = 1000)]
    repeats: u64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.99)]
    c: f64,
    #[arg(long, env = "REPEATSTAT_SEED", default_value_t = 42)]
    seed: u64,
    /// Write run records as CSV (repeat_id,first_success_iter)
    #[arg(long = "records-csv")]
    records_csv: Option<PathBuf>,
    /// Write the success curve as CSV (iter,successes,n)
    #[arg(long = "curve-csv")]
    curve_csv: Option<PathBuf>,
}

#[derive(Args)]
struct CetsArgs {
    /// Success-curve CSV (iter,successes,n)
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Run-record CSV (repeat_id,first_success_iter)
    #[arg(long)]
    records: Option<PathBuf>,
    /// Iteration budget for record input (records are censored here)
    #[arg(long = "max-iter")]
    max_iter: Option<u64>,
    #[arg(long, default_value_t = 0.99)]
    c: f64,
    #[arg(long = "e-itr", default_value_t = 1.0)]
    e_itr: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_parser = parse_method, default_value = "agresti-coull")]
    method: CiMethod,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => commands::analyze::run(args),
        Command::Plan { variant } => commands::plan::run(variant),
        Command::Adaptive(args) => commands::adaptive::run(args),
        Command::Simulate { study } => commands::simulate::run(study),
        Command::Walksat(args) => commands::walksat::run(args),
        Command::Cets(args) => commands::cets::run(args),
    };
    match outcome {
        Ok(report) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serialization")
            );
        }
        Err(err) => {
            eprintln!("{err}");
            std::process::exit(err.exit_code());
        }
    }
}

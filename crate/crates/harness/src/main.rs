use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};
use ou_brunn::literal::parse_body;
use ou_brunn::report::{write_eigenfunction, write_outputs};
use ou_brunn::{execute, Config, Experiment};
use ou_brunn_core::eigen::{first_eigenpair, DEFAULT_TOL};
use ou_brunn_core::{assemble, build_grid};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "ou-brunn", version, about = "Gaussian principal frequency experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues against oracles, or a one-off solve with --body and --h.
    Eigen(EigenArgs),
    /// Brunn-Minkowski inequality over body pairs and t-values.
    BmSweep(RunArgs),
    /// Sup-convolution subsolution chain.
    Supconv(RunArgs),
    /// Comparison with the half-space of equal Gaussian measure.
    FaberKrahn(RunArgs),
    /// Comparison with the ball of equal mean width, and rotation means.
    Urysohn(RunArgs),
    /// Log-concavity checks of computed eigenfunctions.
    Logconc(RunArgs),
    /// Deficits of identical, distinct and translated pairs.
    EqualityProbe(RunArgs),
    /// Convexity of the trace of the inverse on random SPD pairs.
    MatrixLemma(RunArgs),
    /// Every experiment section present in the configuration.
    Suite(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct EigenArgs {
    #[arg(long, required_unless_present = "body", conflicts_with_all = ["body", "h"])]
    config: Option<PathBuf>,
    /// Body literal, e.g. `ball{1}` or `interval{-1,1}`.
    #[arg(long, requires = "h")]
    body: Option<String>,
    /// Grid spacing for the one-off solve.
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Serialize)]
struct OneOff<'a> {
    body: &'a str,
    h: f64,
    nodes: usize,
    lambda: f64,
    iterations: usize,
    residual: f64,
}

fn one_off(body: &str, h: f64, out: Option<PathBuf>) -> anyhow::Result<()> {
    let shape = parse_body(body)?;
    let grid = Arc::new(build_grid(&shape, h)?);
    let r = first_eigenpair(&assemble(grid), DEFAULT_TOL)?;
    let summary = OneOff { body, h, nodes: r.eigenfunction.values().len(), lambda: r.lambda, iterations: r.iterations, residual: r.residual };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)?;
        let path = dir.join("eigenfunction_body.csv");
        write_eigenfunction(&r.eigenfunction, std::fs::File::create(&path).with_context(|| path.display().to_string())?)?;
    }
    Ok(())
}

fn run(which: Option<Experiment>, config: PathBuf, out: PathBuf, seed: Option<u64>, jobs: Option<usize>) -> ExitCode {
    let cfg = match Config::load(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let seed = seed.unwrap_or(cfg.seed);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match pool.install(|| execute(&cfg, which, seed)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for (e, d) in &outcome.timings {
        eprintln!("{:<16} {:>8.2} s", e.name(), d.as_secs_f64());
    }
    let s = &outcome.report.summary;
    eprintln!("{} cases, {} asserted, {} failed, {} errors", s.cases, s.asserted, s.failures, s.errors);
    if let Err(e) = write_outputs(&out, &outcome.report, &outcome.dumps) {
        eprintln!("error: writing {}: {e:#}", out.display());
        return ExitCode::from(2);
    }
    ExitCode::from(outcome.report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (which, args) = match cli.command {
        Command::Eigen(a) => {
            if let (Some(body), Some(h)) = (&a.body, a.h) {
                return match one_off(body, h, a.out) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => {
                        eprintln!("error: {e:#}");
                        ExitCode::from(2)
                    }
                };
            }
            let config = a.config.expect("clap requires --config without --body");
            return run(Some(Experiment::Eigen), config, a.out.unwrap_or_else(|| "out".into()), a.seed, a.jobs);
        }
        Command::BmSweep(a) => (Some(Experiment::BmSweep), a),
        Command::Supconv(a) => (Some(Experiment::Supconv), a),
        Command::FaberKrahn(a) => (Some(Experiment::FaberKrahn), a),
        Command::Urysohn(a) => (Some(Experiment::Urysohn), a),
        Command::Logconc(a) => (Some(Experiment::Logconc), a),
        Command::EqualityProbe(a) => (Some(Experiment::EqualityProbe), a),
        Command::MatrixLemma(a) => (Some(Experiment::MatrixLemma), a),
        Command::Suite(a) => (None, a),
    };
    run(which, args.config, args.out, args.seed, args.jobs)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cklms::harness::{compare_report, render_report, run_experiment, ExperimentConfig};
use cklms::kernels::ComplexVector;
use cklms::wirtinger::{check_inner_product_rules, check_lms_gradient, check_property_suite, PropertyReport, WirtingerPolynomial, DEFAULT_STEP};
use cklms::{Complex64, Error, Result};

#[derive(Parser)]
#[command(name = "cklms", version, about = "Complex kernel LMS experiments")]
struct Cli {
    /// Override the number of Monte-Carlo trials.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Override the base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its learning curves as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank the configured algorithms by steady-state MSE.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Fraction of the curve treated as steady state.
        #[arg(long, default_value_t = 0.1)]
        tail: f64,
    },
    /// Run the Wirtinger calculus property suite on random polynomials.
    WirtingerCheck {
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn load(path: &PathBuf, trials: Option<usize>, seed: Option<u64>) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut cfg: ExperimentConfig = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if let Some(t) = trials {
        cfg.n_trials = t;
    }
    if let Some(s) = seed {
        cfg.base_seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> ComplexVector {
    let v = (0..dim).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    ComplexVector::new(v).expect("finite point")
}

fn wirtinger_check(points: usize, tol: f64, seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = PropertyReport::default();
    let mut worst_poly: f64 = 0.0;
    let mut lms_failures = 0;
    for i in 0..points {
        let arity = 1 + i % 4;
        let f = WirtingerPolynomial::random(&mut rng, arity, 4, 3);
        let g = WirtingerPolynomial::random(&mut rng, arity, 4, 3);
        let c = random_point(&mut rng, arity);
        worst_poly = worst_poly.max(f.gradient_deviation(&c, DEFAULT_STEP)?);
        report.merge(check_property_suite(&f.probe(), &g.probe(), &c, tol)?);
        let w = random_point(&mut rng, arity);
        report.merge(check_inner_product_rules(&w, &c, tol)?);

        let z = random_point(&mut rng, 4);
        let w = random_point(&mut rng, 4);
        let d = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if !check_lms_gradient(&z, d, &w, tol)? {
            lms_failures += 1;
        }
    }
    print!("{report}");
    println!("polynomial gradients: max deviation {worst_poly:.3e}");
    println!("lms gradient: {lms_failures} of {points} failed");
    Ok(report.all_passed() && worst_poly <= tol && lms_failures == 0)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load(&config, cli.trials, cli.seed)?;
            let result = run_experiment(&cfg)?;
            std::fs::write(&out, result.to_csv()).map_err(|e| Error::Config(format!("{}: {e}", out.display())))?;
            eprintln!("wrote {} curves to {}", result.curves.len(), out.display());
            Ok(true)
        }
        Command::Compare { config, tail } => {
            let cfg = load(&config, cli.trials, cli.seed)?;
            let result = run_experiment(&cfg)?;
            let rows = compare_report(result.curves.values(), tail)?;
            print!("{}", render_report(&rows));
            Ok(true)
        }
        Command::WirtingerCheck { points, tol } => wirtinger_check(points, tol, cli.seed.unwrap_or(0)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: property checks failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

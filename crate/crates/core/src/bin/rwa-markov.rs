use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rwa_markov::asymptotics::AsymptoticData;
use rwa_markov::harness::{
    emit_report, load_scenario, random_scenario, run_sweep, simulate_table, three_time_table, two_time_table, validate,
    Quantity, Scenario,
};
use rwa_markov::matrix_calculus::dissipativity_margin;

/// Exact vs. asymptotic reduced dynamics of an (N+1)-level system in the
/// rotating wave approximation.
#[derive(Parser, Debug)]
#[command(name = "rwa-markov", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Scenario file, or `random[:N]` for a seeded random scenario.
    scenario: String,
    /// Physical step of the quadrature solver.
    #[arg(long)]
    step: Option<f64>,
    /// Initial-layer cutoff in rescaled time.
    #[arg(long)]
    tmin: Option<f64>,
    /// Cap on the physical horizon t / lambda^2.
    #[arg(long)]
    horizon_cap: Option<f64>,
    /// Seed for `random` scenarios.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Time series of exact, asymptotic and reverse-order density blocks.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Lambda sweep of an error quantity with a log-log slope fit.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// One of propagator_error, zeroth_order_error, commutation_error,
        /// correlation_renorm_error, reverse_order_error; default: all
        /// requested by the scenario.
        #[arg(long)]
        quantity: Option<Quantity>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Two-time (`--pair`) or three-time (`--quad`) dipole correlations.
    Correlate {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "quad", required_unless_present = "quad")]
        pair: bool,
        #[arg(long)]
        quad: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Frequencies, rates and dissipativity margin of the corrected generator.
    Gksl {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda: f64,
    },
    /// Runs the invariant suite; exits nonzero on any failure.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

fn scenario(common: &Common) -> Result<Scenario> {
    let mut s = match common.scenario.strip_prefix("random") {
        Some(rest) => {
            let n = match rest.strip_prefix(':') {
                Some(n) => n
                    .parse()
                    .with_context(|| format!("bad dimension in {:?}", common.scenario))?,
                None if rest.is_empty() => 2,
                None => bail!("expected `random` or `random:N`, got {:?}", common.scenario),
            };
            random_scenario(common.seed, n)?
        }
        None => load_scenario(&common.scenario).with_context(|| format!("loading {}", common.scenario))?,
    };
    if let Some(step) = common.step {
        s.set_step(step)?;
    }
    if let Some(t) = common.tmin {
        s.set_t_min(t)?;
    }
    if let Some(cap) = common.horizon_cap {
        s.set_horizon_cap(cap)?;
    }
    Ok(s)
}

fn out_file(dir: &Path, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.join(name))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate { common, out } => {
            let s = scenario(&common)?;
            let path = out_file(&out, "simulate.csv")?;
            simulate_table(&s)?.write_csv(&path)?;
            println!("wrote {}", path.display());
        }
        Command::Sweep { common, quantity, out } => {
            let s = scenario(&common)?;
            let quantities = match quantity {
                Some(q) => vec![q],
                None if s.quantities().is_empty() => Quantity::ALL.to_vec(),
                None => s.quantities(),
            };
            for q in quantities {
                let report = run_sweep(&s, q)?;
                let path = out_file(&out, &format!("sweep_{q}.csv"))?;
                emit_report(&report, &s.name, &path)?;
                let (lo, hi) = q.expected_slope();
                println!(
                    "{q:<26} slope {:>8.4}  residual {:.2e}  expected [{lo}, {hi}]  {}",
                    report.fitted_slope,
                    report.fit_residual,
                    if report.within_expected() { "ok" } else { "OUTSIDE" }
                );
            }
        }
        Command::Correlate { common, pair, out, .. } => {
            let s = scenario(&common)?;
            let (table, name) = if pair {
                (two_time_table(&s)?, "two_time.csv")
            } else {
                (three_time_table(&s)?, "three_time.csv")
            };
            let path = out_file(&out, name)?;
            table.write_csv(&path)?;
            println!("wrote {}", path.display());
        }
        Command::Gksl { common, lambda } => {
            let s = scenario(&common)?;
            let data = AsymptoticData::compute(&s.model(lambda)?, &s.kernel)?;
            let gksl = data.gksl()?;
            println!("scenario {}  lambda {lambda}", s.name);
            println!("{:>4} {:>22} {:>22}", "l", "epsilon", "gamma");
            for (l, m) in gksl.modes.iter().enumerate() {
                println!("{l:>4} {:>22.15e} {:>22.15e}", m.epsilon, m.gamma);
            }
            println!("dissipativity margin {:.6e}", dissipativity_margin(data.generator())?);
            println!(
                "eigenvector gram deviation {:.3e}{}",
                gksl.gram_deviation,
                if gksl.non_orthogonal() { " (non-orthogonal)" } else { "" }
            );
        }
        Command::Validate { common } => {
            let s = scenario(&common)?;
            let report = validate(&s);
            println!("{report}");
            return Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

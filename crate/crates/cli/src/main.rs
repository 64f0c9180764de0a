//! Command-line front end: single quotes, parameter sweeps, and a Monte
//! Carlo cross-check, driven by a JSON config.
//!
//! Exit codes: 0 on success, 1 for invalid input/config (and failed
//! checks), 2 for numerical non-convergence. Diagnostics go to stderr with
//! an `error:` or `warn:` prefix.

// negated comparisons in validations also reject NaN
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;
mod sweep;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use twoprice::{
    build_law, mc_quote, quote, stieltjes_quote, DistortionSpec, Error as CoreError, McConfig,
    Quote, Tolerance,
};

use config::RunConfig;
use output::{write_csv, QuoteRow};

/// Grid size for the Stieltjes reference route.
const STIELTJES_GRID: usize = 100_000;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NonConvergence(_) => CliError::Numerical(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "twoprice",
    version,
    about = "Bid/ask prices of European options under mixed fractional Brownian motion with jumps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Quadrature,
    Stieltjes,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,

    /// Override the config's stress level
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,

    /// Override the config's strike
    #[arg(long)]
    strike: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Price one option; prints a single-line JSON quote
    Price {
        #[command(flatten)]
        common: CommonArgs,

        /// Numerical route
        #[arg(long, value_enum, default_value = "quadrature")]
        method: Method,
    },
    /// Quote over parameter grids; emits CSV (stdout or --out)
    Sweep {
        #[command(flatten)]
        common: CommonArgs,

        /// Grid spec NAME=LO:HI:STEP; repeatable, cartesian product,
        /// first flag is the outermost loop
        #[arg(long = "vary")]
        vary: Vec<String>,

        /// Output CSV path (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,

        /// Numerical route
        #[arg(long, value_enum, default_value = "quadrature")]
        method: Method,
    },
    /// Compare quadrature bid/ask against the Monte Carlo estimator;
    /// exits 0 iff both agree within 3 standard errors
    Check {
        #[command(flatten)]
        common: CommonArgs,

        /// Monte Carlo sample count
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,

        /// Monte Carlo seed
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::from_path(&common.config)?;
    if let Some(g) = common.gamma {
        cfg.gamma = g;
    }
    if let Some(k) = common.strike {
        cfg.option.strike = k;
    }
    Ok(cfg)
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warn: {w}");
    }
}

fn distortion_for(gamma: f64) -> DistortionSpec {
    if gamma == 0.0 {
        DistortionSpec::Identity
    } else {
        DistortionSpec::wang(gamma)
    }
}

fn evaluate(cfg: &RunConfig, method: Method) -> Result<Quote, CliError> {
    let law = build_law(&cfg.model, &cfg.jumps, cfg.drift, cfg.tail_tol)?;
    let d = distortion_for(cfg.gamma);
    Ok(match method {
        Method::Quadrature => {
            let tol = Tolerance::new(cfg.quad_tol, config::MAX_SUBDIVISIONS)?;
            quote(&cfg.option, &law, &d, &tol)?
        }
        Method::Stieltjes => stieltjes_quote(&cfg.option, &law, &d, STIELTJES_GRID)?,
    })
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Price { common, method } => {
            let cfg = load(&common)?;
            warn_all(&cfg.validate()?);
            let q = evaluate(&cfg, method)?;
            let row = QuoteRow::new(&cfg, &q);
            let json = serde_json::to_string(&row)
                .map_err(|e| CliError::Input(format!("serialization failed: {e}")))?;
            println!("{json}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            common,
            vary,
            out,
            method,
        } => {
            let cfg = load(&common)?;
            let varies = vary
                .iter()
                .map(|s| sweep::parse_vary(s))
                .collect::<Result<Vec<_>, _>>()?;
            let points = sweep::grid(&cfg, &varies);

            // validate every grid point up front; dedupe warnings
            let mut warnings = Vec::new();
            for point in &points {
                for w in point.validate()? {
                    if !warnings.contains(&w) {
                        warnings.push(w);
                    }
                }
            }
            warn_all(&warnings);

            let rows = points
                .par_iter()
                .map(|point| Ok(QuoteRow::new(point, &evaluate(point, method)?)))
                .collect::<Result<Vec<_>, CliError>>()?;

            match out {
                Some(path) => {
                    let file = std::fs::File::create(&path).map_err(|e| {
                        CliError::Input(format!("cannot create {}: {e}", path.display()))
                    })?;
                    let mut buf = std::io::BufWriter::new(file);
                    write_csv(&rows, &mut buf)
                        .and_then(|()| buf.flush())
                        .map_err(|e| CliError::Input(format!("write failed: {e}")))?;
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    write_csv(&rows, &mut lock)
                        .map_err(|e| CliError::Input(format!("write failed: {e}")))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            common,
            samples,
            seed,
        } => {
            let cfg = load(&common)?;
            warn_all(&cfg.validate()?);
            let q = evaluate(&cfg, Method::Quadrature)?;
            let mc = mc_quote(
                &cfg.option,
                &cfg.model,
                &cfg.jumps,
                cfg.drift,
                &distortion_for(cfg.gamma),
                &McConfig::new(samples, seed),
            )?;

            let g = output::fmt_g10;
            let bid_ok = (q.bid - mc.bid).abs() <= 3.0 * mc.se_bid;
            let ask_ok = (q.ask - mc.ask).abs() <= 3.0 * mc.se_ask;
            println!(
                "bid: quadrature={} mc={} se={} diff={}",
                g(q.bid),
                g(mc.bid),
                g(mc.se_bid),
                g((q.bid - mc.bid).abs())
            );
            println!(
                "ask: quadrature={} mc={} se={} diff={}",
                g(q.ask),
                g(mc.ask),
                g(mc.se_ask),
                g((q.ask - mc.ask).abs())
            );
            if bid_ok && ask_ok {
                println!("check: PASS (bid and ask within 3 SE)");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("check: FAIL (bid within 3 SE: {bid_ok}, ask within 3 SE: {ask_ok})");
                Ok(ExitCode::from(1))
            }
        }
    }
}

//! `mindet`: experiments on moment-indeterminate momentum distributions.
//!
//! Exit status: 0 success, 1 a verdict failed, 2 invalid configuration, 3 I/O error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod emit;
mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{parse_angle_list, ConfigError, ExperimentConfig, Overrides};
use emit::Format;
use experiments::Experiment;

const DEFAULT_OUT: &str = "mindet-out";

#[derive(Debug, Parser)]
#[command(name = "mindet", version, about = "Superpositions of non-overlapping wave packets: same moments, different distributions")]
struct Cli {
    #[arg(value_enum)]
    experiment: Experiment,

    /// TOML configuration; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Comma-separated phases, e.g. `0,pi/4,pi/2,pi`.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,

    /// smooth_bump, rectangle, raised_cosine or truncated_gaussian.
    #[arg(long)]
    window: Option<String>,

    /// Window extent.
    #[arg(long = "a")]
    a: Option<f64>,

    /// Lobe spacing.
    #[arg(long = "L")]
    shift: Option<f64>,

    /// Number of lobes.
    #[arg(long = "N")]
    lobes: Option<usize>,

    #[arg(long)]
    hbar: Option<f64>,

    /// Highest moment order.
    #[arg(long)]
    nmax: Option<usize>,

    /// Output root; results go to `<out>/<experiment>/`.
    #[arg(long, env = "MINDET_OUT")]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

enum Failure {
    Config(ConfigError),
    Io(std::io::Error),
}

fn load(cli: &Cli) -> Result<(ExperimentConfig, config::Resolved), ConfigError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(&Overrides {
        alphas: cli.alpha.as_deref().map(parse_angle_list).transpose()?,
        window: cli.window.clone(),
        a: cli.a,
        shift: cli.shift,
        lobes: cli.lobes,
        hbar: cli.hbar,
        n_max: cli.nmax,
    });
    let resolved = cfg.resolve()?;
    cli.experiment.preflight(&resolved)?;
    Ok((cfg, resolved))
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let (cfg, resolved) = load(cli).map_err(Failure::Config)?;
    let root = cli
        .out
        .clone()
        .or(cfg.out)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let dir = root.join(cli.experiment.name());

    let mut bundle = cli.experiment.run(&resolved).map_err(Failure::Config)?;
    for v in &bundle.verdicts {
        let tag = if v.pass { "ok  " } else { "FAIL" };
        let op = match v.bound {
            mindet_core::verify::Bound::AtMost => "<=",
            mindet_core::verify::Bound::AtLeast => ">=",
            mindet_core::verify::Bound::Above => ">",
        };
        println!("{tag} {}: {:.6e} {op} {:.1e}", v.name, v.observed, v.threshold);
    }
    for path in emit::emit(&mut bundle, &dir, cli.format).map_err(Failure::Io)? {
        println!("wrote {}", path.display());
    }
    Ok(bundle.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("mindet: verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("mindet: invalid configuration: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("mindet: I/O error: {e}");
            ExitCode::from(3)
        }
    }
}

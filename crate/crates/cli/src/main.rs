//! `fibdiff`: model-set enumeration, Bragg-peak bounds, almost-period
//! certificates and the ping identity for the Fibonacci chain.

mod commands;
mod expr;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

/// Environment variable read for the default worker-thread count.
const THREADS_ENV: &str = "FIBDIFF_THREADS";

#[derive(Parser, Debug)]
#[command(name = "fibdiff", version, about = "Fibonacci cut-and-project diffraction and almost-period checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output path; `-` for stdout.
    #[arg(long, short, global = true, default_value = "-")]
    pub out: String,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Worker threads (default: $FIBDIFF_THREADS, else all cores). Does not affect output.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate a model set with exact lattice coordinates.
    Generate(commands::GenerateArgs),
    /// Check Bragg intensities against the lower bound on B_eps.
    Bragg(commands::BraggArgs),
    /// Certify almost periods of the Fourier transform of the ping-pong measure.
    Almostperiods(commands::AlmostPeriodsArgs),
    /// Compare translates of the diffraction over Bragg atoms.
    Diffperiods(commands::DiffPeriodsArgs),
    /// Check the ping identity atomwise, plus the integer-lattice Poisson oracle.
    Pingcheck(commands::PingArgs),
    /// Bragg positions with their guaranteed intensity fraction.
    Figure1(commands::Figure1Args),
    /// Smoothed periodogram away from the strongest peaks.
    Periodogram(commands::PeriodogramArgs),
    /// Exact lattice lemmas and the sinc-product Lipschitz bounds.
    Lemmas(commands::LemmasArgs),
}

fn configure_threads(flag: Option<usize>) -> Result<(), String> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| format!("{THREADS_ENV}={v:?} is not a count"))?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads(cli.common.threads) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let (name, result) = match &cli.command {
        Command::Generate(a) => ("generate", commands::generate(a)),
        Command::Bragg(a) => ("bragg", commands::bragg(a)),
        Command::Almostperiods(a) => ("almostperiods", commands::almost_periods(a)),
        Command::Diffperiods(a) => ("diffperiods", commands::diff_periods(a)),
        Command::Pingcheck(a) => ("pingcheck", commands::ping(a)),
        Command::Figure1(a) => ("figure1", commands::figure1(a)),
        Command::Periodogram(a) => ("periodogram", commands::periodogram(a)),
        Command::Lemmas(a) => ("lemmas", commands::lemmas(a)),
    };
    let mut report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut config = fields![("command", name), ("version", env!("CARGO_PKG_VERSION"))];
    config.append(&mut report.config);
    config.push(("format".into(), format!("{:?}", cli.common.format).to_lowercase().into()));
    report.config = config;
    if let Err(e) = output::emit(&report.render(cli.common.format), &cli.common.out) {
        eprintln!("error: writing {}: {e}", cli.common.out);
        return ExitCode::from(2);
    }
    if report.failed {
        eprintln!("{}", report.failure_record(name));
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}

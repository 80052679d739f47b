mod commands;
mod config;
mod report;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use serde::Serialize;

use commands::{GrowthArgs, HnArgs, InvariantsArgs, MtestArgs, PrcheckArgs, QseqArgs, ValmatArgs};
use config::RunConfig;
use report::Format;

/// Exact computations for supersingular Iwasawa theory over Z_p[[X]].
#[derive(Debug, Parser)]
#[command(name = "ssiwasawa", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Seed for synthetic series sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// `key=value` file of defaults; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
enum Cmd {
    /// The sequences q_n (floor and alternating-sum forms).
    Qseq(QseqArgs),
    /// Valuation matrix of H_n at zeta_{p^n} - 1 by three routes.
    Valmat(ValmatArgs),
    /// Growth increments e_n - e_{n-1} over a range of levels.
    Growth(GrowthArgs),
    /// Floor identity table and the Perrin-Riou dictionary cross-check.
    Prcheck(PrcheckArgs),
    /// Rank identity on sampled series, one pair or a grid.
    Mtest(MtestArgs),
    /// Weierstrass invariants and Upsilon/nabla of one series.
    Invariants(InvariantsArgs),
    /// The matrix H_n, its coefficients or valuations.
    Hn(HnArgs),
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Qseq(_) => "qseq",
            Cmd::Valmat(_) => "valmat",
            Cmd::Growth(_) => "growth",
            Cmd::Prcheck(_) => "prcheck",
            Cmd::Mtest(_) => "mtest",
            Cmd::Invariants(_) => "invariants",
            Cmd::Hn(_) => "hn",
        }
    }
}

pub(crate) fn cli_command() -> clap::Command {
    Cli::command()
}

fn init_workers() {
    if let Some(n) = std::env::var("SSIWASAWA_WORKERS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second initialisation only happens in tests; ignoring it is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn run() -> anyhow::Result<ExitCode> {
    let argv = config::merge_config(&cli_command(), std::env::args().collect())?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    init_workers();
    let report = match &cli.command {
        Cmd::Qseq(a) => commands::qseq(a)?,
        Cmd::Valmat(a) => commands::valmat(a)?,
        Cmd::Growth(a) => commands::growth(a)?,
        Cmd::Prcheck(a) => commands::prcheck(a)?,
        Cmd::Mtest(a) => commands::mtest(a, cli.seed)?,
        Cmd::Invariants(a) => commands::invariants(a)?,
        Cmd::Hn(a) => commands::hn(a)?,
    };
    let run_config = RunConfig {
        command: cli.command.name().to_string(),
        format: cli.format,
        seed: cli.seed,
        args: serde_json::to_value(&cli.command)?,
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    report.write(&run_config, cli.format, &mut out)?;
    out.flush()?;
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

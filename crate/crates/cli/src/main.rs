//! `boundmoments`: eigenvalue, moment and wavefield tables for 1D wells.

mod config;
mod figures;
mod run;
mod svg;
mod table;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use config::{Format, RunArgs, RunConfig};
use svg::Chart;
use table::Table;

#[derive(Debug, Parser)]
#[command(
    name = "boundmoments",
    version,
    about = "Semiclassical eigenvalues and moments of bound states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Order-0 and order-1 eigenvalues against the Numerov oracle.
    Eigen(RunArgs),
    /// rms widths and moments at orders 0 and 2 against the oracle.
    Moments(RunArgs),
    /// The sampled superposition field for one level.
    Wavefield(RunArgs),
    /// Run the invariant suite; exits 2 if any check fails.
    Verify,
    /// Figure datasets: 1, 4, 5, 6 or 8.
    Figures {
        #[arg(long, value_parser = ["1", "4", "5", "6", "8"])]
        which: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        plot: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Target accuracy of the Numerov eigenvalues.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

fn emit(
    table: &Table,
    chart: &Chart,
    format: Format,
    plot: bool,
    output: Option<&PathBuf>,
) -> Result<()> {
    match output {
        Some(path) => {
            let mut out = BufWriter::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            );
            table.write(&mut out, format)?;
            out.flush()?;
            if plot {
                let svg = path.with_extension("svg");
                std::fs::write(&svg, chart.render())
                    .with_context(|| format!("writing {}", svg.display()))?;
            }
        }
        None => {
            if plot {
                bail!("--plot needs --output to place the SVG next to");
            }
            let stdout = io::stdout();
            let mut out = stdout.lock();
            table.write(&mut out, format)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn execute(command: Command) -> Result<ExitCode> {
    let tabulate = |args: &RunArgs,
                    default_order: u8,
                    f: fn(&RunConfig) -> Result<(Table, Chart)>|
     -> Result<()> {
        let cfg = RunConfig::resolve(args, default_order)?;
        let (table, chart) = f(&cfg)?;
        emit(&table, &chart, cfg.format, cfg.plot, cfg.output.as_ref())
    };
    match command {
        Command::Eigen(args) => tabulate(&args, 1, run::eigen)?,
        Command::Moments(args) => tabulate(&args, 2, run::moments)?,
        Command::Wavefield(args) => tabulate(&args, 2, run::wavefield)?,
        Command::Verify => {
            let checks = verify::run_all();
            let failures = checks.iter().filter(|c| !c.pass).count();
            for c in &checks {
                println!(
                    "{} {}: {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            println!("{} checks, {failures} failed", checks.len());
            if failures > 0 {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Figures {
            which,
            format,
            plot,
            output,
            tol,
        } => {
            let which: u8 = which.parse()?;
            let (table, chart) = figures::figure(which, tol)?;
            if which == 6 {
                for (eps, s0, s2) in figures::figure6_slopes(&table) {
                    eprintln!("eps {eps}: fitted slope order 0 {s0:.3}, order 2 {s2:.3}");
                }
            }
            emit(&table, &chart, format, plot, output.as_ref())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Ok(threads) = std::env::var("BM_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: BM_THREADS must be a positive integer, got `{threads}`");
                return ExitCode::from(1);
            }
        }
    }
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

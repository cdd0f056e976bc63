use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use mawt_core::allocation::fair_allocation;
use mawt_core::oracle::{run_auxiliary_suite, SuiteConfig};
use mawt_core::region::{
    export_two_user_polygons, write_empty_core_csv, RegionKind, DEFAULT_RESOLUTION,
};
use mawt_core::report::{allocation_report, verify_instance};
use mawt_core::sweep::{run_sweep, write_sweep_csv, SweepAxis, SweepSpec};
use mawt_core::value::coalition_value;
use mawt_core::{ChannelParams, Coalition, Error, DEFAULT_EPS};

#[derive(Parser)]
#[command(
    name = "mawt",
    version,
    about = "Coalitional secrecy games on the Gaussian multiple-access wiretap channel"
)]
struct Cli {
    /// Decimal places for printed and exported numbers.
    #[arg(long, global = true, default_value_t = 6)]
    precision: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the value of one coalition in bits.
    Value {
        config: PathBuf,
        /// Comma-separated one-based members, e.g. `1,3`. Empty for ∅.
        coalition: String,
    },
    /// Compute the fair secrecy-rate allocation.
    Allocate {
        config: PathBuf,
        /// Write the full JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate singleton and grand values over a two-parameter grid.
    Sweep {
        config: PathBuf,
        /// First axis, `name=start:stop:step` (outer loop).
        #[arg(long)]
        axis1: SweepAxis,
        /// Second axis, `name=start:stop:step` (inner loop).
        #[arg(long)]
        axis2: SweepAxis,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export a two-dimensional rate set as a vertex list.
    Region {
        config: PathBuf,
        /// One of `achievable`, `core`, `cstar`.
        which: RegionKind,
        /// CSV (or JSON with `--json`) destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        /// Grid points per power axis for the degraded achievable region.
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
    /// Run every structural check on one instance.
    Verify { config: PathBuf },
    /// Run the seeded auxiliary-function suite.
    Oracle {
        #[arg(long, default_value_t = SuiteConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = SuiteConfig::default().draws)]
        draws: usize,
        /// JSON report destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_NOT_COVERED: u8 = 4;

fn load(path: &Path) -> Result<ChannelParams> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    ChannelParams::from_json_str(&text).with_context(|| format!("config {}", path.display()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, format!("{text}\n")).with_context(|| format!("cannot write {}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let prec = cli.precision;
    match cli.command {
        Command::Value { config, coalition } => {
            let params = load(&config)?;
            let c = Coalition::parse_one_based(&coalition, params.num_transmitters())?;
            let v = coalition_value(&params, c)?;
            println!("{:.prec$}", v.bits());
        }
        Command::Allocate { config, out } => {
            let params = load(&config)?;
            if let Some(path) = out {
                let report = allocation_report(&params, DEFAULT_EPS)?;
                write_text(&path, &report.to_json_string())?;
                print_rates(report.allocation.rates.as_slice(), prec);
            } else {
                print_rates(fair_allocation(&params)?.rates.as_slice(), prec);
            }
        }
        Command::Sweep {
            config,
            axis1,
            axis2,
            out,
        } => {
            let spec = SweepSpec::new(&load(&config)?, axis1, axis2)?;
            let rows = run_sweep(&spec)?;
            write_sweep_csv(&spec, &rows, output(out.as_deref())?, prec)?;
        }
        Command::Region {
            config,
            which,
            out,
            json,
            resolution,
        } => {
            let params = load(&config)?;
            match export_two_user_polygons(&params, which, resolution) {
                Ok(poly) if json => {
                    let mut w = output(out.as_deref())?;
                    writeln!(w, "{}", poly.to_json_string())?;
                    w.flush()?;
                }
                Ok(poly) => poly.write_csv(output(out.as_deref())?, prec)?,
                Err(Error::EmptyCore) => {
                    write_empty_core_csv(output(out.as_deref())?)?;
                    eprintln!("core is empty");
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Verify { config } => {
            let checks = verify_instance(&load(&config)?, DEFAULT_EPS)?;
            for c in &checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("[{tag}] {}: {}", c.name, c.detail);
            }
            if !checks.iter().all(|c| c.passed) {
                return Ok(ExitCode::from(EXIT_CHECK_FAILED));
            }
        }
        Command::Oracle { seed, draws, out } => {
            let report = run_auxiliary_suite(SuiteConfig {
                seed,
                draws,
                ..SuiteConfig::default()
            })?;
            for f in &report.functions {
                let tag = if f.passed() { "PASS" } else { "FAIL" };
                println!(
                    "[{tag}] {}: {} monotonicity failures, {}/{} derivative failures, max relative error {:.3e}",
                    f.function,
                    f.monotone_failures,
                    f.derivative_failures,
                    f.derivative_checks,
                    f.max_relative_derivative_error
                );
            }
            if let Some(path) = out {
                write_text(&path, &report.to_json_string())?;
            }
            if !report.passed() {
                return Ok(ExitCode::from(EXIT_CHECK_FAILED));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_rates(rates: &[f64], prec: usize) {
    for (i, r) in rates.iter().enumerate() {
        println!("R{} {r:.prec$}", i + 1);
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_parse() => EXIT_PARSE,
        Some(e) if e.is_not_covered() => EXIT_NOT_COVERED,
        Some(_) => EXIT_DOMAIN,
        None => EXIT_PARSE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            match err.downcast_ref::<Error>() {
                Some(e) if e.is_not_covered() => eprintln!("not covered [{}]: {err:#}", e.name()),
                Some(e) => eprintln!("error [{}]: {err:#}", e.name()),
                None => eprintln!("error: {err:#}"),
            }
            ExitCode::from(exit_code(&err))
        }
    }
}

//! `arfima`: fit, profile, simulate and benchmark ARFIMA models.

mod bench;
mod document;
mod fit;
mod input;
mod profile;
mod simulate;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use arfima_core::{MeanSpec, Objective};
use clap::{Args, Parser, Subcommand};

/// Exit status for malformed invocations and unreadable input.
const EXIT_USAGE: u8 = 1;
/// Exit status when estimation itself fails.
const EXIT_FIT: u8 = 2;

#[derive(Parser)]
#[command(name = "arfima", version, about = "ARFIMA estimation by adaptive overdifferencing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit ARFIMA(p, d, q) with a fixed or adaptively chosen upper bound on d.
    #[command(allow_negative_numbers = true)]
    Fit(fit::FitArgs),
    /// Evaluate the profile log-likelihood of d on a grid (CSV output).
    #[command(allow_negative_numbers = true)]
    Profile(profile::ProfileArgs),
    /// Simulate an ARFIMA series (CSV output).
    #[command(allow_negative_numbers = true)]
    Simulate(simulate::SimulateArgs),
    /// Run a Monte-Carlo study described by a configuration file.
    #[command(allow_negative_numbers = true)]
    Bench(bench::BenchArgs),
}

/// Series source and model flags shared by `fit` and `profile`.
#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// CSV file with a header row; `-` or omitted reads standard input.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Use a bundled dataset instead (`A` or `C`).
    #[arg(long, conflicts_with = "input")]
    dataset: Option<String>,
    /// Column to read (default: `value`, or the only column).
    #[arg(long)]
    column: Option<String>,
    /// Autoregressive order.
    #[arg(long, default_value_t = 0)]
    p: usize,
    /// Moving-average order.
    #[arg(long, default_value_t = 0)]
    q: usize,
    /// exact, whittle, scss or css.
    #[arg(long, default_value = "exact")]
    likelihood: Objective,
    /// none, constant or poly:P.
    #[arg(long, default_value = "constant")]
    mean: String,
    /// CSV of extra mean regressors (header row, one column per regressor).
    #[arg(long)]
    design: Option<PathBuf>,
}

impl ModelArgs {
    fn load(&self) -> Result<input::LoadedSeries> {
        input::load_series(self.input.as_deref(), self.dataset.as_deref(), self.column.as_deref())
    }

    fn mean_spec(&self, n: usize) -> Result<MeanSpec> {
        let base = MeanSpec::parse(&self.mean)?;
        let Some(path) = &self.design else {
            return Ok(base);
        };
        let mut columns = base.design(n)?;
        columns.extend(input::load_design(path, n)?);
        Ok(MeanSpec::Regressors { columns })
    }

    fn mean_label(&self) -> String {
        match &self.design {
            Some(p) => format!("{}+design:{}", self.mean, p.display()),
            None => self.mean.clone(),
        }
    }
}

/// Writes to `path`, or standard output when absent.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Seed for runs without `--seed`; printed so the run can be repeated.
fn fresh_seed() -> u64 {
    let t = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
    let mut z = (t as u64) ^ ((std::process::id() as u64) << 32);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        bail!("--level must be in (0, 1), got {level}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Fit(a) => fit::run(a),
        Command::Profile(a) => profile::run(a).map(|_| 0),
        Command::Simulate(a) => simulate::run(a).map(|_| 0),
        Command::Bench(a) => bench::run(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

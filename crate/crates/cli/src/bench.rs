use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use arfima_core::study::{read_baselines, run_study, StudyConfig, StudyOutputs};
use clap::Args;

use crate::{EXIT_FIT, EXIT_USAGE};

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Study configuration (`key = value` lines).
    config: PathBuf,
    /// Worker threads (default: every logical processor).
    #[arg(long)]
    jobs: Option<usize>,
    /// Directory for results.csv, summary.json and raw/.
    #[arg(long, default_value = "bench-results")]
    output: PathBuf,
    /// Overrides the seed of the configuration file.
    #[arg(long)]
    seed: Option<u64>,
}

pub fn run(a: BenchArgs) -> Result<u8> {
    let text = std::fs::read_to_string(&a.config).with_context(|| format!("cannot read {}", a.config.display()))?;
    let mut cfg = match StudyConfig::parse(&text) {
        Ok(c) => c,
        Err(errs) => {
            eprint!("{}: {errs}", a.config.display());
            return Ok(EXIT_USAGE);
        }
    };
    if let Some(j) = a.jobs {
        cfg.parallelism = j;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(b) = cfg.baseline_file.clone() {
        // relative baseline paths are taken relative to the config file
        let mut path = PathBuf::from(&b);
        if path.is_relative() {
            if let Some(dir) = a.config.parent() {
                path = dir.join(path);
            }
        }
        if let Err(e) = read_baselines(&path) {
            eprintln!("{}: baseline_file: {e}", a.config.display());
            return Ok(EXIT_USAGE);
        }
        cfg.baseline_file = Some(path.display().to_string());
    }
    let out = StudyOutputs { dir: a.output.clone() };
    let start = Instant::now();
    let result = run_study(&cfg, Some(&out), |i, total, s| {
        eprintln!(
            "[{i}/{total}] d={} n={} {} {}: mean d_hat {:.4}, mc sd {:.4}, coverage {:.3}, failures {} ({:.1}s)",
            s.d,
            s.n,
            s.objective,
            s.procedure,
            s.mean_d_hat,
            s.mc_sd,
            s.coverage,
            s.failure_count,
            start.elapsed().as_secs_f64()
        );
    });
    match result {
        Ok(r) => {
            eprintln!(
                "wrote {} cells to {} ({:.1}s)",
                r.cells.len(),
                a.output.display(),
                start.elapsed().as_secs_f64()
            );
            Ok(0)
        }
        Err(e) => {
            eprintln!("error: study failed: {e}");
            Ok(EXIT_FIT)
        }
    }
}

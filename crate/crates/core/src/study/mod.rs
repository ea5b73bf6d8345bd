//! Monte-Carlo harness: simulate fractional noise, estimate `d` with a fixed
//! or adaptive bound, and summarise bias, spread and interval coverage.

mod config;

use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{ConfigErrors, DBarChoice, Procedure, StudyConfig, MAX_STUDY_D};

use crate::adaptive::{adaptive_fit, AdaptiveConfig};
use crate::error::{Error, Result};
use crate::estimation::{fit_bounded, ArmaOrder, FitResult};
use crate::likelihood::Objective;
use crate::process::{rng_for, simulate_arfima_with, ArfimaParams};
use crate::series::MeanSpec;
use crate::uncertainty::confidence_interval;

/// One `(d, n, objective, procedure)` combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub d: f64,
    pub n: usize,
    pub objective: Objective,
    pub procedure: Procedure,
}

impl CellSpec {
    pub fn label(&self) -> String {
        format!("d={} n={} {} {}", self.d, self.n, self.objective, self.procedure)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator seed of the series simulated for `(d, n)`. Replication `r`
/// uses stream `r`, so every objective and procedure sees the same series
/// (common random numbers) and cell order does not matter.
pub fn series_seed(seed: u64, d: f64, n: usize) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(d.to_bits())) ^ n as u64)
}

/// Outcome of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub replication: usize,
    pub d_hat: Option<f64>,
    pub se: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub covered: Option<bool>,
    pub sigma2_hat: Option<f64>,
    pub final_d_bar: Option<f64>,
    pub capped: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub d: f64,
    pub n: usize,
    pub objective: Objective,
    pub procedure: String,
    pub epsilon: Option<f64>,
    pub replications: usize,
    pub successes: usize,
    pub failure_count: usize,
    pub mean_d_hat: f64,
    pub bias: f64,
    /// `|mean(d_hat) - d|`.
    pub abs_bias: f64,
    /// Monte-Carlo standard deviation of `d_hat` (divisor: successes).
    pub mc_sd: f64,
    pub rmse: f64,
    pub mean_se: f64,
    pub coverage: f64,
    pub coverage_level: f64,
    /// Successful replications with a confidence interval.
    pub interval_count: usize,
    pub mean_sigma2_hat: f64,
    pub mean_final_d_bar: f64,
    pub capped_count: usize,
}

impl CellSummary {
    /// Standard error of `mean_d_hat`.
    pub fn mc_se(&self) -> f64 {
        self.mc_sd / (self.successes.max(1) as f64).sqrt()
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn replicate(
    cell: &CellSpec,
    series_seed: u64,
    rep: usize,
    mean_spec: &MeanSpec,
    level: f64,
    delta: f64,
) -> ReplicationRecord {
    let mut rec = ReplicationRecord {
        replication: rep,
        d_hat: None,
        se: None,
        lower: None,
        upper: None,
        covered: None,
        sigma2_hat: None,
        final_d_bar: None,
        capped: false,
        error: None,
    };
    let outcome = (|| -> Result<(FitResult, bool)> {
        let params = ArfimaParams::fractional_noise(cell.d);
        let y = simulate_arfima_with(&params, cell.n, &mut rng_for(series_seed, rep as u64))?.values;
        match cell.procedure {
            Procedure::Fixed { d_bar } => {
                Ok((fit_bounded(&y, mean_spec, ArmaOrder::default(), d_bar, cell.objective)?, false))
            }
            Procedure::Adaptive { epsilon } => {
                let cfg = AdaptiveConfig {
                    delta,
                    epsilon,
                    objective: cell.objective,
                    ..Default::default()
                };
                let t = adaptive_fit(&y, mean_spec, ArmaOrder::default(), &cfg)?;
                Ok((t.final_fit, t.capped))
            }
        }
    })();
    match outcome {
        Ok((fit, capped)) => {
            rec.d_hat = Some(fit.d_hat);
            rec.sigma2_hat = Some(fit.sigma2_hat);
            rec.final_d_bar = Some(fit.bound_plan.d_bar);
            rec.capped = capped;
            if let Ok(iv) = confidence_interval(&fit, level) {
                rec.se = Some(iv.se);
                rec.lower = Some(iv.lower);
                rec.upper = Some(iv.upper);
                rec.covered = Some(iv.lower <= cell.d && cell.d <= iv.upper);
            }
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// Aggregates replication records of one cell.
pub fn summarize(cell: &CellSpec, level: f64, records: &[ReplicationRecord]) -> CellSummary {
    let ok: Vec<&ReplicationRecord> = records.iter().filter(|r| r.d_hat.is_some()).collect();
    let d_hats: Vec<f64> = ok.iter().map(|r| r.d_hat.unwrap()).collect();
    let m = mean(&d_hats);
    let k = d_hats.len() as f64;
    let mc_sd = if d_hats.is_empty() {
        f64::NAN
    } else {
        (d_hats.iter().map(|x| (x - m).powi(2)).sum::<f64>() / k).sqrt()
    };
    let mse = if d_hats.is_empty() {
        f64::NAN
    } else {
        d_hats.iter().map(|x| (x - cell.d).powi(2)).sum::<f64>() / k
    };
    let ses: Vec<f64> = ok.iter().filter_map(|r| r.se).collect();
    let cov: Vec<f64> = ok
        .iter()
        .filter_map(|r| r.covered.map(|c| if c { 1.0 } else { 0.0 }))
        .collect();
    let s2: Vec<f64> = ok.iter().filter_map(|r| r.sigma2_hat).collect();
    let dbars: Vec<f64> = ok.iter().filter_map(|r| r.final_d_bar).collect();
    CellSummary {
        d: cell.d,
        n: cell.n,
        objective: cell.objective,
        procedure: cell.procedure.label(),
        epsilon: match cell.procedure {
            Procedure::Adaptive { epsilon } => Some(epsilon),
            Procedure::Fixed { .. } => None,
        },
        replications: records.len(),
        successes: ok.len(),
        failure_count: records.len() - ok.len(),
        mean_d_hat: m,
        bias: m - cell.d,
        abs_bias: (m - cell.d).abs(),
        mc_sd,
        rmse: mse.sqrt(),
        mean_se: mean(&ses),
        coverage: mean(&cov),
        coverage_level: level,
        interval_count: cov.len(),
        mean_sigma2_hat: mean(&s2),
        mean_final_d_bar: mean(&dbars),
        capped_count: ok.iter().filter(|r| r.capped).count(),
    }
}

/// Runs `replications` replications of one cell; replications are spread
/// over the current rayon pool and the result does not depend on it.
pub fn run_cell(
    cell: &CellSpec,
    replications: usize,
    seed: u64,
    mean_spec: &MeanSpec,
    level: f64,
    delta: f64,
) -> (CellSummary, Vec<ReplicationRecord>) {
    let s = series_seed(seed, cell.d, cell.n);
    let records: Vec<ReplicationRecord> = (0..replications)
        .into_par_iter()
        .map(|r| replicate(cell, s, r, mean_spec, level, delta))
        .collect();
    (summarize(cell, level, &records), records)
}

/// Externally computed result shown next to the study's own cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub d: f64,
    pub n: usize,
    pub method: String,
    pub mean_d_hat: Option<f64>,
    pub coverage: Option<f64>,
}

/// Reads a CSV with header `d,n,method,mean_d_hat,coverage` (last two may
/// be empty).
pub fn read_baselines(path: &Path) -> Result<Vec<BaselineRow>> {
    let mut rdr = csv::Reader::from_path(path)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    rdr.deserialize()
        .map(|r| r.map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display()))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResults {
    pub config: StudyConfig,
    pub cells: Vec<CellSummary>,
    pub baselines: Vec<BaselineRow>,
}

/// Cells in execution order: d, then n, objective and procedure.
pub fn cells(config: &StudyConfig) -> Vec<CellSpec> {
    let procs = config.procedures();
    let mut out = Vec::new();
    for &d in &config.d_values {
        for &n in &config.n_values {
            for &objective in &config.objectives {
                for &procedure in &procs {
                    out.push(CellSpec {
                        d,
                        n,
                        objective,
                        procedure,
                    });
                }
            }
        }
    }
    out
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("{}: {e}", path.display()))
}

/// Output locations of a study run.
pub struct StudyOutputs {
    pub dir: PathBuf,
}

impl StudyOutputs {
    pub fn results_csv(&self) -> PathBuf {
        self.dir.join("results.csv")
    }
    pub fn summary_json(&self) -> PathBuf {
        self.dir.join("summary.json")
    }
    pub fn raw_dir(&self) -> PathBuf {
        self.dir.join("raw")
    }
}

fn write_raw(path: &Path, records: &[ReplicationRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    for r in records {
        w.serialize(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn append_summary(path: &Path, row: &CellSummary, header: bool) -> Result<()> {
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| io_err(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(header).from_writer(file);
    w.serialize(row).map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))
}

/// Runs every cell sequentially (replications in parallel). With `out`, the
/// long-format `results.csv` is appended after each cell and a raw file per
/// cell is written, so an interrupted run keeps finished cells; the JSON
/// summary is written at the end. `progress` is called once per cell.
pub fn run_study(
    config: &StudyConfig,
    out: Option<&StudyOutputs>,
    mut progress: impl FnMut(usize, usize, &CellSummary),
) -> Result<StudyResults> {
    let problems = config.problems();
    if !problems.is_empty() {
        return Err(Error::InvalidArgument(ConfigErrors(problems).to_string()));
    }
    let baselines = match &config.baseline_file {
        Some(p) => read_baselines(Path::new(p))?,
        None => Vec::new(),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    if let Some(o) = out {
        fs::create_dir_all(o.raw_dir()).map_err(|e| io_err(&o.raw_dir(), e))?;
        let rc = o.results_csv();
        if rc.exists() {
            fs::remove_file(&rc).map_err(|e| io_err(&rc, e))?;
        }
    }
    let all = cells(config);
    let mut summaries = Vec::with_capacity(all.len());
    for (i, cell) in all.iter().enumerate() {
        let (summary, records) = pool.install(|| {
            run_cell(cell, config.replications, config.seed, &config.mean, config.level, config.delta)
        });
        if let Some(o) = out {
            write_raw(&o.raw_dir().join(format!("cell_{:04}.csv", i + 1)), &records)?;
            append_summary(&o.results_csv(), &summary, i == 0)?;
        }
        progress(i + 1, all.len(), &summary);
        summaries.push(summary);
    }
    let results = StudyResults {
        config: config.clone(),
        cells: summaries,
        baselines,
    };
    if let Some(o) = out {
        let path = o.summary_json();
        let text = serde_json::to_string_pretty(&results).map_err(|e| io_err(&path, e))?;
        fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    }
    Ok(results)
}

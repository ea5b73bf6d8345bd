//! Time series container and mean specifications.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractional::integer_diff;

/// Ordered real-valued observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            values,
            time: None,
            source: None,
        }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Sample variance with divisor n.
    pub fn variance(&self) -> f64 {
        let n = self.values.len() as f64;
        if n == 0.0 {
            return 0.0;
        }
        let mean = self.values.iter().sum::<f64>() / n;
        self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
    }
}

impl From<Vec<f64>> for TimeSeries {
    fn from(values: Vec<f64>) -> Self {
        Self::new(values)
    }
}

/// Deterministic mean function `mu_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeanSpec {
    #[default]
    None,
    Constant,
    /// Polynomial in time of the given degree (constant included).
    Polynomial { degree: usize },
    /// User-supplied regressors, stored column by column.
    Regressors { columns: Vec<Vec<f64>> },
}

impl MeanSpec {
    /// Number of mean coefficients before differencing.
    pub fn dimension(&self) -> usize {
        match self {
            MeanSpec::None => 0,
            MeanSpec::Constant => 1,
            MeanSpec::Polynomial { degree } => degree + 1,
            MeanSpec::Regressors { columns } => columns.len(),
        }
    }

    /// Parses `none`, `constant` or `poly:P`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "none" => Ok(MeanSpec::None),
            "constant" => Ok(MeanSpec::Constant),
            _ => {
                let deg = s
                    .strip_prefix("poly:")
                    .and_then(|v| v.trim().parse::<usize>().ok())
                    .ok_or_else(|| {
                        Error::InvalidArgument(format!(
                            "mean must be none, constant or poly:P, got '{s}'"
                        ))
                    })?;
                Ok(MeanSpec::Polynomial { degree: deg })
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            MeanSpec::None => "none".into(),
            MeanSpec::Constant => "constant".into(),
            MeanSpec::Polynomial { degree } => format!("poly:{degree}"),
            MeanSpec::Regressors { columns } => format!("regressors:{}", columns.len()),
        }
    }

    /// Design columns for a series of length `n`.
    ///
    /// Polynomial columns use the centred and scaled time
    /// `s_t = (t - (n + 1) / 2) / n` for conditioning.
    pub fn design(&self, n: usize) -> Result<Vec<Vec<f64>>> {
        match self {
            MeanSpec::None => Ok(Vec::new()),
            MeanSpec::Constant => Ok(vec![vec![1.0; n]]),
            MeanSpec::Polynomial { degree } => {
                let centre = (n as f64 + 1.0) / 2.0;
                let scale = n.max(1) as f64;
                let s: Vec<f64> = (1..=n).map(|t| (t as f64 - centre) / scale).collect();
                Ok((0..=*degree)
                    .map(|k| s.iter().map(|v| v.powi(k as i32)).collect())
                    .collect())
            }
            MeanSpec::Regressors { columns } => {
                for c in columns {
                    if c.len() != n {
                        return Err(Error::InvalidArgument(format!(
                            "design column has {} rows, series has {n}",
                            c.len()
                        )));
                    }
                }
                Ok(columns.clone())
            }
        }
    }
}

/// Design after `m` integer differences with degenerate columns removed.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferencedDesign {
    pub columns: Vec<Vec<f64>>,
    /// Indices (into the undifferenced design) of the retained columns.
    pub kept: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Differences each design column `m` times, drops columns that vanish and
/// columns that are collinear with earlier ones.
pub fn difference_design(design: &[Vec<f64>], m: usize) -> Result<DifferencedDesign> {
    let mut columns = Vec::new();
    let mut kept = Vec::new();
    let mut warnings = Vec::new();
    // Orthonormalised copies of accepted columns for the collinearity check.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for (i, col) in design.iter().enumerate() {
        let scale = col.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let diffed = integer_diff(col, m)?;
        let norm = diffed.iter().map(|v| v * v).sum::<f64>().sqrt();
        if scale == 0.0 || norm <= 1e-9 * scale * (diffed.len().max(1) as f64).sqrt() {
            warnings.push(format!(
                "mean column {i} vanishes after differencing {m} times and was dropped"
            ));
            continue;
        }
        let mut resid = diffed.clone();
        for b in &basis {
            let proj: f64 = resid.iter().zip(b).map(|(r, q)| r * q).sum();
            for (r, q) in resid.iter_mut().zip(b) {
                *r -= proj * q;
            }
        }
        let rnorm = resid.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rnorm <= 1e-8 * norm {
            warnings.push(format!(
                "mean column {i} is collinear with earlier columns after differencing and was dropped"
            ));
            continue;
        }
        basis.push(resid.iter().map(|v| v / rnorm).collect());
        columns.push(diffed);
        kept.push(i);
    }
    Ok(DifferencedDesign {
        columns,
        kept,
        warnings,
    })
}

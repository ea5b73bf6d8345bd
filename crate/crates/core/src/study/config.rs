//! Flat `key = value` study configuration.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::adaptive::AdaptiveConfig;
use crate::estimation::D_MIN;
use crate::likelihood::Objective;
use crate::series::MeanSpec;

/// Largest true `d` a study may simulate.
pub const MAX_STUDY_D: f64 = 5.0;

/// How `d_bar` is chosen in a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Procedure {
    Fixed { d_bar: f64 },
    Adaptive { epsilon: f64 },
}

impl Procedure {
    /// `dbar=1.5`, `BND` (epsilon 0.5) or `BFR(5e-16)`.
    pub fn label(&self) -> String {
        match self {
            Procedure::Fixed { d_bar } => format!("dbar={d_bar}"),
            Procedure::Adaptive { epsilon } if *epsilon >= 0.5 => "BND".into(),
            Procedure::Adaptive { epsilon } => format!("BFR({epsilon:e})"),
        }
    }
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Entry of the `d_bar_values` list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DBarChoice {
    Fixed(f64),
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub d_values: Vec<f64>,
    pub n_values: Vec<usize>,
    pub replications: usize,
    pub objectives: Vec<Objective>,
    pub d_bar_values: Vec<DBarChoice>,
    /// Used for every `adaptive` entry; 0.5 gives BND.
    pub epsilon_values: Vec<f64>,
    pub seed: u64,
    /// Worker threads; 0 uses every logical processor.
    pub parallelism: usize,
    pub delta: f64,
    pub level: f64,
    pub mean: MeanSpec,
    /// Optional CSV of externally computed results shown side by side.
    pub baseline_file: Option<String>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            d_values: vec![-0.7, 0.0, 0.4, 0.8, 1.2, 2.2],
            n_values: vec![100, 500],
            replications: 500,
            objectives: vec![Objective::Exact],
            d_bar_values: vec![DBarChoice::Adaptive],
            epsilon_values: vec![0.5, 5e-16],
            seed: 20_240_101,
            parallelism: 0,
            delta: 0.01,
            level: 0.95,
            mean: MeanSpec::Constant,
            baseline_file: None,
        }
    }
}

/// Every problem found in a configuration, reported together.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} configuration error(s):", self.0.len())?;
        for e in &self.0 {
            writeln!(f, "  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

const KEYS: &[&str] = &[
    "d_values",
    "n_values",
    "replications",
    "objectives",
    "d_bar_values",
    "epsilon_values",
    "seed",
    "parallelism",
    "delta",
    "level",
    "mean",
    "baseline_file",
];

fn list<T: FromStr>(key: &str, v: &str, errs: &mut Vec<String>) -> Option<Vec<T>>
where
    T::Err: fmt::Display,
{
    let mut out = Vec::new();
    let mut ok = true;
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.parse::<T>() {
            Ok(x) => out.push(x),
            Err(e) => {
                errs.push(format!("{key}: cannot parse '{item}': {e}"));
                ok = false;
            }
        }
    }
    ok.then_some(out)
}

fn scalar<T: FromStr>(key: &str, v: &str, errs: &mut Vec<String>) -> Option<T>
where
    T::Err: fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| errs.push(format!("{key}: cannot parse '{v}': {e}")))
        .ok()
}

impl StudyConfig {
    /// Parses the text format; unset keys keep their defaults. All problems
    /// (syntax and validation) are collected before returning.
    pub fn parse(text: &str) -> Result<Self, ConfigErrors> {
        let mut cfg = StudyConfig::default();
        let mut errs = Vec::new();
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                errs.push(format!("line {}: expected 'key = value'", lineno + 1));
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                errs.push(format!("line {}: unknown key '{k}'", lineno + 1));
                continue;
            }
            if !seen.insert(k.to_string()) {
                errs.push(format!("line {}: duplicate key '{k}'", lineno + 1));
                continue;
            }
            match k {
                "d_values" => {
                    if let Some(x) = list(k, v, &mut errs) {
                        cfg.d_values = x;
                    }
                }
                "n_values" => {
                    if let Some(x) = list(k, v, &mut errs) {
                        cfg.n_values = x;
                    }
                }
                "replications" => {
                    if let Some(x) = scalar(k, v, &mut errs) {
                        cfg.replications = x;
                    }
                }
                "objectives" => {
                    if let Some(x) = list(k, v, &mut errs) {
                        cfg.objectives = x;
                    }
                }
                "d_bar_values" => {
                    let mut out = Vec::new();
                    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        if item.eq_ignore_ascii_case("adaptive") {
                            out.push(DBarChoice::Adaptive);
                        } else if let Some(x) = scalar::<f64>(k, item, &mut errs) {
                            out.push(DBarChoice::Fixed(x));
                        }
                    }
                    cfg.d_bar_values = out;
                }
                "epsilon_values" => {
                    if let Some(x) = list(k, v, &mut errs) {
                        cfg.epsilon_values = x;
                    }
                }
                "seed" => {
                    if let Some(x) = scalar(k, v, &mut errs) {
                        cfg.seed = x;
                    }
                }
                "parallelism" => {
                    if let Some(x) = scalar(k, v, &mut errs) {
                        cfg.parallelism = x;
                    }
                }
                "delta" => {
                    if let Some(x) = scalar(k, v, &mut errs) {
                        cfg.delta = x;
                    }
                }
                "level" => {
                    if let Some(x) = scalar(k, v, &mut errs) {
                        cfg.level = x;
                    }
                }
                "mean" => match MeanSpec::parse(v) {
                    Ok(m) => cfg.mean = m,
                    Err(e) => errs.push(format!("mean: {e}")),
                },
                "baseline_file" => cfg.baseline_file = (!v.is_empty()).then(|| v.to_string()),
                _ => unreachable!(),
            }
        }
        errs.extend(cfg.problems());
        if errs.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigErrors(errs))
        }
    }

    /// Semantic problems with the configuration (empty when valid).
    pub fn problems(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let cap = AdaptiveConfig::default().d_bar_max;
        if self.replications == 0 {
            errs.push("replications must be at least 1".into());
        }
        if self.d_values.is_empty() {
            errs.push("d_values is empty".into());
        }
        for &d in &self.d_values {
            if !(d > D_MIN && d < MAX_STUDY_D) {
                errs.push(format!("d value {d} outside ({D_MIN}, {MAX_STUDY_D})"));
            }
        }
        if self.n_values.is_empty() {
            errs.push("n_values is empty".into());
        }
        for &n in &self.n_values {
            if n < 20 {
                errs.push(format!("n value {n} is below 20"));
            }
        }
        if self.objectives.is_empty() {
            errs.push("objectives is empty".into());
        }
        if self.d_bar_values.is_empty() {
            errs.push("d_bar_values is empty".into());
        }
        let adaptive = self.d_bar_values.contains(&DBarChoice::Adaptive);
        for c in &self.d_bar_values {
            if let DBarChoice::Fixed(b) = c {
                if !(*b >= 0.5 && *b <= cap) {
                    errs.push(format!("fixed d_bar {b} outside [0.5, {cap}]"));
                }
            }
        }
        if adaptive {
            if self.epsilon_values.is_empty() {
                errs.push("epsilon_values is empty but d_bar_values contains 'adaptive'".into());
            }
            for &e in &self.epsilon_values {
                if !(e > 0.0 && e <= 0.5) {
                    errs.push(format!("epsilon {e} outside (0, 0.5]"));
                }
            }
            if self.objectives.contains(&Objective::Css) {
                errs.push("objective 'css' cannot be combined with adaptive d_bar".into());
            }
            if !(self.delta > 0.0 && self.delta <= 0.05) {
                errs.push(format!("delta {} outside (0, 0.05]", self.delta));
            }
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            errs.push(format!("level {} outside (0, 1)", self.level));
        }
        errs
    }

    /// Procedures in configuration order; `adaptive` expands over epsilons.
    pub fn procedures(&self) -> Vec<Procedure> {
        let mut out = Vec::new();
        for c in &self.d_bar_values {
            match c {
                DBarChoice::Fixed(b) => out.push(Procedure::Fixed { d_bar: *b }),
                DBarChoice::Adaptive => out.extend(
                    self.epsilon_values
                        .iter()
                        .map(|&epsilon| Procedure::Adaptive { epsilon }),
                ),
            }
        }
        out
    }
}

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Result};
use arfima_core::adaptive::{adaptive_fit_with, AdaptiveConfig};
use arfima_core::estimation::{fit_bounded_with, FitOptions};
use arfima_core::study::Procedure;
use arfima_core::uncertainty::{confidence_interval, test_mean_reversion};
use arfima_core::{ArmaOrder, Error, FitResult};
use clap::Args;

use crate::document::{InputDescriptor, ResultDocument};
use crate::{check_level, emit, ModelArgs, EXIT_FIT};

/// `adaptive` or a fixed numeric bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DBarArg {
    Adaptive,
    Fixed(f64),
}

impl FromStr for DBarArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("adaptive") {
            return Ok(DBarArg::Adaptive);
        }
        s.parse::<f64>()
            .map(DBarArg::Fixed)
            .map_err(|_| format!("expected 'adaptive' or a number, got '{s}'"))
    }
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Upper bound on d: a number >= 0.5, or `adaptive`.
    #[arg(long, default_value = "adaptive")]
    dbar: DBarArg,
    /// Tail probability of the adaptive buffer; 0.5 gives the plain boundary rule.
    #[arg(long, default_value = "5e-16")]
    epsilon: f64,
    /// Step of the boundary slope check.
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Largest bound the adaptive search may reach.
    #[arg(long, default_value_t = 5.5)]
    dbar_max: f64,
    /// Confidence level of the interval for d.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Also test H0: d >= THRESHOLD (e.g. 1 for mean reversion).
    #[arg(long, value_name = "THRESHOLD")]
    mean_reversion: Option<f64>,
    /// Size of the one-sided mean-reversion test.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Write the JSON document here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Recorded in the document; estimation itself is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

pub fn run(a: FitArgs) -> Result<u8> {
    check_level(a.level)?;
    let adaptive = match a.dbar {
        DBarArg::Adaptive => {
            let cfg = AdaptiveConfig {
                delta: a.delta,
                epsilon: a.epsilon,
                d_bar_max: a.dbar_max,
                objective: a.model.likelihood,
                ..Default::default()
            };
            cfg.validate()?;
            Some(cfg)
        }
        DBarArg::Fixed(b) if !(b >= 0.5) || !b.is_finite() => bail!("--dbar must be at least 0.5, got {b}"),
        DBarArg::Fixed(_) => None,
    };
    let loaded = a.model.load()?;
    let n = loaded.series.len();
    let mean_spec = a.model.mean_spec(n)?;
    let order = ArmaOrder::new(a.model.p, a.model.q);
    let procedure = match (a.dbar, &adaptive) {
        (DBarArg::Fixed(d_bar), _) => Procedure::Fixed { d_bar },
        (_, Some(cfg)) => Procedure::Adaptive { epsilon: cfg.epsilon },
        _ => unreachable!(),
    };
    let mut doc = ResultDocument::new(
        InputDescriptor {
            source: loaded.source.clone(),
            column: loaded.column.clone(),
            n,
        },
        order,
        a.model.likelihood,
        a.model.mean_label(),
        procedure.label(),
    );
    doc.seed = a.seed;
    let options = FitOptions {
        parallel: true,
        ..Default::default()
    };
    let y = loaded.series.as_slice();
    let outcome: Result<FitResult, Error> = match (&adaptive, a.dbar) {
        (Some(cfg), _) => adaptive_fit_with(y, &mean_spec, order, cfg, options).map(|trace| {
            doc.set_trace(&trace);
            if trace.capped {
                doc.warnings.push(format!(
                    "adaptive search stopped at the cap d_bar_max = {}",
                    cfg.d_bar_max
                ));
            }
            trace.final_fit
        }),
        (None, DBarArg::Fixed(d_bar)) => fit_bounded_with(y, &mean_spec, order, d_bar, a.model.likelihood, options),
        _ => unreachable!(),
    };
    let code = match outcome {
        Ok(fit) => {
            let interval = match confidence_interval(&fit, a.level) {
                Ok(iv) => Some(iv),
                Err(e) => {
                    doc.warnings.push(format!("no confidence interval: {e}"));
                    None
                }
            };
            if let Some(threshold) = a.mean_reversion {
                match test_mean_reversion(&fit, threshold, a.alpha) {
                    Ok(t) => doc.mean_reversion = Some(t),
                    Err(e) => doc.warnings.push(format!("no mean-reversion test: {e}")),
                }
            }
            doc.set_fit(&fit, interval);
            0
        }
        Err(e) => {
            eprintln!("error: fit failed: {e}");
            doc.set_failure(&e);
            EXIT_FIT
        }
    };
    doc.sanitize();
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    emit(a.output.as_deref(), &text)?;
    Ok(code)
}

//! Adaptive choice of `d_bar`: a boundary-slope check followed by a
//! percentile buffer, escalating `d_bar` by one until both pass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{ArmaOrder, FitOptions, FitProblem, FitResult};
use crate::likelihood::Objective;
use crate::series::MeanSpec;
use crate::uncertainty::normal_upper_quantile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub delta: f64,
    /// Tail probability of the buffer; 0.5 disables it (plain boundary check).
    pub epsilon: f64,
    pub d_bar_start: f64,
    pub d_bar_max: f64,
    pub objective: Objective,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            delta: 0.01,
            epsilon: 0.5,
            d_bar_start: 0.5,
            d_bar_max: 5.5,
            objective: Objective::Exact,
        }
    }
}

impl AdaptiveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 0.05) {
            return Err(Error::InvalidArgument(format!("delta must be in (0, 0.05], got {}", self.delta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be in (0, 0.5], got {}",
                self.epsilon
            )));
        }
        if !(self.d_bar_start >= 0.5) || !self.d_bar_start.is_finite() {
            return Err(Error::InvalidBound(self.d_bar_start));
        }
        if !(self.d_bar_max >= self.d_bar_start) {
            return Err(Error::InvalidArgument(format!(
                "d_bar_max {} is below d_bar_start {}",
                self.d_bar_max, self.d_bar_start
            )));
        }
        if self.objective == Objective::Css {
            return Err(Error::InvalidArgument(
                "the adaptive procedure needs a differencing objective (exact, whittle or scss)".into(),
            ));
        }
        Ok(())
    }
}

/// One pass of the loop at a given `d_bar`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveStep {
    pub d_bar: f64,
    pub slope: f64,
    pub escalated_by_slope: bool,
    pub d_hat: Option<f64>,
    pub percentile: Option<f64>,
    pub escalated_by_percentile: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveTrace {
    pub config: AdaptiveConfig,
    pub steps: Vec<AdaptiveStep>,
    pub final_fit: FitResult,
    /// The loop wanted to go beyond `d_bar_max`.
    pub capped: bool,
}

impl AdaptiveTrace {
    pub fn final_d_bar(&self) -> f64 {
        self.final_fit.bound_plan.d_bar
    }
}

/// `[l(d_bar - delta) - l(d_bar - 2 delta)] / delta` for any profile `l`.
pub fn slope_from_profile<F: FnMut(f64) -> Result<f64>>(mut l: F, d_bar: f64, delta: f64) -> Result<f64> {
    let a = l(d_bar - delta)?;
    let b = l(d_bar - 2.0 * delta)?;
    Ok((a - b) / delta)
}

/// Boundary slope of the profile objective of `problem` at its `d_bar`.
pub fn boundary_slope_at(problem: &FitProblem, delta: f64) -> Result<f64> {
    slope_from_profile(|d| problem.profile(d).map(|p| p.loglik), problem.d_bar(), delta)
}

pub fn boundary_slope(
    y: &[f64],
    mean_spec: &MeanSpec,
    order: ArmaOrder,
    d_bar: f64,
    objective: Objective,
    delta: f64,
) -> Result<f64> {
    let problem = FitProblem::new(y, mean_spec, order, d_bar, objective, FitOptions::default())?;
    boundary_slope_at(&problem, delta)
}

/// `d_hat + z_{1-eps} / sqrt(curvature (n - m - p - q))`, where `curvature`
/// is the magnitude of the per-observation profile second derivative.
pub fn bfr_percentile(
    d_hat: f64,
    curvature: f64,
    n: usize,
    m: usize,
    p: usize,
    q: usize,
    epsilon: f64,
) -> Result<f64> {
    if !(curvature > 0.0) || !curvature.is_finite() {
        return Err(Error::NonPositiveCurvature(curvature));
    }
    let dof = n as f64 - (m + p + q) as f64;
    if !(dof > 0.0) {
        return Err(Error::InsufficientData {
            needed: m + p + q + 1,
            got: n,
        });
    }
    let z = normal_upper_quantile(epsilon);
    Ok(d_hat + z / (curvature * dof).sqrt())
}

/// Runs the adaptive procedure from `config.d_bar_start`.
pub fn adaptive_fit(
    y: &[f64],
    mean_spec: &MeanSpec,
    order: ArmaOrder,
    config: &AdaptiveConfig,
) -> Result<AdaptiveTrace> {
    adaptive_fit_with(y, mean_spec, order, config, FitOptions::default())
}

pub fn adaptive_fit_with(
    y: &[f64],
    mean_spec: &MeanSpec,
    order: ArmaOrder,
    config: &AdaptiveConfig,
    options: FitOptions,
) -> Result<AdaptiveTrace> {
    config.validate()?;
    let mut options = options;
    // the percentile needs the curvature whenever the buffer is active
    options.compute_uncertainty = options.compute_uncertainty || config.epsilon < 0.5;
    let mut d_bar = config.d_bar_start;
    let mut steps = Vec::new();
    loop {
        let problem = FitProblem::new(y, mean_spec, order, d_bar, config.objective, options.clone())?;
        let can_escalate = d_bar + 1.0 <= config.d_bar_max + 1e-12;
        let slope = boundary_slope_at(&problem, config.delta)?;
        if slope > 0.0 {
            steps.push(AdaptiveStep {
                d_bar,
                slope,
                escalated_by_slope: can_escalate,
                d_hat: None,
                percentile: None,
                escalated_by_percentile: false,
                note: None,
            });
            if can_escalate {
                d_bar += 1.0;
                continue;
            }
            let fit = problem.fit()?;
            let last = steps.last_mut().unwrap();
            last.d_hat = Some(fit.d_hat);
            last.note = Some("cap reached while the boundary slope was positive".into());
            return Ok(capped(config, steps, fit));
        }
        let fit = problem.fit()?;
        let (percentile, note) = percentile_of(&fit, config.epsilon, problem.options.eta);
        let escalate = percentile.is_none_or(|p| p >= d_bar);
        steps.push(AdaptiveStep {
            d_bar,
            slope,
            escalated_by_slope: false,
            d_hat: Some(fit.d_hat),
            percentile,
            escalated_by_percentile: escalate && can_escalate,
            note,
        });
        if !escalate {
            return Ok(AdaptiveTrace {
                config: config.clone(),
                steps,
                final_fit: fit,
                capped: false,
            });
        }
        if !can_escalate {
            return Ok(capped(config, steps, fit));
        }
        d_bar += 1.0;
    }
}

fn capped(config: &AdaptiveConfig, steps: Vec<AdaptiveStep>, mut fit: FitResult) -> AdaptiveTrace {
    fit.warnings.push(Error::CapReached(config.d_bar_max).to_string());
    AdaptiveTrace {
        config: config.clone(),
        steps,
        final_fit: fit,
        capped: true,
    }
}

/// Percentile used by the stopping rule, or `None` when it cannot be formed
/// (which escalates). An estimate on the upper guard counts as a boundary
/// solution regardless of the buffer.
fn percentile_of(fit: &FitResult, epsilon: f64, eta: f64) -> (Option<f64>, Option<String>) {
    let d_bar = fit.bound_plan.d_bar;
    if fit.d_hat >= d_bar - eta - 1e-5 {
        return (None, Some("estimate on the upper boundary".into()));
    }
    if epsilon >= 0.5 {
        return (Some(fit.d_hat), None);
    }
    let curvature = fit.curvature_d.map(|h| -h / fit.n_eff as f64).unwrap_or(f64::NAN);
    match bfr_percentile(
        fit.d_hat,
        curvature,
        fit.n,
        fit.bound_plan.m,
        fit.order.p,
        fit.order.q,
        epsilon,
    ) {
        Ok(p) => (Some(p), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn slope_of_quadratic_profile() {
        let s = slope_from_profile(|d| Ok(-(d - 0.2f64).powi(2)), 0.5, 0.01).unwrap();
        assert_relative_eq!(s, -0.57, epsilon = 1e-12);
    }

    #[test]
    fn percentile_examples() {
        assert_eq!(bfr_percentile(0.3, 2.0, 100, 0, 0, 0, 0.5).unwrap(), 0.3);
        // curvature * (n - m - p - q) = 400
        let p = bfr_percentile(0.4, 4.0, 102, 1, 1, 0, 0.025).unwrap();
        assert_relative_eq!(p, 0.4 + 1.959_963_984_540_054 / 20.0, epsilon = 1e-9);
        assert!(matches!(
            bfr_percentile(0.4, -1.0, 100, 0, 0, 0, 0.025),
            Err(Error::NonPositiveCurvature(_))
        ));
    }

    #[test]
    fn config_validation() {
        let mut c = AdaptiveConfig::default();
        assert!(c.validate().is_ok());
        c.delta = 0.1;
        assert!(c.validate().is_err());
        c = AdaptiveConfig {
            epsilon: 0.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}

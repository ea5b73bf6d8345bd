//! JSON result document written by `fit`.

use arfima_core::adaptive::{AdaptiveStep, AdaptiveTrace};
use arfima_core::estimation::IntervalFit;
use arfima_core::uncertainty::{IntervalEstimate, MeanReversionTest};
use arfima_core::{ArmaOrder, BoundPlan, Error, FitResult, Objective};
use serde::{Deserialize, Serialize};

/// Bumped whenever a field is renamed or removed.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    pub source: String,
    pub column: String,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub d_hat: f64,
    pub se_d: Option<f64>,
    pub interval: Option<IntervalEstimate>,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma2: f64,
    pub mean_coefficients: Vec<f64>,
    /// Mean-design columns still identifiable after differencing.
    pub mean_columns: Vec<usize>,
    pub loglik: f64,
    pub selected_interval: usize,
    pub curvature_d: Option<f64>,
    pub hessian_step: Option<f64>,
    pub joint_hessian: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveSummary {
    pub epsilon: f64,
    pub delta: f64,
    pub selected_d_bar: f64,
    pub capped: bool,
    pub steps: Vec<AdaptiveStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: u32,
    pub version: String,
    pub status: Status,
    pub input: InputDescriptor,
    pub order: ArmaOrder,
    pub objective: Objective,
    pub mean: String,
    /// `fixed`, `BND` or `BFR(eps)`.
    pub procedure: String,
    pub seed: Option<u64>,
    pub bound_plan: Option<BoundPlan>,
    pub per_interval: Vec<IntervalFit>,
    pub estimate: Option<Estimate>,
    pub mean_reversion: Option<MeanReversionTest>,
    pub adaptive: Option<AdaptiveSummary>,
    pub warnings: Vec<String>,
    pub failure: Option<FailureInfo>,
}

/// Stable name of an estimation error.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InsufficientData { .. } => "insufficient_data",
        Error::NonStationary { .. } => "non_stationary",
        Error::PoleAtZero { .. } => "pole_at_zero",
        Error::NearRepeatedRoots => "near_repeated_roots",
        Error::NonStationaryAr => "non_stationary_ar",
        Error::NumericalPsd { .. } => "numerical_psd",
        Error::SingularDesign => "singular_design",
        Error::InvalidBound(_) => "invalid_bound",
        Error::OptimFailed(_) => "optimization_failed",
        Error::AllIntervalsFailed => "all_intervals_failed",
        Error::BoundaryTooClose { .. } => "boundary_too_close",
        Error::NonPositiveCurvature(_) => "non_positive_curvature",
        Error::CapReached(_) => "cap_reached",
        Error::ZeroVariance => "zero_variance",
        Error::InvalidArgument(_) => "invalid_argument",
    }
}

impl ResultDocument {
    pub fn new(input: InputDescriptor, order: ArmaOrder, objective: Objective, mean: String, procedure: String) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            status: Status::Ok,
            input,
            order,
            objective,
            mean,
            procedure,
            seed: None,
            bound_plan: None,
            per_interval: Vec::new(),
            estimate: None,
            mean_reversion: None,
            adaptive: None,
            warnings: Vec::new(),
            failure: None,
        }
    }

    pub fn set_fit(&mut self, fit: &FitResult, interval: Option<IntervalEstimate>) {
        self.bound_plan = Some(fit.bound_plan.clone());
        self.per_interval = fit.per_j.clone();
        self.warnings.extend(fit.warnings.iter().cloned());
        self.estimate = Some(Estimate {
            d_hat: fit.d_hat,
            se_d: fit.se_d,
            interval,
            phi: fit.phi_hat.clone(),
            theta: fit.theta_hat.clone(),
            sigma2: fit.sigma2_hat,
            mean_coefficients: fit.mean_hat.clone(),
            mean_columns: fit.mean_columns.clone(),
            loglik: fit.loglik,
            selected_interval: fit.j_star,
            curvature_d: fit.curvature_d,
            hessian_step: fit.hessian_step,
            joint_hessian: fit.joint_hessian.clone(),
        });
    }

    pub fn set_trace(&mut self, trace: &AdaptiveTrace) {
        self.adaptive = Some(AdaptiveSummary {
            epsilon: trace.config.epsilon,
            delta: trace.config.delta,
            selected_d_bar: trace.final_d_bar(),
            capped: trace.capped,
            steps: trace.steps.clone(),
        });
    }

    pub fn set_failure(&mut self, e: &Error) {
        self.status = Status::Error;
        self.failure = Some(FailureInfo {
            kind: error_kind(e).into(),
            message: e.to_string(),
        });
    }

    /// Replaces non-finite numbers (not representable in JSON) by `None` or
    /// drops them, recording a warning.
    pub fn sanitize(&mut self) {
        if let Some(est) = &mut self.estimate {
            if let Some(h) = &est.joint_hessian {
                if h.iter().flatten().any(|v| !v.is_finite()) {
                    est.joint_hessian = None;
                    self.warnings.push("joint Hessian has non-finite entries; omitted".into());
                }
            }
            for v in [&mut est.se_d, &mut est.curvature_d, &mut est.hessian_step] {
                if v.is_some_and(|x| !x.is_finite()) {
                    *v = None;
                }
            }
        }
        for iv in &mut self.per_interval {
            for v in [&mut iv.d, &mut iv.sigma2, &mut iv.loglik] {
                if v.is_some_and(|x| !x.is_finite()) {
                    *v = None;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use arfima_core::uncertainty::confidence_interval;
    use arfima_core::{datasets, fit_bounded, MeanSpec};

    #[test]
    fn round_trips_through_json() {
        let y = datasets::series_a();
        let fit = fit_bounded(&y.values, &MeanSpec::Constant, ArmaOrder::new(0, 1), 1.5, Objective::Exact).unwrap();
        let mut doc = ResultDocument::new(
            InputDescriptor {
                source: "Series A".into(),
                column: "value".into(),
                n: y.len(),
            },
            fit.order,
            Objective::Exact,
            "constant".into(),
            "dbar=1.5".into(),
        );
        doc.seed = Some(u64::MAX);
        doc.set_fit(&fit, confidence_interval(&fit, 0.95).ok());
        doc.sanitize();
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let back: ResultDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn failure_document() {
        let mut doc = ResultDocument::new(
            InputDescriptor {
                source: "x".into(),
                column: "v".into(),
                n: 3,
            },
            ArmaOrder::new(0, 0),
            Objective::Exact,
            "none".into(),
            "BND".into(),
        );
        doc.set_failure(&Error::ZeroVariance);
        let v: serde_json::Value = serde_json::to_value(&doc).unwrap();
        assert_eq!(v["status"], "error");
        assert_eq!(v["failure"]["kind"], "zero_variance");
    }
}

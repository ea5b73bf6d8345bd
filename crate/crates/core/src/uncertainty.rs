//! Standard errors from the numerically differentiated profile
//! log-likelihood, confidence intervals and one-sided tests on `d`.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::estimation::{ArmaOrder, FitOptions, FitProblem, FitResult, D_MIN};
use crate::likelihood::Objective;
use crate::optim::arma_to_unconstrained;
use crate::series::MeanSpec;

/// Smallest step tried when the initial Hessian step meets a boundary.
pub const MIN_HESSIAN_STEP: f64 = 1e-6;

/// Upper `p`-quantile of the standard normal, `Phi^{-1}(1 - p)`.
pub fn normal_upper_quantile(p: f64) -> f64 {
    -Normal::standard().inverse_cdf(p)
}

/// Central second difference of a scalar function.
pub fn second_difference<F: FnMut(f64) -> Result<f64>>(mut f: F, x: f64, h: f64) -> Result<f64> {
    let lp = f(x + h)?;
    let l0 = f(x)?;
    let lm = f(x - h)?;
    Ok((lp - 2.0 * l0 + lm) / (h * h))
}

/// Central second difference in `d` of the profile objective held by
/// `problem`, at `d_hat` with step `h`.
///
/// Only the outer ends of the search range (and, for SCSS, the edges of
/// the interval containing `d_hat`) count as boundaries: the exact and
/// Whittle objectives are continuous across internal interval edges.
pub fn profile_hessian_at(problem: &FitProblem, d_hat: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("Hessian step must be positive, got {h}")));
    }
    let plan = &problem.plan;
    let j = plan
        .interval_of(d_hat)
        .ok_or_else(|| Error::InvalidArgument(format!("d = {d_hat} outside the search range")))?;
    let (lo, hi) = match problem.objective {
        Objective::Scss => (plan.intervals[j].lower, plan.intervals[j].upper),
        _ => (D_MIN, plan.d_bar),
    };
    let margin = (d_hat - lo).min(hi - d_hat);
    if margin < 2.0 * h {
        return Err(Error::BoundaryTooClose { d: d_hat, margin });
    }
    // points beyond an internal edge are evaluated in their own interval
    let at = |d: f64| match problem.objective {
        Objective::Scss => problem.profile_in(d, j),
        _ => problem.profile(d),
    };
    second_difference(|d| at(d).map(|p| p.loglik), d_hat, h)
}

/// [`profile_hessian_at`] from raw inputs.
#[allow(clippy::too_many_arguments)]
pub fn profile_hessian_d(
    y: &[f64],
    mean_spec: &MeanSpec,
    order: ArmaOrder,
    d_bar: f64,
    objective: Objective,
    d_hat: f64,
    h: f64,
) -> Result<f64> {
    let problem = FitProblem::new(y, mean_spec, order, d_bar, objective, FitOptions::default())?;
    profile_hessian_at(&problem, d_hat, h)
}

/// Tries `h0`, halving down to [`MIN_HESSIAN_STEP`] while the point is too
/// close to a boundary. Returns `(hessian, step)`.
pub fn curvature_with_fallback(problem: &FitProblem, d_hat: f64, h0: f64) -> Result<(f64, f64)> {
    let mut h = h0;
    loop {
        match profile_hessian_at(problem, d_hat, h) {
            Err(Error::BoundaryTooClose { .. }) if h / 2.0 >= MIN_HESSIAN_STEP => h /= 2.0,
            other => return other.map(|v| (v, h)),
        }
    }
}

/// Central-difference Hessian of the objective in `(d, phi, theta)` at the
/// fitted values, with mean and variance profiled. ARMA parameters are
/// perturbed in their natural coordinates.
pub fn joint_hessian(problem: &FitProblem, fit: &FitResult, h: f64) -> Result<Vec<Vec<f64>>> {
    let p = fit.order.p;
    let mut x0 = vec![fit.d_hat];
    x0.extend(&fit.phi_hat);
    x0.extend(&fit.theta_hat);
    let f = |x: &[f64]| -> Result<f64> {
        let phi = &x[1..1 + p];
        let theta = &x[1 + p..];
        if arma_to_unconstrained(phi, theta).is_none() {
            return Err(Error::NonStationaryAr);
        }
        let j = match problem.objective {
            Objective::Scss => fit.j_star,
            _ => problem.plan.interval_of(x[0]).unwrap_or(fit.j_star),
        };
        problem.evaluate(x[0], j, phi, theta).map(|e| e.loglik)
    };
    let k = x0.len();
    let f0 = f(&x0)?;
    let mut hess = vec![vec![0.0; k]; k];
    let shifted = |a: usize, sa: f64, b: usize, sb: f64| {
        let mut x = x0.clone();
        x[a] += sa;
        x[b] += sb;
        f(&x)
    };
    for a in 0..k {
        let mut x = x0.clone();
        x[a] += h;
        let fp = f(&x)?;
        x[a] -= 2.0 * h;
        let fm = f(&x)?;
        hess[a][a] = (fp - 2.0 * f0 + fm) / (h * h);
        for b in 0..a {
            let v = (shifted(a, h, b, h)? - shifted(a, h, b, -h)? - shifted(a, -h, b, h)?
                + shifted(a, -h, b, -h)?)
                / (4.0 * h * h);
            hess[a][b] = v;
            hess[b][a] = v;
        }
    }
    Ok(hess)
}

/// Fills the curvature, standard error and joint-Hessian diagnostic of a
/// fit; failures become warnings.
pub(crate) fn attach_uncertainty(problem: &FitProblem, fit: &mut FitResult) {
    match curvature_with_fallback(problem, fit.d_hat, problem.options.hessian_step) {
        Ok((hess, h)) => {
            fit.curvature_d = Some(hess);
            fit.hessian_step = Some(h);
            if hess < 0.0 {
                fit.se_d = Some(1.0 / (-hess).sqrt());
            } else {
                fit.warnings
                    .push(format!("profile curvature {hess} at d_hat is not negative; no standard error"));
            }
        }
        Err(e) => fit.warnings.push(format!("no standard error for d: {e}")),
    }
    if fit.order.dim() > 0 {
        match joint_hessian(problem, fit, 1e-4) {
            Ok(h) => fit.joint_hessian = Some(h),
            Err(e) => fit.warnings.push(format!("joint Hessian unavailable: {e}")),
        }
    }
}

/// Two-sided normal-theory interval for `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    pub d_hat: f64,
    pub se: f64,
    pub level: f64,
    pub lower: f64,
    pub upper: f64,
    pub method: String,
}

pub fn interval_from_se(d_hat: f64, se: f64, level: f64) -> Result<IntervalEstimate> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("level must be in (0, 1), got {level}")));
    }
    if !(se > 0.0) || !se.is_finite() {
        return Err(Error::InvalidArgument(format!("standard error must be positive, got {se}")));
    }
    let z = normal_upper_quantile((1.0 - level) / 2.0);
    Ok(IntervalEstimate {
        d_hat,
        se,
        level,
        lower: d_hat - z * se,
        upper: d_hat + z * se,
        method: "central-difference Hessian of the profile log-likelihood".into(),
    })
}

/// `d_hat +- z SE` with `SE = 1/sqrt(-H)`, `H` the full profile curvature.
pub fn confidence_interval(fit: &FitResult, level: f64) -> Result<IntervalEstimate> {
    match (fit.se_d, fit.curvature_d) {
        (Some(se), _) => interval_from_se(fit.d_hat, se, level),
        (None, Some(c)) => Err(Error::NonPositiveCurvature(c)),
        (None, None) => Err(Error::NonPositiveCurvature(f64::NAN)),
    }
}

/// One-sided test of `H0: d >= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanReversionTest {
    pub d_hat: f64,
    pub se: f64,
    pub threshold: f64,
    pub alpha: f64,
    /// Upper end of the two-sided `1 - 2 alpha` interval.
    pub upper: f64,
    pub reject: bool,
}

pub fn mean_reversion_from_se(d_hat: f64, se: f64, threshold: f64, alpha: f64) -> Result<MeanReversionTest> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::InvalidArgument(format!("alpha must be in (0, 0.5), got {alpha}")));
    }
    let iv = interval_from_se(d_hat, se, 1.0 - 2.0 * alpha)?;
    Ok(MeanReversionTest {
        d_hat,
        se,
        threshold,
        alpha,
        upper: iv.upper,
        reject: iv.upper < threshold,
    })
}

pub fn test_mean_reversion(fit: &FitResult, threshold: f64, alpha: f64) -> Result<MeanReversionTest> {
    let se = confidence_interval(fit, 0.95)?.se;
    mean_reversion_from_se(fit.d_hat, se, threshold, alpha)
}

//! Fixed-`d_bar` estimation: differencing geometry, constrained fits on each
//! unit interval of `d`, and the overall argmax.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractional::integer_diff;
use crate::likelihood::{
    css_loglik, exact_loglik, periodogram, scss_loglik, whittle_from_periodogram, MeanSigma,
    Objective, Periodogram,
};
use crate::optim::{brent_max, nelder_mead_max, newton_polish, unconstrained_to_arma};
use crate::series::{difference_design, MeanSpec};
use crate::uncertainty;

/// Lower end of every search range.
pub const D_MIN: f64 = -2.5;
/// Default guard below each interval's open right endpoint.
pub const DEFAULT_ETA: f64 = 1e-4;

/// ARMA orders of the free polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct ArmaOrder {
    pub p: usize,
    pub q: usize,
}

impl ArmaOrder {
    pub fn new(p: usize, q: usize) -> Self {
        Self { p, q }
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }
}

/// `[lower, upper)` searched with constrained factor `(1 - B)^j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchInterval {
    pub j: usize,
    pub lower: f64,
    pub upper: f64,
}

/// Differencing order and search intervals implied by `d_bar`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundPlan {
    pub d_bar: f64,
    pub m: usize,
    pub k: usize,
    pub intervals: Vec<SearchInterval>,
}

impl BoundPlan {
    /// Interval index containing `d` (intervals are closed on the left).
    pub fn interval_of(&self, d: f64) -> Option<usize> {
        self.intervals
            .iter()
            .position(|iv| d >= iv.lower && d < iv.upper)
    }

    /// Memory parameter of the stationary representation in interval `j`.
    pub fn d_prime(&self, d: f64, j: usize) -> f64 {
        d - self.m as f64 + j as f64
    }

    /// Single search range `[D_MIN, d_bar)` on undifferenced data (CSS).
    pub fn undifferenced(d_bar: f64) -> Result<Self> {
        if !(d_bar > D_MIN) || !d_bar.is_finite() {
            return Err(Error::InvalidBound(d_bar));
        }
        Ok(Self {
            d_bar,
            m: 0,
            k: 0,
            intervals: vec![SearchInterval {
                j: 0,
                lower: D_MIN,
                upper: d_bar,
            }],
        })
    }
}

/// `m = ceil(d_bar - 0.5)`, `k = m + 2`, and intervals
/// `[-0.5 + m - j, 0.5 + m - j)` for `j = 0..=k`; the top interval is cut at
/// `d_bar`.
pub fn plan_bounds(d_bar: f64) -> Result<BoundPlan> {
    if !(d_bar >= 0.5) || !d_bar.is_finite() {
        return Err(Error::InvalidBound(d_bar));
    }
    let m = (d_bar - 0.5).ceil().max(0.0) as usize;
    let k = m + 2;
    let intervals = (0..=k)
        .map(|j| {
            let centre = m as f64 - j as f64;
            SearchInterval {
                j,
                lower: centre - 0.5,
                upper: (centre + 0.5).min(d_bar),
            }
        })
        .collect();
    Ok(BoundPlan {
        d_bar,
        m,
        k,
        intervals,
    })
}

/// Numerical settings of a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub eta: f64,
    /// Tolerance of the outer search in `d`.
    pub d_tol: f64,
    /// Initial step of the profile Hessian in `d`.
    pub hessian_step: f64,
    pub compute_uncertainty: bool,
    /// Grid points scanned before the outer search when the profile may be
    /// multimodal (ARMA terms present or CSS).
    pub prescan_points: usize,
    /// Run the per-interval fits on the rayon pool.
    pub parallel: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            eta: DEFAULT_ETA,
            d_tol: 1e-6,
            hessian_step: 1e-3,
            compute_uncertainty: true,
            prescan_points: 9,
            parallel: false,
        }
    }
}

/// Objective value with the profiled nuisance parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub loglik: f64,
    pub sigma2: f64,
    pub mean: Vec<f64>,
    pub psd_flag: bool,
}

/// Profile objective at one `d`: free ARMA parameters maximized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub d: f64,
    pub j: usize,
    pub loglik: f64,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma2: f64,
    pub mean: Vec<f64>,
    pub psd_flag: bool,
}

/// Maximizer within one search interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalFit {
    pub j: usize,
    pub lower: f64,
    pub upper: f64,
    pub d: Option<f64>,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma2: Option<f64>,
    pub mean: Vec<f64>,
    pub loglik: Option<f64>,
    /// The covariance at the maximizer is numerically near-singular; the
    /// interval is excluded from the argmax.
    pub psd_flag: bool,
    /// Evaluations during the search rejected for loss of positive
    /// definiteness (treated as infeasible points).
    pub psd_failures: usize,
    pub evaluations: usize,
    pub error: Option<String>,
}

impl IntervalFit {
    pub fn is_valid(&self) -> bool {
        self.loglik.is_some() && !self.psd_flag && self.error.is_none()
    }
}

/// Result of a fixed-`d_bar` fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub objective: Objective,
    pub order: ArmaOrder,
    pub mean_spec: String,
    pub bound_plan: BoundPlan,
    pub n: usize,
    /// Observations entering the likelihood (`n - m`).
    pub n_eff: usize,
    pub per_j: Vec<IntervalFit>,
    pub j_star: usize,
    pub d_hat: f64,
    pub phi_hat: Vec<f64>,
    pub theta_hat: Vec<f64>,
    pub sigma2_hat: f64,
    /// Coefficients of the retained (differenced) mean columns.
    pub mean_hat: Vec<f64>,
    /// Indices of the mean columns that survive differencing.
    pub mean_columns: Vec<usize>,
    pub loglik: f64,
    /// Second derivative of the profile objective in `d` at `d_hat`.
    pub curvature_d: Option<f64>,
    pub se_d: Option<f64>,
    pub hessian_step: Option<f64>,
    /// Central-difference Hessian in `(d, phi, theta)` with mean and
    /// variance profiled; diagnostic only.
    pub joint_hessian: Option<Vec<Vec<f64>>>,
    pub warnings: Vec<String>,
}

/// Data and geometry for repeated objective evaluations at one `d_bar`.
#[derive(Debug, Clone)]
pub struct FitProblem {
    pub objective: Objective,
    pub order: ArmaOrder,
    pub plan: BoundPlan,
    pub mean_spec: MeanSpec,
    pub n: usize,
    pub x_diff: Vec<f64>,
    pub design: Vec<Vec<f64>>,
    pub mean_columns: Vec<usize>,
    pub options: FitOptions,
    pub warnings: Vec<String>,
    periodogram: Option<Periodogram>,
}

fn ols_residuals(x: &[f64], design: &[Vec<f64>]) -> Result<Vec<f64>> {
    if design.is_empty() {
        return Ok(x.to_vec());
    }
    let n = x.len();
    let z = nalgebra::DMatrix::from_fn(n, design.len(), |i, k| design[k][i]);
    let xv = nalgebra::DVector::from_column_slice(x);
    let beta = z
        .clone()
        .svd(true, true)
        .solve(&xv, 1e-12)
        .map_err(|_| Error::SingularDesign)?;
    Ok((xv - z * beta).iter().copied().collect())
}

fn is_constant(v: &[f64]) -> bool {
    let first = v.first().copied().unwrap_or(0.0);
    let scale = v.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    v.iter().all(|x| (x - first).abs() <= 1e-12 * scale)
}

impl FitProblem {
    pub fn new(
        y: &[f64],
        mean_spec: &MeanSpec,
        order: ArmaOrder,
        d_bar: f64,
        objective: Objective,
        options: FitOptions,
    ) -> Result<Self> {
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("series contains non-finite values".into()));
        }
        let plan = match objective {
            Objective::Css => BoundPlan::undifferenced(d_bar)?,
            _ => plan_bounds(d_bar)?,
        };
        let n = y.len();
        let needed = plan.m + order.dim() + mean_spec.dimension() + 5;
        if n <= needed {
            return Err(Error::InsufficientData { needed, got: n });
        }
        if is_constant(y) {
            return Err(Error::ZeroVariance);
        }
        let x_diff = integer_diff(y, plan.m)?;
        if is_constant(&x_diff) {
            return Err(Error::ZeroVariance);
        }
        let raw = mean_spec.design(n)?;
        let dd = difference_design(&raw, plan.m)?;
        let mut warnings = dd.warnings;
        let periodogram = if objective == Objective::Whittle {
            // the zero frequency is excluded, so constants need no treatment;
            // other regressors are removed by least squares first
            let trend: Vec<Vec<f64>> = dd
                .columns
                .iter()
                .filter(|c| !is_constant(c))
                .cloned()
                .collect();
            if !trend.is_empty() {
                warnings.push(format!(
                    "{} non-constant mean column(s) removed by least squares before the periodogram",
                    trend.len()
                ));
            }
            let resid = ols_residuals(&x_diff, &trend)?;
            let pg = periodogram(&resid)?;
            if pg.ordinates[..pg.whittle_len()].iter().all(|v| *v <= 0.0) {
                return Err(Error::ZeroVariance);
            }
            Some(pg)
        } else {
            None
        };
        Ok(Self {
            objective,
            order,
            plan,
            mean_spec: mean_spec.clone(),
            n,
            x_diff,
            design: dd.columns,
            mean_columns: dd.kept,
            options,
            warnings,
            periodogram,
        })
    }

    pub fn n_eff(&self) -> usize {
        self.x_diff.len()
    }

    pub fn d_bar(&self) -> f64 {
        self.plan.d_bar
    }

    /// Objective at `(d, phi, theta)` using constrained factor `j`, with mean
    /// and variance profiled.
    pub fn evaluate(&self, d: f64, j: usize, phi: &[f64], theta: &[f64]) -> Result<Evaluation> {
        let dp = self.plan.d_prime(d, j);
        match self.objective {
            Objective::Exact => {
                let e = exact_loglik(&self.x_diff, &self.design, dp, phi, theta, j, &MeanSigma::Profile)?;
                Ok(Evaluation {
                    loglik: e.loglik,
                    sigma2: e.profiled_sigma2,
                    mean: e.profiled_mean,
                    psd_flag: e.psd_flag,
                })
            }
            Objective::Whittle => {
                if !(dp < 0.5) {
                    return Err(Error::NonStationary { d: dp });
                }
                let pg = self.periodogram.as_ref().expect("periodogram computed for Whittle");
                let (loglik, sigma2) = whittle_from_periodogram(pg, dp - j as f64, phi, theta)?;
                Ok(Evaluation {
                    loglik,
                    sigma2,
                    mean: Vec::new(),
                    psd_flag: false,
                })
            }
            Objective::Scss => {
                crate::process::check_ar_stationary(phi)?;
                let e = scss_loglik(&self.x_diff, &self.design, dp, phi, theta, j)?;
                Ok(Evaluation {
                    loglik: e.loglik,
                    sigma2: e.sigma2,
                    mean: e.mean,
                    psd_flag: false,
                })
            }
            Objective::Css => {
                crate::process::check_ar_stationary(phi)?;
                let e = css_loglik(&self.x_diff, &self.design, d, phi, theta)?;
                Ok(Evaluation {
                    loglik: e.loglik,
                    sigma2: e.sigma2,
                    mean: e.mean,
                    psd_flag: false,
                })
            }
        }
    }

    fn starts(&self) -> Vec<Vec<f64>> {
        let k = self.order.dim();
        let a = 0.5f64.atanh();
        let b = 0.85f64.atanh();
        if k == 1 {
            return [0.0, a, -a, b, -b].iter().map(|v| vec![*v]).collect();
        }
        let alt = |s: f64| (0..k).map(|i| if i % 2 == 0 { s } else { -s }).collect::<Vec<f64>>();
        vec![vec![0.0; k], vec![a; k], vec![-a; k], alt(a), alt(-a)]
    }

    fn profile_counted(
        &self,
        d: f64,
        j: usize,
        psd: &AtomicUsize,
        evals: &AtomicUsize,
    ) -> Result<ProfilePoint> {
        let note = |r: &Result<Evaluation>| {
            evals.fetch_add(1, Ordering::Relaxed);
            if matches!(r, Err(Error::NumericalPsd { .. })) {
                psd.fetch_add(1, Ordering::Relaxed);
            }
        };
        let p = self.order.p;
        if self.order.dim() == 0 {
            let r = self.evaluate(d, j, &[], &[]);
            note(&r);
            let e = r?;
            return Ok(ProfilePoint {
                d,
                j,
                loglik: e.loglik,
                phi: Vec::new(),
                theta: Vec::new(),
                sigma2: e.sigma2,
                mean: e.mean,
                psd_flag: e.psd_flag,
            });
        }
        let objective = |u: &[f64]| {
            let (phi, theta) = unconstrained_to_arma(u, p);
            let r = self.evaluate(d, j, &phi, &theta);
            note(&r);
            r.map(|e| e.loglik).unwrap_or(f64::NEG_INFINITY)
        };
        let dim = self.order.dim();
        let mut best: Option<(Vec<f64>, f64)> = None;
        for start in self.starts() {
            let r = nelder_mead_max(objective, &start, 0.4, 1e-9, 1e-5, 200 * dim);
            if r.value.is_finite() && best.as_ref().is_none_or(|b| r.value > b.1) {
                best = Some((r.x, r.value));
            }
        }
        let (u, _) = best.ok_or_else(|| {
            Error::OptimFailed(format!("no admissible ARMA parameters at d = {d}"))
        })?;
        // polish the winning start only
        let u = nelder_mead_max(objective, &u, 0.05, 1e-14, 1e-9, 300 * dim).x;
        let u = newton_polish(objective, &u, 1e-4, 1e-3, 2).x;
        let (phi, theta) = unconstrained_to_arma(&u, p);
        let r = self.evaluate(d, j, &phi, &theta);
        note(&r);
        let e = r?;
        Ok(ProfilePoint {
            d,
            j,
            loglik: e.loglik,
            phi,
            theta,
            sigma2: e.sigma2,
            mean: e.mean,
            psd_flag: e.psd_flag,
        })
    }

    /// Profile objective at `d`, evaluated in the interval containing `d`.
    pub fn profile(&self, d: f64) -> Result<ProfilePoint> {
        let j = self.plan.interval_of(d).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "d = {d} is outside the search range [{D_MIN}, {})",
                self.plan.d_bar
            ))
        })?;
        self.profile_in(d, j)
    }

    /// Profile objective at `d` using the constrained factor of interval `j`.
    pub fn profile_in(&self, d: f64, j: usize) -> Result<ProfilePoint> {
        self.profile_counted(d, j, &AtomicUsize::new(0), &AtomicUsize::new(0))
    }

    /// Maximizes the objective over interval `j`.
    pub fn fit_interval(&self, j: usize) -> IntervalFit {
        let iv = self.plan.intervals[j];
        let psd = AtomicUsize::new(0);
        let evals = AtomicUsize::new(0);
        let lo = iv.lower;
        let hi = iv.upper - self.options.eta;
        let mut out = IntervalFit {
            j,
            lower: iv.lower,
            upper: iv.upper,
            d: None,
            phi: Vec::new(),
            theta: Vec::new(),
            sigma2: None,
            mean: Vec::new(),
            loglik: None,
            psd_flag: false,
            psd_failures: 0,
            evaluations: 0,
            error: None,
        };
        if !(hi > lo) {
            out.error = Some("interval narrower than the boundary guard".into());
            return out;
        }
        let f = |d: f64| {
            self.profile_counted(d, j, &psd, &evals)
                .map(|p| p.loglik)
                .unwrap_or(f64::NEG_INFINITY)
        };
        let multimodal = self.order.dim() > 0 || self.objective == Objective::Css;
        let (a, b, scan_best) = if multimodal && self.options.prescan_points >= 3 {
            let np = self.options.prescan_points;
            let grid: Vec<f64> = (0..np)
                .map(|i| lo + (hi - lo) * i as f64 / (np - 1) as f64)
                .collect();
            let vals: Vec<f64> = grid.iter().map(|d| f(*d)).collect();
            let ib = (0..np)
                .max_by(|&x, &y| vals[x].total_cmp(&vals[y]))
                .unwrap();
            let a = grid[ib.saturating_sub(1)];
            let b = grid[(ib + 1).min(np - 1)];
            (a, b, Some((grid[ib], vals[ib])))
        } else {
            (lo, hi, None)
        };
        let mut best = brent_max(f, a, b, self.options.d_tol);
        if let Some((x, v)) = scan_best {
            if v > best.value {
                best.x = x;
                best.value = v;
            }
        }
        if !best.value.is_finite() {
            out.psd_failures = psd.load(Ordering::Relaxed);
            out.evaluations = evals.load(Ordering::Relaxed);
            out.error = Some("no admissible evaluation in the interval".into());
            return out;
        }
        match self.profile_counted(best.x, j, &psd, &evals) {
            Ok(pt) => {
                out.d = Some(pt.d);
                out.phi = pt.phi;
                out.theta = pt.theta;
                out.sigma2 = Some(pt.sigma2);
                out.mean = pt.mean;
                out.loglik = Some(pt.loglik);
                out.psd_flag = pt.psd_flag;
            }
            Err(e) => out.error = Some(e.to_string()),
        }
        out.psd_failures = psd.load(Ordering::Relaxed);
        out.evaluations = evals.load(Ordering::Relaxed);
        out
    }

    /// Runs every interval, selects the argmax and, if requested, attaches
    /// the profile curvature and standard error of `d`.
    pub fn fit(&self) -> Result<FitResult> {
        let js: Vec<usize> = (0..self.plan.intervals.len()).collect();
        let per_j: Vec<IntervalFit> = if self.options.parallel {
            js.par_iter().map(|&j| self.fit_interval(j)).collect()
        } else {
            js.iter().map(|&j| self.fit_interval(j)).collect()
        };
        let mut warnings = self.warnings.clone();
        for iv in &per_j {
            if iv.psd_flag {
                warnings.push(format!(
                    "interval {} [{}, {}) is numerically near-singular at its maximizer and was excluded",
                    iv.j, iv.lower, iv.upper
                ));
            }
        }
        let j_star = per_j
            .iter()
            .filter(|iv| iv.is_valid())
            .max_by(|a, b| a.loglik.unwrap().total_cmp(&b.loglik.unwrap()))
            .map(|iv| iv.j)
            .ok_or(Error::AllIntervalsFailed)?;
        let win = &per_j[j_star];
        let d_hat = win.d.unwrap();
        if d_hat > self.plan.d_bar - self.options.eta - 1e-5 {
            warnings.push(format!("estimate d = {d_hat} lies on the upper boundary d_bar"));
        }
        let mut fit = FitResult {
            objective: self.objective,
            order: self.order,
            mean_spec: self.mean_spec.label(),
            bound_plan: self.plan.clone(),
            n: self.n,
            n_eff: self.n_eff(),
            per_j: per_j.clone(),
            j_star,
            d_hat,
            phi_hat: win.phi.clone(),
            theta_hat: win.theta.clone(),
            sigma2_hat: win.sigma2.unwrap(),
            mean_hat: win.mean.clone(),
            mean_columns: self.mean_columns.clone(),
            loglik: win.loglik.unwrap(),
            curvature_d: None,
            se_d: None,
            hessian_step: None,
            joint_hessian: None,
            warnings,
        };
        if self.options.compute_uncertainty {
            uncertainty::attach_uncertainty(self, &mut fit);
        }
        Ok(fit)
    }
}

/// Fits with the given `d_bar` (steps 1-4 of the procedure).
pub fn fit_bounded(
    y: &[f64],
    mean_spec: &MeanSpec,
    order: ArmaOrder,
    d_bar: f64,
    objective: Objective,
) -> Result<FitResult> {
    fit_bounded_with(y, mean_spec, order, d_bar, objective, FitOptions::default())
}

pub fn fit_bounded_with(
    y: &[f64],
    mean_spec: &MeanSpec,
    order: ArmaOrder,
    d_bar: f64,
    objective: Objective,
    options: FitOptions,
) -> Result<FitResult> {
    FitProblem::new(y, mean_spec, order, d_bar, objective, options)?.fit()
}

/// Profile objective on a grid of `d` values; points outside
/// `[D_MIN, d_bar)` or failing evaluation are `None`.
pub fn profile_curve(
    y: &[f64],
    mean_spec: &MeanSpec,
    order: ArmaOrder,
    d_bar: f64,
    objective: Objective,
    grid: &[f64],
) -> Result<Vec<(f64, Option<f64>)>> {
    let problem = FitProblem::new(y, mean_spec, order, d_bar, objective, FitOptions::default())?;
    Ok(grid
        .iter()
        .map(|&d| (d, problem.profile(d).ok().map(|p| p.loglik)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{rng_for, simulate_arfima_with, ArfimaParams};

    #[test]
    fn plans() {
        let p = plan_bounds(2.5).unwrap();
        assert_eq!((p.m, p.k), (2, 4));
        assert_eq!(p.intervals.last().unwrap().lower, -2.5);
        assert_eq!(p.intervals[0].upper, 2.5);
        let p = plan_bounds(0.5).unwrap();
        assert_eq!((p.m, p.k), (0, 2));
        let bounds: Vec<(f64, f64)> = p.intervals.iter().map(|i| (i.lower, i.upper)).collect();
        assert_eq!(bounds, vec![(-0.5, 0.5), (-1.5, -0.5), (-2.5, -1.5)]);
        let p = plan_bounds(1.5).unwrap();
        assert_eq!((p.m, p.k), (1, 3));
        let p = plan_bounds(1.2).unwrap();
        assert_eq!((p.m, p.intervals[0].upper), (1, 1.2));
        assert!(matches!(plan_bounds(0.4), Err(Error::InvalidBound(_))));
    }

    #[test]
    fn interval_lookup() {
        let p = plan_bounds(2.5).unwrap();
        assert_eq!(p.interval_of(1.5), Some(0));
        assert_eq!(p.interval_of(1.4999), Some(1));
        assert_eq!(p.interval_of(-2.5), Some(4));
        assert_eq!(p.interval_of(2.5), None);
        assert_eq!(p.interval_of(-2.6), None);
    }

    #[test]
    fn constrained_coefficients_for_second_interval() {
        let th = crate::fractional::constrained_ma(&crate::fractional::MaPolynomial::identity(), 2);
        assert_eq!(th.coeffs(), &[-2.0, 1.0]);
    }

    #[test]
    fn interval_fit_is_a_local_maximum() {
        let p = ArfimaParams::fractional_noise(0.2);
        let y = simulate_arfima_with(&p, 300, &mut rng_for(21, 0)).unwrap().values;
        let problem = FitProblem::new(
            &y,
            &MeanSpec::Constant,
            ArmaOrder::default(),
            0.5,
            Objective::Exact,
            FitOptions::default(),
        )
        .unwrap();
        let iv = problem.fit_interval(0);
        let d = iv.d.unwrap();
        assert!((-0.5..0.5).contains(&d));
        let l = iv.loglik.unwrap();
        for s in [-1e-5, 1e-5] {
            if (d + s) < 0.5 - 1e-4 {
                assert!(problem.profile_in(d + s, 0).unwrap().loglik <= l + 1e-12);
            }
        }
    }

    #[test]
    fn constant_series_is_rejected() {
        let y = vec![3.0; 50];
        assert!(matches!(
            fit_bounded(&y, &MeanSpec::Constant, ArmaOrder::default(), 0.5, Objective::Exact),
            Err(Error::ZeroVariance)
        ));
    }

    #[test]
    fn profile_curve_marks_out_of_range() {
        let p = ArfimaParams::fractional_noise(0.3);
        let y = simulate_arfima_with(&p, 120, &mut rng_for(2, 0)).unwrap().values;
        let curve = profile_curve(
            &y,
            &MeanSpec::Constant,
            ArmaOrder::default(),
            1.5,
            Objective::Exact,
            &[-3.0, 0.0, 0.5, 1.6],
        )
        .unwrap();
        assert!(curve[0].1.is_none());
        assert!(curve[1].1.is_some() && curve[2].1.is_some());
        assert!(curve[3].1.is_none());
    }
}

//! Exact Gaussian log-likelihood of the differenced data.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fractional::cumulative_sum;
use crate::process::arfima_acvf;
use crate::toeplitz::toeplitz_quadratics;

/// Prediction variances below this fraction of `gamma(0)` raise `psd_flag`
/// without invalidating the evaluation.
const PSD_WARN: f64 = 1e-8;

/// How the mean coefficients and innovation variance are handled.
#[derive(Debug, Clone, PartialEq)]
pub enum MeanSigma {
    /// Generalized least squares for the mean, analytic optimum for `sigma2`.
    Profile,
    Fixed { mean: Vec<f64>, sigma2: f64 },
}

/// One evaluation of the exact likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileEval {
    pub loglik: f64,
    pub profiled_mean: Vec<f64>,
    pub profiled_sigma2: f64,
    pub prediction_variances: Vec<f64>,
    pub psd_flag: bool,
}

/// Solves the GLS normal equations from a Gram matrix whose first row and
/// column belong to the response. Returns the coefficients and the residual
/// quadratic form.
pub fn gls(inner: &[Vec<f64>]) -> Result<(Vec<f64>, f64)> {
    let k = inner.len() - 1;
    let yy = inner[0][0];
    if k == 0 {
        return Ok((Vec::new(), yy));
    }
    let a = DMatrix::from_fn(k, k, |r, c| inner[r + 1][c + 1]);
    let b = DVector::from_fn(k, |r, _| inner[0][r + 1]);
    let chol = a.cholesky().ok_or(Error::SingularDesign)?;
    let beta = chol.solve(&b);
    if beta.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularDesign);
    }
    let s = yy - beta.dot(&b);
    Ok((beta.iter().copied().collect(), s))
}

/// Exact log-likelihood of `x_diff` under the stationary model with memory
/// `d_prime`, AR `phi`, free MA `theta_free` and constrained factor
/// `(1 - B)^j`.
///
/// `design_diff` holds the differenced mean regressors (already free of
/// vanishing or collinear columns).
pub fn exact_loglik(
    x_diff: &[f64],
    design_diff: &[Vec<f64>],
    d_prime: f64,
    phi: &[f64],
    theta_free: &[f64],
    j: usize,
    mode: &MeanSigma,
) -> Result<ProfileEval> {
    let n = x_diff.len();
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if !(d_prime < 0.5) {
        return Err(Error::NonStationary { d: d_prime });
    }
    if matches!(mode, MeanSigma::Profile) && !design_diff.is_empty() {
        // Taking out the least-squares fit first leaves the GLS result
        // unchanged but keeps large mean components (a shifted level or
        // trend) out of the Toeplitz arithmetic.
        let (beta_ols, resid) = ols(x_diff, design_diff)?;
        let mut e = evaluate(&resid, design_diff, d_prime, phi, theta_free, j, mode)?;
        e.profiled_mean.iter_mut().zip(&beta_ols).for_each(|(b, o)| *b += o);
        return Ok(e);
    }
    evaluate(x_diff, design_diff, d_prime, phi, theta_free, j, mode)
}

/// Least-squares coefficients of `x` on the columns of `design`, and the
/// residual.
fn ols(x: &[f64], design: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    let a = DMatrix::from_fn(n, design.len(), |i, k| design[k][i]);
    let b = DVector::from_column_slice(x);
    let qr = a.clone().qr();
    let qtb = qr.q().transpose() * &b;
    let beta = qr
        .r()
        .solve_upper_triangular(&qtb)
        .filter(|v| v.iter().all(|c| c.is_finite()))
        .ok_or(Error::SingularDesign)?;
    let resid = b - a * &beta;
    Ok((beta.iter().copied().collect(), resid.iter().copied().collect()))
}

fn evaluate(
    x_diff: &[f64],
    design_diff: &[Vec<f64>],
    d_prime: f64,
    phi: &[f64],
    theta_free: &[f64],
    j: usize,
    mode: &MeanSigma,
) -> Result<ProfileEval> {
    let n = x_diff.len();
    let d_eff = d_prime - j as f64;
    if d_eff <= -1.0 {
        let s = (-d_eff).floor() as usize;
        return cumulated_loglik(x_diff, design_diff, d_eff, s, phi, theta_free, mode);
    }
    let gamma = arfima_acvf(d_eff, phi, theta_free, 1.0, n - 1)?;
    let mut cols: Vec<&[f64]> = Vec::with_capacity(design_diff.len() + 1);
    cols.push(x_diff);
    for c in design_diff {
        cols.push(c);
    }
    let tq = toeplitz_quadratics(&gamma, &cols)?;
    let nf = n as f64;
    let psd_flag = tq
        .prediction_variances
        .iter()
        .any(|v| *v < PSD_WARN * gamma[0]);
    match mode {
        MeanSigma::Profile => {
            let (beta, s) = gls(&tq.inner)?;
            if !(s > 0.0) {
                return Err(Error::ZeroVariance);
            }
            let sigma2 = s / nf;
            let loglik = -0.5 * nf * (2.0 * PI * sigma2).ln() - 0.5 * tq.log_det - 0.5 * nf;
            Ok(ProfileEval {
                loglik,
                profiled_mean: beta,
                profiled_sigma2: sigma2,
                prediction_variances: tq.prediction_variances,
                psd_flag,
            })
        }
        MeanSigma::Fixed { mean, sigma2 } => {
            check_mean_len(mean, design_diff)?;
            let g = &tq.inner;
            let mut q = g[0][0];
            for a in 0..mean.len() {
                q -= 2.0 * mean[a] * g[0][a + 1];
                for b in 0..mean.len() {
                    q += mean[a] * mean[b] * g[a + 1][b + 1];
                }
            }
            let loglik =
                -0.5 * nf * (2.0 * PI * sigma2).ln() - 0.5 * tq.log_det - 0.5 * q / sigma2;
            Ok(ProfileEval {
                loglik,
                profiled_mean: mean.clone(),
                profiled_sigma2: *sigma2,
                prediction_variances: tq
                    .prediction_variances
                    .iter()
                    .map(|v| v * sigma2)
                    .collect(),
                psd_flag,
            })
        }
    }
}

fn check_mean_len(mean: &[f64], design: &[Vec<f64>]) -> Result<()> {
    if mean.len() != design.len() {
        return Err(Error::InvalidArgument(format!(
            "{} mean coefficients for {} regressors",
            mean.len(),
            design.len()
        )));
    }
    Ok(())
}

/// `s`-fold cumulative sum of `v` preceded by `s` zeros.
fn cumulate(v: &[f64], s: usize) -> Vec<f64> {
    let mut padded = vec![0.0; s];
    padded.extend_from_slice(v);
    cumulative_sum(&padded, s)
}

/// Orthonormal discrete polynomials of degree `< s` on `t = 0..len`, with
/// `sum_k ln ||pi_k||` for the monic (in `t`) versions.
fn orthonormal_polys(len: usize, s: usize) -> (Vec<Vec<f64>>, f64) {
    let c = 0.5 * (len as f64 - 1.0);
    let h = c.max(1.0);
    let u: Vec<f64> = (0..len).map(|t| (t as f64 - c) / h).collect();
    let mut prev = vec![0.0; len];
    let mut cur = vec![1.0; len];
    let mut prev_norm2 = 1.0;
    let mut log_norms = 0.0;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(s);
    for k in 0..s {
        let norm2: f64 = cur.iter().map(|v| v * v).sum();
        log_norms += k as f64 * h.ln() + 0.5 * norm2.ln();
        let mut q: Vec<f64> = cur.iter().map(|v| v / norm2.sqrt()).collect();
        // one re-orthogonalization pass
        for b in &basis {
            let proj: f64 = q.iter().zip(b).map(|(x, y)| x * y).sum();
            q.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
        }
        let nq = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        q.iter_mut().for_each(|v| *v /= nq);
        basis.push(q);
        let a = u.iter().zip(&cur).map(|(x, p)| x * p * p).sum::<f64>() / norm2;
        let b = if k == 0 { 0.0 } else { norm2 / prev_norm2 };
        let next: Vec<f64> = (0..len)
            .map(|i| (u[i] - a) * cur[i] - b * prev[i])
            .collect();
        prev = std::mem::replace(&mut cur, next);
        prev_norm2 = norm2;
    }
    (basis, log_norms)
}

/// Removes the component of `v` in the span of the orthonormal `basis`.
fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let proj: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
        }
    }
}

/// Strongly overdifferenced models (`d_eff <= -1`) have near-singular
/// covariance matrices, so a direct Toeplitz solve amplifies tiny
/// autocovariance errors. Writing `x = (1 - B)^s z` with `z` stationary
/// ARFIMA(p, d_eff + s, q) and `d_eff + s` in `(-1, 0]`, the density of `x` is the density of the
/// `s`-fold cumulated series with its `s` unknown starting values (a
/// polynomial trend of degree `< s`) integrated out. The change of
/// variables is unit triangular, so the identity is exact.
fn cumulated_loglik(
    x_diff: &[f64],
    design_diff: &[Vec<f64>],
    d_eff: f64,
    s: usize,
    phi: &[f64],
    theta_free: &[f64],
    mode: &MeanSigma,
) -> Result<ProfileEval> {
    let n = x_diff.len();
    let len = n + s;
    let gamma = arfima_acvf(d_eff + s as f64, phi, theta_free, 1.0, len - 1)?;
    let (poly, log_norms) = orthonormal_polys(len, s);
    let log_fact: f64 = (1..s).map(|k| (1..=k).map(|i| (i as f64).ln()).sum::<f64>()).sum();
    // ln det(A' R^-1 A) = ln det(Q' R^-1 Q) + 2 ln |det M|, A = Q M
    let log_det_m = log_norms - log_fact;

    let response = match mode {
        MeanSigma::Profile => x_diff.to_vec(),
        MeanSigma::Fixed { mean, .. } => {
            check_mean_len(mean, design_diff)?;
            let mut r = x_diff.to_vec();
            for (c, b) in design_diff.iter().zip(mean) {
                r.iter_mut().zip(c).for_each(|(v, x)| *v -= b * x);
            }
            r
        }
    };
    let mut cols: Vec<Vec<f64>> = vec![cumulate(&response, s)];
    if matches!(mode, MeanSigma::Profile) {
        cols.extend(design_diff.iter().map(|c| cumulate(c, s)));
    }
    for c in cols.iter_mut() {
        project_out(c, &poly);
    }
    let k = cols.len() - 1;
    cols.extend(poly);
    let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    let tq = toeplitz_quadratics(&gamma, &refs)?;
    let psd_flag = tq
        .prediction_variances
        .iter()
        .any(|v| *v < PSD_WARN * gamma[0]);

    let poly_gram = DMatrix::from_fn(s, s, |r, c| tq.inner[k + 1 + r][k + 1 + c]);
    let chol = poly_gram.cholesky().ok_or(Error::SingularDesign)?;
    let log_det_poly = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let log_det = tq.log_det + log_det_poly + 2.0 * log_det_m;

    let (beta, q) = gls(&tq.inner)?;
    let nf = n as f64;
    match mode {
        MeanSigma::Profile => {
            if !(q > 0.0) {
                return Err(Error::ZeroVariance);
            }
            let sigma2 = q / nf;
            Ok(ProfileEval {
                loglik: -0.5 * nf * (2.0 * PI * sigma2).ln() - 0.5 * log_det - 0.5 * nf,
                profiled_mean: beta[..k].to_vec(),
                profiled_sigma2: sigma2,
                prediction_variances: tq.prediction_variances,
                psd_flag,
            })
        }
        MeanSigma::Fixed { mean, sigma2 } => Ok(ProfileEval {
            loglik: -0.5 * nf * (2.0 * PI * sigma2).ln() - 0.5 * log_det - 0.5 * q / sigma2,
            profiled_mean: mean.clone(),
            profiled_sigma2: *sigma2,
            prediction_variances: tq.prediction_variances.iter().map(|v| v * sigma2).collect(),
            psd_flag,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractional::{constrained_ma, MaPolynomial};
    use crate::process::{autocovariance_expanded, rng_for, simulate_stationary_with, ArfimaParams};
    use approx::assert_relative_eq;

    // Dense multivariate normal log-density with GLS mean and ML variance.
    fn dense_profile(x: &[f64], design: &[Vec<f64>], gamma: &[f64]) -> f64 {
        let n = x.len();
        let g = DMatrix::from_fn(n, n, |i, j| gamma[i.abs_diff(j)]);
        let chol = g.clone().cholesky().unwrap();
        let logdet = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        let xv = DVector::from_column_slice(x);
        let mut resid = xv.clone();
        if !design.is_empty() {
            let z = DMatrix::from_fn(n, design.len(), |i, k| design[k][i]);
            let gz = chol.solve(&z);
            let a = z.transpose() * &gz;
            let b = gz.transpose() * &xv;
            let beta = a.lu().solve(&b).unwrap();
            resid -= z * beta;
        }
        let s = resid.dot(&chol.solve(&resid));
        let sigma2 = s / n as f64;
        // density of N(Z beta, sigma2 Gamma)
        -0.5 * n as f64 * (2.0 * PI * sigma2).ln() - 0.5 * logdet - 0.5 * s / sigma2
    }

    #[test]
    fn single_standard_normal_point() {
        let e = exact_loglik(
            &[0.0],
            &[],
            0.0,
            &[],
            &[],
            0,
            &MeanSigma::Fixed {
                mean: vec![],
                sigma2: 1.0,
            },
        )
        .unwrap();
        assert_relative_eq!(e.loglik, -0.5 * (2.0 * PI).ln(), max_relative = 1e-14);
    }

    #[test]
    fn two_unit_points() {
        let e = exact_loglik(
            &[1.0, 1.0],
            &[],
            0.0,
            &[],
            &[],
            0,
            &MeanSigma::Fixed {
                mean: vec![],
                sigma2: 1.0,
            },
        )
        .unwrap();
        assert_relative_eq!(e.loglik, -(2.0 * PI).ln() - 1.0, max_relative = 1e-14);
    }

    #[test]
    fn matches_dense_density_with_mean() {
        let p = ArfimaParams::new(0.2, vec![0.5], vec![0.3], 1.0);
        let x = simulate_stationary_with(&p, 40, &mut rng_for(17, 0)).unwrap().values;
        let x: Vec<f64> = x.iter().map(|v| v + 3.0).collect();
        let design = vec![vec![1.0; 40]];
        let e = exact_loglik(&x, &design, 0.2, &[0.5], &[0.3], 0, &MeanSigma::Profile).unwrap();
        let gamma = autocovariance_expanded(&p, 0, 39).unwrap().values;
        let dense = dense_profile(&x, &design, &gamma);
        assert!((e.loglik - dense).abs() < 1e-8, "{} vs {dense}", e.loglik);
    }

    #[test]
    fn constrained_model_matches_dense_expanded() {
        let p = ArfimaParams::new(-0.3, vec![0.4], vec![0.2], 1.0);
        let x = simulate_stationary_with(&p, 50, &mut rng_for(3, 1)).unwrap().values;
        for j in 1..3 {
            let e = exact_loglik(&x, &[], -0.3 + 0.0, &[0.4], &[0.2], j, &MeanSigma::Profile)
                .unwrap();
            let theta = constrained_ma(&MaPolynomial::new(vec![0.2]), j);
            let pj = ArfimaParams::new(-0.3, vec![0.4], theta.coeffs().to_vec(), 1.0);
            let gamma = autocovariance_expanded(&pj, 0, 49).unwrap().values;
            let dense = dense_profile(&x, &[], &gamma);
            assert!((e.loglik - dense).abs() < 1e-7, "j={j}: {} vs {dense}", e.loglik);
        }
    }

    #[test]
    fn cumulated_route_is_continuous_at_switch() {
        let p = ArfimaParams::new(-0.9, vec![0.6], vec![], 1.0);
        let x = simulate_stationary_with(&p, 120, &mut rng_for(5, 2)).unwrap().values;
        let design = vec![(0..120).map(|t| t as f64 / 120.0).collect::<Vec<_>>()];
        for mode in [
            MeanSigma::Profile,
            MeanSigma::Fixed { mean: vec![0.2], sigma2: 1.3 },
        ] {
            let at = |d: f64| exact_loglik(&x, &design, d, &[0.6], &[], 0, &mode).unwrap().loglik;
            let (direct, cumulated) = (at(-1.0 + 1e-9), at(-1.0));
            assert!((direct - cumulated).abs() < 1e-6, "{direct} vs {cumulated}");
        }
    }

    #[test]
    fn profiled_sigma_and_mean_are_optimal() {
        let p = ArfimaParams::new(0.1, vec![], vec![], 2.0);
        let x: Vec<f64> = simulate_stationary_with(&p, 60, &mut rng_for(8, 0))
            .unwrap()
            .values
            .iter()
            .map(|v| v - 1.5)
            .collect();
        let design = vec![vec![1.0; 60]];
        let prof = exact_loglik(&x, &design, 0.1, &[], &[], 0, &MeanSigma::Profile).unwrap();
        let at = |mean: f64, s2: f64| {
            exact_loglik(
                &x,
                &design,
                0.1,
                &[],
                &[],
                0,
                &MeanSigma::Fixed {
                    mean: vec![mean],
                    sigma2: s2,
                },
            )
            .unwrap()
            .loglik
        };
        let mu = prof.profiled_mean[0];
        let s2 = prof.profiled_sigma2;
        assert_relative_eq!(at(mu, s2), prof.loglik, max_relative = 1e-12);
        for dm in [-1e-4, 1e-4] {
            assert!(at(mu + dm, s2) <= prof.loglik);
        }
        // golden-section search over sigma2
        let (mut lo, mut hi) = (0.2 * s2, 5.0 * s2);
        let r = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            let a = hi - r * (hi - lo);
            let b = lo + r * (hi - lo);
            if at(mu, a) > at(mu, b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        assert_relative_eq!(0.5 * (lo + hi), s2, max_relative = 1e-6);
    }
}

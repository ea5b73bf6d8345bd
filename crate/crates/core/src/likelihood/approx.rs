//! Whittle, SCSS and CSS objectives.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::fractional::{apply_weights, constrained_ma, frac_diff_coeffs, MaPolynomial};
use crate::process::{check_ar_stationary, spectral_shape};

const FFT_THRESHOLD: usize = 256;

/// Periodogram ordinates at the nonzero Fourier frequencies
/// `v_j = 2 pi j / n`, `j = 1..=floor(n/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    pub n: usize,
    pub freqs: Vec<f64>,
    pub ordinates: Vec<f64>,
}

impl Periodogram {
    /// Number of frequencies used by the Whittle sum, `floor((n - 1) / 2)`.
    pub fn whittle_len(&self) -> usize {
        (self.n - 1) / 2
    }
}

/// `I(v_j) = |sum_t x_t e^{-i v_j t}|^2 / (2 pi n)`.
pub fn periodogram(x: &[f64]) -> Result<Periodogram> {
    let n = x.len();
    if n < 4 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    let half = n / 2;
    let scale = 1.0 / (2.0 * PI * n as f64);
    let mut ordinates = Vec::with_capacity(half);
    if n < FFT_THRESHOLD {
        for j in 1..=half {
            let w = 2.0 * PI * j as f64 / n as f64;
            let (mut re, mut im) = (0.0, 0.0);
            for (t, v) in x.iter().enumerate() {
                let a = w * t as f64;
                re += v * a.cos();
                im -= v * a.sin();
            }
            ordinates.push((re * re + im * im) * scale);
        }
    } else {
        let mut buf: Vec<Complex<f64>> = x.iter().map(|v| Complex::new(*v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        for c in &buf[1..=half] {
            ordinates.push(c.norm_sqr() * scale);
        }
    }
    let freqs = (1..=half).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
    Ok(Periodogram {
        n,
        freqs,
        ordinates,
    })
}

/// Whittle objective for memory `d_eff` (the constrained factor already
/// folded in) with `sigma2` profiled. Returns `(loglik, sigma2_hat)`.
pub fn whittle_from_periodogram(
    pg: &Periodogram,
    d_eff: f64,
    phi: &[f64],
    theta: &[f64],
) -> Result<(f64, f64)> {
    check_ar_stationary(phi)?;
    let m = pg.whittle_len();
    if m == 0 {
        return Err(Error::InsufficientData { needed: 3, got: pg.n });
    }
    let mut ratio = 0.0;
    for k in 0..m {
        let h = spectral_shape(d_eff, phi, theta, pg.freqs[k]);
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::NumericalPsd {
                step: k,
                variance: h,
            });
        }
        ratio += pg.ordinates[k] / h;
    }
    let mf = m as f64;
    if !(ratio > 0.0) {
        return Err(Error::ZeroVariance);
    }
    // f = sigma2 h / (2 pi), sigma2_hat = (2 pi / m) sum I / h. The shape h
    // integrates to zero on the log scale over (-pi, pi) for every admissible
    // parameter, so its log term is dropped (Kolmogorov normalisation) and
    // only the scale-profiled contrast remains.
    let sigma2 = 2.0 * PI * ratio / mf;
    let loglik = -mf * (sigma2 / (2.0 * PI)).ln() - mf;
    Ok((loglik, sigma2))
}

/// Whittle log-likelihood of `x_diff` under memory `d_prime`, AR `phi`, free
/// MA `theta_free` and constrained factor `(1 - B)^j`.
pub fn whittle_loglik(
    x_diff: &[f64],
    d_prime: f64,
    phi: &[f64],
    theta_free: &[f64],
    j: usize,
) -> Result<f64> {
    if !(d_prime < 0.5) {
        return Err(Error::NonStationary { d: d_prime });
    }
    let pg = periodogram(x_diff)?;
    Ok(whittle_from_periodogram(&pg, d_prime - j as f64, phi, theta_free)?.0)
}

/// Result of a conditional-sum-of-squares evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct CssEval {
    pub loglik: f64,
    pub sigma2: f64,
    pub mean: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// ARMA residuals with zero initial conditions:
/// `e_t = w_t - sum phi_i w_{t-i} - sum theta_k e_{t-k}`.
fn arma_residuals(w: &[f64], phi: &[f64], theta: &[f64]) -> Vec<f64> {
    let mut e = Vec::with_capacity(w.len());
    for t in 0..w.len() {
        let mut v = w[t];
        for (i, p) in phi.iter().enumerate() {
            if t > i {
                v -= p * w[t - i - 1];
            }
        }
        for (k, th) in theta.iter().enumerate() {
            if t > k {
                v -= th * e[t - k - 1];
            }
        }
        e.push(v);
    }
    e
}

/// Gaussian conditional-sum-of-squares log-likelihood of `x` after the
/// truncated filter `(1 - B)^d_+` and ARMA(phi, theta) residual filtering,
/// with mean coefficients fitted by least squares on the filtered regressors.
pub fn conditional_sum_of_squares(
    x: &[f64],
    design: &[Vec<f64>],
    d: f64,
    phi: &[f64],
    theta: &[f64],
) -> Result<CssEval> {
    let n = x.len();
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let pi = frac_diff_coeffs(d, n);
    let filt = |v: &[f64]| arma_residuals(&apply_weights(v, pi.as_slice()), phi, theta);
    let mut e = filt(x);
    let mut mean = Vec::new();
    if !design.is_empty() {
        let cols: Vec<Vec<f64>> = design.iter().map(|c| filt(c)).collect();
        let z = DMatrix::from_fn(n, cols.len(), |i, k| cols[k][i]);
        let ev = DVector::from_column_slice(&e);
        let beta = z
            .clone()
            .svd(true, true)
            .solve(&ev, 1e-12)
            .map_err(|_| Error::SingularDesign)?;
        let fitted = &z * &beta;
        for (a, b) in e.iter_mut().zip(fitted.iter()) {
            *a -= b;
        }
        mean = beta.iter().copied().collect();
    }
    let sigma2 = e.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::ZeroVariance);
    }
    let loglik = -0.5 * n as f64 * ((2.0 * PI * sigma2).ln() + 1.0);
    Ok(CssEval {
        loglik,
        sigma2,
        mean,
        residuals: e,
    })
}

/// SCSS: truncated `(1 - B)^{d'}` of the differenced data followed by the
/// ARMA(p, j + q) residual filter with constrained MA `(1 - B)^j theta(B)`.
pub fn scss_loglik(
    x_diff: &[f64],
    design_diff: &[Vec<f64>],
    d_prime: f64,
    phi: &[f64],
    theta_free: &[f64],
    j: usize,
) -> Result<CssEval> {
    let theta = constrained_ma(&MaPolynomial::new(theta_free.to_vec()), j);
    conditional_sum_of_squares(x_diff, design_diff, d_prime, phi, theta.coeffs())
}

/// CSS on undifferenced data with ARMA(p, q).
pub fn css_loglik(
    y: &[f64],
    design: &[Vec<f64>],
    d: f64,
    phi: &[f64],
    theta: &[f64],
) -> Result<CssEval> {
    conditional_sum_of_squares(y, design, d, phi, theta)
}

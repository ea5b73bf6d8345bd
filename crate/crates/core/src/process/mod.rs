//! ARFIMA(p, d, q) processes: parameters, spectral density, autocovariance
//! and exact simulation.

mod acvf;
pub mod quadrature;
mod simulate;

pub use acvf::{
    arfima_acvf, autocovariance, autocovariance_expanded, fractional_noise_acvf, Autocovariance,
};
pub use quadrature::{acvf_by_quadrature, integrate_spectrum};
pub use simulate::{
    integration_order, rng_for, simulate_arfima, simulate_arfima_with, simulate_stationary,
    simulate_stationary_with, StationarySimulator,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractional::{constrained_ma, MaPolynomial};
use crate::series::MeanSpec;

/// Minimum modulus of the roots of `phi(z)` and of the free `theta(z)`.
pub const ROOT_MARGIN: f64 = 1e-8;

/// Full ARFIMA parameterization.
///
/// `phi(B) (1 - B)^d (x_t - mu_t) = theta(B) e_t` with
/// `phi(z) = 1 - sum phi_l z^l`, `theta(z) = 1 + sum theta_l z^l` and
/// `Var(e_t) = sigma2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArfimaParams {
    pub d: f64,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma2: f64,
    #[serde(default)]
    pub mean_spec: MeanSpec,
    #[serde(default)]
    pub mean_coeffs: Vec<f64>,
}

impl ArfimaParams {
    pub fn new(d: f64, phi: Vec<f64>, theta: Vec<f64>, sigma2: f64) -> Self {
        Self {
            d,
            phi,
            theta,
            sigma2,
            mean_spec: MeanSpec::None,
            mean_coeffs: Vec::new(),
        }
    }

    pub fn fractional_noise(d: f64) -> Self {
        Self::new(d, Vec::new(), Vec::new(), 1.0)
    }

    pub fn with_mean(mut self, spec: MeanSpec, coeffs: Vec<f64>) -> Self {
        self.mean_spec = spec;
        self.mean_coeffs = coeffs;
        self
    }

    /// Checks the root conditions on `phi` and the free `theta`.
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2 > 0.0) || !self.sigma2.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "innovation variance must be positive, got {}",
                self.sigma2
            )));
        }
        if !self.d.is_finite() {
            return Err(Error::InvalidArgument("d must be finite".into()));
        }
        check_ar_stationary(&self.phi)?;
        let inverse_roots = ma_inverse_roots(&self.theta);
        if inverse_roots.iter().any(|r| r.norm() * (1.0 + ROOT_MARGIN) >= 1.0) {
            return Err(Error::InvalidArgument(
                "moving-average polynomial is not invertible".into(),
            ));
        }
        Ok(())
    }
}

/// Inverse roots of `1 - sum c_l z^l`, i.e. eigenvalues of the companion
/// matrix. Trailing zero coefficients are ignored.
pub fn inverse_roots(c: &[f64]) -> Vec<Complex64> {
    let p = c.iter().rposition(|v| *v != 0.0).map_or(0, |i| i + 1);
    if p == 0 {
        return Vec::new();
    }
    if p == 1 {
        return vec![Complex64::new(c[0], 0.0)];
    }
    let mut comp = DMatrix::<f64>::zeros(p, p);
    for k in 0..p {
        comp[(0, k)] = c[k];
    }
    for k in 1..p {
        comp[(k, k - 1)] = 1.0;
    }
    comp.complex_eigenvalues()
        .iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect()
}

/// Inverse roots of the autoregressive polynomial `phi(z)`.
pub fn ar_inverse_roots(phi: &[f64]) -> Vec<Complex64> {
    inverse_roots(phi)
}

/// Inverse roots of `theta(z) = 1 + sum theta_l z^l`.
pub fn ma_inverse_roots(theta: &[f64]) -> Vec<Complex64> {
    let neg: Vec<f64> = theta.iter().map(|v| -v).collect();
    inverse_roots(&neg)
}

pub(crate) fn check_ar_stationary(phi: &[f64]) -> Result<Vec<Complex64>> {
    if phi.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonStationaryAr);
    }
    let roots = ar_inverse_roots(phi);
    if roots.iter().any(|r| r.norm() * (1.0 + ROOT_MARGIN) >= 1.0) {
        return Err(Error::NonStationaryAr);
    }
    Ok(roots)
}

fn poly_at(full: &[f64], z: Complex64) -> Complex64 {
    // Horner on coefficients of increasing powers.
    full.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Transfer-function factor `|theta(e^{-iv})|^2 / |phi(e^{-iv})|^2`.
pub(crate) fn arma_gain(phi: &[f64], theta: &[f64], nu: f64) -> f64 {
    let z = Complex64::from_polar(1.0, -nu);
    let mut ar = vec![1.0];
    ar.extend(phi.iter().map(|v| -v));
    let mut ma = vec![1.0];
    ma.extend_from_slice(theta);
    poly_at(&ma, z).norm_sqr() / poly_at(&ar, z).norm_sqr()
}

/// `|1 - e^{-iv}|^2 = 2 - 2 cos v = 4 sin^2(v/2)`.
pub(crate) fn unit_root_gain(nu: f64) -> f64 {
    let s = (0.5 * nu).sin();
    4.0 * s * s
}

/// Spectral density of the stationary representation with constrained moving
/// average `(1 - B)^j theta(B)`:
/// `f(v) = sigma2 |theta~(e^{-iv})|^2 / (2 pi |phi(e^{-iv})|^2) |1 - e^{-iv}|^{-2d}`.
pub fn spectral_density(params: &ArfimaParams, j: usize, freqs: &[f64]) -> Result<Vec<f64>> {
    if params.d >= 0.5 {
        return Err(Error::NonStationary { d: params.d });
    }
    check_ar_stationary(&params.phi)?;
    let d_eff = params.d - j as f64;
    let theta = constrained_ma(&MaPolynomial::new(params.theta.clone()), j);
    let mut out = Vec::with_capacity(freqs.len());
    for &nu in freqs {
        if !nu.is_finite() {
            return Err(Error::InvalidArgument("frequency must be finite".into()));
        }
        if nu == 0.0 {
            if d_eff > 0.0 {
                return Err(Error::PoleAtZero { d: params.d });
            }
            if d_eff < 0.0 {
                out.push(0.0);
                continue;
            }
        }
        let gain = arma_gain(&params.phi, theta.coeffs(), nu);
        let frac = if params.d == 0.0 {
            1.0
        } else {
            unit_root_gain(nu).powf(-params.d)
        };
        out.push(params.sigma2 * gain * frac / (2.0 * std::f64::consts::PI));
    }
    Ok(out)
}

/// Unit-variance spectral shape `|theta/phi|^2 |1 - e^{-iv}|^{-2 d}` (no
/// `1/2pi`), used by the Whittle objective.
pub(crate) fn spectral_shape(d: f64, phi: &[f64], theta: &[f64], nu: f64) -> f64 {
    arma_gain(phi, theta, nu) * unit_root_gain(nu).powf(-d)
}

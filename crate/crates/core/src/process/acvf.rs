//! Autocovariances of ARFIMA processes.
//!
//! The closed form expresses the autocovariance of `phi(B)^{-1} theta(B)
//! (1 - B)^{-d} e_t` through the autocovariance `g(h)` of fractional noise
//! and a partial-fraction expansion over the inverse AR roots `rho_j`:
//!
//! `gamma(h) = sigma2 sum_l psi(l) sum_j zeta_j S(h - l; rho_j)`,
//! `S(m; rho) = sum_{k in Z} rho^{|k|} g(m + k)`,
//!
//! where `psi(l)` is the autocovariance of the MA coefficients. The one-sided
//! tails of `S` are a Gauss hypergeometric series evaluated once at the top
//! lag and then propagated by first-order recursions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::{check_ar_stationary, ArfimaParams};
use crate::error::{Error, Result};
use crate::fractional::{constrained_ma, MaPolynomial};

/// Inverse AR roots closer than this use the lag-domain fallback.
pub const NEAR_ROOT_TOL: f64 = 1e-4;

const HYPER_REL_TOL: f64 = 1e-15;
const HYPER_MAX_TERMS: usize = 2_000_000;
const FALLBACK_MAX_LAGS: usize = 400_000;

/// Autocovariances `gamma(0), ..., gamma(H)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Autocovariance {
    pub values: Vec<f64>,
}

impl Autocovariance {
    pub fn max_lag(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// Autocovariance of ARFIMA(0, d, 0) with unit innovation variance, lags
/// `0..=max_lag`; valid for every `d < 0.5`.
pub fn fractional_noise_acvf(d: f64, max_lag: usize) -> Result<Vec<f64>> {
    if !(d < 0.5) {
        return Err(Error::NonStationary { d });
    }
    let mut g = Vec::with_capacity(max_lag + 1);
    let g0 = if d == 0.0 {
        1.0
    } else {
        (ln_gamma(1.0 - 2.0 * d) - 2.0 * ln_gamma(1.0 - d)).exp()
    };
    g.push(g0);
    for h in 1..=max_lag {
        let hf = h as f64;
        let prev = g[h - 1];
        g.push(prev * (hf - 1.0 + d) / (hf - d));
    }
    Ok(g)
}

/// Autocovariance of the model with constrained moving average
/// `(1 - B)^j theta(B)` and memory `params.d` (which must be `< 0.5`).
///
/// The factor `(1 - B)^j` is folded into the memory parameter: the process is
/// ARFIMA(p, d - j, q) with the free `theta`, which avoids cancellation in the
/// gamma-function ratios near `d = -0.5` and is continuous across interval
/// boundaries by construction.
pub fn autocovariance(params: &ArfimaParams, j: usize, max_lag: usize) -> Result<Autocovariance> {
    if !(params.d < 0.5) {
        return Err(Error::NonStationary { d: params.d });
    }
    let values = arfima_acvf(
        params.d - j as f64,
        &params.phi,
        &params.theta,
        params.sigma2,
        max_lag,
    )?;
    Ok(Autocovariance { values })
}

/// Same quantity as [`autocovariance`] computed with the literal constrained
/// MA coefficients `theta~(j)` and memory `params.d`.
pub fn autocovariance_expanded(
    params: &ArfimaParams,
    j: usize,
    max_lag: usize,
) -> Result<Autocovariance> {
    if !(params.d < 0.5) {
        return Err(Error::NonStationary { d: params.d });
    }
    let theta = constrained_ma(&MaPolynomial::new(params.theta.clone()), j);
    let values = arfima_acvf(params.d, &params.phi, theta.coeffs(), params.sigma2, max_lag)?;
    Ok(Autocovariance { values })
}

/// Autocovariance of ARFIMA(p, d, q) for any `d < 0.5` (no invertibility
/// requirement on `theta`).
pub fn arfima_acvf(
    d: f64,
    phi: &[f64],
    theta: &[f64],
    sigma2: f64,
    max_lag: usize,
) -> Result<Vec<f64>> {
    if !(d < 0.5) || !d.is_finite() {
        return Err(Error::NonStationary { d });
    }
    let roots = check_ar_stationary(phi)?;
    let out = if roots.is_empty() {
        ma_fractional_acvf(d, theta, max_lag)?
    } else {
        match sowell(d, &roots, theta, max_lag) {
            Ok(v) => v,
            Err(Error::NearRepeatedRoots) => lag_convolution(d, phi, &roots, theta, max_lag)?,
            Err(e) => return Err(e),
        }
    };
    Ok(out.into_iter().map(|v| v * sigma2).collect())
}

/// `psi(l) = sum_s psi_s psi_{s+l}` for `l = 0..=q` with `psi_0 = 1`.
fn ma_autocov(theta: &[f64]) -> Vec<f64> {
    let mut full = Vec::with_capacity(theta.len() + 1);
    full.push(1.0);
    full.extend_from_slice(theta);
    (0..full.len())
        .map(|l| (0..full.len() - l).map(|s| full[s] * full[s + l]).sum())
        .collect()
}

/// ARFIMA(0, d, q): `gamma(h) = sum_l psi(l) g(h - l)`.
fn ma_fractional_acvf(d: f64, theta: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let q = theta.len();
    let g = fractional_noise_acvf(d, max_lag + q)?;
    let psi = ma_autocov(theta);
    Ok((0..=max_lag)
        .map(|h| {
            let mut acc = psi[0] * g[h];
            for l in 1..=q {
                acc += psi[l] * (g[h + l] + g[h.abs_diff(l)]);
            }
            acc
        })
        .collect())
}

fn sowell(d: f64, roots: &[Complex64], theta: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let p = roots.len();
    for a in 0..p {
        for b in a + 1..p {
            if (roots[a] - roots[b]).norm() < NEAR_ROOT_TOL {
                return Err(Error::NearRepeatedRoots);
            }
        }
    }
    let q = theta.len();
    let top = max_lag + q;
    let g = fractional_noise_acvf(d, top)?;
    let one = Complex64::new(1.0, 0.0);

    // sum_j zeta_j S(m; rho_j) for m = 0..=top
    let mut u = vec![0.0f64; top + 1];
    for (jdx, &rho) in roots.iter().enumerate() {
        let mut den = one;
        for &ri in roots {
            den *= one - ri * rho;
        }
        for (mdx, &rm) in roots.iter().enumerate() {
            if mdx != jdx {
                den *= rho - rm;
            }
        }
        let zeta = rho.powi(p as i32 - 1) / den;
        let s = two_sided_sums(d, &g, rho)?;
        for (m, sv) in s.iter().enumerate() {
            u[m] += (zeta * sv).re;
        }
    }

    let psi = ma_autocov(theta);
    Ok((0..=max_lag)
        .map(|h| {
            let mut acc = psi[0] * u[h];
            for l in 1..=q {
                acc += psi[l] * (u[h + l] + u[h.abs_diff(l)]);
            }
            acc
        })
        .collect())
}

/// `S(m; rho)` for `m = 0..g.len()-1`.
fn two_sided_sums(d: f64, g: &[f64], rho: Complex64) -> Result<Vec<Complex64>> {
    if rho.im == 0.0 {
        return Ok(two_sided_sums_real(d, g, rho.re)?
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect());
    }
    let top = g.len() - 1;
    let zero = Complex64::new(0.0, 0.0);
    // A(top) = g(top) 2F1(d + top, 1; 1 - d + top; rho)
    let a = d + top as f64;
    let c = 1.0 - d + top as f64;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut converged = false;
    for k in 0..HYPER_MAX_TERMS {
        let kf = k as f64;
        term *= rho * ((a + kf) / (c + kf));
        sum += term;
        if term == zero || term.norm() <= HYPER_REL_TOL * sum.norm() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonStationaryAr);
    }
    let mut upper = vec![zero; top + 1];
    upper[top] = sum * g[top];
    for m in (0..top).rev() {
        upper[m] = rho * upper[m + 1] + g[m];
    }
    let mut lower = vec![zero; top + 1];
    lower[0] = upper[0];
    for m in 0..top {
        lower[m + 1] = rho * lower[m] + g[m + 1];
    }
    Ok((0..=top).map(|m| upper[m] + lower[m] - g[m]).collect())
}

/// [`two_sided_sums`] for a real root.
fn two_sided_sums_real(d: f64, g: &[f64], rho: f64) -> Result<Vec<f64>> {
    let top = g.len() - 1;
    let a = d + top as f64;
    let c = 1.0 - d + top as f64;
    let mut term = 1.0f64;
    let mut sum = term;
    let mut converged = false;
    for k in 0..HYPER_MAX_TERMS {
        let kf = k as f64;
        term *= rho * ((a + kf) / (c + kf));
        sum += term;
        if term == 0.0 || term.abs() <= HYPER_REL_TOL * sum.abs() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonStationaryAr);
    }
    let mut upper = vec![0.0; top + 1];
    upper[top] = sum * g[top];
    for m in (0..top).rev() {
        upper[m] = rho * upper[m + 1] + g[m];
    }
    let mut out = Vec::with_capacity(top + 1);
    let mut lower = upper[0];
    out.push(2.0 * upper[0] - g[0]);
    for m in 1..=top {
        lower = rho * lower + g[m];
        out.push(upper[m] + lower - g[m]);
    }
    Ok(out)
}

/// Autocovariance of the AR(p) part with unit innovations, lags `0..=len-1`,
/// via the Yule-Walker system.
fn ar_acvf(phi: &[f64], len: usize) -> Result<Vec<f64>> {
    let p = phi.len();
    // Unknowns c_0..c_p:  c_k - sum_i phi_i c_{|k-i|} = [k == 0]
    let mut a = nalgebra::DMatrix::<f64>::zeros(p + 1, p + 1);
    let mut b = nalgebra::DVector::<f64>::zeros(p + 1);
    b[0] = 1.0;
    for k in 0..=p {
        a[(k, k)] += 1.0;
        for i in 1..=p {
            a[(k, k.abs_diff(i))] -= phi[i - 1];
        }
    }
    let sol = a.lu().solve(&b).ok_or(Error::NonStationaryAr)?;
    let mut c: Vec<f64> = sol.iter().copied().collect();
    c.truncate(len.max(1));
    while c.len() < len {
        let k = c.len();
        let v = (1..=p).map(|i| phi[i - 1] * c[k - i]).sum();
        c.push(v);
    }
    Ok(c)
}

/// Fallback for (near-)repeated AR roots: convolve the AR autocovariance with
/// the ARFIMA(0, d, q) autocovariance, truncating where the AR part has
/// decayed below rounding level.
fn lag_convolution(
    d: f64,
    phi: &[f64],
    roots: &[Complex64],
    theta: &[f64],
    max_lag: usize,
) -> Result<Vec<f64>> {
    let rmax = roots.iter().map(|r| r.norm()).fold(0.0f64, f64::max);
    let cutoff = if rmax < 1e-12 {
        phi.len() + 1
    } else {
        // generous: polynomial prefactors from repeated roots
        let base = (1e-18f64).ln() / rmax.ln();
        (base * 1.5) as usize + 10 * phi.len() + 10
    };
    if cutoff > FALLBACK_MAX_LAGS {
        return Err(Error::NonStationaryAr);
    }
    let c = ar_acvf(phi, cutoff + 1)?;
    let w = ma_fractional_acvf(d, theta, max_lag + cutoff)?;
    Ok((0..=max_lag)
        .map(|h| {
            let mut acc = c[0] * w[h];
            for k in 1..=cutoff {
                acc += c[k] * (w[h + k] + w[h.abs_diff(k)]);
            }
            acc
        })
        .collect())
}

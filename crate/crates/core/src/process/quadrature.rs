//! Adaptive Gauss-Kronrod integration of the spectral density.
//!
//! Independent of the closed-form autocovariance; used as its oracle and for
//! the Parseval identity.

use std::f64::consts::PI;

use super::{arma_gain, check_ar_stationary, unit_root_gain};
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive G7-K15 quadrature of `f` on `[a, b]` to the requested absolute
/// or relative tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    let mut segments = vec![{
        let (v, e) = gk15(&f, a, b);
        (a, b, v, e)
    }];
    for _ in 0..20_000 {
        let total: f64 = segments.iter().map(|s| s.2).sum();
        let err: f64 = segments.iter().map(|s| s.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let (idx, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = segments.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        segments.push((lo, mid, v1, e1));
        segments.push((mid, hi, v2, e2));
    }
    segments.iter().map(|s| s.2).sum()
}

/// `2 int_0^pi cos(h v) f(v) dv` for the ARFIMA(p, d, q) density with the
/// given innovation variance, for `h = 0..=max_lag`.
///
/// Near the origin the substitution `v = v0 u^a` with `a = k / (1 - 2d)`
/// removes the algebraic endpoint behaviour.
pub fn acvf_by_quadrature(
    d: f64,
    phi: &[f64],
    theta: &[f64],
    sigma2: f64,
    max_lag: usize,
) -> Result<Vec<f64>> {
    if !(d < 0.5) {
        return Err(Error::NonStationary { d });
    }
    check_ar_stationary(phi)?;
    let density = |nu: f64| {
        sigma2 * arma_gain(phi, theta, nu) * unit_root_gain(nu).powf(-d) / (2.0 * PI)
    };
    let nu0 = 0.1;
    let alpha = if d >= 0.0 { 1.0 } else { 2.0 } / (1.0 - 2.0 * d);
    let mut out = Vec::with_capacity(max_lag + 1);
    for h in 0..=max_lag {
        let hf = h as f64;
        let near = integrate(
            |u: f64| {
                if u <= 0.0 {
                    return 0.0;
                }
                let nu = nu0 * u.powf(alpha);
                (hf * nu).cos() * density(nu) * nu0 * alpha * u.powf(alpha - 1.0)
            },
            0.0,
            1.0,
            1e-15,
            1e-13,
        );
        let far = integrate(|nu: f64| (hf * nu).cos() * density(nu), nu0, PI, 1e-15, 1e-13);
        out.push(2.0 * (near + far));
    }
    Ok(out)
}

/// `int_{-pi}^{pi} f(v) dv` of the density (the Parseval side of `gamma(0)`).
pub fn integrate_spectrum(d: f64, phi: &[f64], theta: &[f64], sigma2: f64) -> Result<f64> {
    Ok(acvf_by_quadrature(d, phi, theta, sigma2, 0)?[0])
}

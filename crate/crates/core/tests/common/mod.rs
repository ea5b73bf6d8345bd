//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

/// AR or MA coefficients with inverse roots of modulus at most `max_mod`,
/// in the convention `phi(B) = 1 - phi_1 B - ...` (`sign = -1`) or
/// `theta(B) = 1 + theta_1 B + ...` (`sign = +1`).
pub fn random_poly<R: Rng>(rng: &mut R, order: usize, max_mod: f64, sign: f64) -> Vec<f64> {
    let roots: Vec<Complex64> = match order {
        0 => vec![],
        1 => vec![Complex64::new(rng.random_range(-max_mod..max_mod), 0.0)],
        _ => {
            if rng.random_bool(0.5) {
                vec![
                    Complex64::new(rng.random_range(-max_mod..max_mod), 0.0),
                    Complex64::new(rng.random_range(-max_mod..max_mod), 0.0),
                ]
            } else {
                let r = rng.random_range(0.1..max_mod);
                let w = rng.random_range(0.2..PI - 0.2);
                vec![Complex64::from_polar(r, w), Complex64::from_polar(r, -w)]
            }
        }
    };
    // prod (1 - r B)
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for r in &roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, v) in c.iter().enumerate() {
            next[k] += v;
            next[k + 1] -= v * r;
        }
        c = next;
    }
    // AR: phi_k = -c_k; MA: theta_k = c_k
    c[1..].iter().map(|v| if sign < 0.0 { -v.re } else { v.re }).collect()
}

/// Gaussian log-density of `x` with mean `mu` and Toeplitz covariance from
/// `gamma`, by dense Cholesky.
pub fn dense_logpdf(x: &[f64], mu: &[f64], gamma: &[f64]) -> f64 {
    let n = x.len();
    let cov = DMatrix::from_fn(n, n, |i, j| gamma[i.abs_diff(j)]);
    let chol = cov.cholesky().expect("positive definite");
    let r = DVector::from_fn(n, |i, _| x[i] - mu[i]);
    let z = chol.l().solve_lower_triangular(&r).unwrap();
    let logdet: f64 = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    -0.5 * (n as f64 * (2.0 * PI).ln() + logdet + z.dot(&z))
}

/// Profile log-likelihood with GLS mean on `design` and `sigma2 = Q / n`,
/// for covariance `sigma2 * Toeplitz(gamma_unit)`, by dense linear algebra.
pub fn dense_profile(x: &[f64], design: &[Vec<f64>], gamma_unit: &[f64]) -> f64 {
    let n = x.len();
    let cov = DMatrix::from_fn(n, n, |i, j| gamma_unit[i.abs_diff(j)]);
    let inv = cov.clone().try_inverse().unwrap();
    let y = DVector::from_column_slice(x);
    let resid = if design.is_empty() {
        y.clone()
    } else {
        let xm = DMatrix::from_fn(n, design.len(), |i, k| design[k][i]);
        let a = xm.transpose() * &inv * &xm;
        let b = xm.transpose() * &inv * &y;
        let beta = a.lu().solve(&b).unwrap();
        &y - xm * beta
    };
    let q = (resid.transpose() * &inv * &resid)[(0, 0)];
    let logdet = cov.cholesky().unwrap().l().diagonal().iter().map(|v| 2.0 * v.ln()).sum::<f64>();
    let nf = n as f64;
    -0.5 * nf * (2.0 * PI * q / nf).ln() - 0.5 * logdet - 0.5 * nf
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; k];
    let mut w = vec![0.0; k];
    for i in 0..k {
        let mut z = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=k {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let dp = k as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (mut q0, mut q1) = (1.0, z);
                for j in 2..=k {
                    let jf = j as f64;
                    let q2 = ((2.0 * jf - 1.0) * z * q1 - (jf - 1.0) * q0) / jf;
                    q0 = q1;
                    q1 = q2;
                }
                let dq = k as f64 * (z * q1 - q0) / (z * z - 1.0);
                x[i] = z;
                w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                break;
            }
        }
    }
    (x, w)
}

/// Adaptive composite Gauss-Legendre: a panel is accepted when the 20-point
/// rule and the sum over its halves agree to `tol` (absolute).
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let (x, w) = gauss_legendre(20);
    let rule = |lo: f64, hi: f64| -> f64 {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        x.iter().zip(&w).map(|(xi, wi)| wi * f(c + h * xi)).sum::<f64>() * h
    };
    let mut stack = vec![(a, b, rule(a, b), 0usize)];
    let mut total = 0.0;
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (l, r) = (rule(lo, mid), rule(mid, hi));
        if (l + r - whole).abs() <= tol * (hi - lo) / (b - a) || depth > 40 {
            total += l + r;
        } else {
            stack.push((lo, mid, l, depth + 1));
            stack.push((mid, hi, r, depth + 1));
        }
    }
    total
}

/// ARFIMA(p, d, q) autocovariance at lag `h` by integrating the spectral
/// density over (0, pi] after the substitution `v = pi u^k`,
/// `k = 1 / (1 - 2d)` for `d > 0`, which removes the pole at zero.
pub fn acvf_by_spectrum(d: f64, phi: &[f64], theta: &[f64], sigma2: f64, h: usize, tol: f64) -> f64 {
    let k = if d > 0.0 { 1.0 / (1.0 - 2.0 * d) } else { 1.0 };
    let gain = |v: f64| -> f64 {
        let z = Complex64::from_polar(1.0, -v);
        let mut ar = Complex64::new(1.0, 0.0);
        let mut zp = Complex64::new(1.0, 0.0);
        for c in phi {
            zp *= z;
            ar -= c * zp;
        }
        let mut ma = Complex64::new(1.0, 0.0);
        zp = Complex64::new(1.0, 0.0);
        for c in theta {
            zp *= z;
            ma += c * zp;
        }
        ma.norm_sqr() / ar.norm_sqr()
    };
    let f = |u: f64| -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let v = PI * u.powf(k);
        // (2 sin(v/2))^{-2d} * pi k u^{k-1}, written to avoid 0 * inf
        let s = 2.0 * (0.5 * v).sin();
        let jac = if d > 0.0 {
            // u^{k-1} v^{-2d} = pi^{-2d} u^{k-1-2dk} = pi^{-2d}
            PI * k * PI.powf(-2.0 * d) * (v / s).powf(2.0 * d)
        } else {
            PI * k * u.powf(k - 1.0) * s.powf(-2.0 * d)
        };
        sigma2 / (2.0 * PI) * gain(v) * jac * (h as f64 * v).cos()
    };
    2.0 * integrate(&f, 0.0, 1.0, tol)
}

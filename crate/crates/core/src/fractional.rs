//! Fractional and integer differencing operators and moving-average
//! polynomial algebra.
//!
//! Weights follow the convention `(1 - B)^d x_t = sum_l pi_l x_{t-l}` with
//! `pi_0 = 1`, i.e. `pi_l = (-1)^l C(d, l)`.

use crate::error::{Error, Result};

/// Coefficients `pi_0 .. pi_{L-1}` of the binomial expansion of `(1 - B)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FracDiffCoeffs {
    d: f64,
    coeffs: Vec<f64>,
}

impl FracDiffCoeffs {
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coeffs
    }
}

/// Moving-average polynomial `theta(B) = 1 + sum_l theta_l B^l`.
///
/// Only `theta_1 .. theta_Q` are stored; the unit leading coefficient is
/// implicit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MaPolynomial {
    coeffs: Vec<f64>,
}

impl MaPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Full coefficient vector including the leading one.
    pub fn full(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(1.0);
        out.extend_from_slice(&self.coeffs);
        out
    }

    /// Exact product of two monic polynomials.
    pub fn mul(&self, other: &MaPolynomial) -> MaPolynomial {
        let prod = convolve(&self.full(), &other.full());
        MaPolynomial::new(prod[1..].to_vec())
    }
}

/// Full (untruncated) convolution of two coefficient sequences.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (k, &bk) in b.iter().enumerate() {
            out[i + k] += ai * bk;
        }
    }
    out
}

/// Weights of `(1 - B)^d` by the forward recursion
/// `pi_l = pi_{l-1} (l - 1 - d) / l`.
pub fn frac_diff_coeffs(d: f64, len: usize) -> FracDiffCoeffs {
    let mut coeffs = Vec::with_capacity(len);
    if len > 0 {
        coeffs.push(1.0);
    }
    for l in 1..len {
        let lf = l as f64;
        let prev = coeffs[l - 1];
        coeffs.push(prev * (lf - 1.0 - d) / lf);
    }
    FracDiffCoeffs { d, coeffs }
}

/// Length-preserving truncated fractional difference `(1 - B)^d_+ x`.
///
/// Element `t` (zero based) is `sum_{l=0}^{t} pi_l x_{t-l}`.
pub fn apply_truncated_frac_diff(x: &[f64], d: f64) -> Vec<f64> {
    let pi = frac_diff_coeffs(d, x.len());
    apply_weights(x, pi.as_slice())
}

/// Truncated filter with precomputed weights (`weights.len() >= x.len()`).
pub fn apply_weights(x: &[f64], weights: &[f64]) -> Vec<f64> {
    let n = x.len();
    debug_assert!(weights.len() >= n);
    (0..n)
        .map(|t| {
            let mut acc = 0.0;
            for l in 0..=t {
                acc += weights[l] * x[t - l];
            }
            acc
        })
        .collect()
}

/// `m`-th integer difference; the result has `n - m` elements.
pub fn integer_diff(x: &[f64], m: usize) -> Result<Vec<f64>> {
    if x.len() <= m {
        return Err(Error::InsufficientData {
            needed: m,
            got: x.len(),
        });
    }
    let mut out = x.to_vec();
    for _ in 0..m {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}

/// `r`-fold cumulative sum (the inverse of `integer_diff` with zero initial
/// conditions).
pub fn cumulative_sum(x: &[f64], r: usize) -> Vec<f64> {
    let mut out = x.to_vec();
    for _ in 0..r {
        let mut acc = 0.0;
        for v in out.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    out
}

/// Coefficients of `(1 - B)^j theta(B)`: the constrained moving-average
/// polynomial of order `j + Q`.
pub fn constrained_ma(theta: &MaPolynomial, j: usize) -> MaPolynomial {
    let mut full = theta.full();
    for _ in 0..j {
        full = convolve(&full, &[1.0, -1.0]);
    }
    MaPolynomial::new(full[1..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::function::gamma::ln_gamma;

    // ln |Gamma(x)| with the reflection formula for negative arguments.
    fn ln_abs_gamma(x: f64) -> f64 {
        if x > 0.0 {
            ln_gamma(x)
        } else {
            std::f64::consts::PI.ln() - (std::f64::consts::PI * x).sin().abs().ln() - ln_gamma(1.0 - x)
        }
    }

    fn gamma_sign(x: f64) -> f64 {
        if x > 0.0 || (x.floor() as i64) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    // (-1)^l C(d, l) = Gamma(l - d) / (Gamma(-d) Gamma(l + 1)), non-integer d.
    fn binomial_weight(d: f64, l: usize) -> f64 {
        let lf = l as f64;
        let log_mag = ln_abs_gamma(lf - d) - ln_abs_gamma(-d) - ln_gamma(lf + 1.0);
        gamma_sign(lf - d) * gamma_sign(-d) * log_mag.exp()
    }

    #[test]
    fn integer_orders() {
        assert_eq!(frac_diff_coeffs(1.0, 4).as_slice(), &[1.0, -1.0, 0.0, 0.0]);
        assert_eq!(frac_diff_coeffs(-1.0, 4).as_slice(), &[1.0, 1.0, 1.0, 1.0]);
        let two = frac_diff_coeffs(2.0, 6);
        assert_eq!(two.as_slice(), &[1.0, -2.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn half_order_matches_log_gamma() {
        let pi = frac_diff_coeffs(0.5, 4);
        let expected = [1.0, -0.5, -0.125, -0.0625];
        for (a, b) in pi.as_slice().iter().zip(expected) {
            assert_relative_eq!(*a, b, max_relative = 1e-15);
        }
        for &d in &[0.3, -0.45, 1.7, -2.2, 0.05] {
            let pi = frac_diff_coeffs(d, 60);
            for l in 1..60 {
                let direct = binomial_weight(d, l);
                assert_relative_eq!(pi.as_slice()[l], direct, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn truncated_operator_examples() {
        assert_eq!(apply_truncated_frac_diff(&[1.0, 0.0, 0.0], 1.0), vec![1.0, -1.0, 0.0]);
        assert_eq!(apply_truncated_frac_diff(&[1.0, 1.0, 1.0], 0.0), vec![1.0, 1.0, 1.0]);
        // 3 - 0.5 * 2 - 0.125 * 1
        let y = apply_truncated_frac_diff(&[1.0, 2.0, 3.0], 0.5);
        assert_relative_eq!(y[0], 1.0);
        assert_relative_eq!(y[1], 1.5);
        assert_relative_eq!(y[2], 1.875);
    }

    #[test]
    fn integer_differences() {
        let x = [1.0, 3.0, 6.0, 10.0];
        assert_eq!(integer_diff(&x, 1).unwrap(), vec![2.0, 3.0, 4.0]);
        assert_eq!(integer_diff(&x, 2).unwrap(), vec![1.0, 1.0]);
        assert_eq!(integer_diff(&[5.0, 5.0, 5.0], 0).unwrap(), vec![5.0, 5.0, 5.0]);
        assert!(matches!(
            integer_diff(&x, 4),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn constrained_ma_examples() {
        let id = MaPolynomial::identity();
        assert_eq!(constrained_ma(&id, 2).coeffs(), &[-2.0, 1.0]);
        let th = MaPolynomial::new(vec![0.5]);
        assert_eq!(constrained_ma(&th, 1).coeffs(), &[-0.5, -0.5]);
        let th = MaPolynomial::new(vec![0.3]);
        assert_eq!(constrained_ma(&th, 0).coeffs(), &[0.3]);
    }

    #[test]
    fn cumulative_sum_inverts_difference() {
        let z = [0.3, -1.2, 0.7, 2.0, -0.1];
        let y = cumulative_sum(&z, 1);
        let back = integer_diff(&y, 1).unwrap();
        for (a, b) in back.iter().zip(&z[1..]) {
            assert_relative_eq!(*a, *b, max_relative = 1e-12);
        }
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn truncated_inverse_identity(
                x in prop::collection::vec(-10.0f64..10.0, 1..60),
                d in -3.0f64..3.0,
            ) {
                let y = apply_truncated_frac_diff(&apply_truncated_frac_diff(&x, d), -d);
                let scale = x.iter().fold(1.0f64, |a, v| a.max(v.abs()));
                for (a, b) in y.iter().zip(&x) {
                    prop_assert!((a - b).abs() <= 1e-8 * scale);
                }
            }

            #[test]
            fn semigroup(d1 in -2.0f64..2.0, d2 in -2.0f64..2.0, len in 1usize..80) {
                let a = frac_diff_coeffs(d1, len);
                let b = frac_diff_coeffs(d2, len);
                let ab = frac_diff_coeffs(d1 + d2, len);
                let conv = convolve(a.as_slice(), b.as_slice());
                for l in 0..len {
                    let tol = 1e-10 * (1.0 + ab.as_slice()[l].abs());
                    prop_assert!((conv[l] - ab.as_slice()[l]).abs() <= tol);
                }
            }

            #[test]
            fn integer_diff_composes(
                x in prop::collection::vec(-1e3f64..1e3, 6..40),
                m in 0usize..5,
            ) {
                let direct = integer_diff(&x, m).unwrap();
                let mut step = x.clone();
                for _ in 0..m {
                    step = integer_diff(&step, 1).unwrap();
                }
                prop_assert_eq!(direct, step);
            }

            #[test]
            fn constrained_ma_composes(
                theta in prop::collection::vec(-0.9f64..0.9, 0..3),
                j1 in 0usize..4,
                j2 in 0usize..4,
            ) {
                let th = MaPolynomial::new(theta);
                let once = constrained_ma(&th, j1 + j2);
                let twice = constrained_ma(&constrained_ma(&th, j1), j2);
                prop_assert_eq!(once, twice);
            }
        }
    }
}

//! Durbin-Levinson recursion for symmetric positive-definite Toeplitz
//! systems, processing any number of right-hand sides in one pass.

use crate::error::{Error, Result};

/// Prediction variances below this fraction of `gamma(0)` are treated as a
/// numerical loss of positive definiteness.
pub const PSD_FLOOR: f64 = 1e-12;

/// Output of [`toeplitz_quadratics`].
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzQuadratics {
    /// `log |Gamma|` for `Gamma = Toeplitz(gamma(0..n-1))`.
    pub log_det: f64,
    /// `inner[a][b] = v_a' Gamma^{-1} v_b`.
    pub inner: Vec<Vec<f64>>,
    /// One-step prediction variances in the units of `gamma`.
    pub prediction_variances: Vec<f64>,
}

/// `sum_i a[i] * b[len - 1 - i]` with independent partial sums.
#[inline]
pub(crate) fn dot_rev(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.rchunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[3];
        acc[1] += x[1] * y[2];
        acc[2] += x[2] * y[1];
        acc[3] += x[3] * y[0];
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb.iter().rev()) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// One row update of the Durbin-Levinson recursion on autocorrelations.
///
/// `coef` holds `phi_{t-1,1..t-1}` on entry and `phi_{t,1..t}` on exit;
/// returns the new normalised prediction variance.
#[inline]
pub(crate) fn levinson_step(r: &[f64], t: usize, coef: &mut Vec<f64>, v_prev: f64) -> Result<f64> {
    // r[t] - sum_{k=1}^{t-1} coef[k-1] r[t-k]
    let acc = r[t] - dot_rev(&coef[..t - 1], &r[1..t]);
    let kappa = acc / v_prev;
    let shrink = 1.0 - kappa * kappa;
    if !(shrink > 0.0) || !kappa.is_finite() {
        return Err(Error::NumericalPsd {
            step: t,
            variance: v_prev * shrink,
        });
    }
    // phi_{t,k} = phi_{t-1,k} - kappa phi_{t-1,t-k}, updated pairwise in place
    let (mut lo, mut hi) = (0usize, t.saturating_sub(2));
    while lo < hi {
        let a = coef[lo];
        let b = coef[hi];
        coef[lo] = a - kappa * b;
        coef[hi] = b - kappa * a;
        lo += 1;
        hi -= 1;
    }
    if t >= 2 && lo == hi {
        coef[lo] *= 1.0 - kappa;
    }
    coef.push(kappa);
    let v = v_prev * shrink;
    if v < PSD_FLOOR || !v.is_finite() {
        return Err(Error::NumericalPsd { step: t, variance: v });
    }
    Ok(v)
}

/// Log-determinant of `Gamma = Toeplitz(gamma)` and the quadratic forms
/// `v' Gamma^{-1} w` for all pairs of the supplied columns, in `O(n^2)` per
/// column.
pub fn toeplitz_quadratics(gamma: &[f64], columns: &[&[f64]]) -> Result<ToeplitzQuadratics> {
    let n = columns.first().map_or(gamma.len(), |c| c.len());
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::InvalidArgument("columns differ in length".into()));
    }
    if gamma.len() < n {
        return Err(Error::InvalidArgument(format!(
            "need {n} autocovariances, got {}",
            gamma.len()
        )));
    }
    if n == 0 {
        return Ok(ToeplitzQuadratics {
            log_det: 0.0,
            inner: vec![vec![0.0; columns.len()]; columns.len()],
            prediction_variances: Vec::new(),
        });
    }
    let g0 = gamma[0];
    if !(g0 > 0.0) || !g0.is_finite() {
        return Err(Error::NumericalPsd { step: 0, variance: g0 });
    }
    let r: Vec<f64> = gamma[..n].iter().map(|g| g / g0).collect();
    let ncol = columns.len();

    let mut coef: Vec<f64> = Vec::with_capacity(n);
    let mut v = 1.0;
    let mut log_det = 0.0;
    let mut variances = Vec::with_capacity(n);
    let mut inner = vec![vec![0.0; ncol]; ncol];
    let mut innov = vec![0.0; ncol];

    for t in 0..n {
        if t > 0 {
            v = levinson_step(&r, t, &mut coef, v)?;
        }
        variances.push(v * g0);
        log_det += v.ln();
        for (c, col) in columns.iter().enumerate() {
            innov[c] = col[t] - dot_rev(&coef[..t], &col[..t]);
        }
        for a in 0..ncol {
            for b in a..ncol {
                inner[a][b] += innov[a] * innov[b] / v;
            }
        }
    }
    for a in 0..ncol {
        for b in a..ncol {
            inner[a][b] /= g0;
            inner[b][a] = inner[a][b];
        }
    }
    Ok(ToeplitzQuadratics {
        log_det: log_det + n as f64 * g0.ln(),
        inner,
        prediction_variances: variances,
    })
}

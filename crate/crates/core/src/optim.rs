//! Derivative-free optimizers, a Newton polish and the partial-autocorrelation
//! parameterization of stationary/invertible polynomials.

use nalgebra::{DMatrix, DVector};

/// Result of a bounded scalar maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMax {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximizes `f` on `[a, b]` by golden-section search with parabolic
/// interpolation (Brent), then compares against the two endpoints.
///
/// Non-finite objective values are treated as `-inf`.
pub fn brent_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> ScalarMax {
    let mut evals = 0usize;
    let mut g = |x: f64| {
        evals += 1;
        let v = f(x);
        if v.is_finite() {
            -v
        } else {
            f64::INFINITY
        }
    };
    if !(b > a) {
        let v = g(a);
        return ScalarMax {
            x: a,
            value: -v,
            evaluations: evals,
        };
    }
    const CGOLD: f64 = 0.381_966_011_250_105_1;
    let sqrt_eps = f64::EPSILON.sqrt();
    let (mut lo, mut hi) = (a, b);
    let mut x = lo + CGOLD * (hi - lo);
    let (mut w, mut v) = (x, x);
    let mut fx = g(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        let mid = 0.5 * (lo + hi);
        let tol1 = sqrt_eps * x.abs() + xtol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (hi - lo) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (lo - x) && p < q * (hi - x) {
                d = p / q;
                let u = x + d;
                if (u - lo) < tol2 || (hi - u) < tol2 {
                    d = if mid >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= mid { lo - x } else { hi - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = g(u);
        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    let mut best = (x, fx);
    for end in [a, b] {
        let fe = g(end);
        if fe < best.1 {
            best = (end, fe);
        }
    }
    ScalarMax {
        x: best.0,
        value: -best.1,
        evaluations: evals,
    }
}

/// Result of a Nelder-Mead maximization.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexMax {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximizes `f` over `R^k` by the Nelder-Mead simplex method starting from
/// `x0` with initial edge length `step`.
pub fn nelder_mead_max<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    ftol: f64,
    xtol: f64,
    max_evals: usize,
) -> SimplexMax {
    let k = x0.len();
    let evals = std::cell::Cell::new(0usize);
    let mut g = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_finite() {
            -v
        } else {
            f64::INFINITY
        }
    };
    if k == 0 {
        let v = g(x0);
        return SimplexMax {
            x: Vec::new(),
            value: -v,
            evaluations: 1,
        };
    }
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..k {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| g(p)).collect();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    loop {
        let mut order: Vec<usize> = (0..=k).collect();
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let fspread = (vals[k] - vals[0]).abs();
        let xspread = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        let fscale = ftol * (1.0 + vals[0].abs().min(1e300));
        if (vals[0].is_finite() && fspread <= fscale && xspread <= xtol.max(1e-14))
            || evals.get() >= max_evals
        {
            break;
        }
        let centroid: Vec<f64> = (0..k)
            .map(|c| pts[..k].iter().map(|p| p[c]).sum::<f64>() / k as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[k])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let xr = along(-alpha);
        let fr = g(&xr);
        if fr < vals[0] {
            let xe = along(-gamma);
            let fe = g(&xe);
            if fe < fr {
                pts[k] = xe;
                vals[k] = fe;
            } else {
                pts[k] = xr;
                vals[k] = fr;
            }
        } else if fr < vals[k - 1] {
            pts[k] = xr;
            vals[k] = fr;
        } else {
            let (xc, fc) = if fr < vals[k] {
                let xc = along(-rho);
                let fc = g(&xc);
                (xc, fc)
            } else {
                let xc = along(rho);
                let fc = g(&xc);
                (xc, fc)
            };
            if fc < vals[k].min(fr) {
                pts[k] = xc;
                vals[k] = fc;
            } else {
                for i in 1..=k {
                    let shrunk: Vec<f64> = pts[i]
                        .iter()
                        .zip(&pts[0])
                        .map(|(p, b)| b + sigma * (p - b))
                        .collect();
                    vals[i] = g(&shrunk);
                    pts[i] = shrunk;
                }
            }
        }
    }
    let best = (0..=k).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    SimplexMax {
        x: pts[best].clone(),
        value: -vals[best],
        evaluations: evals.get(),
    }
}

/// Refines a maximizer found by a derivative-free search with Newton steps
/// on central-difference derivatives (step `h`). Value comparisons alone
/// cannot place a flat maximum more precisely than about
/// `sqrt(eps |f| / curvature)`; derivatives can. Steps longer than
/// `max_step`, non-concave local models and steps that lower `f` beyond
/// round-off end the refinement.
pub fn newton_polish<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    h: f64,
    max_step: f64,
    iterations: usize,
) -> SimplexMax {
    let k = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut evals = 1;
    for _ in 0..iterations {
        if k == 0 || !fx.is_finite() {
            break;
        }
        let mut probe = |steps: &[(usize, f64)]| {
            let mut y = x.clone();
            for &(i, s) in steps {
                y[i] += s;
            }
            evals += 1;
            f(&y)
        };
        let mut grad = DVector::zeros(k);
        let mut neg_hess = DMatrix::zeros(k, k);
        for i in 0..k {
            let (up, down) = (probe(&[(i, h)]), probe(&[(i, -h)]));
            grad[i] = (up - down) / (2.0 * h);
            neg_hess[(i, i)] = -(up - 2.0 * fx + down) / (h * h);
            for j in 0..i {
                let v = (probe(&[(i, h), (j, h)]) - probe(&[(i, h), (j, -h)])
                    - probe(&[(i, -h), (j, h)])
                    + probe(&[(i, -h), (j, -h)]))
                    / (4.0 * h * h);
                neg_hess[(i, j)] = -v;
                neg_hess[(j, i)] = -v;
            }
        }
        if grad.iter().chain(neg_hess.iter()).any(|v| !v.is_finite()) {
            break;
        }
        let Some(chol) = neg_hess.cholesky() else {
            break;
        };
        let step = chol.solve(&grad);
        let len = step.amax();
        if !(len <= max_step) {
            break;
        }
        let y: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
        let fy = f(&y);
        evals += 1;
        if !(fy >= fx - 8.0 * f64::EPSILON * (1.0 + fx.abs())) {
            break;
        }
        x = y;
        fx = fy;
        if len < 1e-13 {
            break;
        }
    }
    SimplexMax {
        x,
        value: fx,
        evaluations: evals,
    }
}

/// Maps partial autocorrelations in `(-1, 1)` to the coefficients
/// `c_1..c_k` of a polynomial `1 - sum c_l z^l` with all roots outside the
/// unit circle (Durbin-Levinson recursion).
pub fn pacf_to_coeffs(r: &[f64]) -> Vec<f64> {
    let mut c: Vec<f64> = Vec::with_capacity(r.len());
    for (k, &rk) in r.iter().enumerate() {
        let prev = c.clone();
        for i in 0..k {
            c[i] = prev[i] - rk * prev[k - 1 - i];
        }
        c.push(rk);
    }
    c
}

/// Inverse of [`pacf_to_coeffs`]; `None` if the polynomial is not strictly
/// stationary.
pub fn coeffs_to_pacf(c: &[f64]) -> Option<Vec<f64>> {
    let mut cur = c.to_vec();
    let mut r = vec![0.0; c.len()];
    for k in (0..c.len()).rev() {
        let rk = cur[k];
        if !(rk.abs() < 1.0) {
            return None;
        }
        r[k] = rk;
        let denom = 1.0 - rk * rk;
        let prev: Vec<f64> = (0..k).map(|i| (cur[i] + rk * cur[k - 1 - i]) / denom).collect();
        cur = prev;
    }
    Some(r)
}

/// Unconstrained vector `u = (u_ar, u_ma)` to `(phi, theta)`:
/// `phi = pacf_to_coeffs(tanh(u_ar))`, `theta = -pacf_to_coeffs(tanh(u_ma))`.
pub fn unconstrained_to_arma(u: &[f64], p: usize) -> (Vec<f64>, Vec<f64>) {
    let r_ar: Vec<f64> = u[..p].iter().map(|v| v.tanh()).collect();
    let r_ma: Vec<f64> = u[p..].iter().map(|v| v.tanh()).collect();
    let phi = pacf_to_coeffs(&r_ar);
    let theta = pacf_to_coeffs(&r_ma).into_iter().map(|v| -v).collect();
    (phi, theta)
}

/// Inverse of [`unconstrained_to_arma`].
pub fn arma_to_unconstrained(phi: &[f64], theta: &[f64]) -> Option<Vec<f64>> {
    let r_ar = coeffs_to_pacf(phi)?;
    let neg: Vec<f64> = theta.iter().map(|v| -v).collect();
    let r_ma = coeffs_to_pacf(&neg)?;
    Some(r_ar.iter().chain(&r_ma).map(|r| r.atanh()).collect())
}

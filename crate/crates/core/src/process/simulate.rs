//! Exact Gaussian simulation by the innovations form of the Durbin-Levinson
//! recursion.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{arfima_acvf, ArfimaParams};
use crate::error::{Error, Result};
use crate::fractional::cumulative_sum;
use crate::series::TimeSeries;
use crate::toeplitz::levinson_step;

/// Counter-based generator for `(seed, stream)`; different streams of the
/// same seed are independent and can be drawn in any order.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Cached recursion coefficients for repeated exact simulation of one
/// stationary model at a fixed length.
#[derive(Debug, Clone)]
pub struct StationarySimulator {
    n: usize,
    // row t holds phi_{t,1..t}, packed
    coef: Vec<f64>,
    offsets: Vec<usize>,
    sd: Vec<f64>,
}

impl StationarySimulator {
    /// Prepares simulation of the zero-mean stationary ARFIMA model with
    /// `params.d < 0.5`.
    pub fn new(params: &ArfimaParams, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InsufficientData { needed: 0, got: 0 });
        }
        if !(params.d < 0.5) {
            return Err(Error::NonStationary { d: params.d });
        }
        params.validate()?;
        let gamma = arfima_acvf(params.d, &params.phi, &params.theta, params.sigma2, n - 1)?;
        let g0 = gamma[0];
        let r: Vec<f64> = gamma.iter().map(|g| g / g0).collect();
        let mut coef = Vec::with_capacity(n * (n - 1) / 2);
        let mut offsets = Vec::with_capacity(n);
        let mut sd = Vec::with_capacity(n);
        let mut row: Vec<f64> = Vec::with_capacity(n);
        let mut v = 1.0;
        for t in 0..n {
            if t > 0 {
                v = levinson_step(&r, t, &mut row, v)?;
            }
            offsets.push(coef.len());
            coef.extend_from_slice(&row);
            sd.push((v * g0).sqrt());
        }
        Ok(Self {
            n,
            coef,
            offsets,
            sd,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Maps standard-normal draws `z` to a sample path.
    pub fn transform(&self, z: &[f64]) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.n);
        for t in 0..self.n {
            let row = &self.coef[self.offsets[t]..self.offsets[t] + t];
            let mut pred = 0.0;
            for k in 1..=t {
                pred += row[k - 1] * x[t - k];
            }
            x.push(pred + self.sd[t] * z[t]);
        }
        x
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z: Vec<f64> = (0..self.n).map(|_| StandardNormal.sample(rng)).collect();
        self.transform(&z)
    }
}

fn add_mean(params: &ArfimaParams, x: &mut [f64]) -> Result<()> {
    let design = params.mean_spec.design(x.len())?;
    if design.is_empty() {
        return Ok(());
    }
    if design.len() != params.mean_coeffs.len() {
        return Err(Error::InvalidArgument(format!(
            "mean specification has {} columns but {} coefficients were given",
            design.len(),
            params.mean_coeffs.len()
        )));
    }
    for (col, b) in design.iter().zip(&params.mean_coeffs) {
        for (xi, c) in x.iter_mut().zip(col) {
            *xi += b * c;
        }
    }
    Ok(())
}

/// Exact Gaussian sample of the stationary model (`params.d < 0.5`) from
/// stream 0 of `seed`, with the mean added afterwards.
pub fn simulate_stationary(params: &ArfimaParams, n: usize, seed: u64) -> Result<TimeSeries> {
    let mut rng = rng_for(seed, 0);
    simulate_stationary_with(params, n, &mut rng)
}

/// [`simulate_stationary`] with a caller-supplied generator. Memory is
/// `O(n)`; use [`StationarySimulator`] for repeated draws.
pub fn simulate_stationary_with<R: rand::Rng + ?Sized>(
    params: &ArfimaParams,
    n: usize,
    rng: &mut R,
) -> Result<TimeSeries> {
    if !(params.d < 0.5) {
        return Err(Error::NonStationary { d: params.d });
    }
    if n == 0 {
        return Err(Error::InsufficientData { needed: 0, got: 0 });
    }
    params.validate()?;
    let gamma = arfima_acvf(params.d, &params.phi, &params.theta, params.sigma2, n - 1)?;
    let g0 = gamma[0];
    let r: Vec<f64> = gamma.iter().map(|g| g / g0).collect();
    let mut row: Vec<f64> = Vec::with_capacity(n);
    let mut v = 1.0;
    let mut x: Vec<f64> = Vec::with_capacity(n);
    for t in 0..n {
        if t > 0 {
            v = levinson_step(&r, t, &mut row, v)?;
        }
        let z: f64 = StandardNormal.sample(rng);
        let mut pred = 0.0;
        for k in 1..=t {
            pred += row[k - 1] * x[t - k];
        }
        x.push(pred + (v * g0).sqrt() * z);
    }
    add_mean(params, &mut x)?;
    Ok(TimeSeries::new(x))
}

/// Number of cumulative sums used to reach memory `d` from a stationary
/// series.
pub fn integration_order(d: f64) -> usize {
    if d < 0.5 {
        0
    } else {
        (d + 0.5).floor() as usize
    }
}

/// Simulates ARFIMA(p, d, q) for any finite `d`: stationary draws for
/// `d < 0.5`, otherwise `r` cumulative sums of a stationary ARFIMA(p, d - r, q)
/// sample; the mean is added last.
pub fn simulate_arfima(params: &ArfimaParams, n: usize, seed: u64) -> Result<TimeSeries> {
    let mut rng = rng_for(seed, 0);
    simulate_arfima_with(params, n, &mut rng)
}

pub fn simulate_arfima_with<R: rand::Rng + ?Sized>(
    params: &ArfimaParams,
    n: usize,
    rng: &mut R,
) -> Result<TimeSeries> {
    if !params.d.is_finite() {
        return Err(Error::NonStationary { d: params.d });
    }
    let r = integration_order(params.d);
    let mut base = params.clone();
    base.d = params.d - r as f64;
    base.mean_spec = Default::default();
    base.mean_coeffs.clear();
    let stat = simulate_stationary_with(&base, n, rng)?;
    let mut x = cumulative_sum(&stat.values, r);
    add_mean(params, &mut x)?;
    Ok(TimeSeries::new(x))
}

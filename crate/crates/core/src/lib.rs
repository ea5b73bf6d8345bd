//! Estimation of possibly non-stationary ARFIMA(p, d, q) models by adaptive
//! overdifferencing.
//!
//! A search over `d < d_bar` is split into unit-length intervals. In each
//! interval the data are differenced `m` times and the remaining
//! non-invertible part is carried by a constrained moving-average factor
//! `(1 - B)^j`, so every likelihood evaluation is a stationary one.

pub mod adaptive;
pub mod datasets;
pub mod error;
pub mod estimation;
pub mod fractional;
pub mod likelihood;
pub mod optim;
pub mod process;
pub mod series;
pub mod study;
pub mod toeplitz;
pub mod uncertainty;

pub use error::{Error, Result};
pub use estimation::{fit_bounded, plan_bounds, ArmaOrder, BoundPlan, FitResult};
pub use likelihood::Objective;
pub use series::{MeanSpec, TimeSeries};

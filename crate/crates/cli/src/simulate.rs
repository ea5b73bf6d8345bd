use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Result};
use arfima_core::process::{simulate_arfima, ArfimaParams};
use arfima_core::MeanSpec;
use clap::Args;

use crate::{emit, fresh_seed};

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Memory parameter (any real; d >= 0.5 integrates a stationary draw).
    #[arg(long)]
    d: f64,
    /// Series length.
    #[arg(long)]
    n: usize,
    /// Generator seed; a fresh one is chosen and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Autoregressive coefficients, comma separated.
    #[arg(long, value_delimiter = ',')]
    phi: Vec<f64>,
    /// Moving-average coefficients, comma separated.
    #[arg(long, value_delimiter = ',')]
    theta: Vec<f64>,
    /// Innovation variance.
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    /// Constant mean added to the series.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

pub fn run(a: SimulateArgs) -> Result<()> {
    if a.n == 0 {
        bail!("--n must be at least 1");
    }
    if !a.d.is_finite() {
        bail!("--d must be finite");
    }
    let seed = match a.seed {
        Some(s) => s,
        None => {
            let s = fresh_seed();
            eprintln!("seed: {s}");
            s
        }
    };
    let mut params = ArfimaParams::new(a.d, a.phi, a.theta, a.sigma2);
    if a.mu != 0.0 {
        params = params.with_mean(MeanSpec::Constant, vec![a.mu]);
    }
    params.validate()?;
    let series = simulate_arfima(&params, a.n, seed)?;
    let mut text = String::with_capacity(a.n * 24);
    text.push_str("t,value\n");
    for (t, v) in series.values.iter().enumerate() {
        writeln!(text, "{},{v:?}", t + 1)?;
    }
    emit(a.output.as_deref(), &text)
}

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Result};
use arfima_core::estimation::profile_curve;
use arfima_core::ArmaOrder;
use clap::Args;

use crate::{emit, ModelArgs};

/// Marker written for grid points without a profile value.
const MISSING: &str = "NA";

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Upper bound on d (>= 0.5).
    #[arg(long)]
    dbar: f64,
    /// First grid point.
    #[arg(long)]
    from: f64,
    /// Last grid point (inclusive when hit exactly).
    #[arg(long)]
    to: f64,
    /// Grid spacing.
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// `from, from + step, ...` up to `to`, rounded to 12 decimals so that
/// printed grid values are clean.
pub fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !from.is_finite() || !to.is_finite() || to < from {
        bail!("need finite --from <= --to and --step > 0");
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        bail!("grid of {count} points is too large");
    }
    Ok((0..count)
        .map(|i| ((from + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

pub fn run(a: ProfileArgs) -> Result<()> {
    if !(a.dbar >= 0.5) || !a.dbar.is_finite() {
        bail!("--dbar must be at least 0.5, got {}", a.dbar);
    }
    let points = grid(a.from, a.to, a.step)?;
    let loaded = a.model.load()?;
    let mean_spec = a.model.mean_spec(loaded.series.len())?;
    let order = ArmaOrder::new(a.model.p, a.model.q);
    let curve = profile_curve(loaded.series.as_slice(), &mean_spec, order, a.dbar, a.model.likelihood, &points)?;
    let mut text = String::from("d,loglik\n");
    for (d, l) in curve {
        match l {
            Some(v) => writeln!(text, "{d},{v:?}")?,
            None => writeln!(text, "{d},{MISSING}")?,
        }
    }
    emit(a.output.as_deref(), &text)
}

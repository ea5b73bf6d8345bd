//! Objective functions: exact Gaussian likelihood and the Whittle, SCSS and
//! CSS approximations.

mod approx;
mod exact;

pub use approx::{
    conditional_sum_of_squares, css_loglik, periodogram, scss_loglik, whittle_from_periodogram,
    whittle_loglik, CssEval, Periodogram,
};
pub use exact::{exact_loglik, gls, MeanSigma, ProfileEval};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Which likelihood drives the estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Exact,
    Whittle,
    Scss,
    Css,
}

impl Objective {
    pub fn label(self) -> &'static str {
        match self {
            Objective::Exact => "exact",
            Objective::Whittle => "whittle",
            Objective::Scss => "scss",
            Objective::Css => "css",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Objective::Exact),
            "whittle" => Ok(Objective::Whittle),
            "scss" => Ok(Objective::Scss),
            "css" => Ok(Objective::Css),
            other => Err(Error::InvalidArgument(format!(
                "unknown likelihood '{other}' (expected exact, whittle, scss or css)"
            ))),
        }
    }
}

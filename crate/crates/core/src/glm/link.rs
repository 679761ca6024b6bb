use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Link function `g` with `g(μ) = η`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Link {
    Identity,
    Log,
    Inverse,
    /// `η = 1/μ²`.
    InverseSquared,
}

impl Link {
    pub const ALL: [Link; 4] = [Link::Identity, Link::Log, Link::Inverse, Link::InverseSquared];

    pub fn name(self) -> &'static str {
        match self {
            Link::Identity => "identity",
            Link::Log => "log",
            Link::Inverse => "inverse",
            Link::InverseSquared => "inverse_squared",
        }
    }

    pub fn link(self, mu: f64) -> f64 {
        match self {
            Link::Identity => mu,
            Link::Log => mu.ln(),
            Link::Inverse => 1.0 / mu,
            Link::InverseSquared => 1.0 / (mu * mu),
        }
    }

    /// `g⁻¹(η)`; NaN where `η` has no preimage.
    pub fn inverse(self, eta: f64) -> f64 {
        match self {
            Link::Identity => eta,
            Link::Log => eta.exp(),
            Link::Inverse => 1.0 / eta,
            Link::InverseSquared => {
                if eta > 0.0 {
                    1.0 / eta.sqrt()
                } else {
                    f64::NAN
                }
            }
        }
    }

    /// `dη/dμ`.
    pub fn derivative(self, mu: f64) -> f64 {
        match self {
            Link::Identity => 1.0,
            Link::Log => 1.0 / mu,
            Link::Inverse => -1.0 / (mu * mu),
            Link::InverseSquared => -2.0 / (mu * mu * mu),
        }
    }

    /// Whether the link itself requires `μ > 0`.
    pub fn needs_positive_mean(self) -> bool {
        matches!(self, Link::Log | Link::InverseSquared)
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Link {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "identity" => Ok(Link::Identity),
            "log" => Ok(Link::Log),
            "inverse" => Ok(Link::Inverse),
            "inverse_squared" | "1/mu^2" => Ok(Link::InverseSquared),
            _ => Err(Error::InvalidArgument(alloc::format!("unknown link {s:?}"))),
        }
    }
}

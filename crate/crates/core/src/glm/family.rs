use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use super::Link;
use crate::{Error, Result};

/// Response distribution of a generalized linear model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Family {
    Gaussian,
    Gamma,
    InverseGaussian,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Gaussian, Family::Gamma, Family::InverseGaussian];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Gamma => "gamma",
            Family::InverseGaussian => "inverse_gaussian",
        }
    }

    /// `V(μ)`.
    pub fn variance(self, mu: f64) -> f64 {
        match self {
            Family::Gaussian => 1.0,
            Family::Gamma => mu * mu,
            Family::InverseGaussian => mu * mu * mu,
        }
    }

    pub fn canonical_link(self) -> Link {
        match self {
            Family::Gaussian => Link::Identity,
            Family::Gamma => Link::Inverse,
            Family::InverseGaussian => Link::InverseSquared,
        }
    }

    /// Links used for this family in the simulation study.
    pub fn links(self) -> &'static [Link] {
        match self {
            Family::Gaussian | Family::Gamma => &[Link::Identity, Link::Inverse, Link::Log],
            Family::InverseGaussian => &[Link::Identity, Link::Inverse, Link::Log, Link::InverseSquared],
        }
    }

    /// Whether means and responses must be strictly positive.
    pub fn positive(self) -> bool {
        !matches!(self, Family::Gaussian)
    }

    pub fn valid_mean(self, mu: f64) -> bool {
        mu.is_finite() && (!self.positive() || mu > 0.0)
    }

    pub fn valid_response(self, y: f64) -> bool {
        self.valid_mean(y)
    }

    /// Unit deviance `d(y, μ)`, non-negative and zero iff `y = μ`.
    pub fn unit_deviance(self, y: f64, mu: f64) -> f64 {
        match self {
            Family::Gaussian => (y - mu) * (y - mu),
            Family::Gamma => 2.0 * (-(y / mu).ln() + (y - mu) / mu),
            Family::InverseGaussian => (y - mu) * (y - mu) / (y * mu * mu),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "gaussian" | "normal" => Ok(Family::Gaussian),
            "gamma" => Ok(Family::Gamma),
            "inverse_gaussian" | "inversegaussian" | "ig" => Ok(Family::InverseGaussian),
            _ => Err(Error::InvalidArgument(alloc::format!("unknown family {s:?}"))),
        }
    }
}

/// Total deviance `Σ d(y_i, μ_i)`.
pub fn deviance(family: Family, y: &[f64], mu: &[f64]) -> Result<f64> {
    if y.len() != mu.len() {
        return Err(Error::LengthMismatch(y.len(), mu.len()));
    }
    if y.iter().any(|v| !family.valid_response(*v)) {
        return Err(Error::ResponseDomain(family.name()));
    }
    if mu.iter().any(|v| !family.valid_mean(*v)) {
        return Err(Error::LinkDomain("mean outside the family domain"));
    }
    Ok(y.iter().zip(mu).map(|(a, b)| family.unit_deviance(*a, *b).max(0.0)).sum())
}

use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use crate::stats::median;
use crate::wavelet::CoefficientPyramid;
use crate::{Error, Result};

/// Scale factor turning the MAD of Gaussian noise into its standard deviation.
pub const MAD_SCALE: f64 = 0.6745;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ThresholdRule {
    #[default]
    Soft,
    Hard,
}

impl ThresholdRule {
    /// Applies the rule to one coefficient.
    pub fn apply(self, d: f64, lambda: f64) -> f64 {
        if d.abs() <= lambda {
            return 0.0;
        }
        match self {
            ThresholdRule::Hard => d,
            ThresholdRule::Soft => d.signum() * (d.abs() - lambda),
        }
    }
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdRule::Soft => "soft",
            ThresholdRule::Hard => "hard",
        })
    }
}

impl FromStr for ThresholdRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "soft" => Ok(ThresholdRule::Soft),
            "hard" => Ok(ThresholdRule::Hard),
            _ => Err(Error::InvalidArgument(alloc::format!("unknown threshold rule {s:?}"))),
        }
    }
}

/// Universal threshold with the noise level estimated from the finest details.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdPolicy {
    pub rule: ThresholdRule,
}

impl ThresholdPolicy {
    pub fn soft() -> Self {
        Self { rule: ThresholdRule::Soft }
    }

    pub fn hard() -> Self {
        Self { rule: ThresholdRule::Hard }
    }
}

/// `median(|d_finest|) / 0.6745`.
pub fn mad_sigma(pyr: &CoefficientPyramid) -> f64 {
    let abs: alloc::vec::Vec<f64> = pyr.finest().iter().map(|d| d.abs()).collect();
    if abs.is_empty() {
        return 0.0;
    }
    median(&abs) / MAD_SCALE
}

/// `σ̂ √(2 ln 2^J)`.
pub fn universal_lambda(pyr: &CoefficientPyramid) -> f64 {
    let n = (1usize << pyr.max_level) as f64;
    mad_sigma(pyr) * (2.0 * n.ln()).sqrt()
}

/// Thresholds every detail level with the universal `λ`.
pub fn threshold(pyr: &CoefficientPyramid, policy: ThresholdPolicy) -> CoefficientPyramid {
    threshold_with(pyr, policy.rule, universal_lambda(pyr))
}

/// Thresholds every detail level with an explicit `λ`; the approximation is untouched.
pub fn threshold_with(pyr: &CoefficientPyramid, rule: ThresholdRule, lambda: f64) -> CoefficientPyramid {
    let lambda = lambda.max(0.0);
    let mut out = pyr.clone();
    for d in out.details.iter_mut().flatten() {
        *d = rule.apply(*d, lambda);
    }
    out.thresholded = true;
    out
}

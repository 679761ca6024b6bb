use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Gamma, InverseGaussian, Normal};

use crate::glm::{Family, Link};
use crate::nls::builtin;
use crate::{Error, Result};

/// Strength of the relation between response and predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Dependence {
    Weak,
    Moderate,
    Strong,
}

impl Dependence {
    pub const ALL: [Dependence; 3] = [Dependence::Weak, Dependence::Moderate, Dependence::Strong];

    pub fn name(self) -> &'static str {
        match self {
            Dependence::Weak => "weak",
            Dependence::Moderate => "moderate",
            Dependence::Strong => "strong",
        }
    }
}

impl fmt::Display for Dependence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dependence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "weak" => Ok(Dependence::Weak),
            "moderate" => Ok(Dependence::Moderate),
            "strong" => Ok(Dependence::Strong),
            _ => Err(Error::InvalidArgument(format!("unknown dependence level {s:?}"))),
        }
    }
}

/// How the noise parameter of a nonlinear generator is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum NoiseReading {
    /// `N(0, v)` has variance `v`.
    #[default]
    Variance,
    /// `N(0, v)` has standard deviation `v`.
    StdDev,
}

impl NoiseReading {
    pub fn std_dev(self, v: f64) -> f64 {
        match self {
            NoiseReading::Variance => v.sqrt(),
            NoiseReading::StdDev => v,
        }
    }
}

/// Setting of one true nonlinear model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlsGenerator {
    pub model_id: &'static str,
    pub x_range: (f64, f64),
    pub beta: &'static [f64],
    /// Noise parameter for weak, moderate and strong dependence.
    pub noise: [f64; 3],
}

impl NlsGenerator {
    pub fn noise(&self, dependence: Dependence) -> f64 {
        match dependence {
            Dependence::Weak => self.noise[0],
            Dependence::Moderate => self.noise[1],
            Dependence::Strong => self.noise[2],
        }
    }
}

const NLS_GENERATORS: [NlsGenerator; 4] = [
    NlsGenerator { model_id: "f1", x_range: (-6.0, 6.0), beta: &[2.0, 3.0, 1.0], noise: [0.2, 0.1, 0.01] },
    NlsGenerator { model_id: "f2", x_range: (1.0, 4.0), beta: &[0.25, 1.0], noise: [0.06, 0.03, 0.005] },
    NlsGenerator { model_id: "f3", x_range: (5.0, 210.0), beta: &[20.0, 120.0], noise: [10.0, 5.0, 1.0] },
    NlsGenerator { model_id: "f4", x_range: (0.0, 4.0), beta: &[4.0, 1.0], noise: [2.0, 1.0, 0.1] },
];

/// Ids of the models with a generator setting.
pub const NLS_TRUE_MODELS: [&str; 4] = ["f1", "f2", "f3", "f4"];

pub fn nls_generator(model_id: &str) -> Option<NlsGenerator> {
    NLS_GENERATORS.iter().find(|g| g.model_id == model_id).copied()
}

/// A simulated data set with its noiseless mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Predictor, sorted ascending.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub mean: Vec<f64>,
}

fn sorted_uniform<R: Rng + ?Sized>(n: usize, (lo, hi): (f64, f64), rng: &mut R) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
    x.sort_by(f64::total_cmp);
    x
}

/// `y = f(x, β) + ε` with `ε ~ N(0, sd²)` and `x` uniform on the generator's range.
pub fn generate_nls<R: Rng + ?Sized>(generator: &NlsGenerator, n: usize, sd: f64, rng: &mut R) -> Result<Sample> {
    let model = builtin(generator.model_id).ok_or_else(|| Error::UnknownModel(generator.model_id.into()))?;
    if !(sd >= 0.0) || !sd.is_finite() {
        return Err(Error::Generation(format!("invalid noise level {sd}")));
    }
    let x = sorted_uniform(n, generator.x_range, rng);
    let mean: Vec<f64> = x.iter().map(|v| model.eval(*v, generator.beta)).collect();
    let y = if sd == 0.0 {
        mean.clone()
    } else {
        let noise = Normal::new(0.0, sd).map_err(|e| Error::Generation(format!("{e}")))?;
        mean.iter().map(|m| m + noise.sample(rng)).collect()
    };
    Ok(Sample { x, y, mean })
}

/// Data from one of the true nonlinear models at the given dependence level.
pub fn generate_s1<R: Rng + ?Sized>(
    model_id: &str,
    n: usize,
    dependence: Dependence,
    reading: NoiseReading,
    rng: &mut R,
) -> Result<Sample> {
    let g = nls_generator(model_id).ok_or_else(|| Error::UnknownModel(model_id.into()))?;
    generate_nls(&g, n, reading.std_dev(g.noise(dependence)), rng)
}

/// Predictor range of the GLM scenarios.
pub const GLM_X_RANGE: (f64, f64) = (0.5, 1.5);
/// Predictor value where the gap is placed.
pub const GAP_POSITION: f64 = 1.0;
const MAX_REGENERATIONS: usize = 10;

/// Coefficients `(β0, β1)` of the GLM scenarios. The mean stays positive and
/// finite over the predictor range under every link, and the non-identity
/// links bend enough over it to be told apart.
pub fn glm_beta(link: Link) -> (f64, f64) {
    match link {
        Link::Identity => (0.5, 1.0),
        Link::Log => (0.0, 2.0),
        Link::Inverse | Link::InverseSquared => (0.0, 1.0),
    }
}

/// Coefficient of variation of the response at `x = 1` for each dependence level.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct GlmDispersion {
    pub weak: f64,
    pub moderate: f64,
    pub strong: f64,
}

impl Default for GlmDispersion {
    fn default() -> Self {
        Self { weak: 0.3, moderate: 0.15, strong: 0.05 }
    }
}

impl GlmDispersion {
    pub fn cv(&self, dependence: Dependence) -> f64 {
        match dependence {
            Dependence::Weak => self.weak,
            Dependence::Moderate => self.moderate,
            Dependence::Strong => self.strong,
        }
    }
}

/// A GLM data generator. The noise is set through the coefficient of
/// variation `cv` at `x = 1`: Gaussian responses get constant `sd = cv·μ(1)`,
/// gamma responses shape `1/cv²`, inverse Gaussian responses shape `μ(1)/cv²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlmGenerator {
    pub family: Family,
    pub link: Link,
    pub beta: (f64, f64),
    pub cv: f64,
    /// Jump added to the linear predictor for `x > 1`.
    pub gap: f64,
}

impl GlmGenerator {
    pub fn new(family: Family, link: Link, cv: f64) -> Self {
        Self { family, link, beta: glm_beta(link), cv, gap: 0.0 }
    }

    /// Sets the jump to `fraction` of the predictor's range over `[0.5, 1.5]`.
    pub fn with_gap_fraction(mut self, fraction: f64) -> Self {
        self.gap = fraction * self.beta.1.abs() * (GLM_X_RANGE.1 - GLM_X_RANGE.0);
        self
    }

    pub fn eta(&self, x: f64) -> f64 {
        let jump = if x > GAP_POSITION { self.gap } else { 0.0 };
        self.beta.0 + self.beta.1 * x + jump
    }

    pub fn mean(&self, x: f64) -> f64 {
        self.link.inverse(self.eta(x))
    }
}

/// Draws a GLM data set. The predictor is redrawn a bounded number of times
/// if some mean falls outside the family domain.
pub fn generate_glm<R: Rng + ?Sized>(generator: &GlmGenerator, n: usize, rng: &mut R) -> Result<Sample> {
    let GlmGenerator { family, link, cv, .. } = *generator;
    if !(cv > 0.0) || !cv.is_finite() {
        return Err(Error::Generation(format!("coefficient of variation must be positive, got {cv}")));
    }
    let centre = link.inverse(generator.beta.0 + generator.beta.1 * GAP_POSITION);
    if !family.valid_mean(centre) || centre <= 0.0 {
        return Err(Error::Generation(format!("mean at x = 1 is {centre}")));
    }
    for _ in 0..MAX_REGENERATIONS {
        let x = sorted_uniform(n, GLM_X_RANGE, rng);
        let mean: Vec<f64> = x.iter().map(|v| generator.mean(*v)).collect();
        if mean.iter().any(|m| !family.valid_mean(*m) || (link.needs_positive_mean() && *m <= 0.0)) {
            continue;
        }
        let y = draw_responses(family, cv, centre, &mean, rng)?;
        return Ok(Sample { x, y, mean });
    }
    Err(Error::Generation(format!("{family}/{link}: mean left the family domain in {MAX_REGENERATIONS} draws")))
}

fn draw_responses<R: Rng + ?Sized>(
    family: Family,
    cv: f64,
    centre: f64,
    mean: &[f64],
    rng: &mut R,
) -> Result<Vec<f64>> {
    let gen_err = |e: &dyn fmt::Display| Error::Generation(format!("{e}"));
    match family {
        Family::Gaussian => {
            let noise = Normal::new(0.0, cv * centre).map_err(|e| gen_err(&e))?;
            Ok(mean.iter().map(|m| m + noise.sample(rng)).collect())
        }
        Family::Gamma => {
            let shape = 1.0 / (cv * cv);
            mean.iter().map(|m| Gamma::new(shape, m / shape).map(|d| d.sample(rng)).map_err(|e| gen_err(&e))).collect()
        }
        Family::InverseGaussian => {
            let shape = centre / (cv * cv);
            mean.iter()
                .map(|m| InverseGaussian::new(*m, shape).map(|d| d.sample(rng)).map_err(|e| gen_err(&e)))
                .collect()
        }
    }
}

/// Link-identification data: no gap.
pub fn generate_s3<R: Rng + ?Sized>(
    family: Family,
    link: Link,
    n: usize,
    dependence: Dependence,
    dispersion: &GlmDispersion,
    rng: &mut R,
) -> Result<Sample> {
    generate_glm(&GlmGenerator::new(family, link, dispersion.cv(dependence)), n, rng)
}

/// Data whose linear predictor jumps by `gap_fraction` of its range at `x = 1`.
pub fn generate_s4_gap<R: Rng + ?Sized>(
    family: Family,
    link: Link,
    n: usize,
    dependence: Dependence,
    dispersion: &GlmDispersion,
    gap_fraction: f64,
    rng: &mut R,
) -> Result<Sample> {
    let g = GlmGenerator::new(family, link, dispersion.cv(dependence)).with_gap_fraction(gap_fraction);
    generate_glm(&g, n, rng)
}

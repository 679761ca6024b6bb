use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::generators::{
    generate_s1, generate_s3, generate_s4_gap, nls_generator, Dependence, GlmDispersion, NoiseReading, Sample,
};
use crate::glm::{fit_glm, intercept_design, Family, Link};
use crate::nls::{builtin, builtin_catalog, NlsModel};
use crate::regression::WaveletConfig;
use crate::select::{glm_id, score, wavelet_reference, wp_select, CandidateModel};
use crate::{Error, Result};

/// The simulation studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Scenario {
    /// Nonlinear truth, whole catalog as candidates.
    S1,
    /// `f2` truth against the near-identical `f24`.
    S2,
    /// GLM truth, candidates are the links of the true family.
    S3,
    /// GLM with a jump in the predictor: true GLM against the wavelet fit.
    S4,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::S1 => "s1",
            Scenario::S2 => "s2",
            Scenario::S3 => "s3",
            Scenario::S4 => "s4",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s1" => Ok(Scenario::S1),
            "s2" => Ok(Scenario::S2),
            "s3" => Ok(Scenario::S3),
            "s4" => Ok(Scenario::S4),
            _ => Err(Error::InvalidArgument(format!("unknown scenario {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Truth {
    Nonlinear(String),
    Glm { family: Family, link: Link },
}

impl Truth {
    /// Candidate id the truth is scored as.
    pub fn id(&self) -> String {
        match self {
            Truth::Nonlinear(id) => id.clone(),
            Truth::Glm { family, link } => glm_id(*family, *link),
        }
    }
}

/// One cell of a simulation study.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub truth: Truth,
    pub n: usize,
    pub dependence: Dependence,
    pub replications: usize,
    pub seed: u64,
    pub wavelet: WaveletConfig,
    pub noise_reading: NoiseReading,
    pub dispersion: GlmDispersion,
    /// Jump in the linear predictor, as a fraction of its range (s4 only).
    pub gap_fraction: f64,
    /// Score the s4 fits against the observed response instead of the true mean.
    pub compare_to_observed: bool,
    /// Added to the builtin catalog in s1.
    pub extra_models: Vec<Arc<dyn NlsModel>>,
}

pub const DEFAULT_SEED: u64 = 20_240_611;
pub const DEFAULT_GAP_FRACTION: f64 = 0.3;

impl ScenarioConfig {
    pub fn new(scenario: Scenario, truth: Truth, n: usize, dependence: Dependence) -> Self {
        Self {
            scenario,
            truth,
            n,
            dependence,
            replications: 100,
            seed: DEFAULT_SEED,
            wavelet: WaveletConfig::default(),
            noise_reading: NoiseReading::default(),
            dispersion: GlmDispersion::default(),
            gap_fraction: DEFAULT_GAP_FRACTION,
            compare_to_observed: false,
            extra_models: Vec::new(),
        }
    }

    pub fn s1(model_id: &str, n: usize, dependence: Dependence) -> Self {
        Self::new(Scenario::S1, Truth::Nonlinear(model_id.into()), n, dependence)
    }

    pub fn s2(n: usize, dependence: Dependence) -> Self {
        Self::new(Scenario::S2, Truth::Nonlinear("f2".into()), n, dependence)
    }

    pub fn s3(family: Family, link: Link, n: usize, dependence: Dependence) -> Self {
        Self::new(Scenario::S3, Truth::Glm { family, link }, n, dependence)
    }

    pub fn s4(family: Family, link: Link, n: usize, dependence: Dependence) -> Self {
        Self::new(Scenario::S4, Truth::Glm { family, link }, n, dependence)
    }

    pub fn with_replications(mut self, replications: usize) -> Self {
        self.replications = replications;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_gap_fraction(mut self, gap_fraction: f64) -> Self {
        self.gap_fraction = gap_fraction;
        self
    }

    /// Identifies the cell. Also mixed into the random stream, so distinct
    /// cells draw independent data under one seed.
    pub fn label(&self) -> String {
        let base = format!("{}/{}/{}/n{}", self.scenario, self.truth.id(), self.dependence, self.n);
        match self.scenario {
            Scenario::S4 => format!("{base}/gap{}", self.gap_fraction),
            _ => base,
        }
    }

    /// Candidates competing in a selection scenario; empty for s4.
    pub fn candidates(&self) -> Result<Vec<CandidateModel>> {
        match (self.scenario, &self.truth) {
            (Scenario::S1, _) => {
                let mut c: Vec<CandidateModel> = builtin_catalog().into_iter().map(CandidateModel::nonlinear).collect();
                c.extend(self.extra_models.iter().cloned().map(CandidateModel::nonlinear));
                Ok(c)
            }
            (Scenario::S2, _) => ["f2", "f24"]
                .iter()
                .map(|id| builtin(id).map(CandidateModel::nonlinear).ok_or_else(|| Error::UnknownModel((*id).into())))
                .collect(),
            (Scenario::S3, Truth::Glm { family, .. }) => {
                Ok(family.links().iter().map(|l| CandidateModel::glm(*family, *l)).collect())
            }
            (Scenario::S3, Truth::Nonlinear(_)) => Err(Error::InvalidArgument("s3 needs a GLM truth".into())),
            (Scenario::S4, _) => Ok(Vec::new()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match (self.scenario, &self.truth) {
            (Scenario::S1, Truth::Nonlinear(id)) => nls_generator(id).is_some(),
            (Scenario::S2, Truth::Nonlinear(id)) => id == "f2",
            (Scenario::S3 | Scenario::S4, Truth::Glm { family, link }) => family.links().contains(link),
            _ => false,
        };
        if !ok {
            return Err(Error::InvalidArgument(format!("truth {} is not valid in {}", self.truth.id(), self.scenario)));
        }
        if self.n < crate::select::MIN_OBSERVATIONS {
            return Err(Error::InvalidArgument(format!("n = {} is below {}", self.n, crate::select::MIN_OBSERVATIONS)));
        }
        if !self.gap_fraction.is_finite() {
            return Err(Error::InvalidArgument("gap fraction must be finite".into()));
        }
        Ok(())
    }

    /// Draws the data of replicate `index`.
    pub fn sample(&self, index: u64) -> Result<Sample> {
        let mut rng = replicate_rng(self.seed, &self.label(), index);
        match (self.scenario, &self.truth) {
            (Scenario::S1 | Scenario::S2, Truth::Nonlinear(id)) => {
                generate_s1(id, self.n, self.dependence, self.noise_reading, &mut rng)
            }
            (Scenario::S3, Truth::Glm { family, link }) => {
                generate_s3(*family, *link, self.n, self.dependence, &self.dispersion, &mut rng)
            }
            (Scenario::S4, Truth::Glm { family, link }) => {
                generate_s4_gap(*family, *link, self.n, self.dependence, &self.dispersion, self.gap_fraction, &mut rng)
            }
            _ => Err(Error::InvalidArgument(format!("truth {} is not valid in {}", self.truth.id(), self.scenario))),
        }
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Generator of replicate `index`: keyed by the seed and the cell label,
/// one ChaCha stream per replicate, so results do not depend on the order
/// or the thread replicates run on.
pub fn replicate_rng(seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&fnv1a(label).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum ReplicateOutcome {
    Selection { winner_rmse: String, winner_mae: String, null_fraction_by_level: Vec<f64> },
    Comparison { glm_rmse: f64, glm_mae: f64, wavelet_rmse: f64, wavelet_mae: f64, null_fraction_by_level: Vec<f64> },
    Failed(String),
}

impl ReplicateOutcome {
    fn null_fraction_by_level(&self) -> Option<&[f64]> {
        match self {
            ReplicateOutcome::Selection { null_fraction_by_level, .. }
            | ReplicateOutcome::Comparison { null_fraction_by_level, .. } => Some(null_fraction_by_level),
            ReplicateOutcome::Failed(_) => None,
        }
    }
}

fn try_replicate(config: &ScenarioConfig, index: u64) -> Result<ReplicateOutcome> {
    let sample = config.sample(index)?;
    let design = intercept_design(&sample.x);
    if config.scenario == Scenario::S4 {
        let Truth::Glm { family, link } = config.truth else {
            return Err(Error::InvalidArgument("s4 needs a GLM truth".into()));
        };
        let glm = fit_glm(&design, &sample.y, family, link)?;
        let reference = wavelet_reference(&design, &sample.y, &config.wavelet)?;
        let target = if config.compare_to_observed { &sample.y } else { &sample.mean };
        let (glm_rmse, glm_mae) = score(&glm.mu, target)?;
        let (wavelet_rmse, wavelet_mae) = score(&reference.fitted, target)?;
        return Ok(ReplicateOutcome::Comparison {
            glm_rmse,
            glm_mae,
            wavelet_rmse,
            wavelet_mae,
            null_fraction_by_level: reference.fit.null_fraction_by_level,
        });
    }
    let report = wp_select(&design, &sample.y, &config.candidates()?, &config.wavelet)?;
    Ok(ReplicateOutcome::Selection {
        null_fraction_by_level: report.null_fraction_by_level().to_vec(),
        winner_rmse: report.winner_rmse,
        winner_mae: report.winner_mae,
    })
}

/// Runs replicate `index`. Depends only on the config and the index.
pub fn run_replicate(config: &ScenarioConfig, index: u64) -> ReplicateOutcome {
    try_replicate(config, index).unwrap_or_else(|e| ReplicateOutcome::Failed(e.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReplicateFailure {
    pub index: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MonteCarloResult {
    pub label: String,
    pub scenario: Scenario,
    pub truth: String,
    pub n: usize,
    pub dependence: Dependence,
    pub replications: usize,
    pub completed: usize,
    pub failures: Vec<ReplicateFailure>,
    /// Winner of each completed selection replicate, in index order.
    pub winners_rmse: Vec<String>,
    pub winners_mae: Vec<String>,
    /// Percent of completed replicates won by the truth.
    pub true_rate_rmse: Option<f64>,
    pub true_rate_mae: Option<f64>,
    /// Mean over completed replicates of the zeroed fraction per level.
    pub mean_null_fraction_by_level: Vec<f64>,
    /// Percent of s4 replicates where the GLM is strictly closer to the target.
    pub glm_win_rmse: Option<f64>,
    pub glm_win_mae: Option<f64>,
    pub mean_glm_rmse: Option<f64>,
    pub mean_wavelet_rmse: Option<f64>,
}

impl MonteCarloResult {
    pub fn failed(&self) -> usize {
        self.failures.len()
    }
}

fn percent(hits: usize, total: usize) -> Option<f64> {
    (total > 0).then(|| 100.0 * hits as f64 / total as f64)
}

/// Summarises the outcomes of replicates `0..outcomes.len()`, given in index order.
pub fn aggregate(config: &ScenarioConfig, outcomes: &[ReplicateOutcome]) -> MonteCarloResult {
    let truth = config.truth.id();
    let mut failures = Vec::new();
    let mut winners_rmse = Vec::new();
    let mut winners_mae = Vec::new();
    let (mut glm_hits_rmse, mut glm_hits_mae, mut comparisons) = (0, 0, 0);
    let (mut glm_rmse_sum, mut wavelet_rmse_sum) = (0.0, 0.0);
    let mut null_sum: Vec<f64> = Vec::new();
    let mut completed = 0;

    for (index, outcome) in outcomes.iter().enumerate() {
        match outcome {
            ReplicateOutcome::Failed(message) => {
                failures.push(ReplicateFailure { index: index as u64, message: message.clone() });
                continue;
            }
            ReplicateOutcome::Selection { winner_rmse, winner_mae, .. } => {
                winners_rmse.push(winner_rmse.clone());
                winners_mae.push(winner_mae.clone());
            }
            ReplicateOutcome::Comparison { glm_rmse, glm_mae, wavelet_rmse, wavelet_mae, .. } => {
                comparisons += 1;
                glm_hits_rmse += usize::from(glm_rmse < wavelet_rmse);
                glm_hits_mae += usize::from(glm_mae < wavelet_mae);
                glm_rmse_sum += glm_rmse;
                wavelet_rmse_sum += wavelet_rmse;
            }
        }
        completed += 1;
        if let Some(levels) = outcome.null_fraction_by_level() {
            if null_sum.len() < levels.len() {
                null_sum.resize(levels.len(), 0.0);
            }
            for (acc, v) in null_sum.iter_mut().zip(levels) {
                *acc += v;
            }
        }
    }

    let selections = winners_rmse.len();
    let hits = |w: &[String]| w.iter().filter(|id| **id == truth).count();
    MonteCarloResult {
        label: config.label(),
        scenario: config.scenario,
        n: config.n,
        dependence: config.dependence,
        replications: outcomes.len(),
        completed,
        failures,
        true_rate_rmse: percent(hits(&winners_rmse), selections),
        true_rate_mae: percent(hits(&winners_mae), selections),
        winners_rmse,
        winners_mae,
        mean_null_fraction_by_level: if completed == 0 {
            vec![]
        } else {
            null_sum.iter().map(|s| s / completed as f64).collect()
        },
        glm_win_rmse: percent(glm_hits_rmse, comparisons),
        glm_win_mae: percent(glm_hits_mae, comparisons),
        mean_glm_rmse: (comparisons > 0).then(|| glm_rmse_sum / comparisons as f64),
        mean_wavelet_rmse: (comparisons > 0).then(|| wavelet_rmse_sum / comparisons as f64),
        truth,
    }
}

/// Runs every replicate in sequence.
pub fn run_scenario(config: &ScenarioConfig) -> Result<MonteCarloResult> {
    config.validate()?;
    let outcomes: Vec<ReplicateOutcome> = (0..config.replications as u64).map(|i| run_replicate(config, i)).collect();
    Ok(aggregate(config, &outcomes))
}

//! TOML simulation configs.
//!
//! ```toml
//! seed = 20240611
//! replications = 100
//! criteria = ["rmse", "mae"]
//!
//! [wavelet]
//! basis = "daub2"
//! coarse_level = 3
//! threshold = "soft"
//!
//! [harness]
//! noise_reading = "variance"     # or "std_dev"
//! gap_fraction = 0.3
//! compare_to_observed = false
//! extra_models = ["models.txt"]  # added to the s1 candidates
//! dispersion = { weak = 0.3, moderate = 0.15, strong = 0.05 }
//!
//! [[scenario]]
//! kind = "s1"                    # s1 | s2 | s3 | s4
//! truth = ["f1", "f2"]           # default: every truth of the kind
//! dependence = ["moderate", "strong"]
//! n = [128, 256, 512]
//! replications = 50              # overrides the top-level value
//! gap = true                     # s4 only
//! ```

use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use wavesel_core::glm::{Family, Link};
use wavesel_core::nls::NlsModel;
use wavesel_core::regression::{ThresholdPolicy, ThresholdRule, WaveletConfig, DEFAULT_COARSE_LEVEL};
use wavesel_core::select::Criterion;
use wavesel_core::sim::{
    Dependence, GlmDispersion, NoiseReading, Scenario, ScenarioConfig, Truth, DEFAULT_GAP_FRACTION, DEFAULT_SEED,
    NLS_TRUE_MODELS,
};
use wavesel_core::wavelet::Wavelet;

use crate::candidates::{load_model_file, resolve};
use crate::error::{CliError, CliResult};

const TOP_KEYS: &[&str] = &["seed", "replications", "criteria", "wavelet", "harness", "scenario"];
const WAVELET_KEYS: &[&str] = &["basis", "coarse_level", "threshold"];
const HARNESS_KEYS: &[&str] = &["noise_reading", "gap_fraction", "compare_to_observed", "extra_models", "dispersion"];
const DISPERSION_KEYS: &[&str] = &["weak", "moderate", "strong"];
const SCENARIO_KEYS: &[&str] = &["kind", "truth", "dependence", "n", "replications", "gap"];

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveletSection {
    pub basis: Option<String>,
    pub coarse_level: Option<usize>,
    pub threshold: Option<String>,
}

impl WaveletSection {
    pub fn to_config(&self) -> CliResult<WaveletConfig> {
        let wavelet = match &self.basis {
            Some(b) => b.parse::<Wavelet>()?,
            None => Wavelet::default(),
        };
        let rule = match &self.threshold {
            Some(t) => t.parse::<ThresholdRule>()?,
            None => ThresholdRule::default(),
        };
        Ok(WaveletConfig {
            wavelet,
            coarse_level: self.coarse_level.unwrap_or(DEFAULT_COARSE_LEVEL),
            policy: ThresholdPolicy { rule },
            resolution: None,
        })
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessSection {
    pub noise_reading: Option<NoiseReading>,
    pub gap_fraction: Option<f64>,
    pub compare_to_observed: Option<bool>,
    #[serde(default)]
    pub extra_models: Vec<String>,
    pub dispersion: Option<GlmDispersion>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub kind: String,
    pub truth: Option<Vec<String>>,
    pub dependence: Option<Vec<String>>,
    pub n: Option<Vec<usize>>,
    pub replications: Option<usize>,
    pub gap: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub seed: Option<u64>,
    pub replications: Option<usize>,
    pub criteria: Option<Vec<String>>,
    #[serde(default)]
    pub wavelet: WaveletSection,
    #[serde(default)]
    pub harness: HarnessSection,
    #[serde(default)]
    pub scenario: Vec<ScenarioSection>,
}

/// A parsed config file.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: SimulationConfig,
    /// Hex SHA-256 of the file bytes.
    pub hash: String,
    pub cells: Vec<ScenarioConfig>,
    pub criteria: Vec<Criterion>,
}

fn unknown_keys(value: &toml::Table) -> Vec<String> {
    let mut out = Vec::new();
    let check = |table: &toml::Table, allowed: &[&str], prefix: &str, out: &mut Vec<String>| {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                out.push(format!("{prefix}{key}"));
            }
        }
    };
    check(value, TOP_KEYS, "", &mut out);
    if let Some(toml::Value::Table(t)) = value.get("wavelet") {
        check(t, WAVELET_KEYS, "wavelet.", &mut out);
    }
    if let Some(toml::Value::Table(t)) = value.get("harness") {
        check(t, HARNESS_KEYS, "harness.", &mut out);
        if let Some(toml::Value::Table(d)) = t.get("dispersion") {
            check(d, DISPERSION_KEYS, "harness.dispersion.", &mut out);
        }
    }
    if let Some(toml::Value::Array(list)) = value.get("scenario") {
        for (i, item) in list.iter().enumerate() {
            if let toml::Value::Table(t) = item {
                check(t, SCENARIO_KEYS, &format!("scenario[{i}]."), &mut out);
            }
        }
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn load_config(path: &Path) -> CliResult<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base)
}

pub fn parse_config(text: &str, base_dir: &Path) -> CliResult<LoadedConfig> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    let unknown = unknown_keys(&table);
    if !unknown.is_empty() {
        return Err(CliError::UnknownKeys(unknown));
    }
    let config: SimulationConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let cells = expand(&config, base_dir)?;
    let criteria = match &config.criteria {
        None => vec![Criterion::Rmse, Criterion::Mae],
        Some(list) if list.is_empty() => return Err(CliError::Config("criteria must not be empty".into())),
        Some(list) => list.iter().map(|c| c.parse::<Criterion>()).collect::<Result<_, _>>()?,
    };
    Ok(LoadedConfig { hash: sha256_hex(text.as_bytes()), config, cells, criteria })
}

fn parse_list<T: FromStr>(values: &[String]) -> CliResult<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    values.iter().map(|v| v.parse::<T>().map_err(|e| CliError::Config(e.to_string()))).collect()
}

fn parse_glm_truth(token: &str) -> CliResult<Truth> {
    let body = token.strip_prefix("glm:").unwrap_or(token);
    let (family, link) =
        body.split_once(':').ok_or_else(|| CliError::Config(format!("GLM truth {token:?} must be <family>:<link>")))?;
    Ok(Truth::Glm { family: family.parse::<Family>()?, link: link.parse::<Link>()? })
}

fn default_truths(scenario: Scenario) -> Vec<Truth> {
    match scenario {
        Scenario::S1 => NLS_TRUE_MODELS.iter().map(|id| Truth::Nonlinear((*id).into())).collect(),
        Scenario::S2 => vec![Truth::Nonlinear("f2".into())],
        Scenario::S3 | Scenario::S4 => Family::ALL
            .iter()
            .flat_map(|f| f.links().iter().map(move |l| Truth::Glm { family: *f, link: *l }))
            .collect(),
    }
}

/// Expands every `[[scenario]]` into cells: truth, then dependence, then n.
pub fn expand(config: &SimulationConfig, base_dir: &Path) -> CliResult<Vec<ScenarioConfig>> {
    if config.scenario.is_empty() {
        return Err(CliError::Config("the scenario list is empty".into()));
    }
    let wavelet = config.wavelet.to_config()?;
    let harness = &config.harness;
    let mut extra_models: Vec<Arc<dyn NlsModel>> = Vec::new();
    for file in &harness.extra_models {
        extra_models.extend(load_model_file(&resolve(base_dir, file))?);
    }
    let gap_fraction = harness.gap_fraction.unwrap_or(DEFAULT_GAP_FRACTION);
    if !gap_fraction.is_finite() {
        return Err(CliError::Config("gap_fraction must be finite".into()));
    }

    let mut cells = Vec::new();
    for (i, section) in config.scenario.iter().enumerate() {
        let scenario: Scenario = section.kind.parse()?;
        let truths = match &section.truth {
            None => default_truths(scenario),
            Some(list) if list.iter().any(|t| t == "all") => default_truths(scenario),
            Some(list) => match scenario {
                Scenario::S1 | Scenario::S2 => list.iter().map(|t| Truth::Nonlinear(t.clone())).collect(),
                Scenario::S3 | Scenario::S4 => list.iter().map(|t| parse_glm_truth(t)).collect::<CliResult<_>>()?,
            },
        };
        let dependence: Vec<Dependence> = match &section.dependence {
            None => Dependence::ALL.to_vec(),
            Some(list) => parse_list(list)?,
        };
        let sizes = section.n.clone().unwrap_or_else(|| vec![128, 256, 512]);
        let replications = section.replications.or(config.replications).unwrap_or(100);
        if replications == 0 {
            return Err(CliError::Config(format!("scenario[{i}]: replications must be at least 1")));
        }
        if section.gap.is_some() && scenario != Scenario::S4 {
            return Err(CliError::Config(format!("scenario[{i}]: `gap` only applies to s4")));
        }
        for &n in &sizes {
            if !n.is_power_of_two() {
                return Err(CliError::Config(format!("scenario[{i}]: n = {n} is not a power of two")));
            }
        }
        if truths.is_empty() || dependence.is_empty() || sizes.is_empty() {
            return Err(CliError::Config(format!("scenario[{i}] expands to no cells")));
        }
        for truth in &truths {
            for &dep in &dependence {
                for &n in &sizes {
                    let mut cell = ScenarioConfig::new(scenario, truth.clone(), n, dep)
                        .with_replications(replications)
                        .with_seed(config.seed.unwrap_or(DEFAULT_SEED))
                        .with_gap_fraction(if section.gap.unwrap_or(false) { gap_fraction } else { 0.0 });
                    cell.wavelet = wavelet;
                    cell.noise_reading = harness.noise_reading.unwrap_or_default();
                    cell.dispersion = harness.dispersion.unwrap_or_default();
                    cell.compare_to_observed = harness.compare_to_observed.unwrap_or(false);
                    if scenario == Scenario::S1 {
                        cell.extra_models = extra_models.clone();
                    }
                    cell.validate().map_err(|e| CliError::Config(format!("scenario[{i}]: {e}")))?;
                    cells.push(cell);
                }
            }
        }
    }
    Ok(cells)
}

//! Report documents: metadata plus a selection or simulation body, stored as JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;
use wavesel_core::regression::WaveletConfig;
use wavesel_core::select::{Criterion, SelectionReport};
use wavesel_core::sim::MonteCarloResult;

use crate::error::{CliError, CliResult};

pub const FIXED_TIMESTAMP: &str = "1970-01-01T00:00:00Z";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    /// Hex SHA-256 of the inputs the report depends on.
    pub config_hash: String,
    pub timestamp: String,
}

impl Metadata {
    pub fn new(seed: u64, config_hash: String, fixed_timestamp: bool) -> Self {
        let timestamp = if fixed_timestamp {
            FIXED_TIMESTAMP.to_string()
        } else {
            OffsetDateTime::now_utc().format(&Rfc3339).unwrap_or_else(|_| FIXED_TIMESTAMP.to_string())
        };
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            config_hash,
            timestamp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSummary {
    pub path: String,
    pub y: String,
    pub x: Vec<String>,
    pub rows_read: usize,
    pub rows_dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionDocument {
    pub dataset: DatasetSummary,
    pub criteria: Vec<Criterion>,
    pub wavelet: WaveletConfig,
    /// Predictor columns of the rows used.
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub report: SelectionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationDocument {
    pub criteria: Vec<Criterion>,
    pub results: Vec<MonteCarloResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReportBody {
    Selection(Box<SelectionDocument>),
    Simulation(SimulationDocument),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub metadata: Metadata,
    pub body: ReportBody,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Report(e.to_string()))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Report(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }
}

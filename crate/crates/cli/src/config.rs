//! JSON run configurations. Both carry a `schema` version and reject
//! unknown fields.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use sigecc::optimize::{FitnessConfig, SearchConfig};
use sigecc::sim::{default_snr_grid, SigmaSource};
use sigecc::{LossSpec, Signedness};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Generation budget used for k >= 8 when the config leaves it unset.
pub const LARGE_GENERATIONS: usize = 20_000;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    pub schema: u32,
    pub k: usize,
    #[serde(default = "unsigned")]
    pub signedness: Signedness,
    pub n: usize,
    pub fitness: FitnessConfig,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub linear: bool,
}

fn unsigned() -> Signedness {
    Signedness::Unsigned
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub schema: u32,
    pub codebooks: Vec<CodebookSource>,
    pub decoders: Vec<DecoderName>,
    /// Error metric reported in the CSV.
    pub metric: LossSpec,
    /// Loss the Bayes decoders minimize; defaults to the metric.
    #[serde(default)]
    pub decoder_loss: Option<LossSpec>,
    #[serde(default = "default_snr_grid")]
    pub snr_db: Vec<f64>,
    #[serde(default = "default_symbols")]
    pub num_symbols: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "true_sigma")]
    pub sigma_source: SigmaSource,
}

fn default_symbols() -> usize {
    100_000
}

fn true_sigma() -> SigmaSource {
    SigmaSource::TrueValue
}

/// A codebook read from a text file (relative to the config file) or one
/// of the built-in baselines.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodebookSource {
    pub id: String,
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub baseline: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderName {
    Hard,
    Soft,
    Bayes,
    BayesFast,
}

/// Reads and deserializes a config, naming the offending field on failure.
pub fn load<T: DeserializeOwned>(path: &Path) -> CliResult<(T, serde_json::Value)> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let raw: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: malformed JSON: {e}", path.display())))?;
    let parsed: T = serde_path_to_error::deserialize(&raw).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        if field == "." {
            CliError::Usage(format!("{}: {inner}", path.display()))
        } else {
            CliError::Usage(format!("{}: field `{field}`: {inner}", path.display()))
        }
    })?;
    Ok((parsed, raw))
}

pub fn check_schema(path: &Path, schema: u32) -> CliResult<()> {
    if schema != SCHEMA_VERSION {
        return Err(CliError::Usage(format!(
            "{}: field `schema`: unsupported version {schema}, expected {SCHEMA_VERSION}",
            path.display()
        )));
    }
    Ok(())
}

impl OptimizeConfig {
    /// Applies defaults that depend on other fields.
    pub fn resolve_defaults(&mut self, raw: &serde_json::Value) {
        let explicit = raw
            .get("search")
            .and_then(|s| s.get("generations"))
            .is_some();
        if !explicit && self.k >= 8 {
            self.search.generations = LARGE_GENERATIONS;
        }
    }
}

impl CodebookSource {
    pub fn describe(&self) -> String {
        match (&self.path, &self.baseline) {
            (Some(p), _) => p.display().to_string(),
            (None, Some(b)) => format!("baseline {b}"),
            (None, None) => "nothing".into(),
        }
    }
}

//! Run configuration for the batch CLI: one JSON file describing the model,
//! the sample sizes, and optional Monte Carlo / quadrature settings.

use serde::{Deserialize, Serialize};

use crate::bias::DEFAULT_COMPOSITION_LIMIT;
use crate::error::{Error, Result};
use crate::mixture::MixtureParams;
use crate::quad::QuadratureConfig;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub pi: Vec<f64>,
    pub alpha: Vec<f64>,
    pub lambda: f64,
    /// Sample sizes; a plain number is accepted as a singleton list.
    #[serde(deserialize_with = "one_or_many")]
    pub n: Vec<usize>,
    /// Optional grid of Atkinson aversion parameters for `indices`.
    #[serde(default)]
    pub eps: Vec<f64>,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
    #[serde(default = "default_composition_limit")]
    pub composition_limit: u128,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct McConfig {
    pub replicates: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            replicates: 200_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

fn default_format() -> OutputFormat {
    OutputFormat::Json
}

fn default_composition_limit() -> u128 {
    DEFAULT_COMPOSITION_LIMIT
}

fn one_or_many<'de, D>(deserializer: D) -> std::result::Result<Vec<usize>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(usize),
        Many(Vec<usize>),
    }
    Ok(match OneOrMany::deserialize(deserializer)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    })
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidConfig(format!("JSON parse failed: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        // model parameters validate through canonicalization
        self.params()?;
        if self.n.is_empty() {
            return Err(Error::InvalidConfig("n list must be nonempty".into()));
        }
        if self.n.iter().any(|&n| n == 0) {
            return Err(Error::InvalidConfig("every n must be >= 1".into()));
        }
        if self.eps.iter().any(|&e| !e.is_finite() || e < 0.0 || e == 1.0) {
            return Err(Error::InvalidConfig(
                "eps grid entries must be nonnegative and != 1".into(),
            ));
        }
        self.quadrature.validate()?;
        if self.mc.replicates < 100 {
            return Err(Error::InvalidConfig(
                "mc.replicates must be at least 100".into(),
            ));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<MixtureParams> {
        MixtureParams::new(&self.pi, &self.alpha, self.lambda)
    }
}

//! TOML configuration shared by the `mine` and `pipeline` commands.
//!
//! ```toml
//! algorithms = ["de", "jde"]
//! output_dir = "out"
//!
//! [generate]
//! days = 14
//! seed = 7
//!
//! [preprocess]
//! frame_duration_seconds = 3600
//! classes = 24
//!
//! [miner]
//! runs = 10
//!
//! [miner.optimizer]
//! max_fes = 10000
//! population = 50
//!
//! [miner.optimizer.params.de]
//! f = 0.5
//! cr = 0.9
//! ```
//!
//! Every table and key is optional; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::datagen::GenConfig;
use crate::error::{Error, Result};
use crate::miner::MinerConfig;
use crate::optimizers::Algorithm;
use crate::preprocess::PreprocessConfig;

/// Environment variable that overrides configured seeds.
pub const SEED_ENV: &str = "TSARM_SEED";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub generate: GenConfig,
    pub preprocess: PreprocessConfig,
    pub miner: MinerConfig,
    /// Algorithms to run, in order. Empty means the one in
    /// `miner.optimizer.algorithm`.
    pub algorithms: Vec<Algorithm>,
    pub output_dir: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map_or(0, |s| text[..s.start].matches('\n').count() as u64 + 1);
            Error::parse(origin, line, e.message().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("configuration serializes to TOML")
    }

    /// The algorithms to run.
    pub fn algorithm_list(&self) -> Vec<Algorithm> {
        if self.algorithms.is_empty() {
            vec![self.miner.optimizer.algorithm]
        } else {
            self.algorithms.clone()
        }
    }

    /// Sets the generator and optimizer seeds.
    pub fn set_seed(&mut self, seed: u64) {
        self.generate.seed = seed;
        self.miner.optimizer.seed = seed;
    }

    pub fn validate(&self) -> Result<()> {
        self.generate.validate()?;
        self.preprocess.validate()?;
        self.miner.validate()
    }
}

/// Seed from [`SEED_ENV`], if set.
pub fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|e| Error::config("TSARM_SEED", format!("{v:?}: {e}"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::config("TSARM_SEED", e.to_string())),
    }
}

//! Engine configuration file (TOML).
//!
//! ```toml
//! [search]
//! decompose_iters = 64
//! seed = 7
//!
//! [search.qc]
//! trials = 500
//!
//! [search.domain]
//! node_budget = 100000
//!
//! [pool]
//! max_concurrent = 8
//! ```
//!
//! Every key is optional; missing keys take the defaults of the mirrored
//! structs. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::pool::PoolConfig;
use crate::search::SearchConfig;
use crate::training::CollectConfig;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Toml {
        path: String,
        #[source]
        source: toml::de::Error,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub search: SearchConfig,
    pub pool: PoolConfig,
    pub collect: CollectConfig,
}

impl EngineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        Self::parse(text, "<string>")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: p.clone(), source })?;
        Self::parse(&text, &p)
    }

    fn parse(text: &str, path: &str) -> Result<Self, ConfigError> {
        let cfg: EngineConfig =
            toml::from_str(text).map_err(|source| ConfigError::Toml { path: path.to_string(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.search.validate().map_err(ConfigError::Invalid)?;
        self.pool.validate().map_err(ConfigError::Invalid)?;
        self.collect.completion.validate().map_err(ConfigError::Invalid)?;
        Ok(())
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("engine config serializes")
    }
}

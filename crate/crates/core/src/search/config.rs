use serde::{Deserialize, Serialize};

use crate::eval::Domain;
use crate::prover::AxiomAllowlist;
use crate::quickcheck::QcConfig;
use crate::scoring::ScoreConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetStrategy {
    /// Largest operator footprint first; ties go to the oldest entry.
    #[default]
    #[serde(alias = "footprint")]
    HighestFootprint,
    /// Largest score of the decomposition that created the goal first.
    #[serde(alias = "score")]
    HighestScore,
}

impl std::str::FromStr for TargetStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "footprint" | "highest_footprint" => Ok(TargetStrategy::HighestFootprint),
            "score" | "highest_score" => Ok(TargetStrategy::HighestScore),
            other => Err(format!("unknown target strategy `{other}` (expected footprint|score)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub decompose_iters: u32,
    /// Cap on the total number of lemmas inserted into the goal tree.
    pub max_open_lemmas: usize,
    pub complete_iters: u32,
    pub wall_budget_secs: u64,
    pub k_parallel: u32,
    pub target_strategy: TargetStrategy,
    /// Timeout handed to every checker call.
    pub check_timeout_ms: u64,
    pub seed: u64,
    /// Stop sibling pass@k runs with a larger index once a run succeeds.
    pub fail_fast: bool,
    /// Record wall-clock timings in traces (breaks byte-level replay).
    pub trace_timing: bool,
    /// Record leave-one-out lemma necessity on accepted decompositions.
    pub record_necessity: bool,
    pub allowlist: AxiomAllowlist,
    pub qc: QcConfig,
    pub score: ScoreConfig,
    pub domain: Domain,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            decompose_iters: 128,
            max_open_lemmas: 32,
            complete_iters: 128,
            wall_budget_secs: 1800,
            k_parallel: 1,
            target_strategy: TargetStrategy::HighestFootprint,
            check_timeout_ms: 300_000,
            seed: 0,
            fail_fast: false,
            trace_timing: false,
            record_necessity: false,
            allowlist: AxiomAllowlist::default(),
            qc: QcConfig::default(),
            score: ScoreConfig::default(),
            domain: Domain::default(),
        }
    }
}

impl SearchConfig {
    /// `decompose_iters = 0` is allowed and skips the decomposition stage.
    pub fn validate(&self) -> Result<(), String> {
        if self.complete_iters == 0 {
            return Err("complete_iters must be at least 1".into());
        }
        if self.max_open_lemmas == 0 {
            return Err("max_open_lemmas must be at least 1".into());
        }
        if self.wall_budget_secs == 0 {
            return Err("wall_budget_secs must be at least 1".into());
        }
        if self.k_parallel == 0 {
            return Err("k_parallel must be at least 1".into());
        }
        if self.check_timeout_ms == 0 {
            return Err("check_timeout_ms must be at least 1".into());
        }
        self.qc.validate()?;
        self.score.validate()?;
        self.domain.validate()
    }

    /// Same configuration apart from the seed.
    pub fn same_except_seed(&self, other: &SearchConfig) -> bool {
        let mut a = self.clone();
        a.seed = other.seed;
        a == *other
    }
}

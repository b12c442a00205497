//! Two-stage proof search: gated decomposition into a lemma tree, then
//! iterative completion of the leaves, with pass@k over independent runs.

mod config;
mod engine;
mod passk;
mod trace;
mod tree;

use serde::{Deserialize, Serialize};

use crate::eval::Env;
use crate::lang::GoalDecl;
use crate::pool::VerifyPool;
use crate::prover::{Checker, Policy};

pub use config::{SearchConfig, TargetStrategy};
pub use engine::RunState;
pub use passk::{run_pass_k, PassKResult};
pub use trace::{
    RejectReason, RunTrace, Stage, TraceError, TraceEvent, TraceHeader, TraceRecord, TRACE_FORMAT_VERSION,
};
pub use tree::{GoalEntry, GoalStatus, OpenGoalSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
}

/// Policy and checker for a run. When `pool` is set every check goes
/// through it; `checker` is then only used for its description.
#[derive(Clone, Copy)]
pub struct Backends<'a> {
    pub policy: &'a dyn Policy,
    pub checker: &'a dyn Checker,
    pub pool: Option<&'a VerifyPool>,
}

impl<'a> Backends<'a> {
    pub fn new(policy: &'a dyn Policy, checker: &'a dyn Checker) -> Self {
        Backends { policy, checker, pool: None }
    }

    pub fn with_pool(mut self, pool: &'a VerifyPool) -> Self {
        self.pool = Some(pool);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Proved,
    Disproved { witness: Env },
    Exhausted,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationsUsed {
    pub decompose: u32,
    pub complete: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub outcome: Outcome,
    pub iterations: IterationsUsed,
    /// Leaves of the goal tree when the decomposition stage ended.
    pub lemma_count: usize,
    /// Non-empty lines over accepted completion proofs; absent when every
    /// accepted proof is a built-in directive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proof_lines: Option<usize>,
    /// Completion iteration that closed the last leaf (0 when none was needed).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solved_at_iteration: Option<u32>,
    #[serde(default)]
    pub stopped_early: bool,
}

impl RunResult {
    pub fn proved(&self) -> bool {
        matches!(self.outcome, Outcome::Proved)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Decomposed { target: String, children: Vec<String> },
    Discharged { target: String },
    Rejected(RejectReason),
    Disproved { witness: Env },
    InfrastructureError { message: String },
    NoOpenGoals,
}

/// One run with the configured seed.
pub fn run_single(
    problem: &GoalDecl,
    backends: Backends<'_>,
    config: &SearchConfig,
) -> Result<(RunResult, RunTrace), SearchError> {
    Ok(RunState::new(problem, backends, config, 0)?.run())
}

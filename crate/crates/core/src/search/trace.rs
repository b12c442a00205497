//! JSONL run traces: one header line, then one line per event.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::eval::Env;
use crate::lang::GoalDecl;
use crate::pool::PoolStats;
use crate::prover::{AuditOutcome, CheckVerdict, CompletionAttempt, DecompositionProposal};
use crate::quickcheck::QcOutcome;
use crate::scoring::{ScoreBreakdown, ValidityGate};

use super::config::SearchConfig;
use super::RunResult;

pub const TRACE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("empty trace")]
    Empty,
    #[error("unsupported trace format version {0}")]
    Version(u32),
    #[error("line {line}: sequence number {found}, expected {expected}")]
    Sequence { line: usize, found: u64, expected: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Decompose,
    Complete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum RejectReason {
    /// The target itself was falsified by quickcheck.
    TargetFalsified,
    QuickcheckFailed { lemmas: Vec<String> },
    ReconstructionFailed { diagnostics: String },
    AuditFailed { offending: Vec<String> },
    LemmaCapExceeded { inserted: usize, proposed: usize, cap: usize },
    InvalidProposal { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TraceEvent {
    TargetQuickcheck {
        iteration: u32,
        target: String,
        outcome: QcOutcome,
        cached: bool,
    },
    LemmaQuickcheck {
        iteration: u32,
        target: String,
        lemma: String,
        outcome: QcOutcome,
        cached: bool,
    },
    ReconstructionCheck {
        iteration: u32,
        target: String,
        verdict: CheckVerdict,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        audit: Option<AuditOutcome>,
    },
    DecomposeAttempt {
        iteration: u32,
        target: String,
        depth: u32,
        proposal: DecompositionProposal,
        gate: ValidityGate,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        score: Option<ScoreBreakdown>,
        accepted: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reason: Option<RejectReason>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        necessity: Option<Vec<bool>>,
    },
    GoalDisproved {
        iteration: u32,
        target: String,
        witness: Env,
    },
    StepError {
        stage: Stage,
        iteration: u32,
        target: String,
        message: String,
    },
    StageTransition {
        from: Stage,
        to: Stage,
        leaves: Vec<String>,
    },
    CompleteAttempt {
        iteration: u32,
        lemma: String,
        attempt: CompletionAttempt,
        verdict: CheckVerdict,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        audit: Option<AuditOutcome>,
    },
    AuditFailure {
        stage: Stage,
        goal: String,
        offending: Vec<String>,
    },
    RunEnd {
        result: RunResult,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pool: Option<PoolStats>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        wall_ms: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub format_version: u32,
    pub run_id: String,
    pub problem: GoalDecl,
    pub run_index: u32,
    /// Seed of this run (configured seed xor run index).
    pub seed: u64,
    pub policy: String,
    pub checker: String,
    pub config: SearchConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub seq: u64,
    #[serde(flatten)]
    pub event: TraceEvent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub header: TraceHeader,
    pub records: Vec<TraceRecord>,
}

impl RunTrace {
    pub fn new(header: TraceHeader) -> Self {
        RunTrace { header, records: Vec::new() }
    }

    pub fn push(&mut self, event: TraceEvent) {
        let seq = self.records.len() as u64 + 1;
        self.records.push(TraceRecord { seq, event });
    }

    pub fn events(&self) -> impl Iterator<Item = &TraceEvent> {
        self.records.iter().map(|r| &r.event)
    }

    pub fn result(&self) -> Option<&RunResult> {
        self.events().find_map(|e| match e {
            TraceEvent::RunEnd { result, .. } => Some(result),
            _ => None,
        })
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("trace header serializes");
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("trace record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<(), TraceError> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_jsonl().as_bytes())?;
        Ok(())
    }

    pub fn parse_jsonl(text: &str) -> Result<RunTrace, TraceError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or(TraceError::Empty)?;
        let header: TraceHeader =
            serde_json::from_str(first).map_err(|source| TraceError::Json { line: 1, source })?;
        if header.format_version != TRACE_FORMAT_VERSION {
            return Err(TraceError::Version(header.format_version));
        }
        let mut trace = RunTrace::new(header);
        for (i, line) in lines {
            let record: TraceRecord =
                serde_json::from_str(line).map_err(|source| TraceError::Json { line: i + 1, source })?;
            let expected = trace.records.len() as u64 + 1;
            if record.seq != expected {
                return Err(TraceError::Sequence { line: i + 1, found: record.seq, expected });
            }
            trace.records.push(record);
        }
        Ok(trace)
    }

    pub fn read_jsonl(path: &Path) -> Result<RunTrace, TraceError> {
        RunTrace::parse_jsonl(&std::fs::read_to_string(path)?)
    }
}

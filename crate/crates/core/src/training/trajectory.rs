use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::prover::{
    axiom_audit, AuditOutcome, AxiomAllowlist, CheckVerdict, CompletionAttempt, DecompositionProposal, PolicyContext,
};
use crate::scoring::{ScoreBreakdown, ValidityGate};

pub const TRAJECTORY_SCHEMA: &str = "lemmaforge.trajectory";
pub const TRAJECTORY_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Policy,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrajectoryRecord {
    Decomposition {
        input: PolicyContext,
        output: DecompositionProposal,
        gate: ValidityGate,
        score: ScoreBreakdown,
        source: Source,
    },
    Completion {
        input: PolicyContext,
        output: CompletionAttempt,
        verdict: CheckVerdict,
        audit: AuditOutcome,
        source: Source,
    },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("filter violation: {0}")]
pub struct FilterViolation(pub String);

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("record {index}: {violation}")]
    Filter { index: usize, violation: FilterViolation },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}: {message}")]
    Format { path: String, line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    schema: String,
    version: u32,
}

/// Decomposition records need `v = 1` and `r > 0`; completion records need an
/// accepted verdict that passes the audit under `allowlist`.
pub fn validate_record(record: &TrajectoryRecord, allowlist: &AxiomAllowlist) -> Result<(), FilterViolation> {
    match record {
        TrajectoryRecord::Decomposition { gate, score, .. } => {
            if score.v != 1 || gate.value() != 1 {
                return Err(FilterViolation("decomposition record with v = 0".into()));
            }
            if score.r.is_nan() || score.r <= 0.0 {
                return Err(FilterViolation(format!("decomposition record with r = {} (needs r > 0)", score.r)));
            }
            Ok(())
        }
        TrajectoryRecord::Completion { verdict, audit, .. } => {
            let recomputed = axiom_audit(verdict, allowlist)
                .map_err(|_| FilterViolation(format!("completion record with {} verdict", verdict.status_label())))?;
            match (audit, recomputed) {
                (AuditOutcome::Pass, AuditOutcome::Pass) => Ok(()),
                (_, AuditOutcome::Failure { offending }) => {
                    Err(FilterViolation(format!("completion record uses {}", offending.join(", "))))
                }
                (AuditOutcome::Failure { .. }, AuditOutcome::Pass) => {
                    Err(FilterViolation("completion record carries a failed audit".into()))
                }
            }
        }
    }
}

/// Validate everything, then write a header line and one record per line.
/// Nothing is written if any record is rejected.
pub fn export_trajectories(
    records: &[TrajectoryRecord],
    path: &Path,
    allowlist: &AxiomAllowlist,
) -> Result<usize, ExportError> {
    for (index, r) in records.iter().enumerate() {
        validate_record(r, allowlist).map_err(|violation| ExportError::Filter { index, violation })?;
    }
    let p = path.display().to_string();
    let io = |source| ExportError::Io { path: p.clone(), source };
    let mut w = BufWriter::new(std::fs::File::create(path).map_err(io)?);
    let header = Header { schema: TRAJECTORY_SCHEMA.into(), version: TRAJECTORY_VERSION };
    writeln!(w, "{}", serde_json::to_string(&header).expect("header serializes")).map_err(io)?;
    for r in records {
        writeln!(w, "{}", serde_json::to_string(r).expect("record serializes")).map_err(io)?;
    }
    w.flush().map_err(io)?;
    Ok(records.len())
}

pub fn parse_trajectories(text: &str, path: &str) -> Result<Vec<TrajectoryRecord>, ExportError> {
    let fmt = |line: usize, message: String| ExportError::Format { path: path.to_string(), line, message };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or_else(|| fmt(1, "missing header line".into()))?;
    let header: Header = serde_json::from_str(first).map_err(|e| fmt(1, e.to_string()))?;
    if header.schema != TRAJECTORY_SCHEMA || header.version != TRAJECTORY_VERSION {
        return Err(fmt(1, format!("unsupported schema {} v{}", header.schema, header.version)));
    }
    lines
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| fmt(i + 1, e.to_string())))
        .collect()
}

pub fn import_trajectories(path: &Path) -> Result<Vec<TrajectoryRecord>, ExportError> {
    let p = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ExportError::Io { path: p.clone(), source })?;
    parse_trajectories(&text, &p)
}

/// Re-read an exported file and check every record. Returns the record count.
pub fn validate_export_file(path: &Path, allowlist: &AxiomAllowlist) -> Result<usize, ExportError> {
    let records = import_trajectories(path)?;
    for (index, r) in records.iter().enumerate() {
        validate_record(r, allowlist).map_err(|violation| ExportError::Filter { index, violation })?;
    }
    Ok(records.len())
}

/// Uniform replay sampling over completion records: `round(ratio * n)`
/// distinct indices, returned ascending.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplaySampler {
    pub ratio: f64,
}

impl Default for ReplaySampler {
    fn default() -> Self {
        ReplaySampler { ratio: 0.25 }
    }
}

impl ReplaySampler {
    pub fn sample<R: Rng + ?Sized>(&self, records: &[TrajectoryRecord], rng: &mut R) -> Vec<usize> {
        let pool: Vec<usize> = records
            .iter()
            .enumerate()
            .filter(|(_, r)| matches!(r, TrajectoryRecord::Completion { .. }))
            .map(|(i, _)| i)
            .collect();
        let want = ((self.ratio.clamp(0.0, 1.0) * pool.len() as f64).round() as usize).min(pool.len());
        let mut picked: Vec<usize> = sample(rng, pool.len(), want).into_iter().map(|i| pool[i]).collect();
        picked.sort_unstable();
        picked
    }
}

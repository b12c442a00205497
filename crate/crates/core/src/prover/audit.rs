//! Post-acceptance axiom audit.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::types::CheckVerdict;

pub const STANDARD_AXIOMS: [&str; 3] = ["propext", "Classical.choice", "Quot.sound"];

/// Axioms that bypass the kernel; never admitted by the default allowlist.
pub const UNSOUND_AXIOMS: [&str; 2] = ["Lean.ofReduceBool", "Lean.trustCompiler"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AxiomAllowlist(pub BTreeSet<String>);

impl Default for AxiomAllowlist {
    fn default() -> Self {
        AxiomAllowlist(STANDARD_AXIOMS.iter().map(|s| s.to_string()).collect())
    }
}

impl AxiomAllowlist {
    pub fn contains(&self, axiom: &str) -> bool {
        self.0.contains(axiom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "audit", rename_all = "snake_case")]
pub enum AuditOutcome {
    Pass,
    Failure { offending: Vec<String> },
}

impl AuditOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, AuditOutcome::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("contract violation: axiom audit requires an accepted verdict, got {0}")]
pub struct AuditContractViolation(pub &'static str);

/// Pass iff every axiom the proof uses is allowlisted. Offenders are reported
/// in first-use order without duplicates.
pub fn axiom_audit(
    verdict: &CheckVerdict,
    allowlist: &AxiomAllowlist,
) -> Result<AuditOutcome, AuditContractViolation> {
    if !verdict.is_accepted() {
        return Err(AuditContractViolation(verdict.status_label()));
    }
    let mut offending: Vec<String> = Vec::new();
    for ax in &verdict.axioms_used {
        if !allowlist.contains(ax) && !offending.contains(ax) {
            offending.push(ax.clone());
        }
    }
    Ok(if offending.is_empty() {
        AuditOutcome::Pass
    } else {
        AuditOutcome::Failure { offending }
    })
}

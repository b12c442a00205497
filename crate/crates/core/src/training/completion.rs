use serde::{Deserialize, Serialize};

use crate::lang::GoalDecl;
use crate::prover::{
    axiom_audit, AuditOutcome, AxiomAllowlist, CheckVerdict, Checker, CompletionAttempt, Obligation, Policy,
    PolicyContext,
};
use crate::rng::EngineRng;

use super::trajectory::{Source, TrajectoryRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompletionSettings {
    /// Policy attempts before handing over to the fallback.
    pub m: u32,
    /// Total attempts across both actors.
    pub budget: u32,
    pub check_timeout_ms: u64,
    pub allowlist: AxiomAllowlist,
}

impl Default for CompletionSettings {
    fn default() -> Self {
        CompletionSettings { m: 4, budget: 8, check_timeout_ms: 300_000, allowlist: AxiomAllowlist::default() }
    }
}

impl CompletionSettings {
    pub fn validate(&self) -> Result<(), String> {
        if self.m == 0 {
            return Err("m must be at least 1".into());
        }
        if self.budget == 0 {
            return Err("budget must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptLog {
    pub source: Source,
    pub attempt: CompletionAttempt,
    pub verdict: CheckVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyFirstResult {
    /// `None` means unresolved: neither actor produced an audited proof.
    pub record: Option<TrajectoryRecord>,
    pub log: Vec<AttemptLog>,
}

impl PolicyFirstResult {
    pub fn resolved(&self) -> bool {
        self.record.is_some()
    }
}

/// Up to `m` policy attempts with feedback, then the fallback for the rest of
/// the budget. Both actors share one feedback history.
pub fn policy_first_completion(
    lemma: &GoalDecl,
    policy: &dyn Policy,
    fallback: &dyn Policy,
    checker: &dyn Checker,
    settings: &CompletionSettings,
    rng: &mut EngineRng,
) -> PolicyFirstResult {
    let mut ctx = PolicyContext::complete(lemma.clone());
    let mut log = Vec::new();
    for n in 0..settings.budget {
        let (source, actor) = if n < settings.m { (Source::Policy, policy) } else { (Source::Fallback, fallback) };
        let snapshot = ctx.clone();
        let attempt = match actor.propose_completion(&ctx, rng) {
            Ok(a) => a,
            Err(e) => {
                let attempt = CompletionAttempt { proof_text: String::new(), attempt_index: ctx.next_attempt_index() };
                let verdict = CheckVerdict::checker_error(e.to_string());
                log.push(AttemptLog { source, attempt: attempt.clone(), verdict: verdict.clone(), audit: None });
                ctx.record(attempt, verdict);
                continue;
            }
        };
        let ob = Obligation::Completion { goal: lemma.clone(), proof: attempt.proof_text.clone() };
        let verdict = checker.check(&ob, settings.check_timeout_ms);
        let audit = axiom_audit(&verdict, &settings.allowlist).ok();
        log.push(AttemptLog { source, attempt: attempt.clone(), verdict: verdict.clone(), audit: audit.clone() });
        match audit {
            Some(AuditOutcome::Pass) => {
                let record = TrajectoryRecord::Completion {
                    input: snapshot,
                    output: attempt,
                    verdict,
                    audit: AuditOutcome::Pass,
                    source,
                };
                return PolicyFirstResult { record: Some(record), log };
            }
            Some(AuditOutcome::Failure { offending }) => {
                let fb = CheckVerdict::rejected(format!("axiom audit failed: {}", offending.join(", ")));
                ctx.record(attempt, fb);
            }
            None => ctx.record(attempt, verdict),
        }
    }
    PolicyFirstResult { record: None, log }
}

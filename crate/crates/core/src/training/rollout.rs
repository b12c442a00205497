use serde::{Deserialize, Serialize};

use crate::eval::Domain;
use crate::lang::GoalDecl;
use crate::pool::VerifyPool;
use crate::prover::{axiom_audit, AxiomAllowlist, CheckVerdict, Checker, DecompositionProposal, Obligation};
use crate::quickcheck::{quickcheck, QcConfig};
use crate::scoring::{decomposition_score, ScoreBreakdown, ScoreConfig, ValidityGate};

/// Everything needed to gate and score a proposal outside a search run.
pub struct GateSettings<'a> {
    pub checker: &'a dyn Checker,
    /// When set, reconstruction checks fan out through the pool.
    pub pool: Option<&'a VerifyPool>,
    pub qc: QcConfig,
    pub score: ScoreConfig,
    pub domain: Domain,
    pub check_timeout_ms: u64,
    pub allowlist: AxiomAllowlist,
}

impl<'a> GateSettings<'a> {
    pub fn new(checker: &'a dyn Checker, domain: Domain) -> Self {
        GateSettings {
            checker,
            pool: None,
            qc: QcConfig::default(),
            score: ScoreConfig::default(),
            domain,
            check_timeout_ms: 300_000,
            allowlist: AxiomAllowlist::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalReward {
    pub reward: f64,
    pub gate: ValidityGate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<ScoreBreakdown>,
    /// Infrastructure failure; the reward is 0 but carries no signal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutGroup {
    pub goal: GoalDecl,
    pub proposals: Vec<DecompositionProposal>,
    pub rewards: Vec<f64>,
    pub details: Vec<ProposalReward>,
    /// Mean over rewards without an error annotation; `None` if all errored.
    pub mean_reward: Option<f64>,
}

impl RolloutGroup {
    pub fn error_count(&self) -> usize {
        self.details.iter().filter(|d| d.error.is_some()).count()
    }
}

fn reconstruction_obligation(goal: &GoalDecl, p: &DecompositionProposal) -> Obligation {
    if p.lemmas.is_empty() {
        Obligation::Direct { goal: goal.clone() }
    } else {
        Obligation::Reconstruction {
            goal: goal.clone(),
            lemmas: p.lemmas.clone(),
            reconstruction: p.reconstruction.clone(),
        }
    }
}

/// Gate and score every proposal independently. Reward = S.
///
/// # Panics
/// If `proposals` is empty.
pub fn score_rollout_group(goal: &GoalDecl, proposals: Vec<DecompositionProposal>, s: &GateSettings<'_>) -> RolloutGroup {
    assert!(!proposals.is_empty(), "score_rollout_group needs at least one proposal");
    let footprint = goal.footprint() as u64;

    let verdicts: Vec<CheckVerdict> = match s.pool {
        None => proposals
            .iter()
            .map(|p| s.checker.check(&reconstruction_obligation(goal, p), s.check_timeout_ms))
            .collect(),
        Some(pool) => {
            let handles: Vec<_> = proposals
                .iter()
                .map(|p| pool.submit(reconstruction_obligation(goal, p), Some(s.check_timeout_ms)))
                .collect();
            handles
                .into_iter()
                .map(|h| match h {
                    Ok(h) => pool.wait(&h).unwrap_or_else(|e| CheckVerdict::checker_error(e.to_string())),
                    Err(e) => CheckVerdict::checker_error(e.to_string()),
                })
                .collect()
        }
    };

    let mut details = Vec::with_capacity(proposals.len());
    for (p, verdict) in proposals.iter().zip(verdicts) {
        let qc_ok: Vec<bool> = p.lemmas.iter().map(|l| quickcheck(l, &s.qc, &s.domain).passed()).collect();
        if verdict.is_infrastructure_error() {
            details.push(ProposalReward {
                reward: 0.0,
                gate: ValidityGate { reconstruction_ok: false, qc_ok_per_lemma: qc_ok },
                score: None,
                error: Some(verdict.diagnostics()),
            });
            continue;
        }
        let audit_ok = axiom_audit(&verdict, &s.allowlist).is_ok_and(|a| a.passed());
        let gate = ValidityGate { reconstruction_ok: audit_ok, qc_ok_per_lemma: qc_ok };
        let children: Vec<u64> = p.lemmas.iter().map(|l| l.footprint() as u64).collect();
        match decomposition_score(&gate, footprint, &children, &s.score) {
            Ok(score) => details.push(ProposalReward { reward: score.s, gate, score: Some(score), error: None }),
            Err(e) => details.push(ProposalReward { reward: 0.0, gate, score: None, error: Some(e.to_string()) }),
        }
    }

    let rewards: Vec<f64> = details.iter().map(|d| d.reward).collect();
    let clean: Vec<f64> = details.iter().filter(|d| d.error.is_none()).map(|d| d.reward).collect();
    let mean_reward = (!clean.is_empty()).then(|| clean.iter().sum::<f64>() / clean.len() as f64);
    RolloutGroup { goal: goal.clone(), proposals, rewards, details, mean_reward }
}

/// Keep groups whose mean reward is strictly between 0 and 1.
pub fn filter_groups(groups: Vec<RolloutGroup>) -> Vec<RolloutGroup> {
    groups
        .into_iter()
        .filter(|g| matches!(g.mean_reward, Some(m) if m != 0.0 && m != 1.0))
        .collect()
}

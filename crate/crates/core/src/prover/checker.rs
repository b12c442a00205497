//! Checker contract and the built-in bounded checker.

use std::time::Instant;

use crate::eval::{decide_bounded, entailment_check, DecisionStatus, Domain};
use crate::lang::{Binder, Formula, GoalDecl, Sort};

use super::types::{CheckVerdict, Obligation};
use super::{DIRECTIVE_DECIDE, MARKER_AND_INTRO, MARKER_FORALL_GROUND};

/// Kernel-side verification. Implementations must tolerate concurrent calls.
pub trait Checker: Send + Sync {
    fn check(&self, obligation: &Obligation, timeout_ms: u64) -> CheckVerdict;

    /// Short identifier recorded in traces.
    fn describe(&self) -> String;
}

impl<C: Checker + ?Sized> Checker for std::sync::Arc<C> {
    fn check(&self, obligation: &Obligation, timeout_ms: u64) -> CheckVerdict {
        (**self).check(obligation, timeout_ms)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// Decides obligations by exhaustive evaluation over a bounded domain.
///
/// The step budget for one check is `min(domain.node_budget, timeout_ms *
/// steps_per_ms)`; running out of it is reported as `Timeout`.
#[derive(Debug, Clone)]
pub struct BuiltinChecker {
    pub domain: Domain,
    pub steps_per_ms: u64,
}

impl BuiltinChecker {
    pub const DEFAULT_STEPS_PER_MS: u64 = 10_000;

    pub fn new(domain: Domain) -> Self {
        BuiltinChecker {
            domain,
            steps_per_ms: Self::DEFAULT_STEPS_PER_MS,
        }
    }

    fn budgeted(&self, timeout_ms: u64) -> Domain {
        let cap = timeout_ms.saturating_mul(self.steps_per_ms).max(1);
        self.domain.with_budget(self.domain.node_budget.min(cap))
    }

    fn direct(&self, goal: &GoalDecl, domain: &Domain) -> CheckVerdict {
        let verdict = decide_bounded(goal, domain);
        match verdict.status {
            DecisionStatus::Valid => CheckVerdict::accepted(Vec::new()),
            DecisionStatus::Counterexample { witness } => {
                CheckVerdict::rejected(format!("counterexample: {witness}"))
            }
            DecisionStatus::ResourceExceeded => CheckVerdict::timeout(),
        }
    }

    fn reconstruction(&self, goal: &GoalDecl, lemmas: &[GoalDecl], marker: &str, domain: &Domain) -> CheckVerdict {
        let structural = match marker {
            MARKER_AND_INTRO => and_intro_covers(&goal.body, goal, lemmas),
            MARKER_FORALL_GROUND => grounding_covers(goal, lemmas, domain),
            _ => false,
        };
        if structural {
            return CheckVerdict::accepted(Vec::new());
        }
        match entailment_check(lemmas, goal, domain) {
            Ok(true) => CheckVerdict::accepted(Vec::new()),
            Ok(false) => CheckVerdict::rejected("lemmas do not entail the goal"),
            Err(_) => CheckVerdict::timeout(),
        }
    }
}

impl Checker for BuiltinChecker {
    fn check(&self, obligation: &Obligation, timeout_ms: u64) -> CheckVerdict {
        let start = Instant::now();
        let domain = self.budgeted(timeout_ms);
        let verdict = match obligation {
            Obligation::Direct { goal } => self.direct(goal, &domain),
            Obligation::Reconstruction {
                goal,
                lemmas,
                reconstruction,
            } => self.reconstruction(goal, lemmas, reconstruction, &domain),
            Obligation::Completion { goal, proof } => {
                if proof.trim() == DIRECTIVE_DECIDE {
                    self.direct(goal, &domain)
                } else {
                    CheckVerdict::rejected(format!("unsupported proof directive `{}`", proof.trim()))
                }
            }
        };
        verdict.with_wall_time(start.elapsed().as_millis() as u64)
    }

    fn describe(&self) -> String {
        "builtin".to_string()
    }
}

/// Lemma binders must be goal binders of the same sort for a lemma body to
/// stand in for a goal subformula.
fn binders_compatible(lemma: &GoalDecl, goal: &GoalDecl) -> bool {
    lemma
        .binders
        .iter()
        .all(|b| goal.binders.iter().any(|g| g == b))
}

fn some_lemma_is(f: &Formula, goal: &GoalDecl, lemmas: &[GoalDecl]) -> bool {
    lemmas
        .iter()
        .any(|l| l.body == *f && binders_compatible(l, goal))
}

/// `f` follows by conjunction introduction from lemma bodies.
fn and_intro_covers(f: &Formula, goal: &GoalDecl, lemmas: &[GoalDecl]) -> bool {
    if some_lemma_is(f, goal, lemmas) {
        return true;
    }
    match f {
        Formula::And(a, b) => and_intro_covers(a, goal, lemmas) && and_intro_covers(b, goal, lemmas),
        Formula::True => true,
        _ => false,
    }
}

/// A bounded integer quantifier is covered by one lemma per domain point.
fn grounding_covers(goal: &GoalDecl, lemmas: &[GoalDecl], domain: &Domain) -> bool {
    let Formula::Forall(Binder { name, sort: Sort::Int }, body) = &goal.body else {
        return false;
    };
    (domain.int_lo..=domain.int_hi).all(|v| some_lemma_is(&body.subst_int(name, v), goal, lemmas))
}

use serde::{Deserialize, Serialize};

use crate::lang::{Binder, GoalDecl};

use super::interp::{EvalError, Interp};
use super::value::{Domain, Env};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DecisionStatus {
    Valid,
    Counterexample { witness: Env },
    ResourceExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionVerdict {
    #[serde(flatten)]
    pub status: DecisionStatus,
    pub steps_used: u64,
}

impl DecisionVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self.status, DecisionStatus::Valid)
    }

    pub fn witness(&self) -> Option<&Env> {
        match &self.status {
            DecisionStatus::Counterexample { witness } => Some(witness),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("evaluation budget exceeded")]
pub struct ResourceExceeded;

enum Walk {
    Continue,
    Stop,
}

/// Visit every assignment of `binders` over `domain` in enumeration order
/// (first binder varies slowest). `visit` sees the interpreter with the
/// assignment pushed.
fn for_each_assignment<'a, F>(
    interp: &mut Interp<'a>,
    domain: &Domain,
    binders: &'a [Binder],
    visit: &mut F,
) -> Result<Walk, EvalError>
where
    F: FnMut(&mut Interp<'a>) -> Result<Walk, EvalError>,
{
    let Some((first, rest)) = binders.split_first() else {
        return visit(interp);
    };
    for v in domain.values(first.sort) {
        interp.push(&first.name, v);
        let r = for_each_assignment(interp, domain, rest, visit);
        interp.pop();
        if let Walk::Stop = r? {
            return Ok(Walk::Stop);
        }
    }
    Ok(Walk::Continue)
}

/// Exhaustive decision of `goal` over `domain`.
///
/// Returns the first falsifying assignment in enumeration order. An
/// evaluation fault (division by zero, overflow) at an assignment makes that
/// assignment falsifying; running out of `node_budget` yields
/// `ResourceExceeded`.
pub fn decide_bounded(goal: &GoalDecl, domain: &Domain) -> DecisionVerdict {
    let mut interp = Interp::new(domain, domain.node_budget);
    let mut witness: Option<Env> = None;
    let binders = &goal.binders;
    let body = &goal.body;
    let result = for_each_assignment(&mut interp, domain, binders, &mut |it| {
        let depth = it.depth();
        match it.formula(body) {
            Ok(true) => Ok(Walk::Continue),
            Err(e @ EvalError::BudgetExceeded(_)) => Err(e),
            Ok(false) | Err(_) => {
                it.truncate(depth);
                witness = Some(current_assignment(it, binders));
                Ok(Walk::Stop)
            }
        }
    });
    let status = match (result, witness) {
        (Err(_), _) => DecisionStatus::ResourceExceeded,
        (Ok(_), Some(witness)) => DecisionStatus::Counterexample { witness },
        (Ok(_), None) => DecisionStatus::Valid,
    };
    DecisionVerdict {
        status,
        steps_used: interp.steps,
    }
}

fn current_assignment(interp: &Interp<'_>, binders: &[Binder]) -> Env {
    let mut env = Env::new();
    for b in binders {
        let v = interp.value_of(&b.name).expect("binder in scope");
        env.insert(&b.name, v.clone());
    }
    env
}

/// A lemma's binders split into those shared with the goal (same name and
/// sort) and those universally closed per goal assignment.
fn unshared_binders<'a>(lemma: &'a GoalDecl, goal: &GoalDecl) -> Vec<&'a Binder> {
    lemma
        .binders
        .iter()
        .filter(|b| !goal.binders.iter().any(|g| g.name == b.name && g.sort == b.sort))
        .collect()
}

/// Does the lemma hold at the goal assignment currently in scope? Faults
/// count as the lemma not holding; only budget exhaustion is an error.
fn lemma_holds<'a>(
    interp: &mut Interp<'a>,
    domain: &Domain,
    lemma: &'a GoalDecl,
    closed_over: &'a [Binder],
) -> Result<bool, ResourceExceeded> {
    let depth = interp.depth();
    let mut all = true;
    let r = for_each_assignment(interp, domain, closed_over, &mut |it| match it.formula(&lemma.body) {
        Ok(true) => Ok(Walk::Continue),
        Err(e @ EvalError::BudgetExceeded(_)) => Err(e),
        Ok(false) | Err(_) => {
            all = false;
            Ok(Walk::Stop)
        }
    });
    interp.truncate(depth);
    match r {
        Ok(_) => Ok(all),
        Err(_) => Err(ResourceExceeded),
    }
}

/// Bounded check of `(L1 /\ ... /\ Lk) => G`.
///
/// Lemma binders are matched to goal binders by name and sort; unmatched
/// lemma binders are universally closed. With no lemmas this is
/// `decide_bounded(goal)` reported as a boolean.
pub fn entailment_check(
    lemmas: &[GoalDecl],
    goal: &GoalDecl,
    domain: &Domain,
) -> Result<bool, ResourceExceeded> {
    let closures: Vec<Vec<Binder>> = lemmas
        .iter()
        .map(|l| unshared_binders(l, goal).into_iter().cloned().collect())
        .collect();

    let mut interp = Interp::new(domain, domain.node_budget);

    // Lemmas mentioning no goal binder are constants; settle them up front.
    let mut pending = Vec::new();
    for (lemma, closed) in lemmas.iter().zip(&closures) {
        if closed.len() == lemma.binders.len() {
            if !lemma_holds(&mut interp, domain, lemma, closed)? {
                return Ok(true);
            }
        } else {
            pending.push((lemma, closed));
        }
    }

    let mut entailed = true;
    let mut budget_hit = false;
    let r = for_each_assignment(&mut interp, domain, &goal.binders, &mut |it| {
        for (lemma, closed) in &pending {
            match lemma_holds(it, domain, lemma, closed) {
                Ok(true) => {}
                Ok(false) => return Ok(Walk::Continue),
                Err(ResourceExceeded) => {
                    budget_hit = true;
                    return Ok(Walk::Stop);
                }
            }
        }
        match it.formula(&goal.body) {
            Ok(true) => Ok(Walk::Continue),
            Err(e @ EvalError::BudgetExceeded(_)) => Err(e),
            Ok(false) | Err(_) => {
                entailed = false;
                Ok(Walk::Stop)
            }
        }
    });
    if budget_hit || r.is_err() {
        return Err(ResourceExceeded);
    }
    Ok(entailed)
}

/// Entry `i` is true iff dropping lemma `i` breaks the entailment.
pub fn leave_one_out_necessity(
    lemmas: &[GoalDecl],
    goal: &GoalDecl,
    domain: &Domain,
) -> Result<Vec<bool>, ResourceExceeded> {
    (0..lemmas.len())
        .map(|i| {
            let rest: Vec<GoalDecl> = lemmas
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, l)| l.clone())
                .collect();
            entailment_check(&rest, goal, domain).map(|ok| !ok)
        })
        .collect()
}

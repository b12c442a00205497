//! Policy contract and the built-in proposal strategies.

use rand::Rng;

use crate::eval::Domain;
use crate::lang::{Binder, Formula, GoalDecl, Sort};
use crate::rng::EngineRng;

use super::types::{CompletionAttempt, DecompositionProposal, PolicyContext, PolicyError};
use super::{DIRECTIVE_DECIDE, DIRECTIVE_GIVE_UP, MARKER_AND_INTRO, MARKER_FORALL_GROUND};

/// Proposal source. Implementations must tolerate concurrent calls; any
/// randomness comes from the caller's generator.
pub trait Policy: Send + Sync {
    fn propose_decomposition(
        &self,
        context: &PolicyContext,
        rng: &mut EngineRng,
    ) -> Result<DecompositionProposal, PolicyError>;

    fn propose_completion(
        &self,
        context: &PolicyContext,
        rng: &mut EngineRng,
    ) -> Result<CompletionAttempt, PolicyError>;

    fn describe(&self) -> String;
}

impl<P: Policy + ?Sized> Policy for std::sync::Arc<P> {
    fn propose_decomposition(&self, c: &PolicyContext, r: &mut EngineRng) -> Result<DecompositionProposal, PolicyError> {
        (**self).propose_decomposition(c, r)
    }
    fn propose_completion(&self, c: &PolicyContext, r: &mut EngineRng) -> Result<CompletionAttempt, PolicyError> {
        (**self).propose_completion(c, r)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

fn decide_attempt(context: &PolicyContext) -> CompletionAttempt {
    CompletionAttempt {
        proof_text: DIRECTIVE_DECIDE.to_string(),
        attempt_index: context.next_attempt_index(),
    }
}

/// A lemma over the parent's binders restricted to those `body` mentions.
fn lemma(name: String, parent: &GoalDecl, body: Formula) -> GoalDecl {
    let free = body.free_vars();
    let binders: Vec<Binder> = parent
        .binders
        .iter()
        .filter(|b| free.contains(&b.name))
        .cloned()
        .collect();
    GoalDecl::new(name, binders, body)
}

/// Conjuncts of `f` after splitting `depth` levels of the And-tree.
fn split_conjunction(f: &Formula, depth: u32, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) if depth > 0 => {
            split_conjunction(a, depth - 1, out);
            split_conjunction(b, depth - 1, out);
        }
        _ => out.push(f.clone()),
    }
}

/// Claims a direct discharge for every goal.
#[derive(Debug, Clone, Default)]
pub struct DirectSubmit;

impl Policy for DirectSubmit {
    fn propose_decomposition(&self, _: &PolicyContext, _: &mut EngineRng) -> Result<DecompositionProposal, PolicyError> {
        Ok(DecompositionProposal::discharge())
    }

    fn propose_completion(&self, c: &PolicyContext, _: &mut EngineRng) -> Result<CompletionAttempt, PolicyError> {
        Ok(decide_attempt(c))
    }

    fn describe(&self) -> String {
        "direct".into()
    }
}

/// Splits a top-level conjunction into its conjuncts, `depth` levels deep.
/// Goals that are not conjunctions get a direct-discharge proposal.
#[derive(Debug, Clone)]
pub struct ConjunctionSplitter {
    pub depth: u32,
}

impl Default for ConjunctionSplitter {
    fn default() -> Self {
        ConjunctionSplitter { depth: 1 }
    }
}

impl ConjunctionSplitter {
    pub fn flattening() -> Self {
        ConjunctionSplitter { depth: u32::MAX }
    }

    pub fn split(&self, context: &PolicyContext) -> Option<DecompositionProposal> {
        let goal = &context.goal;
        if !matches!(goal.body, Formula::And(..)) || self.depth == 0 {
            return None;
        }
        let mut parts = Vec::new();
        split_conjunction(&goal.body, self.depth, &mut parts);
        let lemmas = parts
            .into_iter()
            .enumerate()
            .map(|(i, body)| lemma(context.lemma_name(i + 1), goal, body))
            .collect();
        Some(DecompositionProposal {
            lemmas,
            reconstruction: MARKER_AND_INTRO.to_string(),
            rationale: Some("conjunction introduction".into()),
        })
    }
}

impl Policy for ConjunctionSplitter {
    fn propose_decomposition(&self, c: &PolicyContext, _: &mut EngineRng) -> Result<DecompositionProposal, PolicyError> {
        Ok(self.split(c).unwrap_or_else(DecompositionProposal::discharge))
    }

    fn propose_completion(&self, c: &PolicyContext, _: &mut EngineRng) -> Result<CompletionAttempt, PolicyError> {
        Ok(decide_attempt(c))
    }

    fn describe(&self) -> String {
        format!("splitter:{}", self.depth)
    }
}

/// Replaces `forall y: Int, phi` by one instance `phi[y := v]` per domain
/// point, when the domain has at most `max_points` integers.
#[derive(Debug, Clone)]
pub struct QuantifierGrounder {
    pub domain: Domain,
    pub max_points: u64,
}

impl QuantifierGrounder {
    pub const DEFAULT_MAX_POINTS: u64 = 8;

    pub fn new(domain: Domain) -> Self {
        QuantifierGrounder {
            domain,
            max_points: Self::DEFAULT_MAX_POINTS,
        }
    }

    pub fn ground(&self, context: &PolicyContext) -> Option<DecompositionProposal> {
        let goal = &context.goal;
        let Formula::Forall(Binder { name, sort: Sort::Int }, body) = &goal.body else {
            return None;
        };
        if self.domain.size(Sort::Int) > u128::from(self.max_points) {
            return None;
        }
        let lemmas = (self.domain.int_lo..=self.domain.int_hi)
            .enumerate()
            .map(|(i, v)| lemma(context.lemma_name(i + 1), goal, body.subst_int(name, v)))
            .collect();
        Some(DecompositionProposal {
            lemmas,
            reconstruction: MARKER_FORALL_GROUND.to_string(),
            rationale: Some(format!("instantiate {name} over the domain")),
        })
    }
}

impl Policy for QuantifierGrounder {
    fn propose_decomposition(&self, c: &PolicyContext, _: &mut EngineRng) -> Result<DecompositionProposal, PolicyError> {
        Ok(self.ground(c).unwrap_or_else(DecompositionProposal::discharge))
    }

    fn propose_completion(&self, c: &PolicyContext, _: &mut EngineRng) -> Result<CompletionAttempt, PolicyError> {
        Ok(decide_attempt(c))
    }

    fn describe(&self) -> String {
        format!("grounder:{}", self.max_points)
    }
}

/// Mixture of the built-in strategies drawn with seeded weights, plus a
/// completer that only emits a working directive with probability
/// `completion_success`.
#[derive(Debug, Clone)]
pub struct StochasticPolicy {
    pub split_weight: f64,
    pub ground_weight: f64,
    pub direct_weight: f64,
    pub completion_success: f64,
    pub splitter: ConjunctionSplitter,
    pub grounder: QuantifierGrounder,
}

impl StochasticPolicy {
    pub fn new(domain: Domain) -> Self {
        StochasticPolicy {
            split_weight: 0.5,
            ground_weight: 0.2,
            direct_weight: 0.3,
            completion_success: 0.8,
            splitter: ConjunctionSplitter::default(),
            grounder: QuantifierGrounder::new(domain),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let w = [self.split_weight, self.ground_weight, self.direct_weight];
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) || w.iter().sum::<f64>() <= 0.0 {
            return Err(format!("invalid strategy weights {w:?}"));
        }
        if !(0.0..=1.0).contains(&self.completion_success) {
            return Err(format!("completion_success {} outside [0, 1]", self.completion_success));
        }
        Ok(())
    }
}

impl Policy for StochasticPolicy {
    fn propose_decomposition(&self, c: &PolicyContext, rng: &mut EngineRng) -> Result<DecompositionProposal, PolicyError> {
        let total = self.split_weight + self.ground_weight + self.direct_weight;
        let x = rng.random::<f64>() * total;
        let proposal = if x < self.split_weight {
            self.splitter.split(c)
        } else if x < self.split_weight + self.ground_weight {
            self.grounder.ground(c)
        } else {
            None
        };
        Ok(proposal.unwrap_or_else(DecompositionProposal::discharge))
    }

    fn propose_completion(&self, c: &PolicyContext, rng: &mut EngineRng) -> Result<CompletionAttempt, PolicyError> {
        let ok = rng.random_bool(self.completion_success);
        Ok(CompletionAttempt {
            proof_text: if ok { DIRECTIVE_DECIDE } else { DIRECTIVE_GIVE_UP }.to_string(),
            attempt_index: c.next_attempt_index(),
        })
    }

    fn describe(&self) -> String {
        format!(
            "stochastic:{}/{}/{}:{}",
            self.split_weight, self.ground_weight, self.direct_weight, self.completion_success
        )
    }
}

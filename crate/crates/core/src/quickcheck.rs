//! Randomized counterexample search.
//!
//! Outer binders are sampled uniformly and independently; quantifiers inside
//! the body range over the bounded [`Domain`]. A trial whose evaluation faults
//! or runs out of budget counts as falsifying. Finding nothing proves nothing.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::eval::{holds, Domain, Env, Value};
use crate::lang::{Binder, GoalDecl, Sort};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QcConfig {
    pub trials: u32,
    pub seed: u64,
    pub gen_int_lo: i64,
    pub gen_int_hi: i64,
    pub gen_max_list_len: usize,
    /// Element range for generated lists; defaults to the integer range.
    pub gen_list_elem_lo: Option<i64>,
    pub gen_list_elem_hi: Option<i64>,
}

impl Default for QcConfig {
    fn default() -> Self {
        QcConfig {
            trials: 1000,
            seed: 0,
            gen_int_lo: -100,
            gen_int_hi: 100,
            gen_max_list_len: 8,
            gen_list_elem_lo: None,
            gen_list_elem_hi: None,
        }
    }
}

impl QcConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.trials == 0 {
            return Err("trials must be at least 1".into());
        }
        if self.gen_int_lo > self.gen_int_hi {
            return Err(format!("gen_int_lo {} > gen_int_hi {}", self.gen_int_lo, self.gen_int_hi));
        }
        let (lo, hi) = self.list_elem_range();
        if lo > hi {
            return Err(format!("list element range [{lo}, {hi}] is empty"));
        }
        Ok(())
    }

    /// Generator space matching `domain` exactly (for exhaustive comparisons).
    pub fn covering(domain: &Domain, trials: u32, seed: u64) -> QcConfig {
        QcConfig {
            trials,
            seed,
            gen_int_lo: domain.int_lo,
            gen_int_hi: domain.int_hi,
            gen_max_list_len: domain.max_list_len,
            gen_list_elem_lo: Some(domain.list_elem_lo),
            gen_list_elem_hi: Some(domain.list_elem_hi),
        }
    }

    pub fn list_elem_range(&self) -> (i64, i64) {
        (
            self.gen_list_elem_lo.unwrap_or(self.gen_int_lo),
            self.gen_list_elem_hi.unwrap_or(self.gen_int_hi),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum QcOutcome {
    NoCounterexample { trials_run: u32 },
    /// `trial_index` is 1-based.
    Counterexample { witness: Env, trial_index: u32 },
}

impl QcOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, QcOutcome::NoCounterexample { .. })
    }

    pub fn witness(&self) -> Option<&Env> {
        match self {
            QcOutcome::Counterexample { witness, .. } => Some(witness),
            QcOutcome::NoCounterexample { .. } => None,
        }
    }
}

/// Draw one assignment for `binders`. Identical generator state gives an
/// identical environment.
pub fn generate_env<R: Rng + ?Sized>(binders: &[Binder], config: &QcConfig, rng: &mut R) -> Env {
    let mut env = Env::new();
    refill_env(&mut env, binders, config, rng);
    env
}

/// Overwrite `env` with a fresh draw, reusing its allocations. Draws exactly
/// what [`generate_env`] draws.
fn refill_env<R: Rng + ?Sized>(env: &mut Env, binders: &[Binder], config: &QcConfig, rng: &mut R) {
    let (elo, ehi) = config.list_elem_range();
    for b in binders {
        match b.sort {
            Sort::Int => {
                let v = rng.random_range(config.gen_int_lo..=config.gen_int_hi);
                match env.bindings.get_mut(&b.name) {
                    Some(slot) => *slot = Value::Int(v),
                    None => env.insert(&b.name, Value::Int(v)),
                }
            }
            Sort::IntList => {
                let len = rng.random_range(0..=config.gen_max_list_len);
                if !matches!(env.bindings.get(&b.name), Some(Value::List(_))) {
                    env.insert(&b.name, Value::List(Vec::new()));
                }
                let Some(Value::List(items)) = env.bindings.get_mut(&b.name) else { unreachable!() };
                items.clear();
                items.extend((0..len).map(|_| rng.random_range(elo..=ehi)));
            }
        }
    }
}

/// Search for a falsifying assignment of `goal`. The generator stream is
/// derived from `(config.seed, goal.name)`.
pub fn quickcheck(goal: &GoalDecl, config: &QcConfig, domain: &Domain) -> QcOutcome {
    let mut rng = rng::stream(config.seed, &goal.name);
    let mut env = Env::new();
    for trial in 1..=config.trials {
        refill_env(&mut env, &goal.binders, config, &mut rng);
        if !holds(&goal.body, &env, domain) {
            // re-verify so a reported witness is never spurious
            if !holds(&goal.body, &env, domain) {
                return QcOutcome::Counterexample {
                    witness: env,
                    trial_index: trial,
                };
            }
        }
    }
    QcOutcome::NoCounterexample {
        trials_run: config.trials,
    }
}

//! Bounded concrete semantics: evaluation, exhaustive decision over a finite
//! domain, entailment and lemma-necessity checks.

mod decide;
mod interp;
mod value;

pub use decide::{
    decide_bounded, entailment_check, leave_one_out_necessity, DecisionStatus, DecisionVerdict,
    ResourceExceeded,
};
pub use interp::{eval_formula, eval_term, holds, EvalError};
pub use value::{Domain, Env, Value, ValueIter};

//! Checker and policy contracts, their built-in implementations, external
//! adapters, and the axiom audit.

mod audit;
mod checker;
mod external;
mod policy;
mod prompt;
pub mod transport;
mod types;
pub mod wire;

pub use audit::{axiom_audit, AuditContractViolation, AuditOutcome, AxiomAllowlist, STANDARD_AXIOMS, UNSOUND_AXIOMS};
pub use checker::{BuiltinChecker, Checker};
pub use external::{ExternalChecker, ExternalPolicy};
pub use policy::{ConjunctionSplitter, DirectSubmit, Policy, QuantifierGrounder, StochasticPolicy};
pub use prompt::{apply_edit_blocks, diagnostic_line, render, EditError, PromptTemplates};
pub use types::{
    fresh_lemma_name, CheckStatus, CheckVerdict, CompletionAttempt, DecompositionProposal, Feedback, Obligation,
    PolicyContext, PolicyError, PolicyMode,
};

/// Reconstruction by conjunction introduction over the lemma bodies.
pub const MARKER_AND_INTRO: &str = "builtin:and-intro";
/// Reconstruction by instantiating a bounded integer quantifier.
pub const MARKER_FORALL_GROUND: &str = "builtin:forall-ground";
/// No lemmas; the goal is claimed directly.
pub const MARKER_DIRECT: &str = "builtin:direct";

/// Completion directive the built-in checker discharges by decision.
pub const DIRECTIVE_DECIDE: &str = "decide";
/// Placeholder proof the built-in checker always rejects.
pub const DIRECTIVE_GIVE_UP: &str = "sorry";

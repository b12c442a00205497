//! Hierarchical lemma-decomposition proof search.
//!
//! The engine decomposes a verification goal into lemmas, gates every
//! decomposition on a reconstruction check and randomized counterexample
//! search, scores it by structural reduction, and closes the remaining leaves
//! with a feedback-driven completion loop. Checkers and policies are
//! pluggable: built-in bounded implementations ship with the crate, external
//! ones attach over a JSON-lines protocol.

pub mod eval;
pub mod lang;
pub mod quickcheck;
pub mod rng;
pub mod scoring;
pub mod prover;
pub mod pool;
pub mod search;
pub mod training;
pub mod analytics;
pub mod config;

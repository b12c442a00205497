//! The goal language: a closed, first-order language over integers and
//! integer lists, its text syntax, and the operator-footprint metric.

mod alpha;
mod ast;
mod error;
mod footprint;
mod lexer;
mod parser;
mod printer;
mod random;

pub use alpha::{alpha_equivalent, alpha_key, canonicalize};
pub use ast::{Binder, Formula, GoalDecl, Sort, Term};
pub use error::{ParseError, SourceSpan};
pub use footprint::{operator_footprint, term_footprint};
pub use parser::{parse_formula, parse_goal, parse_goal_file};
pub use printer::{print_formula, print_goal, print_goal_file, print_term};
pub use random::{random_goal, GoalShape};

impl GoalDecl {
    pub fn footprint(&self) -> usize {
        operator_footprint(&self.body)
    }
}

// Goals travel through traces and wire messages in their text syntax.
impl serde::Serialize for GoalDecl {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&print_goal(self))
    }
}

impl<'de> serde::Deserialize<'de> for GoalDecl {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = <String as serde::Deserialize>::deserialize(deserializer)?;
        parse_goal(&text).map_err(serde::de::Error::custom)
    }
}

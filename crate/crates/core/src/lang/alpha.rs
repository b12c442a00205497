//! Binder-name-independent keys for goals.

use std::collections::HashMap;

use super::ast::{Binder, Formula, GoalDecl, Term};
use super::printer::print_goal;

/// Rename every binder (goal-level and quantifier) to a positional name.
/// Two goals are alpha-equivalent iff their canonical forms are equal; the
/// goal name is not part of the comparison.
pub fn canonicalize(goal: &GoalDecl) -> GoalDecl {
    let mut renamer = Renamer::default();
    let binders = goal
        .binders
        .iter()
        .map(|b| Binder::new(renamer.bind(&b.name), b.sort))
        .collect();
    let body = renamer.formula(&goal.body);
    GoalDecl::new("_", binders, body)
}

/// Printed canonical form; suitable as a hash key.
pub fn alpha_key(goal: &GoalDecl) -> String {
    print_goal(&canonicalize(goal))
}

pub fn alpha_equivalent(a: &GoalDecl, b: &GoalDecl) -> bool {
    canonicalize(a) == canonicalize(b)
}

#[derive(Default)]
struct Renamer {
    scopes: HashMap<String, Vec<String>>,
    counter: usize,
}

impl Renamer {
    fn bind(&mut self, name: &str) -> String {
        let fresh = format!("v{}", self.counter);
        self.counter += 1;
        self.scopes.entry(name.to_string()).or_default().push(fresh.clone());
        fresh
    }

    fn unbind(&mut self, name: &str) {
        if let Some(stack) = self.scopes.get_mut(name) {
            stack.pop();
        }
    }

    fn lookup(&self, name: &str) -> String {
        self.scopes
            .get(name)
            .and_then(|s| s.last())
            .cloned()
            .unwrap_or_else(|| name.to_string())
    }

    fn formula(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Eq(a, b) => Formula::Eq(self.term(a), self.term(b)),
            Formula::Lt(a, b) => Formula::Lt(self.term(a), self.term(b)),
            Formula::Le(a, b) => Formula::Le(self.term(a), self.term(b)),
            Formula::Mem(a, b) => Formula::Mem(self.term(a), self.term(b)),
            Formula::Not(a) => Formula::not(self.formula(a)),
            Formula::And(a, b) => Formula::and(self.formula(a), self.formula(b)),
            Formula::Or(a, b) => Formula::or(self.formula(a), self.formula(b)),
            Formula::Implies(a, b) => Formula::implies(self.formula(a), self.formula(b)),
            Formula::Forall(b, body) | Formula::Exists(b, body) => {
                let fresh = self.bind(&b.name);
                let inner = self.formula(body);
                self.unbind(&b.name);
                let binder = Binder::new(fresh, b.sort);
                if matches!(f, Formula::Forall(..)) {
                    Formula::Forall(binder, Box::new(inner))
                } else {
                    Formula::Exists(binder, Box::new(inner))
                }
            }
        }
    }

    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Int(v) => Term::Int(*v),
            Term::Var(name) => Term::Var(self.lookup(name)),
            Term::Add(a, b) => Term::add(self.term(a), self.term(b)),
            Term::Sub(a, b) => Term::sub(self.term(a), self.term(b)),
            Term::Mul(a, b) => Term::mul(self.term(a), self.term(b)),
            Term::Mod(a, b) => Term::modulo(self.term(a), self.term(b)),
            Term::List(items) => Term::List(items.iter().map(|i| self.term(i)).collect()),
            Term::Cons(a, b) => Term::cons(self.term(a), self.term(b)),
            Term::Append(a, b) => Term::append(self.term(a), self.term(b)),
            Term::Length(a) => Term::length(self.term(a)),
            Term::Count(a, b) => Term::count(self.term(a), self.term(b)),
            Term::Ite(c, a, b) => Term::ite(self.formula(c), self.term(a), self.term(b)),
        }
    }
}

//! Random well-sorted goals, for property tests and synthetic corpora.

use rand::Rng;

use super::ast::{Binder, Formula, GoalDecl, Sort, Term};

/// Shape parameters for [`random_goal`].
#[derive(Debug, Clone)]
pub struct GoalShape {
    /// Maximum nesting depth of formulas and terms.
    pub max_depth: u32,
    /// Goal binders; quantifiers may shadow these.
    pub binders: Vec<Binder>,
    /// Names quantifiers draw from.
    pub bound_names: Vec<String>,
    /// Literal range for integer constants.
    pub lit_lo: i64,
    pub lit_hi: i64,
    /// Allow quantifiers inside the body.
    pub quantifiers: bool,
}

impl Default for GoalShape {
    fn default() -> Self {
        GoalShape {
            max_depth: 4,
            binders: vec![Binder::new("x", Sort::Int), Binder::new("l", Sort::IntList)],
            bound_names: vec!["y".into(), "x".into(), "m".into()],
            lit_lo: -2,
            lit_hi: 2,
            quantifiers: true,
        }
    }
}

pub fn random_goal<R: Rng + ?Sized>(rng: &mut R, name: &str, shape: &GoalShape) -> GoalDecl {
    let mut scope: Vec<(String, Sort)> = shape
        .binders
        .iter()
        .map(|b| (b.name.clone(), b.sort))
        .collect();
    let body = formula(rng, shape, &mut scope, shape.max_depth);
    GoalDecl::new(name, shape.binders.clone(), body)
}

fn formula<R: Rng + ?Sized>(
    rng: &mut R,
    shape: &GoalShape,
    scope: &mut Vec<(String, Sort)>,
    depth: u32,
) -> Formula {
    let leaf = depth == 0;
    let pick = if leaf { rng.random_range(0..6) } else { rng.random_range(0..13) };
    let d = depth.saturating_sub(1);
    match pick {
        0 => {
            if rng.random_bool(0.5) {
                Formula::True
            } else {
                Formula::False
            }
        }
        1 => Formula::Eq(term(rng, shape, scope, Sort::Int, d), term(rng, shape, scope, Sort::Int, d)),
        2 => Formula::Lt(term(rng, shape, scope, Sort::Int, d), term(rng, shape, scope, Sort::Int, d)),
        3 => Formula::Le(term(rng, shape, scope, Sort::Int, d), term(rng, shape, scope, Sort::Int, d)),
        4 => Formula::Mem(term(rng, shape, scope, Sort::Int, d), term(rng, shape, scope, Sort::IntList, d)),
        5 => Formula::Eq(
            term(rng, shape, scope, Sort::IntList, d),
            term(rng, shape, scope, Sort::IntList, d),
        ),
        6 => Formula::not(formula(rng, shape, scope, d)),
        7 => Formula::and(formula(rng, shape, scope, d), formula(rng, shape, scope, d)),
        8 => Formula::or(formula(rng, shape, scope, d), formula(rng, shape, scope, d)),
        9 => Formula::implies(formula(rng, shape, scope, d), formula(rng, shape, scope, d)),
        _ if shape.quantifiers && !shape.bound_names.is_empty() => {
            let name = shape.bound_names[rng.random_range(0..shape.bound_names.len())].clone();
            let sort = if rng.random_bool(0.7) { Sort::Int } else { Sort::IntList };
            scope.push((name.clone(), sort));
            let body = formula(rng, shape, scope, d);
            scope.pop();
            let binder = Binder::new(name, sort);
            if rng.random_bool(0.5) {
                Formula::Forall(binder, Box::new(body))
            } else {
                Formula::Exists(binder, Box::new(body))
            }
        }
        _ => Formula::and(formula(rng, shape, scope, d), formula(rng, shape, scope, d)),
    }
}

fn var_of<R: Rng + ?Sized>(rng: &mut R, scope: &[(String, Sort)], sort: Sort) -> Option<Term> {
    // innermost binding of each name decides its sort
    let mut visible: Vec<&str> = Vec::new();
    for (i, (name, s)) in scope.iter().enumerate() {
        let shadowed = scope[i + 1..].iter().any(|(n, _)| n == name);
        if !shadowed && *s == sort {
            visible.push(name);
        }
    }
    if visible.is_empty() {
        None
    } else {
        Some(Term::Var(visible[rng.random_range(0..visible.len())].to_string()))
    }
}

fn term<R: Rng + ?Sized>(
    rng: &mut R,
    shape: &GoalShape,
    scope: &mut Vec<(String, Sort)>,
    sort: Sort,
    depth: u32,
) -> Term {
    let d = depth.saturating_sub(1);
    match sort {
        Sort::Int => {
            let pick = if depth == 0 { rng.random_range(0..2) } else { rng.random_range(0..10) };
            match pick {
                0 => var_of(rng, scope, Sort::Int)
                    .unwrap_or_else(|| Term::Int(rng.random_range(shape.lit_lo..=shape.lit_hi))),
                1 => Term::Int(rng.random_range(shape.lit_lo..=shape.lit_hi)),
                2 => Term::add(term(rng, shape, scope, Sort::Int, d), term(rng, shape, scope, Sort::Int, d)),
                3 => Term::sub(term(rng, shape, scope, Sort::Int, d), term(rng, shape, scope, Sort::Int, d)),
                4 => Term::mul(term(rng, shape, scope, Sort::Int, d), term(rng, shape, scope, Sort::Int, d)),
                5 => Term::modulo(term(rng, shape, scope, Sort::Int, d), term(rng, shape, scope, Sort::Int, d)),
                6 => Term::length(term(rng, shape, scope, Sort::IntList, d)),
                7 => Term::count(term(rng, shape, scope, Sort::IntList, d), term(rng, shape, scope, Sort::Int, d)),
                8 => Term::ite(
                    formula(rng, shape, scope, d),
                    term(rng, shape, scope, Sort::Int, d),
                    term(rng, shape, scope, Sort::Int, d),
                ),
                _ => var_of(rng, scope, Sort::Int).unwrap_or(Term::Int(0)),
            }
        }
        Sort::IntList => {
            let pick = if depth == 0 { rng.random_range(0..2) } else { rng.random_range(0..6) };
            match pick {
                0 => var_of(rng, scope, Sort::IntList).unwrap_or(Term::List(vec![])),
                1 => {
                    let n = rng.random_range(0..3);
                    Term::List((0..n).map(|_| term(rng, shape, scope, Sort::Int, 0)).collect())
                }
                2 => Term::cons(term(rng, shape, scope, Sort::Int, d), term(rng, shape, scope, Sort::IntList, d)),
                3 => Term::append(
                    term(rng, shape, scope, Sort::IntList, d),
                    term(rng, shape, scope, Sort::IntList, d),
                ),
                4 => Term::ite(
                    formula(rng, shape, scope, d),
                    term(rng, shape, scope, Sort::IntList, d),
                    term(rng, shape, scope, Sort::IntList, d),
                ),
                _ => var_of(rng, scope, Sort::IntList).unwrap_or(Term::List(vec![])),
            }
        }
    }
}

use super::ast::{Formula, Term};

/// Operator footprint: one per operator node. Variables, literals, list
/// literals, `true`/`false` and binder annotations count zero.
pub fn operator_footprint(body: &Formula) -> usize {
    match body {
        Formula::True | Formula::False => 0,
        Formula::Eq(a, b) | Formula::Lt(a, b) | Formula::Le(a, b) | Formula::Mem(a, b) => {
            1 + term_footprint(a) + term_footprint(b)
        }
        Formula::Not(a) => 1 + operator_footprint(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            1 + operator_footprint(a) + operator_footprint(b)
        }
        Formula::Forall(_, body) | Formula::Exists(_, body) => 1 + operator_footprint(body),
    }
}

pub fn term_footprint(t: &Term) -> usize {
    match t {
        Term::Int(_) | Term::Var(_) => 0,
        Term::List(items) => items.iter().map(term_footprint).sum(),
        Term::Add(a, b)
        | Term::Sub(a, b)
        | Term::Mul(a, b)
        | Term::Mod(a, b)
        | Term::Cons(a, b)
        | Term::Append(a, b)
        | Term::Count(a, b) => 1 + term_footprint(a) + term_footprint(b),
        Term::Length(a) => 1 + term_footprint(a),
        Term::Ite(c, a, b) => 1 + operator_footprint(c) + term_footprint(a) + term_footprint(b),
    }
}

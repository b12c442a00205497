//! Canonical ASCII rendering. Output always reparses to the same tree.

use std::fmt::Write;

use super::ast::{Binder, Formula, GoalDecl, Term};

pub fn print_goal(goal: &GoalDecl) -> String {
    let mut out = String::new();
    out.push_str("goal ");
    out.push_str(&goal.name);
    if !goal.binders.is_empty() {
        out.push_str(" (");
        for (i, b) in goal.binders.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write_binder(&mut out, b);
        }
        out.push(')');
    }
    out.push_str(" := ");
    write_formula(&mut out, &goal.body);
    out
}

/// Declarations joined by newlines, with a trailing newline.
pub fn print_goal_file(goals: &[GoalDecl]) -> String {
    goals.iter().map(|g| print_goal(g) + "\n").collect()
}

pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f);
    out
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t, 0);
    out
}

fn write_binder(out: &mut String, b: &Binder) {
    let _ = write!(out, "{}: {}", b.name, b.sort);
}

fn is_connective_or_binder(f: &Formula) -> bool {
    matches!(
        f,
        Formula::And(..) | Formula::Or(..) | Formula::Implies(..) | Formula::Forall(..) | Formula::Exists(..)
    )
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Eq(a, b) => write_relation(out, a, "=", b),
        Formula::Lt(a, b) => write_relation(out, a, "<", b),
        Formula::Le(a, b) => write_relation(out, a, "<=", b),
        Formula::Mem(a, b) => write_relation(out, a, "in", b),
        Formula::Not(a) => {
            out.push('~');
            write_operand(out, a);
        }
        Formula::And(a, b) => write_connective(out, a, "/\\", b),
        Formula::Or(a, b) => write_connective(out, a, "\\/", b),
        Formula::Implies(a, b) => write_connective(out, a, "->", b),
        Formula::Forall(b, body) | Formula::Exists(b, body) => {
            out.push_str(if matches!(f, Formula::Forall(..)) { "forall " } else { "exists " });
            write_binder(out, b);
            out.push_str(", ");
            write_formula(out, body);
        }
    }
}

fn write_operand(out: &mut String, f: &Formula) {
    if is_connective_or_binder(f) {
        out.push('(');
        write_formula(out, f);
        out.push(')');
    } else {
        write_formula(out, f);
    }
}

fn write_connective(out: &mut String, a: &Formula, op: &str, b: &Formula) {
    write_operand(out, a);
    let _ = write!(out, " {op} ");
    write_operand(out, b);
}

fn write_relation(out: &mut String, a: &Term, op: &str, b: &Term) {
    write_term(out, a, 0);
    let _ = write!(out, " {op} ");
    write_term(out, b, 0);
}

// Term precedence levels: 1 = `::`/`++` (right assoc), 2 = `+`/`-`, 3 = `*`/`%`, 4 = primary.
fn level(t: &Term) -> u8 {
    match t {
        Term::Cons(..) | Term::Append(..) => 1,
        Term::Add(..) | Term::Sub(..) => 2,
        Term::Mul(..) | Term::Mod(..) => 3,
        _ => 4,
    }
}

fn write_term(out: &mut String, t: &Term, min_level: u8) {
    // `if` swallows everything to its right, so it is bracketed inside any operator.
    let needs_parens = level(t) < min_level || (min_level > 0 && matches!(t, Term::Ite(..)));
    if needs_parens {
        out.push('(');
    }
    match t {
        Term::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Term::Var(name) => out.push_str(name),
        Term::Add(a, b) => write_left_assoc(out, a, " + ", b, 2),
        Term::Sub(a, b) => write_left_assoc(out, a, " - ", b, 2),
        Term::Mul(a, b) => write_left_assoc(out, a, " * ", b, 3),
        Term::Mod(a, b) => write_left_assoc(out, a, " % ", b, 3),
        Term::Cons(a, b) => write_right_assoc(out, a, " :: ", b),
        Term::Append(a, b) => write_right_assoc(out, a, " ++ ", b),
        Term::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_term(out, item, 0);
            }
            out.push(']');
        }
        Term::Length(a) => {
            out.push_str("length(");
            write_term(out, a, 0);
            out.push(')');
        }
        Term::Count(a, b) => {
            out.push_str("count(");
            write_term(out, a, 0);
            out.push_str(", ");
            write_term(out, b, 0);
            out.push(')');
        }
        Term::Ite(c, a, b) => {
            out.push_str("if ");
            write_formula(out, c);
            out.push_str(" then ");
            write_term(out, a, 0);
            out.push_str(" else ");
            write_term(out, b, 0);
        }
    }
    if needs_parens {
        out.push(')');
    }
}

fn write_left_assoc(out: &mut String, a: &Term, op: &str, b: &Term, lvl: u8) {
    write_term(out, a, lvl);
    out.push_str(op);
    write_term(out, b, lvl + 1);
}

fn write_right_assoc(out: &mut String, a: &Term, op: &str, b: &Term) {
    write_term(out, a, 2);
    out.push_str(op);
    write_term(out, b, 1);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ast::Sort;
    use crate::lang::parser::parse_goal;

    #[test]
    fn canonical_minimal_form() {
        let g = parse_goal("goal   t1 ( x :Int )  :=  x=x").unwrap();
        assert_eq!(print_goal(&g), "goal t1 (x: Int) := x = x");
    }

    #[test]
    fn nested_and_gets_explicit_parentheses() {
        let g = GoalDecl::new(
            "n",
            vec![],
            Formula::and(Formula::and(Formula::True, Formula::False), Formula::True),
        );
        let text = print_goal(&g);
        assert_eq!(text, "goal n := (true /\\ false) /\\ true");
        assert_eq!(parse_goal(&text).unwrap(), g);
    }

    #[test]
    fn unicode_input_prints_ascii() {
        let g = parse_goal("goal u (l: IntList) := ∀ y: Int, y ∈ l → ¬(y ≤ 0) ∧ y ≠ 1").unwrap();
        let text = print_goal(&g);
        assert!(text.is_ascii());
        assert_eq!(parse_goal(&text).unwrap(), g);
    }

    #[test]
    fn term_parenthesisation() {
        let x = || Term::var("x");
        let cases = [
            (Term::sub(x(), Term::sub(x(), Term::Int(1))), "x - (x - 1)"),
            (Term::sub(Term::sub(x(), x()), Term::Int(1)), "x - x - 1"),
            (Term::mul(Term::add(x(), x()), Term::Int(-2)), "(x + x) * -2"),
            (Term::add(Term::ite(Formula::True, x(), x()), Term::Int(1)), "(if true then x else x) + 1"),
        ];
        for (t, expected) in cases {
            assert_eq!(print_term(&t), expected);
        }
    }

    #[test]
    fn quantifier_operands_are_bracketed() {
        let f = Formula::and(
            Formula::forall("y", Sort::Int, Formula::True),
            Formula::False,
        );
        assert_eq!(print_formula(&f), "(forall y: Int, true) /\\ false");
    }
}

use std::fmt;

/// The two sorts of the language. Anything else in source text is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Int,
    IntList,
}

impl Sort {
    pub fn keyword(self) -> &'static str {
        match self {
            Sort::Int => "Int",
            Sort::IntList => "IntList",
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Binder {
    pub name: String,
    pub sort: Sort,
}

impl Binder {
    pub fn new(name: impl Into<String>, sort: Sort) -> Self {
        Binder {
            name: name.into(),
            sort,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Int(i64),
    Var(String),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Mod(Box<Term>, Box<Term>),
    List(Vec<Term>),
    Cons(Box<Term>, Box<Term>),
    Append(Box<Term>, Box<Term>),
    Length(Box<Term>),
    /// `count(list, element)`
    Count(Box<Term>, Box<Term>),
    Ite(Box<Formula>, Box<Term>, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Lt(Term, Term),
    Le(Term, Term),
    /// `element in list`
    Mem(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Binder, Box<Formula>),
    Exists(Binder, Box<Formula>),
}

/// A named verification goal: universally closed over its binders.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GoalDecl {
    pub name: String,
    pub binders: Vec<Binder>,
    pub body: Formula,
}

impl GoalDecl {
    pub fn new(name: impl Into<String>, binders: Vec<Binder>, body: Formula) -> Self {
        GoalDecl {
            name: name.into(),
            binders,
            body,
        }
    }
}

// Small constructors; they keep test and policy code readable.
impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }
    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }
    pub fn sub(a: Term, b: Term) -> Term {
        Term::Sub(Box::new(a), Box::new(b))
    }
    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }
    pub fn modulo(a: Term, b: Term) -> Term {
        Term::Mod(Box::new(a), Box::new(b))
    }
    pub fn cons(a: Term, b: Term) -> Term {
        Term::Cons(Box::new(a), Box::new(b))
    }
    pub fn append(a: Term, b: Term) -> Term {
        Term::Append(Box::new(a), Box::new(b))
    }
    pub fn length(a: Term) -> Term {
        Term::Length(Box::new(a))
    }
    pub fn count(list: Term, elem: Term) -> Term {
        Term::Count(Box::new(list), Box::new(elem))
    }
    pub fn ite(c: Formula, t: Term, e: Term) -> Term {
        Term::Ite(Box::new(c), Box::new(t), Box::new(e))
    }
}

impl Formula {
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn forall(name: &str, sort: Sort, body: Formula) -> Formula {
        Formula::Forall(Binder::new(name, sort), Box::new(body))
    }
    pub fn exists(name: &str, sort: Sort, body: Formula) -> Formula {
        Formula::Exists(Binder::new(name, sort), Box::new(body))
    }

    /// Right-nested conjunction of `parts`; `True` when empty.
    pub fn conjoin(parts: Vec<Formula>) -> Formula {
        let mut iter = parts.into_iter().rev();
        match iter.next() {
            None => Formula::True,
            Some(last) => iter.fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    /// Free variables in first-occurrence order.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        collect_formula(self, &mut bound, &mut out);
        out
    }

    /// Replace free occurrences of `name` with the integer literal `value`.
    pub fn subst_int(&self, name: &str, value: i64) -> Formula {
        subst_formula(self, name, value)
    }
}

fn collect_formula(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Eq(a, b) | Formula::Lt(a, b) | Formula::Le(a, b) | Formula::Mem(a, b) => {
            collect_term(a, bound, out);
            collect_term(b, bound, out);
        }
        Formula::Not(a) => collect_formula(a, bound, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_formula(a, bound, out);
            collect_formula(b, bound, out);
        }
        Formula::Forall(binder, body) | Formula::Exists(binder, body) => {
            bound.push(binder.name.clone());
            collect_formula(body, bound, out);
            bound.pop();
        }
    }
}

fn collect_term(t: &Term, bound: &mut Vec<String>, out: &mut Vec<String>) {
    match t {
        Term::Int(_) => {}
        Term::Var(name) => {
            if !bound.contains(name) && !out.contains(name) {
                out.push(name.clone());
            }
        }
        Term::Add(a, b)
        | Term::Sub(a, b)
        | Term::Mul(a, b)
        | Term::Mod(a, b)
        | Term::Cons(a, b)
        | Term::Append(a, b)
        | Term::Count(a, b) => {
            collect_term(a, bound, out);
            collect_term(b, bound, out);
        }
        Term::List(items) => items.iter().for_each(|i| collect_term(i, bound, out)),
        Term::Length(a) => collect_term(a, bound, out),
        Term::Ite(c, a, b) => {
            collect_formula(c, bound, out);
            collect_term(a, bound, out);
            collect_term(b, bound, out);
        }
    }
}

fn subst_formula(f: &Formula, name: &str, value: i64) -> Formula {
    let t = |t: &Term| subst_term(t, name, value);
    let g = |f: &Formula| Box::new(subst_formula(f, name, value));
    match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Eq(a, b) => Formula::Eq(t(a), t(b)),
        Formula::Lt(a, b) => Formula::Lt(t(a), t(b)),
        Formula::Le(a, b) => Formula::Le(t(a), t(b)),
        Formula::Mem(a, b) => Formula::Mem(t(a), t(b)),
        Formula::Not(a) => Formula::Not(g(a)),
        Formula::And(a, b) => Formula::And(g(a), g(b)),
        Formula::Or(a, b) => Formula::Or(g(a), g(b)),
        Formula::Implies(a, b) => Formula::Implies(g(a), g(b)),
        Formula::Forall(binder, body) | Formula::Exists(binder, body) if binder.name == name => {
            f.clone()
        }
        Formula::Forall(binder, body) => Formula::Forall(binder.clone(), g(body)),
        Formula::Exists(binder, body) => Formula::Exists(binder.clone(), g(body)),
    }
}

fn subst_term(t: &Term, name: &str, value: i64) -> Term {
    let s = |t: &Term| Box::new(subst_term(t, name, value));
    match t {
        Term::Int(v) => Term::Int(*v),
        Term::Var(v) if v == name => Term::Int(value),
        Term::Var(v) => Term::Var(v.clone()),
        Term::Add(a, b) => Term::Add(s(a), s(b)),
        Term::Sub(a, b) => Term::Sub(s(a), s(b)),
        Term::Mul(a, b) => Term::Mul(s(a), s(b)),
        Term::Mod(a, b) => Term::Mod(s(a), s(b)),
        Term::List(items) => Term::List(items.iter().map(|i| subst_term(i, name, value)).collect()),
        Term::Cons(a, b) => Term::Cons(s(a), s(b)),
        Term::Append(a, b) => Term::Append(s(a), s(b)),
        Term::Length(a) => Term::Length(s(a)),
        Term::Count(a, b) => Term::Count(s(a), s(b)),
        Term::Ite(c, a, b) => Term::Ite(Box::new(subst_formula(c, name, value)), s(a), s(b)),
    }
}

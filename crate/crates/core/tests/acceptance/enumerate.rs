//! Exhaustive enumeration of formulas by operator count.

use lemmaforge::lang::{Binder, Formula, Sort, Term};

pub struct Vocab {
    pub ints: Vec<Term>,
    pub lists: Vec<Term>,
    /// Int variable introduced by `forall`/`exists`; `None` disables quantifiers.
    pub bound: Option<&'static str>,
}

/// Term tables indexed by `[scope][ops]`, scope 1 meaning inside a quantifier.
pub struct Enumerator {
    vocab: Vocab,
    max: usize,
    ints: [Vec<Vec<Term>>; 2],
    lists: [Vec<Vec<Term>>; 2],
}

fn b<T>(t: T) -> Box<T> {
    Box::new(t)
}

impl Enumerator {
    pub fn new(vocab: Vocab, max: usize) -> Self {
        let mut e = Enumerator { vocab, max, ints: [vec![], vec![]], lists: [vec![], vec![]] };
        for q in 0..2 {
            for n in 0..max {
                let (i, l) = e.terms(n, q);
                e.ints[q].push(i);
                e.lists[q].push(l);
            }
        }
        e
    }

    fn terms(&self, n: usize, q: usize) -> (Vec<Term>, Vec<Term>) {
        if n == 0 {
            let mut ints = self.vocab.ints.clone();
            if q == 1 {
                ints.push(Term::Var(self.vocab.bound.unwrap_or("y").into()));
            }
            return (ints, self.vocab.lists.clone());
        }
        let (ints, lists) = (&self.ints[q], &self.lists[q]);
        let mut oi = Vec::new();
        let mut ol = Vec::new();
        for a in 0..n {
            let c = n - 1 - a;
            for x in &ints[a] {
                for y in &ints[c] {
                    oi.push(Term::Add(b(x.clone()), b(y.clone())));
                    oi.push(Term::Sub(b(x.clone()), b(y.clone())));
                    oi.push(Term::Mul(b(x.clone()), b(y.clone())));
                    oi.push(Term::Mod(b(x.clone()), b(y.clone())));
                }
                for y in &lists[c] {
                    ol.push(Term::Cons(b(x.clone()), b(y.clone())));
                }
            }
            for x in &lists[a] {
                for y in &ints[c] {
                    oi.push(Term::Count(b(x.clone()), b(y.clone())));
                }
                for y in &lists[c] {
                    ol.push(Term::Append(b(x.clone()), b(y.clone())));
                }
            }
        }
        for x in &lists[n - 1] {
            oi.push(Term::Length(b(x.clone())));
        }
        (oi, ol)
    }

    /// Every formula with exactly `n` operator nodes, outside any quantifier.
    pub fn for_each(&self, n: usize, f: &mut dyn FnMut(Formula)) {
        assert!(n <= self.max);
        self.forms(n, 0, f);
    }

    fn forms(&self, n: usize, q: usize, f: &mut dyn FnMut(Formula)) {
        if n == 0 {
            f(Formula::True);
            f(Formula::False);
            return;
        }
        let (ints, lists) = (&self.ints[q], &self.lists[q]);
        for a in 0..n {
            let c = n - 1 - a;
            for x in &ints[a] {
                for y in &ints[c] {
                    f(Formula::Eq(x.clone(), y.clone()));
                    f(Formula::Lt(x.clone(), y.clone()));
                    f(Formula::Le(x.clone(), y.clone()));
                }
                for y in &lists[c] {
                    f(Formula::Mem(x.clone(), y.clone()));
                }
            }
            for x in &lists[a] {
                for y in &lists[c] {
                    f(Formula::Eq(x.clone(), y.clone()));
                }
            }
        }
        for a in 0..n {
            let c = n - 1 - a;
            self.forms(a, q, &mut |x| {
                self.forms(c, q, &mut |y| {
                    f(Formula::and(x.clone(), y.clone()));
                    f(Formula::or(x.clone(), y.clone()));
                    f(Formula::implies(x.clone(), y));
                })
            });
        }
        self.forms(n - 1, q, &mut |x| f(Formula::not(x)));
        if let Some(v) = self.vocab.bound {
            self.forms(n - 1, 1, &mut |x| {
                f(Formula::Forall(Binder::new(v, Sort::Int), b(x.clone())));
                f(Formula::Exists(Binder::new(v, Sort::Int), b(x)));
            });
        }
    }
}

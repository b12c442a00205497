use std::borrow::Cow;

use crate::lang::{Formula, Term};

use super::value::{Domain, Env, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero in `%`")]
    DivisionByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("evaluation budget of {0} steps exceeded")]
    BudgetExceeded(u64),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("ill-sorted value for `{0}`")]
    IllSorted(String),
}

/// Step-counting interpreter. One step per node visited; the budget is shared
/// by every evaluation performed through the same instance.
pub(crate) struct Interp<'a> {
    domain: &'a Domain,
    scope: Vec<(&'a str, Cow<'a, Value>)>,
    pub steps: u64,
    budget: u64,
}

type EResult<T> = Result<T, EvalError>;

impl<'a> Interp<'a> {
    pub fn new(domain: &'a Domain, budget: u64) -> Self {
        Interp {
            domain,
            scope: Vec::with_capacity(8),
            steps: 0,
            budget,
        }
    }

    pub fn push(&mut self, name: &'a str, value: Value) {
        self.scope.push((name, Cow::Owned(value)));
    }

    pub fn pop(&mut self) {
        self.scope.pop();
    }

    pub fn load(&mut self, env: &'a Env) {
        for (k, v) in &env.bindings {
            self.scope.push((k.as_str(), Cow::Borrowed(v)));
        }
    }

    pub fn truncate(&mut self, len: usize) {
        self.scope.truncate(len);
    }

    pub fn depth(&self) -> usize {
        self.scope.len()
    }

    fn tick(&mut self) -> EResult<()> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(EvalError::BudgetExceeded(self.budget))
        } else {
            Ok(())
        }
    }

    pub fn value_of(&self, name: &str) -> Option<&Value> {
        self.scope.iter().rev().find(|(n, _)| *n == name).map(|(_, v)| v.as_ref())
    }

    fn lookup(&self, name: &str) -> EResult<&Value> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| v.as_ref())
            .ok_or_else(|| EvalError::Unbound(name.to_string()))
    }

    fn int(&mut self, t: &'a Term) -> EResult<i64> {
        match self.term(t)? {
            Value::Int(v) => Ok(v),
            Value::List(_) => Err(EvalError::IllSorted(crate::lang::print_term(t))),
        }
    }

    fn list(&mut self, t: &'a Term) -> EResult<Vec<i64>> {
        match self.term(t)? {
            Value::List(v) => Ok(v),
            Value::Int(_) => Err(EvalError::IllSorted(crate::lang::print_term(t))),
        }
    }

    /// Like [`Self::list`] but borrows a list variable instead of cloning it.
    fn list_ref(&mut self, t: &'a Term) -> EResult<Cow<'_, [i64]>> {
        if let Term::Var(name) = t {
            self.tick()?;
            return match self.lookup(name)? {
                Value::List(v) => Ok(Cow::Borrowed(v.as_slice())),
                Value::Int(_) => Err(EvalError::IllSorted(crate::lang::print_term(t))),
            };
        }
        Ok(Cow::Owned(self.list(t)?))
    }

    pub fn term(&mut self, t: &'a Term) -> EResult<Value> {
        self.tick()?;
        Ok(match t {
            Term::Int(v) => Value::Int(*v),
            Term::Var(name) => self.lookup(name)?.clone(),
            Term::Add(a, b) => {
                let (x, y) = (self.int(a)?, self.int(b)?);
                Value::Int(x.checked_add(y).ok_or(EvalError::Overflow)?)
            }
            Term::Sub(a, b) => {
                let (x, y) = (self.int(a)?, self.int(b)?);
                Value::Int(x.checked_sub(y).ok_or(EvalError::Overflow)?)
            }
            Term::Mul(a, b) => {
                let (x, y) = (self.int(a)?, self.int(b)?);
                Value::Int(x.checked_mul(y).ok_or(EvalError::Overflow)?)
            }
            Term::Mod(a, b) => {
                let (x, y) = (self.int(a)?, self.int(b)?);
                if y == 0 {
                    return Err(EvalError::DivisionByZero);
                }
                // truncated division: the remainder takes the dividend's sign
                Value::Int(x.checked_rem(y).ok_or(EvalError::Overflow)?)
            }
            Term::List(items) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    out.push(self.int(item)?);
                }
                Value::List(out)
            }
            Term::Cons(h, tl) => {
                let head = self.int(h)?;
                let mut tail = self.list(tl)?;
                tail.insert(0, head);
                Value::List(tail)
            }
            Term::Append(a, b) => {
                let mut x = self.list(a)?;
                x.extend(self.list(b)?);
                Value::List(x)
            }
            Term::Length(a) => {
                let n = self.list_ref(a)?.len();
                Value::Int(i64::try_from(n).map_err(|_| EvalError::Overflow)?)
            }
            Term::Count(l, e) => {
                let items = self.list(l)?;
                let needle = self.int(e)?;
                Value::Int(items.iter().filter(|&&v| v == needle).count() as i64)
            }
            Term::Ite(c, a, b) => {
                if self.formula(c)? {
                    self.term(a)?
                } else {
                    self.term(b)?
                }
            }
        })
    }

    /// Classical semantics with left-to-right short-circuiting. Errors
    /// propagate through every connective, including negation.
    pub fn formula(&mut self, f: &'a Formula) -> EResult<bool> {
        self.tick()?;
        Ok(match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Eq(a, b) => self.term(a)? == self.term(b)?,
            Formula::Lt(a, b) => self.int(a)? < self.int(b)?,
            Formula::Le(a, b) => self.int(a)? <= self.int(b)?,
            Formula::Mem(e, l) => {
                let x = self.int(e)?;
                self.list_ref(l)?.contains(&x)
            }
            Formula::Not(a) => !self.formula(a)?,
            Formula::And(a, b) => self.formula(a)? && self.formula(b)?,
            Formula::Or(a, b) => self.formula(a)? || self.formula(b)?,
            Formula::Implies(a, b) => !self.formula(a)? || self.formula(b)?,
            Formula::Forall(binder, body) => {
                let mut all = true;
                for v in self.domain.values(binder.sort) {
                    self.push(&binder.name, v);
                    let r = self.formula(body);
                    self.pop();
                    if !r? {
                        all = false;
                        break;
                    }
                }
                all
            }
            Formula::Exists(binder, body) => {
                let mut any = false;
                for v in self.domain.values(binder.sort) {
                    self.push(&binder.name, v);
                    let r = self.formula(body);
                    self.pop();
                    if r? {
                        any = true;
                        break;
                    }
                }
                any
            }
        })
    }
}

/// Evaluate `term` under `env`, charging against `domain.node_budget`.
pub fn eval_term(term: &Term, env: &Env, domain: &Domain) -> Result<Value, EvalError> {
    let mut interp = Interp::new(domain, domain.node_budget);
    interp.load(env);
    interp.term(term)
}

/// Evaluate `formula` under `env`; quantifiers range over `domain`.
pub fn eval_formula(formula: &Formula, env: &Env, domain: &Domain) -> Result<bool, EvalError> {
    let mut interp = Interp::new(domain, domain.node_budget);
    interp.load(env);
    interp.formula(formula)
}

/// True iff `formula` evaluates to true. Any evaluation error, budget
/// exhaustion included, makes the assignment falsifying.
pub fn holds(formula: &Formula, env: &Env, domain: &Domain) -> bool {
    matches!(eval_formula(formula, env, domain), Ok(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_formula, Binder, Sort};

    fn int_env(pairs: &[(&str, i64)]) -> Env {
        pairs
            .iter()
            .fold(Env::new(), |e, (k, v)| e.with(k, Value::Int(*v)))
    }

    #[test]
    fn count_and_length() {
        let d = Domain::default();
        let t = Term::count(Term::List(vec![Term::Int(1), Term::Int(2), Term::Int(1)]), Term::Int(1));
        assert_eq!(eval_term(&t, &Env::new(), &d).unwrap(), Value::Int(2));
        let t = Term::length(Term::append(
            Term::List(vec![Term::Int(1)]),
            Term::List(vec![Term::Int(2), Term::Int(3)]),
        ));
        assert_eq!(eval_term(&t, &Env::new(), &d).unwrap(), Value::Int(3));
    }

    #[test]
    fn truncated_modulo() {
        // Independently: -7 = 3 * (-2) + (-1) under truncation toward zero
        // (Python: math.fmod(-7, 3) == -1.0).
        let d = Domain::default();
        let cases = [(-7, 3, -1), (7, -3, 1), (-7, -3, -1), (7, 3, 1), (0, 5, 0)];
        for (a, b, want) in cases {
            let t = Term::modulo(Term::Int(a), Term::Int(b));
            assert_eq!(eval_term(&t, &Env::new(), &d).unwrap(), Value::Int(want), "{a} % {b}");
        }
    }

    #[test]
    fn arithmetic_faults() {
        let d = Domain::default();
        let e = Env::new();
        assert_eq!(
            eval_term(&Term::modulo(Term::Int(1), Term::Int(0)), &e, &d),
            Err(EvalError::DivisionByZero)
        );
        assert_eq!(
            eval_term(&Term::add(Term::Int(i64::MAX), Term::Int(1)), &e, &d),
            Err(EvalError::Overflow)
        );
        assert_eq!(
            eval_term(&Term::modulo(Term::Int(i64::MIN), Term::Int(-1)), &e, &d),
            Err(EvalError::Overflow)
        );
    }

    #[test]
    fn errors_propagate_through_negation() {
        let d = Domain::default();
        let f = parse_formula("~(1 % 0 = 1)", &[]).unwrap();
        assert_eq!(eval_formula(&f, &Env::new(), &d), Err(EvalError::DivisionByZero));
        assert!(!holds(&f, &Env::new(), &d));
    }

    #[test]
    fn literal_equality() {
        let d = Domain::default();
        assert!(eval_formula(&Formula::Eq(Term::Int(1), Term::Int(1)), &Env::new(), &d).unwrap());
    }

    #[test]
    fn forall_boundary() {
        let d = Domain::default();
        let f = parse_formula("forall x: Int, x < 2", &[]).unwrap();
        assert!(!eval_formula(&f, &Env::new(), &d).unwrap());
    }

    #[test]
    fn exists_list_of_length_two() {
        // 13 lists of length <= 2 over [-1, 1]; the nine of length 2 witness it.
        let d = Domain::default();
        let f = parse_formula("exists l: IntList, length(l) = 2", &[]).unwrap();
        assert!(eval_formula(&f, &Env::new(), &d).unwrap());
        let g = parse_formula("exists l: IntList, length(l) = 3", &[]).unwrap();
        assert!(!eval_formula(&g, &Env::new(), &d).unwrap());
    }

    #[test]
    fn budget_exhaustion() {
        let d = Domain {
            node_budget: 10,
            ..Domain::default()
        };
        let f = parse_formula("forall x: Int, forall y: Int, x + y = y + x", &[]).unwrap();
        assert_eq!(eval_formula(&f, &Env::new(), &d), Err(EvalError::BudgetExceeded(10)));
    }

    #[test]
    fn shadowed_quantifier_uses_inner_binding() {
        let d = Domain::default();
        let binders = [Binder::new("x", Sort::Int)];
        let f = parse_formula("exists x: Int, x = 2", &binders).unwrap();
        assert!(eval_formula(&f, &int_env(&[("x", -2)]), &d).unwrap());
    }
}

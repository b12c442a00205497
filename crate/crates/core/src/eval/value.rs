use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lang::Sort;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    List(Vec<i64>),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::Int(_) => Sort::Int,
            Value::List(_) => Sort::IntList,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::List(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// One concrete assignment of values to variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Env {
    pub bindings: BTreeMap<String, Value>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn with(mut self, name: &str, value: Value) -> Self {
        self.bindings.insert(name.to_string(), value);
        self
    }

    pub fn insert(&mut self, name: &str, value: Value) {
        self.bindings.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.get(name)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl fmt::Display for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// Finite universe used by quantifiers and the bounded decision procedure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Domain {
    pub int_lo: i64,
    pub int_hi: i64,
    pub max_list_len: usize,
    pub list_elem_lo: i64,
    pub list_elem_hi: i64,
    /// Maximum evaluation steps for one decision.
    pub node_budget: u64,
}

impl Default for Domain {
    fn default() -> Self {
        Domain {
            int_lo: -2,
            int_hi: 2,
            max_list_len: 2,
            list_elem_lo: -1,
            list_elem_hi: 1,
            node_budget: 2_000_000,
        }
    }
}

impl Domain {
    pub fn validate(&self) -> Result<(), String> {
        if self.int_lo > self.int_hi {
            return Err(format!("int_lo {} > int_hi {}", self.int_lo, self.int_hi));
        }
        if self.list_elem_lo > self.list_elem_hi {
            return Err(format!(
                "list_elem_lo {} > list_elem_hi {}",
                self.list_elem_lo, self.list_elem_hi
            ));
        }
        if self.node_budget == 0 {
            return Err("node_budget must be positive".into());
        }
        Ok(())
    }

    pub fn with_budget(&self, node_budget: u64) -> Domain {
        Domain {
            node_budget,
            ..self.clone()
        }
    }

    /// Number of values of `sort`, saturating at `u128::MAX`.
    pub fn size(&self, sort: Sort) -> u128 {
        match sort {
            Sort::Int => (self.int_hi as i128 - self.int_lo as i128 + 1) as u128,
            Sort::IntList => {
                let width = (self.list_elem_hi as i128 - self.list_elem_lo as i128 + 1) as u128;
                let mut total: u128 = 0;
                let mut layer: u128 = 1;
                for _ in 0..=self.max_list_len {
                    total = total.saturating_add(layer);
                    layer = layer.saturating_mul(width);
                }
                total
            }
        }
    }

    /// Values of `sort` in enumeration order: integers ascending, lists by
    /// length and then lexicographically.
    pub fn values(&self, sort: Sort) -> ValueIter {
        match sort {
            Sort::Int => ValueIter::Ints {
                next: Some(self.int_lo),
                hi: self.int_hi,
            },
            Sort::IntList => ValueIter::Lists {
                current: Some(Vec::new()),
                lo: self.list_elem_lo,
                hi: self.list_elem_hi,
                max_len: self.max_list_len,
            },
        }
    }
}

pub enum ValueIter {
    Ints {
        next: Option<i64>,
        hi: i64,
    },
    Lists {
        current: Option<Vec<i64>>,
        lo: i64,
        hi: i64,
        max_len: usize,
    },
}

impl Iterator for ValueIter {
    type Item = Value;

    fn next(&mut self) -> Option<Value> {
        match self {
            ValueIter::Ints { next, hi } => {
                let v = (*next)?;
                *next = if v < *hi { Some(v + 1) } else { None };
                Some(Value::Int(v))
            }
            ValueIter::Lists {
                current,
                lo,
                hi,
                max_len,
            } => {
                let out = current.take()?;
                let mut succ = out.clone();
                // odometer step, last position least significant
                let mut pos = succ.len();
                loop {
                    if pos == 0 {
                        let len = succ.len() + 1;
                        if len <= *max_len {
                            *current = Some(vec![*lo; len]);
                        }
                        break;
                    }
                    pos -= 1;
                    if succ[pos] < *hi {
                        succ[pos] += 1;
                        for slot in succ.iter_mut().skip(pos + 1) {
                            *slot = *lo;
                        }
                        *current = Some(succ);
                        break;
                    }
                }
                Some(Value::List(out))
            }
        }
    }
}

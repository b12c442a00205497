#![allow(dead_code)]

use lemmaforge::lang::{parse_goal, GoalDecl};
use lemmaforge::rng::stream;
use rand::Rng;

const VALID: &[&str] = &[
    "x + {a} = {a} + x",
    "x * {b} = {b} * x",
    "(x + y) * {b} = x * {b} + y * {b}",
    "x + {a} - {a} = x",
    "length(x :: l) = length(l) + 1",
    "length(l) >= 0",
    "y - y = {a} - {a}",
    "x * {b} + {a} = {a} + {b} * x",
    "count(l, x) <= length(l)",
    "x in x :: l",
];

const FALSE: &[&str] = &["x * x < {c}", "x + {a} = x", "length(l) = {a}", "x < y"];

/// Seeded problem set: conjunctions of 1 to 5 atoms, each valid, with roughly
/// one problem in six carrying a false atom.
pub fn corpus(n: usize, seed: u64) -> Vec<GoalDecl> {
    conjunctions(n, seed, 1..=5, 1.0 / 6.0)
}

/// Conjunctions of valid template atoms; with probability `poison` one atom
/// is replaced by a false one.
pub fn conjunctions(n: usize, seed: u64, atoms: std::ops::RangeInclusive<usize>, poison: f64) -> Vec<GoalDecl> {
    (0..n)
        .map(|i| {
            let mut rng = stream(seed, &format!("corpus/{i}"));
            let m = rng.random_range(atoms.clone());
            let poisoned = rng.random_bool(poison);
            let mut atoms: Vec<String> = (0..m)
                .map(|_| fill(VALID[rng.random_range(0..VALID.len())], &mut rng))
                .collect();
            if poisoned {
                let at = rng.random_range(0..atoms.len());
                atoms[at] = fill(FALSE[rng.random_range(0..FALSE.len())], &mut rng);
            }
            let body = atoms.iter().rev().skip(1).fold(format!("({})", atoms[m - 1]), |acc, a| format!("({a}) /\\ ({acc})"));
            parse_goal(&format!("goal p{i} (x: Int, y: Int, l: IntList) := {body}")).unwrap()
        })
        .collect()
}

fn fill(template: &str, rng: &mut impl Rng) -> String {
    template
        .replace("{a}", &rng.random_range(1..7).to_string())
        .replace("{b}", &rng.random_range(2..6).to_string())
        .replace("{c}", &rng.random_range(2..30).to_string())
}

use std::sync::Arc;

use lemmaforge::eval::{decide_bounded, eval_formula, Domain};
use lemmaforge::lang::{parse_goal, GoalDecl};
use lemmaforge::pool::{PoolConfig, VerifyPool};
use lemmaforge::prover::{
    BuiltinChecker, CheckVerdict, Checker, CompletionAttempt, ConjunctionSplitter, DecompositionProposal,
    DirectSubmit, Obligation, Policy, PolicyContext, PolicyError, MARKER_AND_INTRO,
};
use lemmaforge::rng::{stream, EngineRng};
use lemmaforge::search::{
    run_pass_k, run_single, Backends, GoalStatus, Outcome, RejectReason, RunState, RunTrace, SearchConfig,
    StepOutcome, TraceEvent,
};
use rand::Rng;

fn g(text: &str) -> GoalDecl {
    parse_goal(text).unwrap()
}

fn cfg() -> SearchConfig {
    SearchConfig { decompose_iters: 16, complete_iters: 4, wall_budget_secs: 60, ..SearchConfig::default() }
}

type DecFn = dyn Fn(&PolicyContext, &mut EngineRng) -> Result<DecompositionProposal, PolicyError> + Send + Sync;
type ComFn = dyn Fn(&PolicyContext, &mut EngineRng) -> Result<CompletionAttempt, PolicyError> + Send + Sync;

struct Scripted {
    dec: Box<DecFn>,
    com: Box<ComFn>,
}

impl Policy for Scripted {
    fn propose_decomposition(&self, c: &PolicyContext, r: &mut EngineRng) -> Result<DecompositionProposal, PolicyError> {
        (self.dec)(c, r)
    }
    fn propose_completion(&self, c: &PolicyContext, r: &mut EngineRng) -> Result<CompletionAttempt, PolicyError> {
        (self.com)(c, r)
    }
    fn describe(&self) -> String {
        "scripted".into()
    }
}

fn decide(c: &PolicyContext) -> Result<CompletionAttempt, PolicyError> {
    Ok(CompletionAttempt { proof_text: "decide".into(), attempt_index: c.next_attempt_index() })
}

fn split_into(bodies: &'static [&'static str]) -> Scripted {
    Scripted {
        dec: Box::new(move |c, _| {
            if c.goal.name != "root" {
                return Ok(DecompositionProposal::discharge());
            }
            let binders: Vec<String> = c.goal.binders.iter().map(|b| format!("{}: {}", b.name, b.sort)).collect();
            let lemmas = bodies
                .iter()
                .enumerate()
                .map(|(i, b)| g(&format!("goal {} ({}) := {}", c.lemma_name(i + 1), binders.join(", "), b)))
                .collect();
            Ok(DecompositionProposal { lemmas, reconstruction: "semantic".into(), rationale: None })
        }),
        com: Box::new(|c, _| decide(c)),
    }
}

fn checker() -> BuiltinChecker {
    BuiltinChecker::new(Domain::default())
}

#[test]
fn tautology_discharged_in_one_iteration() {
    let c = checker();
    let (res, trace) = run_single(&g("goal root (x: Int) := x = x"), Backends::new(&DirectSubmit, &c), &cfg()).unwrap();
    assert_eq!(res.outcome, Outcome::Proved);
    assert_eq!(res.iterations.decompose, 1);
    assert_eq!(res.iterations.complete, 0);
    assert_eq!(res.lemma_count, 1);
    assert_eq!(res.solved_at_iteration, Some(0));
    assert!(res.proof_lines.is_none());
    assert!(trace.events().any(|e| matches!(e, TraceEvent::DecomposeAttempt { accepted: true, .. })));
}

#[test]
fn nested_conjunction_expands_in_three_steps() {
    let root = g("goal root (x: Int) := x + 0 = x /\\ (x * 1 = x /\\ (0 + x = x /\\ 1 * x = x))");
    let c = checker();
    let splitter = ConjunctionSplitter::default();
    let config = cfg();
    let mut st = RunState::new(&root, Backends::new(&splitter, &c), &config, 0).unwrap();
    for _ in 0..3 {
        assert!(matches!(st.decompose_step(), StepOutcome::Decomposed { .. }));
    }
    assert_eq!(st.tree.leaf_indices().len(), 4);
    assert_eq!(st.tree.open_indices().len(), 4);
    assert_eq!(st.tree.entries().len(), 7);
    let names: Vec<&str> = st.tree.entries().iter().map(|e| e.goal.name.as_str()).collect();
    assert_eq!(names, ["root", "root_1_1", "root_1_2", "root_1_2_2_1", "root_1_2_2_2", "root_1_2_2_2_3_1", "root_1_2_2_2_3_2"]);

    let (res, _) = run_single(&root, Backends::new(&splitter, &c), &config).unwrap();
    assert_eq!(res.outcome, Outcome::Proved);
    assert_eq!(res.lemma_count, 4);
    assert_eq!(res.iterations.decompose, 7);
}

#[test]
fn flat_four_leaf_conjunction() {
    let root = g("goal root (x: Int, y: Int) := (x + y = y + x /\\ x * y = y * x) /\\ (x - x = 0 /\\ y + 0 = y)");
    let c = checker();
    let (res, _) = run_single(&root, Backends::new(&ConjunctionSplitter { depth: 2 }, &c), &cfg()).unwrap();
    assert_eq!(res.outcome, Outcome::Proved);
    assert_eq!(res.lemma_count, 4);
}

#[test]
fn planted_counterexample_disproves_root() {
    let root = g("goal root (x: Int) := x * x < 50");
    let c = checker();
    let (res, trace) = run_single(&root, Backends::new(&DirectSubmit, &c), &cfg()).unwrap();
    let Outcome::Disproved { witness } = &res.outcome else { panic!("{res:?}") };
    assert_eq!(eval_formula(&root.body, witness, &Domain::default()), Ok(false));
    assert!(matches!(trace.records.last().unwrap().event, TraceEvent::RunEnd { .. }));
    assert!(!trace.events().any(|e| matches!(e, TraceEvent::StageTransition { .. })));
}

#[test]
fn false_lemma_is_gated() {
    let root = g("goal root (x: Int) := x + 0 = x");
    let c = checker();
    let policy = split_into(&["x + 0 = x", "x * 2 = x"]);
    let config = cfg();
    let mut st = RunState::new(&root, Backends::new(&policy, &c), &config, 0).unwrap();
    let out = st.decompose_step();
    assert_eq!(out, StepOutcome::Rejected(RejectReason::QuickcheckFailed { lemmas: vec!["root_1_2".into()] }));
    assert_eq!(st.tree.entries().len(), 1);
    assert_eq!(st.tree.root().status, GoalStatus::Open);
}

#[test]
fn non_entailing_lemmas_are_gated() {
    // false on the domain (x = -2) but outside what quickcheck samples
    let root = g("goal root (x: Int) := x > 0 /\\ x + 1 > x");
    let c = checker();
    let policy = split_into(&["x + 1 > x"]);
    let mut config = cfg();
    config.qc.gen_int_lo = 3;
    config.qc.gen_int_hi = 10;
    let mut st = RunState::new(&root, Backends::new(&policy, &c), &config, 0).unwrap();
    assert!(matches!(st.decompose_step(), StepOutcome::Rejected(RejectReason::ReconstructionFailed { .. })));
    assert_eq!(st.tree.entries().len(), 1);
}

#[test]
fn duplicate_names_are_invalid() {
    let root = g("goal root (x: Int) := x = x /\\ x = x");
    let c = checker();
    let policy = Scripted {
        dec: Box::new(|_, _| {
            Ok(DecompositionProposal {
                lemmas: vec![g("goal root (x: Int) := x = x")],
                reconstruction: MARKER_AND_INTRO.into(),
                rationale: None,
            })
        }),
        com: Box::new(|c, _| decide(c)),
    };
    let config = cfg();
    let mut st = RunState::new(&root, Backends::new(&policy, &c), &config, 0).unwrap();
    assert!(matches!(st.decompose_step(), StepOutcome::Rejected(RejectReason::InvalidProposal { .. })));
}

#[test]
fn lemma_cap_ends_stage_one() {
    let root = g("goal root (x: Int) := x = x /\\ x + 0 = x /\\ x * 1 = x");
    let c = checker();
    let config = SearchConfig { max_open_lemmas: 2, ..cfg() };
    let (res, trace) = run_single(&root, Backends::new(&ConjunctionSplitter::flattening(), &c), &config).unwrap();
    assert_eq!(res.iterations.decompose, 1);
    assert_eq!(res.lemma_count, 1);
    // the root is then closed in the completion stage
    assert_eq!(res.outcome, Outcome::Proved);
    assert_eq!(res.solved_at_iteration, Some(1));
    assert!(trace.events().any(|e| matches!(
        e,
        TraceEvent::DecomposeAttempt { reason: Some(RejectReason::LemmaCapExceeded { inserted: 0, proposed: 3, cap: 2 }), .. }
    )));
}

#[test]
fn policy_errors_consume_iterations() {
    let root = g("goal root (x: Int) := x = x");
    let c = checker();
    let policy = Scripted {
        dec: Box::new(|_, _| Err(PolicyError("unparseable".into()))),
        com: Box::new(|c, _| {
            if c.next_attempt_index() == 1 {
                Err(PolicyError("unparseable".into()))
            } else {
                decide(c)
            }
        }),
    };
    let config = SearchConfig { decompose_iters: 3, ..cfg() };
    let (res, trace) = run_single(&root, Backends::new(&policy, &c), &config).unwrap();
    assert_eq!(res.iterations.decompose, 3);
    assert_eq!(res.iterations.complete, 2);
    assert_eq!(res.outcome, Outcome::Proved);
    let idx: Vec<u32> = trace
        .events()
        .filter_map(|e| match e {
            TraceEvent::CompleteAttempt { attempt, .. } => Some(attempt.attempt_index),
            _ => None,
        })
        .collect();
    assert_eq!(idx, vec![2]);
}

struct DirtyChecker(BuiltinChecker);

impl Checker for DirtyChecker {
    fn check(&self, ob: &Obligation, timeout_ms: u64) -> CheckVerdict {
        match ob {
            Obligation::Completion { .. } => CheckVerdict::accepted(vec!["propext".into(), "Lean.ofReduceBool".into()]),
            _ => self.0.check(ob, timeout_ms),
        }
    }
    fn describe(&self) -> String {
        "dirty".into()
    }
}

#[test]
fn audit_failure_reverts_lemma() {
    let root = g("goal root (x: Int) := x = x");
    let c = DirtyChecker(checker());
    let policy = Scripted { dec: Box::new(|_, _| Err(PolicyError("no".into()))), com: Box::new(|c, _| decide(c)) };
    let config = SearchConfig { decompose_iters: 1, complete_iters: 3, ..cfg() };
    let (res, trace) = run_single(&root, Backends::new(&policy, &c), &config).unwrap();
    assert_eq!(res.outcome, Outcome::Exhausted);
    assert_eq!(res.iterations.complete, 3);
    let audits = trace.events().filter(|e| matches!(e, TraceEvent::AuditFailure { offending, .. } if offending == &vec!["Lean.ofReduceBool".to_string()])).count();
    assert_eq!(audits, 3);
}

#[test]
fn trace_round_trip_and_replay() {
    let root = g("goal root (x: Int, l: IntList) := length(l) >= 0 /\\ (x + 0 = x /\\ count(l, x) = count(l, x))");
    let c = checker();
    let config = SearchConfig { seed: 7, ..cfg() };
    let (r1, t1) = run_single(&root, Backends::new(&ConjunctionSplitter::default(), &c), &config).unwrap();
    let (r2, t2) = run_single(&root, Backends::new(&ConjunctionSplitter::default(), &c), &config).unwrap();
    assert_eq!(r1, r2);
    let text = t1.to_jsonl();
    assert_eq!(text, t2.to_jsonl());
    let back = RunTrace::parse_jsonl(&text).unwrap();
    assert_eq!(back, t1);
    assert_eq!(back.to_jsonl(), text);
    assert!(text.lines().next().unwrap().contains("\"format_version\":1"));
    assert!(!text.contains("wall_ms"));
}

#[test]
fn pool_route_matches_direct_route() {
    let root = g("goal root (x: Int, y: Int) := x + y = y + x /\\ (x * y = y * x /\\ x - y + (y - x) = 0)");
    let c = checker();
    let pool = VerifyPool::new(PoolConfig { max_concurrent: 2, ..PoolConfig::default() }, Arc::new(checker()));
    let config = SearchConfig { decompose_iters: 1, ..cfg() };
    let (a, _) = run_single(&root, Backends::new(&ConjunctionSplitter::default(), &c), &config).unwrap();
    let (b, _) = run_single(&root, Backends::new(&ConjunctionSplitter::default(), &c).with_pool(&pool), &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.outcome, Outcome::Proved);
    let s = pool.stats();
    assert!(s.conserved());
    assert_eq!(s.completed, 3);
}

fn lucky_policy() -> Scripted {
    Scripted {
        dec: Box::new(|_, _| Err(PolicyError("skip".into()))),
        com: Box::new(|c, r| {
            let ok = r.random::<u32>() % 3 == 0;
            Ok(CompletionAttempt { proof_text: if ok { "decide" } else { "sorry" }.into(), attempt_index: c.next_attempt_index() })
        }),
    }
}

#[test]
fn pass_at_k_reports_first_success() {
    let root = g("goal root (x: Int) := x = x");
    let c = checker();
    let policy = lucky_policy();
    let config = SearchConfig { seed: 11, decompose_iters: 0, complete_iters: 1, k_parallel: 8, ..cfg() };
    let expected: Vec<bool> = (0..8u64).map(|i| stream(11 ^ i, "complete/root").random::<u32>() % 3 == 0).collect();
    let res = run_pass_k(&root, Backends::new(&policy, &c), &config).unwrap();
    let got: Vec<bool> = res.runs.iter().map(|r| r.proved()).collect();
    assert_eq!(got, expected);
    assert_eq!(res.first_success_run, expected.iter().position(|&b| b).map(|i| i as u32 + 1));
    assert_eq!(res.solved, expected.contains(&true));
    for (i, t) in res.traces.iter().enumerate() {
        assert_eq!(t.header.run_index, i as u32);
        assert_eq!(t.header.seed, 11 ^ i as u64);
    }
}

#[test]
fn pass_at_one_is_run_single() {
    let root = g("goal root (x: Int) := x = x");
    let c = checker();
    let policy = lucky_policy();
    let config = SearchConfig { seed: 3, decompose_iters: 0, complete_iters: 5, ..cfg() };
    let (single, st) = run_single(&root, Backends::new(&policy, &c), &config).unwrap();
    let pk = run_pass_k(&root, Backends::new(&policy, &c), &config).unwrap();
    assert_eq!(pk.runs, vec![single]);
    assert_eq!(pk.traces[0].to_jsonl(), st.to_jsonl());
}

#[test]
fn fail_fast_only_stops_later_runs() {
    let root = g("goal root (x: Int) := x = x");
    let c = checker();
    let config = SearchConfig { decompose_iters: 0, k_parallel: 6, fail_fast: true, ..cfg() };
    let res = run_pass_k(&root, Backends::new(&DirectSubmit, &c), &config).unwrap();
    assert_eq!(res.first_success_run, Some(1));
    assert!(res.runs[0].proved());
    for r in &res.runs {
        assert!(r.proved() || r.stopped_early);
    }
}

#[test]
fn proved_runs_are_sound() {
    // sanity for the bounded checker path: a proved root decides valid
    let root = g("goal root (x: Int, l: IntList) := length(l) >= 0 /\\ x * 0 = 0");
    let c = checker();
    let (res, _) = run_single(&root, Backends::new(&ConjunctionSplitter::default(), &c), &cfg()).unwrap();
    assert!(res.proved());
    assert!(decide_bounded(&root, &Domain::default()).is_valid());
}

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use crate::eval::{eval_formula, leave_one_out_necessity, Env, EvalError};
use crate::lang::{print_goal, GoalDecl};
use crate::prover::{
    axiom_audit, AuditOutcome, CheckVerdict, CompletionAttempt, Obligation, PolicyContext, DIRECTIVE_DECIDE,
    DIRECTIVE_GIVE_UP,
};
use crate::quickcheck::{quickcheck, QcConfig, QcOutcome};
use crate::rng::{stream, EngineRng};
use crate::scoring::{decomposition_score, ValidityGate};

use super::config::SearchConfig;
use super::trace::{RejectReason, RunTrace, Stage, TraceEvent, TraceHeader, TRACE_FORMAT_VERSION};
use super::tree::{GoalStatus, OpenGoalSet};
use super::{Backends, IterationsUsed, Outcome, RunResult, SearchError, StepOutcome};

/// Mutable state of one run: goal tree, trace, caches and budgets.
pub struct RunState<'a> {
    pub tree: OpenGoalSet,
    pub trace: RunTrace,
    config: &'a SearchConfig,
    backends: Backends<'a>,
    qc_config: QcConfig,
    qc_cache: HashMap<String, QcOutcome>,
    decompose_rng: EngineRng,
    complete_rng: EngineRng,
    started: Instant,
    deadline: Instant,
    stop: Option<&'a (dyn Fn() -> bool + Sync)>,
    decompose_used: u32,
    complete_used: u32,
    disproved: Option<Env>,
    closed_at: HashMap<usize, u32>,
    accepted_proofs: Vec<String>,
    stopped_early: bool,
}

impl<'a> RunState<'a> {
    pub fn new(
        problem: &GoalDecl,
        backends: Backends<'a>,
        config: &'a SearchConfig,
        run_index: u32,
    ) -> Result<Self, SearchError> {
        config.validate().map_err(SearchError::InvalidConfig)?;
        let seed = config.seed ^ u64::from(run_index);
        let header = TraceHeader {
            format_version: TRACE_FORMAT_VERSION,
            run_id: format!("{}-r{}-s{:016x}", problem.name, run_index, seed),
            problem: problem.clone(),
            run_index,
            seed,
            policy: backends.policy.describe(),
            checker: backends.checker.describe(),
            config: config.clone(),
        };
        let mut qc_config = config.qc.clone();
        qc_config.seed ^= seed;
        let started = Instant::now();
        Ok(RunState {
            tree: OpenGoalSet::new(problem.clone()),
            trace: RunTrace::new(header),
            config,
            backends,
            qc_config,
            qc_cache: HashMap::new(),
            decompose_rng: stream(seed, &format!("decompose/{}", problem.name)),
            complete_rng: stream(seed, &format!("complete/{}", problem.name)),
            started,
            deadline: started + Duration::from_secs(config.wall_budget_secs),
            stop: None,
            decompose_used: 0,
            complete_used: 0,
            disproved: None,
            closed_at: HashMap::new(),
            accepted_proofs: Vec::new(),
            stopped_early: false,
        })
    }

    /// Cooperative cancellation, polled between steps.
    pub fn with_stop(mut self, stop: &'a (dyn Fn() -> bool + Sync)) -> Self {
        self.stop = Some(stop);
        self
    }

    pub fn iterations(&self) -> IterationsUsed {
        IterationsUsed { decompose: self.decompose_used, complete: self.complete_used }
    }

    fn should_halt(&mut self) -> bool {
        if self.stop.is_some_and(|f| f()) {
            self.stopped_early = true;
            return true;
        }
        Instant::now() >= self.deadline
    }

    fn quickcheck_cached(&mut self, goal: &GoalDecl) -> (QcOutcome, bool) {
        let key = print_goal(goal);
        if let Some(hit) = self.qc_cache.get(&key) {
            return (hit.clone(), true);
        }
        let out = quickcheck(goal, &self.qc_config, &self.config.domain);
        self.qc_cache.insert(key, out.clone());
        (out, false)
    }

    fn check(&self, obligation: Obligation) -> CheckVerdict {
        let timeout = self.config.check_timeout_ms;
        let verdict = match self.backends.pool {
            Some(pool) => match pool.submit(obligation, Some(timeout)) {
                Ok(h) => pool.wait(&h).unwrap_or_else(|e| CheckVerdict::checker_error(e.to_string())),
                Err(e) => CheckVerdict::checker_error(e.to_string()),
            },
            None => self.backends.checker.check(&obligation, timeout),
        };
        self.scrub(verdict)
    }

    fn scrub(&self, mut verdict: CheckVerdict) -> CheckVerdict {
        if !self.config.trace_timing {
            verdict.wall_time_ms = 0;
        }
        verdict
    }

    fn audit(&self, verdict: &CheckVerdict) -> Option<AuditOutcome> {
        axiom_audit(verdict, &self.config.allowlist).ok()
    }

    /// One decomposition iteration on the selected target.
    pub fn decompose_step(&mut self) -> StepOutcome {
        let Some(ti) = self.tree.select_target(self.config.target_strategy) else {
            return StepOutcome::NoOpenGoals;
        };
        self.decompose_used += 1;
        let iteration = self.decompose_used;
        let target = self.tree.get(ti).clone();
        let tname = target.goal.name.clone();

        // Only the root needs it: lemmas are quickchecked before insertion
        // and the cache replays that result.
        if ti == 0 {
            let (outcome, cached) = self.quickcheck_cached(&target.goal);
            self.trace.push(TraceEvent::TargetQuickcheck {
                iteration,
                target: tname.clone(),
                outcome: outcome.clone(),
                cached,
            });
            if let Some(w) = outcome.witness() {
                if confirmed_false(&target.goal, w, &self.config.domain) {
                    self.trace.push(TraceEvent::GoalDisproved {
                        iteration,
                        target: tname,
                        witness: w.clone(),
                    });
                    self.disproved = Some(w.clone());
                    return StepOutcome::Disproved { witness: w.clone() };
                }
            }
        }

        let siblings: Vec<GoalDecl> = self
            .tree
            .open_indices()
            .into_iter()
            .filter(|&i| i != ti)
            .map(|i| self.tree.get(i).goal.clone())
            .collect();
        let ctx = PolicyContext::decompose(target.goal.clone(), siblings, target.depth + 1);
        let proposal = match self.backends.policy.propose_decomposition(&ctx, &mut self.decompose_rng) {
            Ok(p) => p,
            Err(e) => {
                let message = e.to_string();
                self.trace.push(TraceEvent::StepError {
                    stage: Stage::Decompose,
                    iteration,
                    target: tname,
                    message: message.clone(),
                });
                return StepOutcome::InfrastructureError { message };
            }
        };
        let k = proposal.k();

        let reject = |this: &mut Self, gate: ValidityGate, reason: RejectReason, proposal| {
            this.trace.push(TraceEvent::DecomposeAttempt {
                iteration,
                target: tname.clone(),
                depth: target.depth,
                proposal,
                gate,
                score: None,
                accepted: false,
                reason: Some(reason.clone()),
                necessity: None,
            });
            StepOutcome::Rejected(reason)
        };

        if let Some(message) = self.invalid_proposal(&target.goal, target.footprint, &proposal.lemmas) {
            let gate = ValidityGate { reconstruction_ok: false, qc_ok_per_lemma: vec![false; k] };
            return reject(self, gate, RejectReason::InvalidProposal { message }, proposal);
        }
        let inserted = self.tree.inserted_lemmas();
        if k > 0 && inserted + k > self.config.max_open_lemmas {
            let gate = ValidityGate { reconstruction_ok: false, qc_ok_per_lemma: vec![false; k] };
            let reason = RejectReason::LemmaCapExceeded {
                inserted,
                proposed: k,
                cap: self.config.max_open_lemmas,
            };
            return reject(self, gate, reason, proposal);
        }

        let mut qc_ok = Vec::with_capacity(k);
        for lemma in &proposal.lemmas {
            let (outcome, cached) = self.quickcheck_cached(lemma);
            qc_ok.push(outcome.passed());
            self.trace.push(TraceEvent::LemmaQuickcheck {
                iteration,
                target: tname.clone(),
                lemma: lemma.name.clone(),
                outcome,
                cached,
            });
        }

        let obligation = if k == 0 {
            Obligation::Direct { goal: target.goal.clone() }
        } else {
            Obligation::Reconstruction {
                goal: target.goal.clone(),
                lemmas: proposal.lemmas.clone(),
                reconstruction: proposal.reconstruction.clone(),
            }
        };
        let verdict = self.check(obligation);
        let audit = self.audit(&verdict);
        self.trace.push(TraceEvent::ReconstructionCheck {
            iteration,
            target: tname.clone(),
            verdict: verdict.clone(),
            audit: audit.clone(),
        });
        if verdict.is_infrastructure_error() {
            let message = verdict.diagnostics();
            self.trace.push(TraceEvent::StepError {
                stage: Stage::Decompose,
                iteration,
                target: tname,
                message: message.clone(),
            });
            return StepOutcome::InfrastructureError { message };
        }
        if let Some(AuditOutcome::Failure { offending }) = &audit {
            self.trace.push(TraceEvent::AuditFailure {
                stage: Stage::Decompose,
                goal: tname.clone(),
                offending: offending.clone(),
            });
        }
        let audit_ok = audit.as_ref().is_none_or(AuditOutcome::passed);
        let gate = ValidityGate {
            reconstruction_ok: verdict.is_accepted() && audit_ok,
            qc_ok_per_lemma: qc_ok.clone(),
        };
        let children_fp: Vec<u64> = proposal.lemmas.iter().map(|l| l.footprint() as u64).collect();
        let score = match decomposition_score(&gate, target.footprint as u64, &children_fp, &self.config.score) {
            Ok(s) => s,
            Err(e) => {
                return reject(self, gate, RejectReason::InvalidProposal { message: e.to_string() }, proposal);
            }
        };

        let accepted = score.v == 1;
        let reason = if accepted {
            None
        } else if qc_ok.iter().any(|ok| !ok) {
            let lemmas = proposal
                .lemmas
                .iter()
                .zip(&qc_ok)
                .filter(|(_, ok)| !**ok)
                .map(|(l, _)| l.name.clone())
                .collect();
            Some(RejectReason::QuickcheckFailed { lemmas })
        } else if let Some(AuditOutcome::Failure { offending }) = audit {
            Some(RejectReason::AuditFailed { offending })
        } else {
            Some(RejectReason::ReconstructionFailed { diagnostics: verdict.diagnostics() })
        };
        let necessity = if accepted && k > 0 && self.config.record_necessity {
            leave_one_out_necessity(&proposal.lemmas, &target.goal, &self.config.domain).ok()
        } else {
            None
        };
        self.trace.push(TraceEvent::DecomposeAttempt {
            iteration,
            target: tname.clone(),
            depth: target.depth,
            proposal: proposal.clone(),
            gate,
            score: Some(score.clone()),
            accepted,
            reason: reason.clone(),
            necessity,
        });

        match reason {
            Some(r) => StepOutcome::Rejected(r),
            None if k == 0 => {
                self.tree.set_status(ti, GoalStatus::ClosedByDischarge);
                StepOutcome::Discharged { target: tname }
            }
            None => {
                self.tree.set_status(ti, GoalStatus::Decomposed);
                let children = proposal.lemmas.iter().map(|l| l.name.clone()).collect();
                self.tree.insert_children(ti, proposal.lemmas, &score);
                StepOutcome::Decomposed { target: tname, children }
            }
        }
    }

    fn invalid_proposal(&self, target: &GoalDecl, footprint: usize, lemmas: &[GoalDecl]) -> Option<String> {
        if !lemmas.is_empty() && footprint == 0 {
            return Some(format!("goal `{}` has zero footprint and cannot be decomposed", target.name));
        }
        for (i, l) in lemmas.iter().enumerate() {
            if self.tree.contains_name(&l.name) {
                return Some(format!("lemma name `{}` is already in the goal tree", l.name));
            }
            if lemmas[..i].iter().any(|o| o.name == l.name) {
                return Some(format!("lemma name `{}` is proposed twice", l.name));
            }
        }
        None
    }

    /// Stage 1. Stops on budget, no open goals, disproof, or the lemma cap.
    pub fn decomposition_stage(&mut self) {
        for _ in 0..self.config.decompose_iters {
            if !self.tree.has_open() || self.should_halt() {
                break;
            }
            match self.decompose_step() {
                StepOutcome::Disproved { .. }
                | StepOutcome::NoOpenGoals
                | StepOutcome::Rejected(RejectReason::LemmaCapExceeded { .. }) => break,
                _ => {}
            }
        }
    }

    /// Stage 2. Each outer iteration gives every unclosed leaf one attempt.
    /// Returns the last verdict per leaf.
    pub fn completion_stage(&mut self) -> BTreeMap<String, CheckVerdict> {
        let leaves = self.tree.open_indices();
        let mut ctxs: Vec<PolicyContext> = leaves
            .iter()
            .map(|&i| {
                let mut ctx = PolicyContext::complete(self.tree.get(i).goal.clone());
                ctx.sibling_goals = leaves
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| self.tree.get(j).goal.clone())
                    .collect();
                ctx
            })
            .collect();
        let mut last = BTreeMap::new();

        for j in 1..=self.config.complete_iters {
            if leaves.iter().all(|&i| self.tree.get(i).status.is_closed()) || self.should_halt() {
                break;
            }
            self.complete_used = j;

            let mut batch: Vec<(usize, CompletionAttempt)> = Vec::new();
            for (li, &idx) in leaves.iter().enumerate() {
                if self.tree.get(idx).status.is_closed() {
                    continue;
                }
                match self.backends.policy.propose_completion(&ctxs[li], &mut self.complete_rng) {
                    Ok(a) => batch.push((li, a)),
                    Err(e) => {
                        let message = e.to_string();
                        self.trace.push(TraceEvent::StepError {
                            stage: Stage::Complete,
                            iteration: j,
                            target: self.tree.get(idx).goal.name.clone(),
                            message: message.clone(),
                        });
                        let attempt = CompletionAttempt {
                            proof_text: String::new(),
                            attempt_index: ctxs[li].next_attempt_index(),
                        };
                        ctxs[li].record(attempt, CheckVerdict::checker_error(message));
                    }
                }
            }

            let verdicts = self.check_batch(&leaves, &batch);
            for ((li, attempt), verdict) in batch.into_iter().zip(verdicts) {
                let idx = leaves[li];
                let name = self.tree.get(idx).goal.name.clone();
                let audit = self.audit(&verdict);
                self.trace.push(TraceEvent::CompleteAttempt {
                    iteration: j,
                    lemma: name.clone(),
                    attempt: attempt.clone(),
                    verdict: verdict.clone(),
                    audit: audit.clone(),
                });
                last.insert(name.clone(), verdict.clone());
                match audit {
                    Some(AuditOutcome::Pass) => {
                        self.tree.set_status(idx, GoalStatus::ClosedByProof);
                        self.closed_at.insert(idx, j);
                        self.accepted_proofs.push(attempt.proof_text);
                    }
                    Some(AuditOutcome::Failure { offending }) => {
                        self.trace.push(TraceEvent::AuditFailure {
                            stage: Stage::Complete,
                            goal: name,
                            offending: offending.clone(),
                        });
                        let fb = CheckVerdict::rejected(format!("axiom audit failed: {}", offending.join(", ")));
                        ctxs[li].record(attempt, fb);
                    }
                    None => ctxs[li].record(attempt, verdict),
                }
            }
        }
        last
    }

    fn check_batch(&self, leaves: &[usize], batch: &[(usize, CompletionAttempt)]) -> Vec<CheckVerdict> {
        let obligation = |li: usize, a: &CompletionAttempt| Obligation::Completion {
            goal: self.tree.get(leaves[li]).goal.clone(),
            proof: a.proof_text.clone(),
        };
        match self.backends.pool {
            None => batch.iter().map(|(li, a)| self.check(obligation(*li, a))).collect(),
            Some(pool) => {
                // submit everything first so the pool can overlap the checks
                let handles: Vec<_> = batch
                    .iter()
                    .map(|(li, a)| pool.submit(obligation(*li, a), Some(self.config.check_timeout_ms)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| {
                        let v = match h {
                            Ok(h) => pool.wait(&h).unwrap_or_else(|e| CheckVerdict::checker_error(e.to_string())),
                            Err(e) => CheckVerdict::checker_error(e.to_string()),
                        };
                        self.scrub(v)
                    })
                    .collect()
            }
        }
    }

    /// Run both stages and close the trace.
    pub fn run(mut self) -> (RunResult, RunTrace) {
        self.decomposition_stage();
        let leaves = self.tree.leaf_indices();
        let lemma_count = leaves.len();

        if self.disproved.is_none() {
            self.trace.push(TraceEvent::StageTransition {
                from: Stage::Decompose,
                to: Stage::Complete,
                leaves: leaves.iter().map(|&i| self.tree.get(i).goal.name.clone()).collect(),
            });
            if !self.should_halt() {
                self.completion_stage();
            }
        }

        let outcome = match self.disproved.take() {
            Some(witness) => Outcome::Disproved { witness },
            None if self.tree.all_leaves_closed() => Outcome::Proved,
            None => Outcome::Exhausted,
        };
        let solved_at_iteration = matches!(outcome, Outcome::Proved)
            .then(|| self.closed_at.values().copied().max().unwrap_or(0));
        let proof_lines = if self.accepted_proofs.iter().any(|p| !is_directive(p)) {
            Some(
                self.accepted_proofs
                    .iter()
                    .map(|p| p.lines().filter(|l| !l.trim().is_empty()).count())
                    .sum(),
            )
        } else {
            None
        };
        let result = RunResult {
            outcome,
            iterations: self.iterations(),
            lemma_count,
            proof_lines,
            solved_at_iteration,
            stopped_early: self.stopped_early,
        };
        let timing = self.config.trace_timing;
        let pool = self.backends.pool.map(|p| {
            let mut s = p.stats();
            if !timing {
                s.latency_p50_ms = None;
                s.latency_p95_ms = None;
                s.latency_p99_ms = None;
            }
            s
        });
        let wall_ms = timing.then(|| self.started.elapsed().as_millis() as u64);
        self.trace.push(TraceEvent::RunEnd { result: result.clone(), pool, wall_ms });
        (result, self.trace)
    }
}

fn is_directive(proof: &str) -> bool {
    let p = proof.trim();
    p == DIRECTIVE_DECIDE || p == DIRECTIVE_GIVE_UP
}

/// A quickcheck witness disproves the root only when evaluation itself says
/// false or faults; running out of budget is inconclusive.
fn confirmed_false(goal: &GoalDecl, witness: &Env, domain: &crate::eval::Domain) -> bool {
    match eval_formula(&goal.body, witness, domain) {
        Ok(b) => !b,
        Err(EvalError::BudgetExceeded(_)) => false,
        Err(_) => true,
    }
}

//! Checker and policy adapters speaking the JSON-lines protocol.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use crate::lang::{parse_goal, print_formula, print_goal};
use crate::rng::EngineRng;

use super::checker::Checker;
use super::policy::Policy;
use super::prompt::{apply_edit_blocks, diagnostic_line, render, PromptTemplates};
use super::transport::{Transport, TransportError};
use super::types::{
    CheckVerdict, CompletionAttempt, DecompositionProposal, Obligation, PolicyContext, PolicyError,
};
use super::wire::{
    decode_check_response, decode_policy_response, CheckKind, CheckRequest, FeedbackItem, PolicyRequest,
    WireMode, WireStatus,
};

struct IdGen {
    prefix: &'static str,
    next: AtomicU64,
}

impl IdGen {
    const fn new(prefix: &'static str) -> Self {
        IdGen {
            prefix,
            next: AtomicU64::new(1),
        }
    }

    fn next(&self) -> String {
        format!("{}-{}", self.prefix, self.next.fetch_add(1, Ordering::Relaxed))
    }
}

pub struct ExternalChecker {
    transport: Box<dyn Transport>,
    endpoint: String,
    ids: IdGen,
    /// Extra wait beyond the check timeout so the peer can report its own
    /// timeout before the transport gives up.
    pub grace_ms: u64,
}

impl ExternalChecker {
    pub fn new(transport: Box<dyn Transport>, endpoint: impl Into<String>) -> Self {
        ExternalChecker {
            transport,
            endpoint: endpoint.into(),
            ids: IdGen::new("chk"),
            grace_ms: 1_000,
        }
    }

    pub fn connect(endpoint: &str) -> Result<Self, TransportError> {
        Ok(Self::new(super::transport::connect(endpoint)?, endpoint))
    }

    pub fn request_for(&self, id: String, obligation: &Obligation, timeout_ms: u64) -> CheckRequest {
        let (kind, lemmas, proof) = match obligation {
            Obligation::Direct { .. } => (CheckKind::Direct, Vec::new(), None),
            Obligation::Reconstruction {
                lemmas, reconstruction, ..
            } => (
                CheckKind::Reconstruction,
                lemmas.iter().map(print_goal).collect(),
                Some(reconstruction.clone()),
            ),
            Obligation::Completion { proof, .. } => (CheckKind::Completion, Vec::new(), Some(proof.clone())),
        };
        CheckRequest {
            id,
            kind,
            goal: print_goal(obligation.goal()),
            lemmas,
            proof,
            timeout_ms,
        }
    }
}

impl Checker for ExternalChecker {
    fn check(&self, obligation: &Obligation, timeout_ms: u64) -> CheckVerdict {
        let start = Instant::now();
        let request = self.request_for(self.ids.next(), obligation, timeout_ms);
        let value = serde_json::to_value(&request).expect("request serializes");
        let reply = match self.transport.call(&value, timeout_ms.saturating_add(self.grace_ms)) {
            Ok(v) => v,
            Err(TransportError::Timeout(_)) => {
                return CheckVerdict::timeout().with_wall_time(start.elapsed().as_millis() as u64)
            }
            Err(e) => return CheckVerdict::checker_error(e.to_string()),
        };
        let response = match decode_check_response(&reply.to_string()) {
            Ok(r) => r,
            Err(e) => return CheckVerdict::checker_error(e.to_string()),
        };
        let verdict = match response.status {
            WireStatus::Accepted => CheckVerdict::accepted(response.axioms),
            WireStatus::Rejected => CheckVerdict::rejected(response.diagnostics),
            WireStatus::Timeout => CheckVerdict::timeout(),
            WireStatus::Error => CheckVerdict::checker_error(response.diagnostics),
        };
        let wall = if response.wall_time_ms > 0 {
            response.wall_time_ms
        } else {
            start.elapsed().as_millis() as u64
        };
        verdict.with_wall_time(wall)
    }

    fn describe(&self) -> String {
        format!("extern:{}", self.endpoint)
    }
}

pub struct ExternalPolicy {
    transport: Box<dyn Transport>,
    endpoint: String,
    ids: IdGen,
    pub timeout_ms: u64,
    /// Attach a rendered prompt to each request.
    pub templates: Option<PromptTemplates>,
}

impl ExternalPolicy {
    pub fn new(transport: Box<dyn Transport>, endpoint: impl Into<String>) -> Self {
        ExternalPolicy {
            transport,
            endpoint: endpoint.into(),
            ids: IdGen::new("pol"),
            timeout_ms: 300_000,
            templates: None,
        }
    }

    pub fn connect(endpoint: &str) -> Result<Self, TransportError> {
        Ok(Self::new(super::transport::connect(endpoint)?, endpoint))
    }

    pub fn with_templates(mut self, templates: PromptTemplates) -> Self {
        self.templates = Some(templates);
        self
    }

    fn last_proof(context: &PolicyContext) -> &str {
        context
            .feedback_history
            .last()
            .map(|f| f.attempt.proof_text.as_str())
            .unwrap_or("")
    }

    pub fn request_for(&self, id: String, context: &PolicyContext) -> PolicyRequest {
        let goal = print_goal(&context.goal);
        let siblings: Vec<String> = context.sibling_goals.iter().map(print_goal).collect();
        let feedback = context
            .feedback_history
            .iter()
            .map(|f| FeedbackItem {
                proof: f.attempt.proof_text.clone(),
                diagnostics: f.verdict.diagnostics(),
            })
            .collect();
        let mode = match context.mode {
            super::PolicyMode::Decompose => WireMode::Decompose,
            super::PolicyMode::Complete => WireMode::Complete,
        };
        let prompt = self.templates.as_ref().map(|t| {
            let diagnostics = context
                .feedback_history
                .last()
                .map(|f| f.verdict.diagnostics())
                .unwrap_or_default();
            let line = diagnostic_line(&diagnostics).map(|n| n.to_string()).unwrap_or_else(|| "?".into());
            let body = print_formula(&context.goal.body);
            let sibling_text = if siblings.is_empty() { "(none)".to_string() } else { siblings.join("\n") };
            let vars = [
                ("theorem_name", context.goal.name.as_str()),
                ("formal_problem", goal.as_str()),
                ("siblings", sibling_text.as_str()),
                ("lemma_prefix", context.lemma_prefix.as_str()),
                ("code", Self::last_proof(context)),
                ("line", line.as_str()),
                ("goal", body.as_str()),
                ("diagnostics", diagnostics.as_str()),
            ];
            let template = match mode {
                WireMode::Decompose => &t.decompose,
                WireMode::Complete => &t.complete,
            };
            render(template, &vars)
        });
        PolicyRequest {
            id,
            mode,
            goal,
            siblings,
            feedback,
            lemma_prefix: (mode == WireMode::Decompose).then(|| context.lemma_prefix.clone()),
            compiles: context.compiles,
            prompt,
        }
    }

    fn exchange(&self, context: &PolicyContext) -> Result<super::wire::PolicyResponse, PolicyError> {
        let request = self.request_for(self.ids.next(), context);
        let value = serde_json::to_value(&request).expect("request serializes");
        let reply = self
            .transport
            .call(&value, self.timeout_ms)
            .map_err(|e| PolicyError(e.to_string()))?;
        decode_policy_response(&reply.to_string()).map_err(|e| PolicyError(e.to_string()))
    }
}

impl Policy for ExternalPolicy {
    fn propose_decomposition(
        &self,
        context: &PolicyContext,
        _: &mut EngineRng,
    ) -> Result<DecompositionProposal, PolicyError> {
        let response = self.exchange(context)?;
        let texts = response
            .lemmas
            .ok_or_else(|| PolicyError("decompose response has no `lemmas`".into()))?;
        let lemmas = texts
            .iter()
            .map(|t| parse_goal(t).map_err(|e| PolicyError(format!("lemma `{t}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DecompositionProposal {
            lemmas,
            reconstruction: response.reconstruction.unwrap_or_default(),
            rationale: response.rationale,
        })
    }

    fn propose_completion(&self, context: &PolicyContext, _: &mut EngineRng) -> Result<CompletionAttempt, PolicyError> {
        let response = self.exchange(context)?;
        let reply = response
            .proof
            .ok_or_else(|| PolicyError("complete response has no `proof`".into()))?;
        let proof_text = match apply_edit_blocks(Self::last_proof(context), &reply) {
            Ok(Some(edited)) => edited,
            Ok(None) => reply,
            Err(e) => return Err(PolicyError(e.to_string())),
        };
        Ok(CompletionAttempt {
            proof_text,
            attempt_index: context.next_attempt_index(),
        })
    }

    fn describe(&self) -> String {
        format!("extern:{}", self.endpoint)
    }
}

use serde::{Deserialize, Serialize};

use crate::lang::GoalDecl;

/// Candidate lemmas plus the evidence that they rebuild the parent goal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionProposal {
    pub lemmas: Vec<GoalDecl>,
    /// Built-in marker (`builtin:...`) or an external proof script.
    pub reconstruction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
}

impl DecompositionProposal {
    pub fn discharge() -> Self {
        DecompositionProposal {
            lemmas: Vec::new(),
            reconstruction: super::MARKER_DIRECT.to_string(),
            rationale: None,
        }
    }

    pub fn k(&self) -> usize {
        self.lemmas.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionAttempt {
    pub proof_text: String,
    /// 1-based.
    pub attempt_index: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CheckStatus {
    Accepted,
    Rejected { diagnostics: String },
    Timeout,
    CheckerError { message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckVerdict {
    #[serde(flatten)]
    pub status: CheckStatus,
    #[serde(default)]
    pub axioms_used: Vec<String>,
    #[serde(default)]
    pub wall_time_ms: u64,
}

impl CheckVerdict {
    pub fn accepted(axioms_used: Vec<String>) -> Self {
        CheckVerdict {
            status: CheckStatus::Accepted,
            axioms_used,
            wall_time_ms: 0,
        }
    }

    pub fn rejected(diagnostics: impl Into<String>) -> Self {
        Self::bare(CheckStatus::Rejected {
            diagnostics: diagnostics.into(),
        })
    }

    pub fn timeout() -> Self {
        Self::bare(CheckStatus::Timeout)
    }

    pub fn checker_error(message: impl Into<String>) -> Self {
        Self::bare(CheckStatus::CheckerError {
            message: message.into(),
        })
    }

    fn bare(status: CheckStatus) -> Self {
        CheckVerdict {
            status,
            axioms_used: Vec::new(),
            wall_time_ms: 0,
        }
    }

    pub fn with_wall_time(mut self, ms: u64) -> Self {
        self.wall_time_ms = ms;
        self
    }

    pub fn is_accepted(&self) -> bool {
        matches!(self.status, CheckStatus::Accepted)
    }

    /// Infrastructure failure rather than a logical answer.
    pub fn is_infrastructure_error(&self) -> bool {
        matches!(self.status, CheckStatus::CheckerError { .. })
    }

    /// Text fed back to a policy after a failed attempt.
    pub fn diagnostics(&self) -> String {
        match &self.status {
            CheckStatus::Accepted => String::new(),
            CheckStatus::Rejected { diagnostics } => diagnostics.clone(),
            CheckStatus::Timeout => "timeout".to_string(),
            CheckStatus::CheckerError { message } => format!("checker error: {message}"),
        }
    }

    pub fn status_label(&self) -> &'static str {
        match self.status {
            CheckStatus::Accepted => "accepted",
            CheckStatus::Rejected { .. } => "rejected",
            CheckStatus::Timeout => "timeout",
            CheckStatus::CheckerError { .. } => "error",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyMode {
    Decompose,
    Complete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feedback {
    pub attempt: CompletionAttempt,
    pub verdict: CheckVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyContext {
    pub goal: GoalDecl,
    #[serde(default)]
    pub sibling_goals: Vec<GoalDecl>,
    #[serde(default)]
    pub feedback_history: Vec<Feedback>,
    pub mode: PolicyMode,
    /// Prefix for fresh lemma names: `<parent>_<depth>`; lemma i is
    /// `<prefix>_<i>` with i starting at 1.
    #[serde(default)]
    pub lemma_prefix: String,
    /// Whether the latest attempt compiled, for policies that switch between
    /// proving and repairing. `None` before the first attempt.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compiles: Option<bool>,
}

impl PolicyContext {
    pub fn decompose(goal: GoalDecl, sibling_goals: Vec<GoalDecl>, depth: u32) -> Self {
        let lemma_prefix = format!("{}_{}", goal.name, depth);
        PolicyContext {
            goal,
            sibling_goals,
            feedback_history: Vec::new(),
            mode: PolicyMode::Decompose,
            lemma_prefix,
            compiles: None,
        }
    }

    pub fn complete(goal: GoalDecl) -> Self {
        PolicyContext {
            goal,
            sibling_goals: Vec::new(),
            feedback_history: Vec::new(),
            mode: PolicyMode::Complete,
            lemma_prefix: String::new(),
            compiles: None,
        }
    }

    pub fn lemma_name(&self, ordinal: usize) -> String {
        fresh_lemma_name(&self.lemma_prefix, ordinal)
    }

    pub fn next_attempt_index(&self) -> u32 {
        self.feedback_history.len() as u32 + 1
    }

    pub fn record(&mut self, attempt: CompletionAttempt, verdict: CheckVerdict) {
        self.compiles = Some(!matches!(verdict.status, CheckStatus::Rejected { .. }));
        self.feedback_history.push(Feedback { attempt, verdict });
    }
}

/// `<parent>_<depth>_<ordinal>` when `prefix` is `<parent>_<depth>`.
pub fn fresh_lemma_name(prefix: &str, ordinal: usize) -> String {
    format!("{prefix}_{ordinal}")
}

/// A unit of work for a checker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obligation {
    Direct {
        goal: GoalDecl,
    },
    Reconstruction {
        goal: GoalDecl,
        lemmas: Vec<GoalDecl>,
        reconstruction: String,
    },
    Completion {
        goal: GoalDecl,
        proof: String,
    },
}

impl Obligation {
    pub fn goal(&self) -> &GoalDecl {
        match self {
            Obligation::Direct { goal }
            | Obligation::Reconstruction { goal, .. }
            | Obligation::Completion { goal, .. } => goal,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Obligation::Direct { .. } => "direct",
            Obligation::Reconstruction { .. } => "reconstruction",
            Obligation::Completion { .. } => "completion",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("policy error: {0}")]
pub struct PolicyError(pub String);

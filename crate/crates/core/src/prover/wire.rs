//! JSON messages exchanged with external checkers and policies.
//!
//! One JSON object per line. Unknown fields are ignored on decode; the `id`
//! of a response must echo its request.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WireError {
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("response id `{got}` does not match request `{want}`")]
    IdMismatch { want: String, got: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Direct,
    Reconstruction,
    Completion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRequest {
    pub id: String,
    pub kind: CheckKind,
    pub goal: String,
    #[serde(default)]
    pub lemmas: Vec<String>,
    #[serde(default)]
    pub proof: Option<String>,
    pub timeout_ms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireStatus {
    Accepted,
    Rejected,
    Timeout,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResponse {
    pub id: String,
    pub status: WireStatus,
    #[serde(default)]
    pub diagnostics: String,
    #[serde(default)]
    pub axioms: Vec<String>,
    #[serde(default)]
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackItem {
    pub proof: String,
    pub diagnostics: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireMode {
    Decompose,
    Complete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyRequest {
    pub id: String,
    pub mode: WireMode,
    pub goal: String,
    #[serde(default)]
    pub siblings: Vec<String>,
    #[serde(default)]
    pub feedback: Vec<FeedbackItem>,
    /// Naming prefix for proposed lemmas (`<prefix>_<ordinal>`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma_prefix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compiles: Option<bool>,
    /// Rendered prompt, for adapters fronting a language model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt: Option<String>,
}

/// Union of the decompose and complete response shapes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PolicyResponse {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemmas: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reconstruction: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proof: Option<String>,
}

fn decode<T: for<'de> Deserialize<'de>>(line: &str) -> Result<T, WireError> {
    serde_json::from_str(line.trim_end_matches(['\r', '\n'])).map_err(|e| WireError::Malformed(e.to_string()))
}

pub fn encode<T: Serialize>(msg: &T) -> String {
    serde_json::to_string(msg).expect("wire messages serialize")
}

pub fn decode_check_request(line: &str) -> Result<CheckRequest, WireError> {
    decode(line)
}

pub fn decode_check_response(line: &str) -> Result<CheckResponse, WireError> {
    decode(line)
}

pub fn decode_policy_request(line: &str) -> Result<PolicyRequest, WireError> {
    decode(line)
}

pub fn decode_policy_response(line: &str) -> Result<PolicyResponse, WireError> {
    decode(line)
}

/// Reject a response that does not answer `want`.
pub fn expect_id(want: &str, got: &str) -> Result<(), WireError> {
    if want == got {
        Ok(())
    } else {
        Err(WireError::IdMismatch {
            want: want.to_string(),
            got: got.to_string(),
        })
    }
}

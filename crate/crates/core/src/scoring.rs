//! Decomposition score: a binary validity gate times a clamped structural
//! reduction ratio computed from a LogSumExp aggregate of child footprints.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoreError {
    #[error("contract violation: {0}")]
    ContractViolation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreConfig {
    pub temperature: f64,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig { temperature: 1.0 }
    }
}

impl ScoreConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.temperature.is_finite() && self.temperature > 0.0 {
            Ok(())
        } else {
            Err(format!("temperature must be positive and finite, got {}", self.temperature))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityGate {
    pub reconstruction_ok: bool,
    pub qc_ok_per_lemma: Vec<bool>,
}

impl ValidityGate {
    pub fn passing(k: usize) -> Self {
        ValidityGate {
            reconstruction_ok: true,
            qc_ok_per_lemma: vec![true; k],
        }
    }

    pub fn value(&self) -> u8 {
        u8::from(self.reconstruction_ok && self.qc_ok_per_lemma.iter().all(|b| *b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub v: u8,
    pub d_parent: u64,
    pub d_children: Vec<u64>,
    /// LogSumExp aggregate; 0 for a direct discharge.
    pub d_bar: f64,
    pub r: f64,
    #[serde(rename = "S")]
    pub s: f64,
}

impl ScoreBreakdown {
    /// Two-decimal rendering used in human-readable output.
    pub fn render(&self) -> String {
        format!("{:.2}", self.s)
    }

    pub fn is_discharge(&self) -> bool {
        self.d_children.is_empty()
    }

    /// Remaining fraction d_bar / d_parent; `None` for discharges.
    pub fn remaining_fraction(&self) -> Option<f64> {
        if self.is_discharge() || self.d_parent == 0 {
            None
        } else {
            Some(self.d_bar / self.d_parent as f64)
        }
    }
}

/// `T * ln(sum(exp(d_i / T)))`, evaluated with the maximum factored out.
pub fn logsumexp_footprint(footprints: &[u64], temperature: f64) -> Result<f64, ScoreError> {
    if footprints.is_empty() {
        return Err(ScoreError::ContractViolation("empty footprint list".into()));
    }
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(ScoreError::ContractViolation(format!("temperature {temperature}")));
    }
    let max = *footprints.iter().max().expect("non-empty") as f64;
    let sum: f64 = footprints
        .iter()
        .map(|&d| ((d as f64 - max) / temperature).exp())
        .sum();
    Ok(max + temperature * sum.ln())
}

pub fn reduction_ratio(d_parent: u64, d_bar: f64) -> Result<f64, ScoreError> {
    if d_parent == 0 {
        return Err(ScoreError::ContractViolation("parent footprint is zero".into()));
    }
    Ok((1.0 - d_bar / d_parent as f64).clamp(0.0, 1.0))
}

/// Score a decomposition. An empty `d_children` is a direct discharge:
/// r = 1 and S = v, and a zero parent footprint is allowed.
pub fn decomposition_score(
    gate: &ValidityGate,
    d_parent: u64,
    d_children: &[u64],
    config: &ScoreConfig,
) -> Result<ScoreBreakdown, ScoreError> {
    let v = gate.value();
    if d_children.is_empty() {
        return Ok(ScoreBreakdown {
            v,
            d_parent,
            d_children: Vec::new(),
            d_bar: 0.0,
            r: 1.0,
            s: f64::from(v),
        });
    }
    let d_bar = logsumexp_footprint(d_children, config.temperature)?;
    let r = reduction_ratio(d_parent, d_bar)?;
    Ok(ScoreBreakdown {
        v,
        d_parent,
        d_children: d_children.to_vec(),
        d_bar,
        r,
        s: r * f64::from(v),
    })
}

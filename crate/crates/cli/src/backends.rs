use std::sync::Arc;

use anyhow::{bail, Context, Result};
use lemmaforge::eval::Domain;
use lemmaforge::prover::{
    BuiltinChecker, Checker, ConjunctionSplitter, DirectSubmit, ExternalChecker, ExternalPolicy, Policy,
    QuantifierGrounder, StochasticPolicy,
};

pub const BUILTIN_POLICIES: &[&str] = &["splitter", "flatten", "grounder", "direct", "stochastic"];

/// `builtin:<name>` or `extern:<endpoint>`.
pub fn policy(spec: &str, domain: &Domain) -> Result<Box<dyn Policy>> {
    if let Some(endpoint) = spec.strip_prefix("extern:") {
        let p = ExternalPolicy::connect(endpoint).with_context(|| format!("connecting to policy `{endpoint}`"))?;
        return Ok(Box::new(p));
    }
    let name = spec.strip_prefix("builtin:").unwrap_or(spec);
    Ok(match name {
        "splitter" => Box::new(ConjunctionSplitter::default()),
        "flatten" => Box::new(ConjunctionSplitter::flattening()),
        "grounder" => Box::new(QuantifierGrounder::new(domain.clone())),
        "direct" => Box::new(DirectSubmit),
        "stochastic" => Box::new(StochasticPolicy::new(domain.clone())),
        other => bail!("unknown built-in policy `{other}` (expected one of {})", BUILTIN_POLICIES.join(", ")),
    })
}

/// `builtin` or `extern:<endpoint>`.
pub fn checker(spec: &str, domain: &Domain) -> Result<Arc<dyn Checker>> {
    if let Some(endpoint) = spec.strip_prefix("extern:") {
        let c = ExternalChecker::connect(endpoint).with_context(|| format!("connecting to checker `{endpoint}`"))?;
        return Ok(Arc::new(c));
    }
    match spec {
        "builtin" | "builtin:" => Ok(Arc::new(BuiltinChecker::new(domain.clone()))),
        other => bail!("unknown checker `{other}` (expected builtin or extern:<endpoint>)"),
    }
}

//! Evaluation metrics computed from run traces, with CSV output.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::prover::AuditOutcome;
use crate::search::{RunTrace, TraceError, TraceEvent};

#[derive(Debug, thiserror::Error)]
pub enum AnalyticsError {
    #[error("problem `{problem}`: runs disagree on non-seed configuration")]
    MixedConfig { problem: String },
    #[error("auroc is undefined when every outcome has the same label")]
    Undefined,
    #[error("{path}: {source}")]
    Trace {
        path: String,
        #[source]
        source: TraceError,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: u32,
    pub y: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionPoint {
    pub iteration: u32,
    /// Mean remaining fraction `d_bar / d_parent`.
    pub remaining: f64,
    /// Mean reduction ratio `r`.
    pub r: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessPoint {
    pub k: u32,
    pub iteration: u32,
    pub y: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredOutcome {
    pub problem_id: String,
    pub score: f64,
    pub proved: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl MeanStd {
    pub fn of(xs: &[f64]) -> Option<MeanStd> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Some(MeanStd { mean, std: var.sqrt() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofStats {
    pub proved_runs: usize,
    pub lemma_count: Option<MeanStd>,
    /// Only for runs whose accepted proofs carry text.
    pub proof_lines: Option<MeanStd>,
    pub max_lines: Option<usize>,
    pub runs_with_lines: usize,
}

/// Load every `*.jsonl` trace under `dir` (non-recursive), in file-name order.
pub fn load_trace_dir(dir: &Path) -> Result<Vec<RunTrace>, AnalyticsError> {
    let d = dir.display().to_string();
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|source| AnalyticsError::Io { path: d.clone(), source })?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            RunTrace::read_jsonl(p).map_err(|source| AnalyticsError::Trace { path: p.display().to_string(), source })
        })
        .collect()
}

/// Runs per problem, ordered by run index.
pub fn group_by_problem(traces: &[RunTrace]) -> Result<BTreeMap<String, Vec<&RunTrace>>, AnalyticsError> {
    let mut groups: BTreeMap<String, Vec<&RunTrace>> = BTreeMap::new();
    for t in traces {
        groups.entry(t.header.problem.name.clone()).or_default().push(t);
    }
    for (problem, runs) in &mut groups {
        runs.sort_by_key(|t| t.header.run_index);
        let first = &runs[0].header.config;
        if runs.iter().any(|t| !t.header.config.same_except_seed(first)) {
            return Err(AnalyticsError::MixedConfig { problem: problem.clone() });
        }
    }
    Ok(groups)
}

fn proved(t: &RunTrace) -> bool {
    t.result().is_some_and(|r| r.proved())
}

/// `y(k)` = fraction of problems with a proved run among their first `k`
/// runs (all runs when a problem has fewer than `k`).
pub fn pass_at_k_curve(traces: &[RunTrace], ks: &[u32]) -> Result<Vec<CurvePoint>, AnalyticsError> {
    let groups = group_by_problem(traces)?;
    if groups.is_empty() {
        return Ok(Vec::new());
    }
    Ok(ks
        .iter()
        .map(|&k| {
            let hits = groups
                .values()
                .filter(|runs| runs.iter().take(k as usize).any(|t| proved(t)))
                .count();
            CurvePoint { x: k, y: hits as f64 / groups.len() as f64, n: groups.len() }
        })
        .collect())
}

/// Powers of two up to the largest run count per problem.
pub fn default_ks(traces: &[RunTrace]) -> Result<Vec<u32>, AnalyticsError> {
    let max = group_by_problem(traces)?.values().map(Vec::len).max().unwrap_or(0) as u32;
    let mut ks = Vec::new();
    let mut k = 1;
    while k <= max {
        ks.push(k);
        k *= 2;
    }
    if max > 0 && ks.last() != Some(&max) {
        ks.push(max);
    }
    Ok(ks)
}

/// Mean remaining fraction and mean `r` of the non-discharge decompositions
/// accepted at each iteration index. Iterations without one are omitted.
pub fn reduction_rate_curve(traces: &[RunTrace]) -> Vec<ReductionPoint> {
    let mut acc: BTreeMap<u32, (f64, f64, usize)> = BTreeMap::new();
    for t in traces {
        for e in t.events() {
            if let TraceEvent::DecomposeAttempt { iteration, accepted: true, score: Some(s), .. } = e {
                if let Some(rem) = s.remaining_fraction() {
                    let slot = acc.entry(*iteration).or_default();
                    slot.0 += rem;
                    slot.1 += s.r;
                    slot.2 += 1;
                }
            }
        }
    }
    acc.into_iter()
        .map(|(iteration, (rem, r, n))| ReductionPoint { iteration, remaining: rem / n as f64, r: r / n as f64, n })
        .collect()
}

/// Completion iteration at which a proved run closed its last leaf, replayed
/// from the completion events (0 if the decomposition stage closed
/// everything). `None` for runs that were not proved.
pub fn solved_at(t: &RunTrace) -> Option<u32> {
    if !proved(t) {
        return None;
    }
    let last = t
        .events()
        .filter_map(|e| match e {
            TraceEvent::CompleteAttempt { iteration, verdict, audit: Some(AuditOutcome::Pass), .. }
                if verdict.is_accepted() =>
            {
                Some(*iteration)
            }
            _ => None,
        })
        .max();
    Some(last.unwrap_or(0))
}

/// For each `k`, `y(i)` = fraction of problems with a run among the first `k`
/// that was proved by completion iteration `i`, for `i` in `0..=max_iter`.
pub fn success_vs_iterations(traces: &[RunTrace], ks: &[u32]) -> Result<Vec<SuccessPoint>, AnalyticsError> {
    let groups = group_by_problem(traces)?;
    if groups.is_empty() {
        return Ok(Vec::new());
    }
    let max_iter = traces.iter().map(|t| t.header.config.complete_iters).max().unwrap_or(0);
    let solved: Vec<Vec<Option<u32>>> = groups.values().map(|runs| runs.iter().map(|t| solved_at(t)).collect()).collect();
    let n = groups.len();
    let mut out = Vec::new();
    for &k in ks {
        let best: Vec<Option<u32>> = solved.iter().map(|runs| runs.iter().take(k as usize).flatten().min().copied()).collect();
        for i in 0..=max_iter {
            let hits = best.iter().filter(|b| b.is_some_and(|b| b <= i)).count();
            out.push(SuccessPoint { k, iteration: i, y: hits as f64 / n as f64, n });
        }
    }
    Ok(out)
}

/// One outcome per problem: the largest root-level score over all runs
/// (0 when no root decomposition was scored) and whether any run proved it.
pub fn scored_outcomes(traces: &[RunTrace]) -> Result<Vec<ScoredOutcome>, AnalyticsError> {
    let groups = group_by_problem(traces)?;
    Ok(groups
        .into_iter()
        .map(|(problem_id, runs)| {
            let score = runs
                .iter()
                .flat_map(|t| {
                    let root = t.header.problem.name.clone();
                    t.events()
                        .filter_map(move |e| match e {
                            TraceEvent::DecomposeAttempt { target, score: Some(s), .. } if *target == root => Some(s.s),
                            _ => None,
                        })
                        .collect::<Vec<_>>()
                })
                .fold(0.0_f64, f64::max);
            let proved = runs.iter().any(|t| proved(t));
            ScoredOutcome { problem_id, score, proved }
        })
        .collect())
}

/// Probability that a random proved outcome outscores a random unproved one,
/// ties counting one half (Mann-Whitney U with midranks).
pub fn auroc(outcomes: &[ScoredOutcome]) -> Result<f64, AnalyticsError> {
    let n_pos = outcomes.iter().filter(|o| o.proved).count();
    let n_neg = outcomes.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(AnalyticsError::Undefined);
    }
    let mut idx: Vec<usize> = (0..outcomes.len()).collect();
    idx.sort_by(|&a, &b| outcomes[a].score.total_cmp(&outcomes[b].score));
    let mut ranks = vec![0.0; outcomes.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && outcomes[idx[j + 1]].score == outcomes[idx[i]].score {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = mid;
        }
        i = j + 1;
    }
    let rank_sum: f64 = outcomes.iter().zip(&ranks).filter(|(o, _)| o.proved).map(|(_, r)| r).sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos * n_neg) as f64)
}

/// Statistics over proved runs.
pub fn proof_stats(traces: &[RunTrace]) -> ProofStats {
    let results: Vec<_> = traces.iter().filter_map(|t| t.result()).filter(|r| r.proved()).collect();
    let lemmas: Vec<f64> = results.iter().map(|r| r.lemma_count as f64).collect();
    let lines: Vec<usize> = results.iter().filter_map(|r| r.proof_lines).collect();
    ProofStats {
        proved_runs: results.len(),
        lemma_count: MeanStd::of(&lemmas),
        proof_lines: MeanStd::of(&lines.iter().map(|&l| l as f64).collect::<Vec<_>>()),
        max_lines: lines.iter().copied().max(),
        runs_with_lines: lines.len(),
    }
}

fn write_rows<S: Serialize>(path: &Path, rows: &[S]) -> Result<(), AnalyticsError> {
    let p = path.display().to_string();
    let csv_err = |source| AnalyticsError::Csv { path: p.clone(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|source| AnalyticsError::Io { path: p.clone(), source })
}

fn write_header_only(path: &Path, header: &[&str]) -> Result<(), AnalyticsError> {
    let p = path.display().to_string();
    let mut w = csv::Writer::from_path(path).map_err(|source| AnalyticsError::Csv { path: p.clone(), source })?;
    w.write_record(header).map_err(|source| AnalyticsError::Csv { path: p.clone(), source })?;
    w.flush().map_err(|source| AnalyticsError::Io { path: p, source })
}

pub fn write_curve_csv(path: &Path, points: &[CurvePoint]) -> Result<(), AnalyticsError> {
    if points.is_empty() {
        return write_header_only(path, &["x", "y", "n"]);
    }
    write_rows(path, points)
}

pub fn write_reduction_csv(path: &Path, points: &[ReductionPoint]) -> Result<(), AnalyticsError> {
    if points.is_empty() {
        return write_header_only(path, &["iteration", "remaining", "r", "n"]);
    }
    write_rows(path, points)
}

pub fn write_success_csv(path: &Path, points: &[SuccessPoint]) -> Result<(), AnalyticsError> {
    if points.is_empty() {
        return write_header_only(path, &["k", "iteration", "y", "n"]);
    }
    write_rows(path, points)
}

/// One row per problem.
pub fn write_outcomes_csv(path: &Path, outcomes: &[ScoredOutcome]) -> Result<(), AnalyticsError> {
    if outcomes.is_empty() {
        return write_header_only(path, &["problem_id", "score", "proved"]);
    }
    write_rows(path, outcomes)
}

#[derive(Serialize)]
struct StatRow<'a> {
    metric: &'a str,
    mean: Option<f64>,
    std: Option<f64>,
    max: Option<usize>,
    n: usize,
}

pub fn write_stats_csv(path: &Path, s: &ProofStats) -> Result<(), AnalyticsError> {
    let rows = [
        StatRow {
            metric: "lemma_count",
            mean: s.lemma_count.map(|m| m.mean),
            std: s.lemma_count.map(|m| m.std),
            max: None,
            n: s.proved_runs,
        },
        StatRow {
            metric: "proof_lines",
            mean: s.proof_lines.map(|m| m.mean),
            std: s.proof_lines.map(|m| m.std),
            max: s.max_lines,
            n: s.runs_with_lines,
        },
    ];
    write_rows(path, &rows)
}

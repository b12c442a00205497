use std::sync::atomic::{AtomicU32, Ordering};

use crate::lang::GoalDecl;

use super::config::SearchConfig;
use super::engine::RunState;
use super::{Backends, RunResult, RunTrace, SearchError};

#[derive(Debug, Clone)]
pub struct PassKResult {
    pub solved: bool,
    /// 1-based index of the first proving run.
    pub first_success_run: Option<u32>,
    pub runs: Vec<RunResult>,
    pub traces: Vec<RunTrace>,
}

/// `k_parallel` independent runs; run `i` (0-based) is seeded with
/// `seed ^ i`, so run 0 matches [`super::run_single`].
pub fn run_pass_k(
    problem: &GoalDecl,
    backends: Backends<'_>,
    config: &SearchConfig,
) -> Result<PassKResult, SearchError> {
    config.validate().map_err(SearchError::InvalidConfig)?;
    let k = config.k_parallel;
    let best = AtomicU32::new(u32::MAX);

    let outputs: Vec<(RunResult, RunTrace)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..k)
            .map(|i| {
                let best = &best;
                scope.spawn(move || {
                    let stop = move || config.fail_fast && best.load(Ordering::SeqCst) < i;
                    let state = RunState::new(problem, backends, config, i)?.with_stop(&stop);
                    let (result, trace) = state.run();
                    if result.proved() {
                        best.fetch_min(i, Ordering::SeqCst);
                    }
                    Ok::<_, SearchError>((result, trace))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("search run panicked"))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let first = outputs.iter().position(|(r, _)| r.proved()).map(|i| i as u32 + 1);
    let (runs, traces) = outputs.into_iter().unzip();
    Ok(PassKResult { solved: first.is_some(), first_success_run: first, runs, traces })
}

//! Bounded-concurrency verification pool.
//!
//! Jobs are admitted in FIFO order while fewer than `max_concurrent` are in
//! flight. A watchdog expires jobs whose timeout (measured from admission)
//! elapses; the checker call cannot be interrupted, so an expired or
//! cancelled job's worker finishes in the background and its answer is
//! dropped. Workers are spawned on demand to keep admission going while
//! abandoned calls drain.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::prover::{CheckVerdict, Checker, Obligation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoolConfig {
    pub max_concurrent: usize,
    pub check_timeout_ms: u64,
    pub queue_capacity: usize,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig {
            max_concurrent: 512,
            check_timeout_ms: 300_000,
            queue_capacity: 4096,
        }
    }
}

impl PoolConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_concurrent == 0 {
            return Err("max_concurrent must be at least 1".into());
        }
        if self.check_timeout_ms == 0 {
            return Err("check_timeout_ms must be at least 1".into());
        }
        if self.queue_capacity == 0 {
            return Err("queue_capacity must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobHandle {
    pub job_id: String,
    pub submitted_at: Instant,
    seq: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PoolError {
    #[error("queue is full")]
    QueueFull,
    #[error("unknown job handle `{0}`")]
    UnknownHandle(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PoolStats {
    pub submitted: u64,
    pub completed: u64,
    pub timed_out: u64,
    pub cancelled: u64,
    pub in_flight: u64,
    pub queued: u64,
    pub peak_in_flight: u64,
    pub latency_p50_ms: Option<u64>,
    pub latency_p95_ms: Option<u64>,
    pub latency_p99_ms: Option<u64>,
}

impl PoolStats {
    pub fn conserved(&self) -> bool {
        self.submitted == self.completed + self.timed_out + self.cancelled + self.in_flight + self.queued
    }
}

/// Nearest-rank quantile of `sorted` (ascending): the value at rank
/// `ceil(q * n)`.
pub fn nearest_rank(sorted: &[u64], q: f64) -> Option<u64> {
    if sorted.is_empty() {
        return None;
    }
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    Some(sorted[rank - 1])
}

enum JobState {
    Queued,
    Running { deadline: Instant },
    Done(CheckVerdict),
}

struct Job {
    obligation: Option<Obligation>,
    timeout_ms: u64,
    state: JobState,
}

#[derive(Default)]
struct State {
    jobs: HashMap<u64, Job>,
    queue: VecDeque<u64>,
    next_seq: u64,
    in_flight: u64,
    workers_total: usize,
    workers_busy: usize,
    submitted: u64,
    completed: u64,
    timed_out: u64,
    cancelled: u64,
    peak_in_flight: u64,
    latencies: Vec<u64>,
    shutdown: bool,
}

struct Shared {
    state: Mutex<State>,
    /// Queue or capacity changed: workers re-check for admissible work.
    work: Condvar,
    /// A job reached its final verdict.
    done: Condvar,
    /// Deadlines changed: the watchdog recomputes its sleep.
    watch: Condvar,
    config: PoolConfig,
    checker: Arc<dyn Checker>,
}

impl Shared {
    fn lock(&self) -> MutexGuard<'_, State> {
        self.state.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn finish(&self, st: &mut State, seq: u64, verdict: CheckVerdict) {
        if let Some(job) = st.jobs.get_mut(&seq) {
            job.state = JobState::Done(verdict);
        }
        self.done.notify_all();
    }
}

pub struct VerifyPool {
    shared: Arc<Shared>,
}

impl VerifyPool {
    pub fn new(config: PoolConfig, checker: Arc<dyn Checker>) -> Self {
        let shared = Arc::new(Shared {
            state: Mutex::new(State::default()),
            work: Condvar::new(),
            done: Condvar::new(),
            watch: Condvar::new(),
            config,
            checker,
        });
        let watchdog = Arc::clone(&shared);
        thread::Builder::new()
            .name("pool-watchdog".into())
            .spawn(move || run_watchdog(&watchdog))
            .expect("spawn watchdog");
        VerifyPool { shared }
    }

    pub fn config(&self) -> &PoolConfig {
        &self.shared.config
    }

    /// Enqueue a check. The effective timeout is the smaller of the override
    /// and the configured per-check timeout.
    pub fn submit(&self, obligation: Obligation, timeout_override: Option<u64>) -> Result<JobHandle, PoolError> {
        let cfg = &self.shared.config;
        let timeout_ms = timeout_override
            .map_or(cfg.check_timeout_ms, |t| t.min(cfg.check_timeout_ms))
            .max(1);
        let mut st = self.shared.lock();
        if st.queue.len() >= cfg.queue_capacity {
            return Err(PoolError::QueueFull);
        }
        st.next_seq += 1;
        let seq = st.next_seq;
        st.jobs.insert(
            seq,
            Job {
                obligation: Some(obligation),
                timeout_ms,
                state: JobState::Queued,
            },
        );
        st.queue.push_back(seq);
        st.submitted += 1;
        self.ensure_worker(&mut st);
        self.shared.work.notify_one();
        Ok(JobHandle {
            job_id: format!("job-{seq}"),
            submitted_at: Instant::now(),
            seq,
        })
    }

    fn ensure_worker(&self, st: &mut State) {
        spawn_if_needed(&self.shared, st);
    }

    /// Block until the job has a verdict. Each handle can be awaited once.
    pub fn wait(&self, handle: &JobHandle) -> Result<CheckVerdict, PoolError> {
        let mut st = self.shared.lock();
        loop {
            match st.jobs.get(&handle.seq) {
                None => return Err(PoolError::UnknownHandle(handle.job_id.clone())),
                Some(Job {
                    state: JobState::Done(_), ..
                }) => {
                    let job = st.jobs.remove(&handle.seq).expect("present");
                    let JobState::Done(v) = job.state else { unreachable!() };
                    return Ok(v);
                }
                Some(_) => {
                    st = self.shared.done.wait(st).unwrap_or_else(|p| p.into_inner());
                }
            }
        }
    }

    /// Drop queued jobs and abandon in-flight ones; both resolve to
    /// `CheckerError("cancelled")`. Returns how many jobs were cancelled.
    /// The reason is informational only.
    pub fn cancel_all(&self, _reason: &str) -> usize {
        let mut st = self.shared.lock();
        let mut count = 0;
        let queued: Vec<u64> = st.queue.drain(..).collect();
        for seq in queued {
            self.shared.finish(&mut st, seq, CheckVerdict::checker_error("cancelled"));
            st.cancelled += 1;
            count += 1;
        }
        let running: Vec<u64> = st
            .jobs
            .iter()
            .filter(|(_, j)| matches!(j.state, JobState::Running { .. }))
            .map(|(k, _)| *k)
            .collect();
        for seq in running {
            self.shared.finish(&mut st, seq, CheckVerdict::checker_error("cancelled"));
            st.cancelled += 1;
            st.in_flight -= 1;
            count += 1;
        }
        self.shared.work.notify_all();
        self.shared.watch.notify_all();
        count
    }

    pub fn stats(&self) -> PoolStats {
        let st = self.shared.lock();
        let mut lat = st.latencies.clone();
        lat.sort_unstable();
        PoolStats {
            submitted: st.submitted,
            completed: st.completed,
            timed_out: st.timed_out,
            cancelled: st.cancelled,
            in_flight: st.in_flight,
            queued: st.queue.len() as u64,
            peak_in_flight: st.peak_in_flight,
            latency_p50_ms: nearest_rank(&lat, 0.50),
            latency_p95_ms: nearest_rank(&lat, 0.95),
            latency_p99_ms: nearest_rank(&lat, 0.99),
        }
    }
}

impl Drop for VerifyPool {
    fn drop(&mut self) {
        let mut st = self.shared.lock();
        st.shutdown = true;
        self.shared.work.notify_all();
        self.shared.watch.notify_all();
    }
}

fn spawn_if_needed(shared: &Arc<Shared>, st: &mut State) {
    let idle = st.workers_total - st.workers_busy;
    let admissible = !st.queue.is_empty() && (st.in_flight as usize) < shared.config.max_concurrent;
    if admissible && idle == 0 {
        st.workers_total += 1;
        let s = Arc::clone(shared);
        thread::Builder::new()
            .name("pool-worker".into())
            .spawn(move || run_worker(&s))
            .expect("spawn worker");
    }
}

fn run_worker(shared: &Arc<Shared>) {
    let mut st = shared.lock();
    loop {
        if st.shutdown {
            st.workers_total -= 1;
            return;
        }
        let admissible = (st.in_flight as usize) < shared.config.max_concurrent;
        let next = if admissible { st.queue.pop_front() } else { None };
        let Some(seq) = next else {
            st = shared.work.wait(st).unwrap_or_else(|p| p.into_inner());
            continue;
        };
        let job = st.jobs.get_mut(&seq).expect("queued job exists");
        let timeout_ms = job.timeout_ms;
        let obligation = job.obligation.take().expect("obligation present");
        let started = Instant::now();
        job.state = JobState::Running {
            deadline: started + Duration::from_millis(timeout_ms),
        };
        st.in_flight += 1;
        st.peak_in_flight = st.peak_in_flight.max(st.in_flight);
        st.workers_busy += 1;
        // keep admitting while this worker is occupied
        spawn_if_needed(shared, &mut st);
        shared.watch.notify_all();
        drop(st);

        let verdict = shared.checker.check(&obligation, timeout_ms);
        let elapsed = started.elapsed().as_millis() as u64;

        st = shared.lock();
        st.workers_busy -= 1;
        let still_running = matches!(st.jobs.get(&seq).map(|j| &j.state), Some(JobState::Running { .. }));
        if still_running {
            st.in_flight -= 1;
            st.completed += 1;
            st.latencies.push(elapsed);
            shared.finish(&mut st, seq, verdict);
            shared.work.notify_all();
        }
    }
}

fn run_watchdog(shared: &Arc<Shared>) {
    let mut st = shared.lock();
    loop {
        if st.shutdown {
            return;
        }
        let now = Instant::now();
        let expired: Vec<u64> = st
            .jobs
            .iter()
            .filter_map(|(k, j)| match j.state {
                JobState::Running { deadline } if deadline <= now => Some(*k),
                _ => None,
            })
            .collect();
        for seq in &expired {
            let timeout_ms = st.jobs[seq].timeout_ms;
            st.in_flight -= 1;
            st.timed_out += 1;
            shared.finish(&mut st, *seq, CheckVerdict::timeout().with_wall_time(timeout_ms));
        }
        if !expired.is_empty() {
            spawn_if_needed(shared, &mut st);
            shared.work.notify_all();
        }
        let next = st
            .jobs
            .values()
            .filter_map(|j| match j.state {
                JobState::Running { deadline } => Some(deadline),
                _ => None,
            })
            .min();
        st = match next {
            Some(deadline) => {
                let wait = deadline.saturating_duration_since(Instant::now());
                shared
                    .watch
                    .wait_timeout(st, wait)
                    .unwrap_or_else(|p| p.into_inner())
                    .0
            }
            None => shared.watch.wait(st).unwrap_or_else(|p| p.into_inner()),
        };
    }
}

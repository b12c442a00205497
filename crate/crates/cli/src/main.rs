use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lemmaforge::analytics::{
    auroc, default_ks, load_trace_dir, pass_at_k_curve, proof_stats, reduction_rate_curve, scored_outcomes,
    success_vs_iterations, write_curve_csv, write_outcomes_csv, write_reduction_csv, write_stats_csv,
    write_success_csv,
};
use lemmaforge::config::EngineConfig;
use lemmaforge::lang::parse_goal_file;
use lemmaforge::pool::VerifyPool;
use lemmaforge::quickcheck::{quickcheck, QcOutcome};
use lemmaforge::search::{run_pass_k, Backends, Outcome, RunTrace, TargetStrategy, TraceEvent};
use lemmaforge::training::{collect, export_trajectories, Curriculum, GateSettings};

mod backends;

#[derive(Parser)]
#[command(name = "lemmaforge", version, about = "Lemma-decomposition proof search")]
struct Cli {
    /// Engine configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for proofs of every goal in a goal file.
    Run(RunArgs),
    /// Randomized counterexample search; exits 1 if any goal is falsified.
    Qc(QcArgs),
    /// Environment loop over a curriculum: grouped rewards, lemma injection, trajectories.
    Collect(CollectArgs),
    /// Print the pool statistics recorded in run traces.
    PoolStats {
        /// A trace file or a directory of traces.
        path: PathBuf,
    },
    /// Compute metrics from a directory of run traces.
    Analyze(AnalyzeArgs),
    /// Print the effective configuration as TOML.
    ShowConfig,
}

#[derive(Args)]
struct PoolFlags {
    /// Route checks through a verification pool with this many workers.
    #[arg(long)]
    workers: Option<usize>,
    /// Per-check timeout in milliseconds.
    #[arg(long)]
    check_timeout: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    goal_file: PathBuf,
    /// Independent runs per goal (pass@k).
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    decompose_iters: Option<u32>,
    #[arg(long)]
    max_lemmas: Option<usize>,
    #[arg(long)]
    complete_iters: Option<u32>,
    #[arg(long)]
    budget_secs: Option<u64>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    strategy: Option<TargetStrategy>,
    /// builtin:<name> or extern:<endpoint>.
    #[arg(long, default_value = "builtin:splitter")]
    policy: String,
    /// builtin or extern:<endpoint>.
    #[arg(long, default_value = "builtin")]
    checker: String,
    /// Directory receiving one JSONL trace per run.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    #[command(flatten)]
    pool: PoolFlags,
}

#[derive(Args)]
struct QcArgs {
    goal_file: PathBuf,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CollectArgs {
    /// Goal file with the seed curriculum.
    curriculum: PathBuf,
    #[arg(long)]
    iterations: Option<u32>,
    #[arg(long)]
    group_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "builtin:stochastic")]
    policy: String,
    #[arg(long, default_value = "builtin:direct")]
    fallback: String,
    #[arg(long, default_value = "builtin")]
    checker: String,
    /// Output directory for groups, trajectories and the grown curriculum.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    pool: PoolFlags,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Passk,
    Reduction,
    Success,
    Auroc,
    Stats,
}

#[derive(Args)]
struct AnalyzeArgs {
    metric: Metric,
    trace_dir: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated k values; powers of two up to the run count by default.
    #[arg(long, value_delimiter = ',')]
    ks: Option<Vec<u32>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    let config = match &cli.config {
        Some(path) => EngineConfig::load(path)?,
        None => EngineConfig::default(),
    };
    match cli.command {
        Command::Run(a) => run(config, a),
        Command::Qc(a) => qc(config, a),
        Command::Collect(a) => collect_cmd(config, a),
        Command::PoolStats { path } => pool_stats(&path),
        Command::Analyze(a) => analyze(a),
        Command::ShowConfig => {
            print!("{}", config.to_toml_string());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn read_goals(path: &Path) -> Result<Vec<lemmaforge::lang::GoalDecl>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_goal_file(&text).with_context(|| format!("parsing {}", path.display()))
}

fn apply_pool_flags(config: &mut EngineConfig, flags: &PoolFlags) {
    if let Some(w) = flags.workers {
        config.pool.max_concurrent = w;
    }
    if let Some(t) = flags.check_timeout {
        config.pool.check_timeout_ms = t;
        config.search.check_timeout_ms = t;
    }
}

fn run(mut config: EngineConfig, a: RunArgs) -> Result<ExitCode> {
    let s = &mut config.search;
    if let Some(v) = a.k {
        s.k_parallel = v;
    }
    if let Some(v) = a.decompose_iters {
        s.decompose_iters = v;
    }
    if let Some(v) = a.max_lemmas {
        s.max_open_lemmas = v;
    }
    if let Some(v) = a.complete_iters {
        s.complete_iters = v;
    }
    if let Some(v) = a.budget_secs {
        s.wall_budget_secs = v;
    }
    if let Some(v) = a.temperature {
        s.score.temperature = v;
    }
    if let Some(v) = a.seed {
        s.seed = v;
    }
    if let Some(v) = a.strategy {
        s.target_strategy = v;
    }
    apply_pool_flags(&mut config, &a.pool);
    config.validate()?;

    let goals = read_goals(&a.goal_file)?;
    let domain = &config.search.domain;
    let policy = backends::policy(&a.policy, domain)?;
    let checker = backends::checker(&a.checker, domain)?;
    let use_pool = a.pool.workers.is_some() || a.checker.starts_with("extern:");
    let pool = use_pool.then(|| VerifyPool::new(config.pool.clone(), checker.clone()));

    if let Some(dir) = &a.trace_out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut backends = Backends::new(policy.as_ref(), checker.as_ref());
    if let Some(p) = &pool {
        backends = backends.with_pool(p);
    }

    println!("problem\tresult\tfirst_success_run\truns");
    for goal in &goals {
        let res = run_pass_k(goal, backends, &config.search)?;
        let witness = res.runs.iter().find_map(|r| match &r.outcome {
            Outcome::Disproved { witness } => Some(witness),
            _ => None,
        });
        let summary = match witness {
            _ if res.solved => "proved".to_string(),
            Some(w) => format!("disproved [{w}]"),
            None => "exhausted".to_string(),
        };
        let first = res.first_success_run.map_or("-".into(), |i| i.to_string());
        println!("{}\t{summary}\t{first}\t{}", goal.name, res.runs.len());
        if let Some(dir) = &a.trace_out {
            for t in &res.traces {
                let path = dir.join(format!("{}-r{:03}.jsonl", goal.name, t.header.run_index));
                t.write_jsonl(&path).with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn qc(mut config: EngineConfig, a: QcArgs) -> Result<ExitCode> {
    if let Some(t) = a.trials {
        config.search.qc.trials = t;
    }
    if let Some(s) = a.seed {
        config.search.qc.seed = s;
    }
    config.validate()?;
    let mut falsified = false;
    for goal in read_goals(&a.goal_file)? {
        match quickcheck(&goal, &config.search.qc, &config.search.domain) {
            QcOutcome::NoCounterexample { trials_run } => {
                println!("{}: no counterexample ({trials_run} trials)", goal.name)
            }
            QcOutcome::Counterexample { witness, trial_index } => {
                falsified = true;
                println!("{}: counterexample at trial {trial_index}: {witness}", goal.name);
            }
        }
    }
    Ok(if falsified { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn collect_cmd(mut config: EngineConfig, a: CollectArgs) -> Result<ExitCode> {
    let c = &mut config.collect;
    if let Some(v) = a.iterations {
        c.iterations = v;
    }
    if let Some(v) = a.group_size {
        c.group_size = v;
    }
    if let Some(v) = a.seed {
        c.seed = v;
    }
    apply_pool_flags(&mut config, &a.pool);
    config.validate()?;

    let s = &config.search;
    let curriculum = Curriculum::load_goal_file(&a.curriculum)?;
    let policy = backends::policy(&a.policy, &s.domain)?;
    let fallback = backends::policy(&a.fallback, &s.domain)?;
    let checker = backends::checker(&a.checker, &s.domain)?;
    let use_pool = a.pool.workers.is_some() || a.checker.starts_with("extern:");
    let pool = use_pool.then(|| VerifyPool::new(config.pool.clone(), checker.clone()));

    let mut gate = GateSettings::new(checker.as_ref(), s.domain.clone());
    gate.pool = pool.as_ref();
    gate.qc = s.qc.clone();
    gate.score = s.score;
    gate.check_timeout_ms = s.check_timeout_ms;
    gate.allowlist = s.allowlist.clone();

    let out = collect(curriculum, policy.as_ref(), fallback.as_ref(), &gate, &config.collect);

    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut groups = String::new();
    for g in &out.groups {
        groups.push_str(&serde_json::to_string(g)?);
        groups.push('\n');
    }
    fs::write(a.out.join("groups.jsonl"), groups)?;
    let mut kept = String::new();
    for g in &out.kept {
        kept.push_str(&serde_json::to_string(g)?);
        kept.push('\n');
    }
    fs::write(a.out.join("kept_groups.jsonl"), kept)?;
    export_trajectories(&out.trajectories, &a.out.join("trajectories.jsonl"), &s.allowlist)?;
    fs::write(a.out.join("curriculum.jsonl"), out.curriculum.to_jsonl())?;

    println!(
        "groups {} kept {} trajectories {} curriculum {} (version {}) unresolved {}",
        out.groups.len(),
        out.kept.len(),
        out.trajectories.len(),
        out.curriculum.len(),
        out.curriculum.version(),
        out.unresolved
    );
    Ok(ExitCode::SUCCESS)
}

fn pool_stats(path: &Path) -> Result<ExitCode> {
    let traces = if path.is_dir() {
        load_trace_dir(path)?
    } else {
        vec![RunTrace::read_jsonl(path).with_context(|| format!("reading {}", path.display()))?]
    };
    for t in &traces {
        let pool = t.events().find_map(|e| match e {
            TraceEvent::RunEnd { pool, .. } => Some(pool.clone()),
            _ => None,
        });
        match pool {
            Some(Some(stats)) => println!("{}\t{}", t.header.run_id, serde_json::to_string(&stats)?),
            Some(None) => println!("{}\tno pool", t.header.run_id),
            None => println!("{}\tincomplete trace", t.header.run_id),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn analyze(a: AnalyzeArgs) -> Result<ExitCode> {
    let traces = load_trace_dir(&a.trace_dir)?;
    if traces.is_empty() {
        bail!("no *.jsonl traces in {}", a.trace_dir.display());
    }
    let ks = match a.ks {
        Some(ks) => ks,
        None => default_ks(&traces)?,
    };
    match a.metric {
        Metric::Passk => write_curve_csv(&a.out, &pass_at_k_curve(&traces, &ks)?)?,
        Metric::Reduction => write_reduction_csv(&a.out, &reduction_rate_curve(&traces))?,
        Metric::Success => write_success_csv(&a.out, &success_vs_iterations(&traces, &ks)?)?,
        Metric::Auroc => {
            let outcomes = scored_outcomes(&traces)?;
            write_outcomes_csv(&a.out, &outcomes)?;
            match auroc(&outcomes) {
                Ok(v) => println!("auroc {v:.6} over {} problems", outcomes.len()),
                Err(e) => println!("auroc undefined: {e}"),
            }
        }
        Metric::Stats => write_stats_csv(&a.out, &proof_stats(&traces))?,
    }
    Ok(ExitCode::SUCCESS)
}

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::lang::GoalDecl;
use crate::prover::{DecompositionProposal, Policy, PolicyContext};
use crate::rng::stream;

use super::completion::{policy_first_completion, CompletionSettings};
use super::curriculum::{Curriculum, Provenance};
use super::rollout::{filter_groups, score_rollout_group, GateSettings, RolloutGroup};
use super::trajectory::{Source, TrajectoryRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollectConfig {
    pub iterations: u32,
    /// Proposals sampled per goal.
    pub group_size: usize,
    /// Goals sampled per iteration; all goals when unset.
    pub batch_size: Option<usize>,
    pub seed: u64,
    pub completion: CompletionSettings,
}

impl Default for CollectConfig {
    fn default() -> Self {
        CollectConfig { iterations: 1, group_size: 8, batch_size: None, seed: 0, completion: CompletionSettings::default() }
    }
}

#[derive(Debug, Clone)]
pub struct CollectOutput {
    pub groups: Vec<RolloutGroup>,
    /// Groups surviving [`filter_groups`].
    pub kept: Vec<RolloutGroup>,
    pub trajectories: Vec<TrajectoryRecord>,
    pub curriculum: Curriculum,
    pub unresolved: usize,
}

/// Environment loop: sample groups of decompositions per goal, reward them,
/// inject accepted lemmas into the curriculum and complete the new lemmas
/// policy-first.
pub fn collect(
    mut curriculum: Curriculum,
    policy: &dyn Policy,
    fallback: &dyn Policy,
    gate: &GateSettings<'_>,
    config: &CollectConfig,
) -> CollectOutput {
    let mut groups = Vec::new();
    let mut trajectories = Vec::new();
    let mut unresolved = 0;

    for t in 1..=config.iterations {
        let snapshot: Vec<GoalDecl> = curriculum.goals().cloned().collect();
        let batch: Vec<usize> = match config.batch_size {
            Some(b) if b < snapshot.len() => {
                let mut rng = stream(config.seed, &format!("collect/{t}/batch"));
                let mut idx = sample(&mut rng, snapshot.len(), b).into_vec();
                idx.sort_unstable();
                idx
            }
            _ => (0..snapshot.len()).collect(),
        };
        let run_id = format!("collect-t{t}");

        for i in batch {
            let goal = &snapshot[i];
            let ctx = PolicyContext::decompose(goal.clone(), Vec::new(), 1);
            let mut rng = stream(config.seed, &format!("collect/{t}/{}", goal.name));
            let proposals: Vec<DecompositionProposal> = (0..config.group_size)
                .filter_map(|_| policy.propose_decomposition(&ctx, &mut rng).ok())
                .collect();
            if proposals.is_empty() {
                continue;
            }
            let group = score_rollout_group(goal, proposals, gate);

            let mut fresh = Vec::new();
            for (p, d) in group.proposals.iter().zip(&group.details) {
                let Some(score) = &d.score else { continue };
                if score.v != 1 || score.r <= 0.0 {
                    continue;
                }
                trajectories.push(TrajectoryRecord::Decomposition {
                    input: ctx.clone(),
                    output: p.clone(),
                    gate: d.gate.clone(),
                    score: score.clone(),
                    source: Source::Policy,
                });
                let before = curriculum.len();
                curriculum.augment(
                    &p.lemmas,
                    &Provenance::InjectedLemma { parent: goal.name.clone(), run_id: run_id.clone() },
                );
                fresh.extend(curriculum.entries()[before..].iter().map(|e| e.goal.clone()));
            }
            groups.push(group);

            for lemma in fresh {
                let mut rng = stream(config.seed, &format!("collect/{t}/complete/{}", lemma.name));
                let res = policy_first_completion(&lemma, policy, fallback, gate.checker, &config.completion, &mut rng);
                match res.record {
                    Some(r) => trajectories.push(r),
                    None => unresolved += 1,
                }
            }
        }
    }

    let kept = filter_groups(groups.clone());
    CollectOutput { groups, kept, trajectories, curriculum, unresolved }
}

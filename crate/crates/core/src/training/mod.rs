//! Environment side of training: grouped rewards, group filtering,
//! policy-first completion, curriculum growth and trajectory export.

mod collect;
mod completion;
mod curriculum;
mod rollout;
mod trajectory;

pub use collect::{collect, CollectConfig, CollectOutput};
pub use completion::{policy_first_completion, AttemptLog, CompletionSettings, PolicyFirstResult};
pub use curriculum::{augment_curriculum, Curriculum, CurriculumEntry, CurriculumError, Provenance};
pub use rollout::{filter_groups, score_rollout_group, GateSettings, ProposalReward, RolloutGroup};
pub use trajectory::{
    export_trajectories, import_trajectories, parse_trajectories, validate_export_file, validate_record,
    ExportError, FilterViolation, ReplaySampler, Source, TrajectoryRecord, TRAJECTORY_SCHEMA, TRAJECTORY_VERSION,
};

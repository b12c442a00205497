use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::lang::GoalDecl;
use crate::scoring::ScoreBreakdown;

use super::config::TargetStrategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalStatus {
    Open,
    Decomposed,
    ClosedByDischarge,
    ClosedByProof,
}

impl GoalStatus {
    pub fn is_closed(self) -> bool {
        matches!(self, GoalStatus::ClosedByDischarge | GoalStatus::ClosedByProof)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalEntry {
    pub goal: GoalDecl,
    pub footprint: usize,
    pub status: GoalStatus,
    pub parent: Option<String>,
    pub depth: u32,
    /// Score of the decomposition that created this goal; `None` for the root.
    pub created_by: Option<ScoreBreakdown>,
}

/// The goal tree of one run, in insertion order. Index 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenGoalSet {
    entries: Vec<GoalEntry>,
    #[serde(skip)]
    names: HashSet<String>,
}

impl OpenGoalSet {
    pub fn new(root: GoalDecl) -> Self {
        let mut names = HashSet::new();
        names.insert(root.name.clone());
        OpenGoalSet {
            entries: vec![GoalEntry {
                footprint: root.footprint(),
                goal: root,
                status: GoalStatus::Open,
                parent: None,
                depth: 0,
                created_by: None,
            }],
            names,
        }
    }

    pub fn entries(&self) -> &[GoalEntry] {
        &self.entries
    }

    pub fn root(&self) -> &GoalEntry {
        &self.entries[0]
    }

    pub fn get(&self, index: usize) -> &GoalEntry {
        &self.entries[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.goal.name == name)
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.names.contains(name)
    }

    /// Lemmas inserted so far (the root is not a lemma).
    pub fn inserted_lemmas(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn open_indices(&self) -> Vec<usize> {
        (0..self.entries.len())
            .filter(|&i| self.entries[i].status == GoalStatus::Open)
            .collect()
    }

    pub fn has_open(&self) -> bool {
        self.entries.iter().any(|e| e.status == GoalStatus::Open)
    }

    /// Entries never decomposed.
    pub fn leaf_indices(&self) -> Vec<usize> {
        (0..self.entries.len())
            .filter(|&i| self.entries[i].status != GoalStatus::Decomposed)
            .collect()
    }

    pub fn all_leaves_closed(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.status == GoalStatus::Decomposed || e.status.is_closed())
    }

    pub fn select_target(&self, strategy: TargetStrategy) -> Option<usize> {
        let open = self.open_indices();
        match strategy {
            TargetStrategy::HighestFootprint => {
                // strict comparison keeps the oldest among equals
                let mut best: Option<usize> = None;
                for i in open {
                    if best.is_none_or(|b| self.entries[i].footprint > self.entries[b].footprint) {
                        best = Some(i);
                    }
                }
                best
            }
            TargetStrategy::HighestScore => {
                let score = |i: usize| self.entries[i].created_by.as_ref().map_or(0.0, |s| s.s);
                let mut best: Option<usize> = None;
                for i in open {
                    if best.is_none_or(|b| score(i) > score(b)) {
                        best = Some(i);
                    }
                }
                best
            }
        }
    }

    pub fn set_status(&mut self, index: usize, status: GoalStatus) {
        self.entries[index].status = status;
    }

    /// Insert `children` under `parent`. The caller has checked freshness.
    pub fn insert_children(&mut self, parent: usize, children: Vec<GoalDecl>, score: &ScoreBreakdown) -> Vec<usize> {
        let parent_name = self.entries[parent].goal.name.clone();
        let depth = self.entries[parent].depth + 1;
        let mut out = Vec::with_capacity(children.len());
        for goal in children {
            self.names.insert(goal.name.clone());
            out.push(self.entries.len());
            self.entries.push(GoalEntry {
                footprint: goal.footprint(),
                goal,
                status: GoalStatus::Open,
                parent: Some(parent_name.clone()),
                depth,
                created_by: Some(score.clone()),
            });
        }
        out
    }
}

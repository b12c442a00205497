use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::lang::{alpha_key, parse_goal_file, GoalDecl, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Provenance {
    Seed,
    InjectedLemma { parent: String, run_id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurriculumEntry {
    pub goal: GoalDecl,
    pub provenance: Provenance,
}

#[derive(Debug, thiserror::Error)]
pub enum CurriculumError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
    #[error("{path}: line {line}: {source}")]
    Json {
        path: String,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

/// Problem set that only grows. Goals are unique up to alpha-equivalence and
/// by name.
#[derive(Debug, Clone, Default)]
pub struct Curriculum {
    entries: Vec<CurriculumEntry>,
    version: u64,
    keys: HashSet<String>,
    names: HashSet<String>,
}

impl Curriculum {
    pub fn from_seeds(seeds: impl IntoIterator<Item = GoalDecl>) -> Self {
        let mut c = Curriculum::default();
        for g in seeds {
            c.insert(g, Provenance::Seed);
        }
        c
    }

    pub fn entries(&self) -> &[CurriculumEntry] {
        &self.entries
    }

    pub fn goals(&self) -> impl Iterator<Item = &GoalDecl> {
        self.entries.iter().map(|e| &e.goal)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn contains(&self, goal: &GoalDecl) -> bool {
        self.keys.contains(&alpha_key(goal))
    }

    pub fn mean_footprint(&self) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        self.entries.iter().map(|e| e.goal.footprint() as f64).sum::<f64>() / self.entries.len() as f64
    }

    fn insert(&mut self, mut goal: GoalDecl, provenance: Provenance) -> bool {
        if !self.keys.insert(alpha_key(&goal)) {
            return false;
        }
        if self.names.contains(&goal.name) {
            let base = goal.name.clone();
            let mut n = 2;
            while self.names.contains(&format!("{base}_v{n}")) {
                n += 1;
            }
            goal.name = format!("{base}_v{n}");
        }
        self.names.insert(goal.name.clone());
        self.entries.push(CurriculumEntry { goal, provenance });
        true
    }

    /// Add lemmas, skipping alpha-duplicates. Bumps the version iff anything
    /// was added; returns the number added.
    pub fn augment(&mut self, lemmas: &[GoalDecl], provenance: &Provenance) -> usize {
        let added = lemmas.iter().filter(|l| self.insert((*l).clone(), provenance.clone())).count();
        if added > 0 {
            self.version += 1;
        }
        added
    }

    /// Seeds from a goal file.
    pub fn load_goal_file(path: &Path) -> Result<Self, CurriculumError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| CurriculumError::Io { path: p.clone(), source })?;
        let goals = parse_goal_file(&text).map_err(|source| CurriculumError::Parse { path: p, source })?;
        Ok(Curriculum::from_seeds(goals))
    }

    /// One JSON entry per line, in insertion order.
    pub fn to_jsonl(&self) -> String {
        self.entries
            .iter()
            .map(|e| serde_json::to_string(e).expect("entry serializes") + "\n")
            .collect()
    }

    pub fn from_jsonl(text: &str, path: &str) -> Result<Self, CurriculumError> {
        let mut c = Curriculum::default();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let e: CurriculumEntry = serde_json::from_str(line).map_err(|source| CurriculumError::Json {
                path: path.to_string(),
                line: i + 1,
                source,
            })?;
            c.insert(e.goal, e.provenance);
        }
        Ok(c)
    }
}

/// Functional form of [`Curriculum::augment`].
pub fn augment_curriculum(mut curriculum: Curriculum, lemmas: &[GoalDecl], provenance: Provenance) -> Curriculum {
    curriculum.augment(lemmas, &provenance);
    curriculum
}

//! Prompt templates for model-backed external policies, and the edit-block
//! format their completion replies may use.

use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplates {
    pub decompose: String,
    pub complete: String,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates {
            decompose: include_str!("../../templates/decompose.txt").to_string(),
            complete: include_str!("../../templates/complete.txt").to_string(),
        }
    }
}

impl PromptTemplates {
    /// Read `decompose.txt` and `complete.txt` from `dir`.
    pub fn load_dir(dir: &Path) -> std::io::Result<Self> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path)
                .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        };
        Ok(PromptTemplates {
            decompose: read("decompose.txt")?,
            complete: read("complete.txt")?,
        })
    }
}

/// Substitute `{key}` placeholders in one pass; substituted text is not
/// rescanned and unknown placeholders are kept verbatim.
pub fn render(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let hit = after.find('}').and_then(|close| {
            let key = &after[..close];
            vars.iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| (close, *v))
        });
        match hit {
            Some((close, value)) => {
                out.push_str(value);
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// First line number mentioned in checker diagnostics, as `line N` or an
/// `N:M` position.
pub fn diagnostic_line(diagnostics: &str) -> Option<u32> {
    for line in diagnostics.lines() {
        if let Some(idx) = line.find("line ") {
            let digits: String = line[idx + 5..].chars().take_while(char::is_ascii_digit).collect();
            if let Ok(n) = digits.parse() {
                return Some(n);
            }
        }
        for token in line.split_whitespace() {
            let parts: Vec<&str> = token.split(':').collect();
            for pair in parts.windows(2) {
                if let (Ok(n), Ok(_)) = (pair[0].parse::<u32>(), pair[1].parse::<u32>()) {
                    return Some(n);
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EditError {
    #[error("edit block {0} is not terminated")]
    Unterminated(usize),
    #[error("search text of edit block {0} not found in the current proof")]
    NotFound(usize),
}

const SEARCH: &str = "<<<<<<< SEARCH";
const DIVIDER: &str = "=======";
const REPLACE: &str = ">>>>>>> REPLACE";

/// Apply the edit blocks in `reply` to `base`, in order, each replacing the
/// first occurrence of its search text. `Ok(None)` when `reply` has no
/// blocks (it is then a whole proof).
pub fn apply_edit_blocks(base: &str, reply: &str) -> Result<Option<String>, EditError> {
    let lines: Vec<&str> = reply.lines().collect();
    let mut current = base.to_string();
    let mut i = 0;
    let mut block = 0;
    while i < lines.len() {
        if lines[i].trim_end() != SEARCH {
            i += 1;
            continue;
        }
        block += 1;
        let div = (i + 1..lines.len())
            .find(|&j| lines[j].trim_end() == DIVIDER)
            .ok_or(EditError::Unterminated(block))?;
        let end = (div + 1..lines.len())
            .find(|&j| lines[j].trim_end() == REPLACE)
            .ok_or(EditError::Unterminated(block))?;
        let search = lines[i + 1..div].join("\n");
        let replace = lines[div + 1..end].join("\n");
        let at = current.find(&search).ok_or(EditError::NotFound(block))?;
        current.replace_range(at..at + search.len(), &replace);
        i = end + 1;
    }
    Ok(if block == 0 { None } else { Some(current) })
}

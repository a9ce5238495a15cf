//! Option-wise multiple-choice scoring and parsing of structured model answers.
//!
//! Each option is an independent select/reject decision worth `1/|options|`.
//! With four options and key `{D}`, the answer `{B, D}` agrees on A, C and D
//! and earns 0.75.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScoringError {
    #[error("option labels must be non-empty and distinct")]
    InvalidOptions,
    #[error("answer key contains unknown label {0:?}")]
    UnknownKeyLabel(String),
    #[error("selection contains unknown label {0:?}")]
    UnknownLabel(String),
    #[error("response is not valid JSON: {0}")]
    InvalidJson(String),
    #[error("response JSON is not an object")]
    NotAnObject,
    #[error("response has no selection field")]
    MissingSelection,
    #[error("selection field has unsupported type")]
    BadSelectionType,
}

/// A multiple-choice task and its answer key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    #[serde(rename = "options")]
    option_labels: Vec<String>,
    #[serde(rename = "key")]
    answer_key: BTreeSet<String>,
    pub system_prompt: String,
    pub user_prompt: String,
}

impl TaskSpec {
    pub fn new(
        option_labels: Vec<String>,
        answer_key: impl IntoIterator<Item = String>,
        system_prompt: impl Into<String>,
        user_prompt: impl Into<String>,
    ) -> Result<Self, ScoringError> {
        let spec = Self {
            option_labels,
            answer_key: answer_key.into_iter().collect(),
            system_prompt: system_prompt.into(),
            user_prompt: user_prompt.into(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the label invariants; call after deserializing.
    pub fn validate(&self) -> Result<(), ScoringError> {
        let distinct: BTreeSet<&str> = self.option_labels.iter().map(String::as_str).collect();
        if self.option_labels.is_empty()
            || distinct.len() != self.option_labels.len()
            || self.option_labels.iter().any(|l| l.trim().is_empty())
        {
            return Err(ScoringError::InvalidOptions);
        }
        if let Some(bad) = self.answer_key.iter().find(|k| !distinct.contains(k.as_str())) {
            return Err(ScoringError::UnknownKeyLabel(bad.clone()));
        }
        Ok(())
    }

    pub fn option_labels(&self) -> &[String] {
        &self.option_labels
    }

    pub fn answer_key(&self) -> &BTreeSet<String> {
        &self.answer_key
    }

    /// Canonical label for `token`, matched after trimming and case folding.
    fn resolve(&self, token: &str) -> Option<&str> {
        let t = token.trim();
        self.option_labels
            .iter()
            .find(|l| l.as_str() == t)
            .or_else(|| {
                let folded = t.to_lowercase();
                self.option_labels.iter().find(|l| l.to_lowercase() == folded)
            })
            .map(String::as_str)
    }
}

/// Fraction of options on which `selected` agrees with the answer key.
pub fn score_response<S: AsRef<str>>(selected: &[S], spec: &TaskSpec) -> Result<f64, ScoringError> {
    let chosen: BTreeSet<&str> = selected.iter().map(AsRef::as_ref).collect();
    if let Some(bad) = chosen.iter().find(|s| !spec.option_labels.iter().any(|l| l == *s)) {
        return Err(ScoringError::UnknownLabel(bad.to_string()));
    }
    let agree = spec
        .option_labels
        .iter()
        .filter(|l| chosen.contains(l.as_str()) == spec.answer_key.contains(*l))
        .count();
    Ok(agree as f64 / spec.option_labels.len() as f64)
}

/// Parsed structured answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredAnswer {
    pub solution_path: String,
    pub selected: BTreeSet<String>,
}

impl StructuredAnswer {
    pub fn score(&self, spec: &TaskSpec) -> Result<f64, ScoringError> {
        let sel: Vec<&str> = self.selected.iter().map(String::as_str).collect();
        score_response(&sel, spec)
    }
}

const SELECTION_FIELDS: [&str; 3] = ["answer", "selected", "answers"];

/// Extracts `solution_path` and the selected labels from a JSON object.
///
/// The selection may be an array of labels or one string of labels
/// separated by commas or whitespace. Unknown labels are errors.
pub fn parse_structured(raw: &str, spec: &TaskSpec) -> Result<StructuredAnswer, ScoringError> {
    let value: Value = serde_json::from_str(raw.trim()).map_err(|e| ScoringError::InvalidJson(e.to_string()))?;
    let obj = value.as_object().ok_or(ScoringError::NotAnObject)?;
    let selection = SELECTION_FIELDS
        .iter()
        .find_map(|f| obj.get(*f))
        .ok_or(ScoringError::MissingSelection)?;

    let tokens: Vec<String> = match selection {
        Value::String(s) => split_labels(s),
        Value::Array(items) => {
            let mut out = Vec::new();
            for item in items {
                match item {
                    Value::String(s) => out.extend(split_labels(s)),
                    _ => return Err(ScoringError::BadSelectionType),
                }
            }
            out
        }
        _ => return Err(ScoringError::BadSelectionType),
    };

    let mut selected = BTreeSet::new();
    for tok in tokens {
        let label = spec.resolve(&tok).ok_or_else(|| ScoringError::UnknownLabel(tok.clone()))?;
        selected.insert(label.to_string());
    }

    let solution_path = match obj.get("solution_path") {
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
        None => String::new(),
    };
    Ok(StructuredAnswer {
        solution_path,
        selected,
    })
}

fn split_labels(s: &str) -> Vec<String> {
    s.split(|c: char| c == ',' || c == ';' || c == '/' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

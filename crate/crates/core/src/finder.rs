//! Outcome and error types shared by all finders.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::subdivision::{PatternError, Subdivision};

/// Structured record of why a best-effort (scaled) run stopped without a
/// witness. `phase` is a stable label; `measurements` holds the quantities
/// that failed their bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureTrace {
    pub finder: String,
    pub stage: usize,
    pub phase: String,
    pub reason: String,
    pub measurements: BTreeMap<String, f64>,
}

impl FailureTrace {
    pub fn new(finder: &str, stage: usize, phase: &str, reason: impl Into<String>) -> Self {
        Self {
            finder: finder.to_string(),
            stage,
            phase: phase.to_string(),
            reason: reason.into(),
            measurements: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<f64>) -> Self {
        self.measurements.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Found(Subdivision),
    Failed(FailureTrace),
}

impl Outcome {
    pub fn subdivision(&self) -> Option<&Subdivision> {
        match self {
            Outcome::Found(s) => Some(s),
            Outcome::Failed(_) => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Outcome::Found(_))
    }
}

/// Violated preconditions: the caller asked for something the construction
/// does not promise, as opposed to a best-effort run that came up empty.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum FinderError {
    #[error("target order k = {k} is below the supported minimum {min}")]
    InvalidK { k: usize, min: usize },
    #[error("minimum out-degree {min_out} is below the required {required:.1}")]
    InfeasibleDegree { min_out: usize, required: f64 },
    #[error("host has {n} vertices, the construction needs {required:.1}")]
    InfeasibleSize { n: usize, required: f64 },
    #[error("scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

//! Pass/fail reports shared by the validation operations.

use serde::{Deserialize, Serialize};

/// One checked relation or property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    /// What the relation claims, as text.
    pub expected: String,
    /// What direct computation produced, as text.
    pub computed: String,
    pub residual: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub title: String,
    pub entries: Vec<CheckEntry>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn push(
        &mut self,
        name: impl Into<String>,
        expected: impl Into<String>,
        computed: impl Into<String>,
        residual: f64,
        ok: bool,
    ) {
        self.entries.push(CheckEntry {
            name: name.into(),
            expected: expected.into(),
            computed: computed.into(),
            residual,
            ok,
        });
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| !e.ok)
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }
}

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub location: String,
    pub witness: String,
}

/// Outcome of an exhaustive check: every failing instance is listed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub status: Status,
    pub instances_checked: usize,
    pub failures: Vec<Failure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl Report {
    pub fn new(check: impl Into<String>) -> Self {
        Report {
            check: check.into(),
            status: Status::Pass,
            instances_checked: 0,
            failures: Vec::new(),
            details: None,
        }
    }

    /// Count one instance; record a failure when `ok` is false.
    pub fn check(&mut self, ok: bool, location: impl FnOnce() -> String, witness: impl FnOnce() -> String) {
        self.instances_checked += 1;
        if !ok {
            self.fail(location(), witness());
        }
    }

    pub fn fail(&mut self, location: impl Into<String>, witness: impl Into<String>) {
        self.status = Status::Fail;
        self.failures.push(Failure {
            location: location.into(),
            witness: witness.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Fold a sub-report in, prefixing its failure locations with its check name.
    pub fn absorb(&mut self, other: Report) {
        self.instances_checked += other.instances_checked;
        for f in other.failures {
            self.fail(format!("{}: {}", other.check, f.location), f.witness);
        }
    }

    pub fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = Some(details);
        self
    }
}

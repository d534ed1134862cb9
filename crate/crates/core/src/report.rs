//! Structured outcome of a verification.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Stopped by the time budget before finishing.
    Budget,
}

/// Calibration scalars solved during a run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scalars {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Rational>,
}

impl Scalars {
    pub fn is_empty(&self) -> bool {
        self.alpha.is_none() && self.beta.is_none() && self.rho.is_none() && self.c.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub status: Status,
    /// Monomials left in the residuals; zero on a pass.
    pub residual_terms: usize,
    #[serde(default, skip_serializing_if = "Scalars::is_empty")]
    pub scalars: Scalars,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kernel_dims: Vec<usize>,
    pub millis: u64,
    /// Set on sampled fast-path checks that do not prove the symbolic identity.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub non_acceptance_grade: bool,
    /// Names of failing sub-checks, or short notes.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>) -> Self {
        VerificationReport {
            check: check.into(),
            status: Status::Pass,
            residual_terms: 0,
            scalars: Scalars::default(),
            kernel_dims: Vec::new(),
            millis: 0,
            non_acceptance_grade: false,
            details: Vec::new(),
        }
    }

    /// Runs `f`, records its wall time, and lets it fill in the report.
    pub fn timed(check: impl Into<String>, f: impl FnOnce(&mut Self)) -> Self {
        let start = Instant::now();
        let mut r = Self::new(check);
        f(&mut r);
        r.millis = start.elapsed().as_millis() as u64;
        r
    }

    /// Adds a residual; a nonzero count marks the report failed under `name`.
    pub fn residual(&mut self, name: impl Into<String>, terms: usize) {
        if terms > 0 {
            self.residual_terms += terms;
            self.status = Status::Fail;
            self.details.push(format!("{}: {terms} residual terms", name.into()));
        }
    }

    /// Marks failure with a note.
    pub fn fail(&mut self, note: impl Into<String>) {
        self.status = Status::Fail;
        self.details.push(note.into());
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.details.push(note.into());
    }

    /// Folds a sub-report into this one.
    pub fn merge(&mut self, other: &VerificationReport) {
        if other.status != Status::Pass {
            self.status = match (self.status, other.status) {
                (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
                _ => Status::Budget,
            };
            for d in &other.details {
                self.details.push(format!("{}: {d}", other.check));
            }
        }
        self.residual_terms += other.residual_terms;
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

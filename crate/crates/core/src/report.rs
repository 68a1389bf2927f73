//! Residual reports shared by every verifier.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::{GridSpec, Quadrature};
use crate::radial::RadialQuadrature;

/// How the two sides of a report are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs = rhs`; residual is `|lhs - rhs|`.
    Equal,
    /// `Re lhs <= Re rhs`; residual is the violation `max(0, Re lhs - Re rhs)`.
    AtMost,
    /// `lhs` and `rhs` are the norms of two fields; the residual is the norm
    /// of their difference.
    FieldsEqual,
}

/// Where the two sides were evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Discretization {
    Exact {
        dim: usize,
    },
    Grid {
        grid: GridSpec,
        quadrature: Quadrature,
    },
    Radial {
        quadrature: RadialQuadrature,
    },
}

/// One verified identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualityReport {
    pub identity_id: String,
    /// Label of the input the identity was evaluated on (state name, angle, ...).
    pub subject: String,
    pub relation: Relation,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tol: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub discretization: Option<Discretization>,
}

/// `max(|lhs|, |rhs|, 1)`: keeps the relative residual finite for identities
/// whose sides legitimately vanish.
pub fn residual_scale(lhs: Complex64, rhs: Complex64) -> f64 {
    lhs.norm().max(rhs.norm()).max(1.0)
}

impl EqualityReport {
    pub fn equality(
        identity_id: impl Into<String>,
        lhs: impl Into<Complex64>,
        rhs: impl Into<Complex64>,
        tol: f64,
    ) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        let abs_residual = (lhs - rhs).norm();
        Self::assemble(identity_id.into(), Relation::Equal, lhs, rhs, abs_residual, tol)
    }

    pub fn at_most(
        identity_id: impl Into<String>,
        lesser: f64,
        greater: f64,
        tol: f64,
    ) -> Self {
        let abs_residual = (lesser - greater).max(0.0);
        Self::assemble(
            identity_id.into(),
            Relation::AtMost,
            lesser.into(),
            greater.into(),
            abs_residual,
            tol,
        )
    }

    /// Compares two fields through the norm of their difference.
    pub fn fields(
        identity_id: impl Into<String>,
        lhs_norm: f64,
        rhs_norm: f64,
        difference_norm: f64,
        tol: f64,
    ) -> Self {
        Self::assemble(
            identity_id.into(),
            Relation::FieldsEqual,
            lhs_norm.into(),
            rhs_norm.into(),
            difference_norm,
            tol,
        )
    }

    fn assemble(
        identity_id: String,
        relation: Relation,
        lhs: Complex64,
        rhs: Complex64,
        abs_residual: f64,
        tol: f64,
    ) -> Self {
        let rel_residual = abs_residual / residual_scale(lhs, rhs);
        // NaN residuals must fail
        let passed = rel_residual <= tol;
        EqualityReport {
            identity_id,
            subject: String::new(),
            relation,
            lhs,
            rhs,
            abs_residual,
            rel_residual,
            tol,
            passed,
            discretization: None,
        }
    }

    pub fn with_subject(mut self, subject: impl Into<String>) -> Self {
        self.subject = subject.into();
        self
    }

    pub fn with_discretization(mut self, d: Discretization) -> Self {
        self.discretization = Some(d);
        self
    }

    /// Prefixes the subject, keeping any existing label after a space.
    pub fn prefix_subject(&mut self, prefix: &str) {
        if self.subject.is_empty() {
            self.subject = prefix.to_string();
        } else {
            self.subject = format!("{prefix} {}", self.subject);
        }
    }
}

/// Attaches the same subject and discretization to a batch of reports.
pub fn label_all(reports: &mut [EqualityReport], subject: &str, d: Option<&Discretization>) {
    for r in reports.iter_mut() {
        r.prefix_subject(subject);
        if let Some(d) = d {
            r.discretization = Some(d.clone());
        }
    }
}

/// True when every report passed.
pub fn all_passed(reports: &[EqualityReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

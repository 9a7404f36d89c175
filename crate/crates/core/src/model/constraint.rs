use serde::Serialize;

use super::scope::{Scope, VariableId};
use crate::error::{Error, Result};

/// One equality `sum_j coeffs[j] * P(state j) = rhs` over the states of a scope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearRow {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintKind {
    /// Target probabilities for every state of `scope` (an event partition).
    Marginal { scope: Scope, targets: Vec<f64> },
    /// `P(target | condition) = prob`, the condition being a partial assignment.
    Conditional {
        target: VariableId,
        condition: Vec<(VariableId, bool)>,
        prob: f64,
    },
    /// Linear equality rows over the states of `scope`.
    Linear { scope: Scope, rows: Vec<LinearRow> },
}

/// A single piece of evidence together with its termination threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintSet {
    pub label: String,
    pub kind: ConstraintKind,
    pub threshold: f64,
}

impl ConstraintSet {
    pub fn new(label: impl Into<String>, kind: ConstraintKind, threshold: f64) -> Result<Self> {
        let c = Self {
            label: label.into(),
            kind,
            threshold,
        };
        c.validate()?;
        Ok(c)
    }

    /// `P(var) = p` as a two-event marginal.
    pub fn marginal(var: &str, p: f64, threshold: f64) -> Result<Self> {
        Self::new(
            format!("P({var})"),
            ConstraintKind::Marginal {
                scope: Scope::new(vec![VariableId::new(var)?])?,
                targets: vec![1.0 - p, p],
            },
            threshold,
        )
    }

    fn validate(&self) -> Result<()> {
        if !(self.threshold >= 0.0) {
            return Err(Error::ConstraintForm(format!(
                "{}: threshold {} must be non-negative",
                self.label, self.threshold
            )));
        }
        match &self.kind {
            ConstraintKind::Marginal { scope, targets } => {
                if targets.len() != scope.num_states() {
                    return Err(Error::Arity {
                        expected: scope.num_states(),
                        found: targets.len(),
                    });
                }
                if targets.iter().any(|t| !(0.0..=1.0).contains(t)) {
                    return Err(Error::ConstraintForm(format!(
                        "{}: marginal targets must lie in [0, 1]",
                        self.label
                    )));
                }
                let total: f64 = targets.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::ConstraintForm(format!(
                        "{}: marginal targets sum to {total}",
                        self.label
                    )));
                }
            }
            ConstraintKind::Conditional {
                target,
                condition,
                prob,
            } => {
                if !(0.0..=1.0).contains(prob) {
                    return Err(Error::ConstraintForm(format!(
                        "{}: conditional probability {prob} outside [0, 1]",
                        self.label
                    )));
                }
                if condition.iter().any(|(v, _)| v == target) {
                    return Err(Error::ConstraintForm(format!(
                        "{}: `{target}` appears in its own condition",
                        self.label
                    )));
                }
                for (i, (v, _)) in condition.iter().enumerate() {
                    if condition[..i].iter().any(|(w, _)| w == v) {
                        return Err(Error::ConstraintForm(format!(
                            "{}: `{v}` conditioned twice",
                            self.label
                        )));
                    }
                }
            }
            ConstraintKind::Linear { scope, rows } => {
                if rows.is_empty() {
                    return Err(Error::ConstraintForm(format!("{}: no rows", self.label)));
                }
                for row in rows {
                    if row.coeffs.len() != scope.num_states() {
                        return Err(Error::Arity {
                            expected: scope.num_states(),
                            found: row.coeffs.len(),
                        });
                    }
                    if row.coeffs.iter().chain([&row.rhs]).any(|x| !x.is_finite()) {
                        return Err(Error::ConstraintForm(format!(
                            "{}: non-finite coefficient",
                            self.label
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Every variable the constraint mentions; its home clause must contain them all.
    pub fn variables(&self) -> Vec<VariableId> {
        match &self.kind {
            ConstraintKind::Marginal { scope, .. } | ConstraintKind::Linear { scope, .. } => {
                scope.vars().to_vec()
            }
            ConstraintKind::Conditional {
                target, condition, ..
            } => std::iter::once(target.clone())
                .chain(condition.iter().map(|(v, _)| v.clone()))
                .collect(),
        }
    }

    /// All targets in {0, 1}. Linear sets are never Bayesian.
    pub fn is_bayesian(&self) -> bool {
        let crisp = |t: f64| t == 0.0 || t == 1.0;
        match &self.kind {
            ConstraintKind::Marginal { targets, .. } => targets.iter().all(|&t| crisp(t)),
            ConstraintKind::Conditional { prob, .. } => crisp(*prob),
            ConstraintKind::Linear { .. } => false,
        }
    }
}

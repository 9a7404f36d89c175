use serde::Serialize;

use super::conditional::conditional_state;
use super::lec::constraint_rows;
use crate::error::Result;
use crate::model::{ConstraintKind, ConstraintSet, JointTable};

/// Dual gradient of a constraint at the current table (target minus current).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintGradient {
    pub components: Vec<f64>,
}

impl ConstraintGradient {
    /// L-infinity norm; the scheduler compares this against thresholds.
    pub fn norm(&self) -> f64 {
        self.components.iter().fold(0.0, |m, g| m.max(g.abs()))
    }

    /// The component of largest magnitude, preferring later components on
    /// ties; for a binary marginal that is the gradient of the `true` event.
    pub fn signed(&self) -> f64 {
        let mut best = 0.0_f64;
        for &g in &self.components {
            if g.abs() >= best.abs() {
                best = g;
            }
        }
        best
    }
}

pub fn constraint_gradient(table: &JointTable, c: &ConstraintSet) -> Result<ConstraintGradient> {
    let components = match &c.kind {
        ConstraintKind::Marginal { scope, targets } => {
            let current = table.marginal_probs(scope)?;
            targets.iter().zip(current).map(|(t, p)| t - p).collect()
        }
        ConstraintKind::Conditional {
            target,
            condition,
            prob,
        } => {
            let (_, current) = conditional_state(table, target, condition)?;
            vec![prob - current]
        }
        ConstraintKind::Linear { .. } => {
            let total = table.total();
            constraint_rows(table.scope(), c)?
                .iter()
                .map(|r| {
                    let lhs: f64 = r.coeffs.iter().zip(table.probs()).map(|(a, p)| a * p).sum();
                    r.rhs - lhs / total
                })
                .collect()
        }
    };
    Ok(ConstraintGradient { components })
}

use serde::Serialize;

use crate::engine::SolverOptions;
use crate::error::{Error, Result};
use crate::model::{ConstraintKind, ConstraintSet};
use crate::preprocess::PreparedNetwork;

pub const DEFAULT_THRESHOLD: f64 = 1e-3;
pub const DEFAULT_MAX_PASSES: usize = 100;
pub const DEFAULT_POLICY: &str = "greatest-gradient";

/// Gradients at or below this count as zero whatever the threshold.
pub const EXACT: f64 = 1e-12;

/// The evidence for one run together with its scheduling settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvidenceSet {
    pub constraints: Vec<ConstraintSet>,
    /// Name of a registered ordering policy.
    pub policy: String,
    pub max_passes: usize,
    #[serde(skip)]
    pub solver: SolverOptions,
}

impl Default for EvidenceSet {
    fn default() -> Self {
        Self {
            constraints: Vec::new(),
            policy: DEFAULT_POLICY.to_string(),
            max_passes: DEFAULT_MAX_PASSES,
            solver: SolverOptions::default(),
        }
    }
}

impl EvidenceSet {
    pub fn new(constraints: Vec<ConstraintSet>) -> Self {
        Self {
            constraints,
            ..Self::default()
        }
    }

    pub fn with_policy(mut self, name: &str) -> Self {
        self.policy = name.to_string();
        self
    }

    pub fn with_max_passes(mut self, n: usize) -> Self {
        self.max_passes = n;
        self
    }

    /// Marginal and linear evidence must name declared observations;
    /// conditionals may use any network variable.
    pub fn validate(&self, net: &PreparedNetwork) -> Result<()> {
        for c in &self.constraints {
            for v in c.variables() {
                if net.home_node(&v).is_none() {
                    return Err(Error::UnknownVariable(v.to_string()));
                }
                let must_observe = !matches!(c.kind, ConstraintKind::Conditional { .. });
                if must_observe && !net.is_observed(&v) {
                    return Err(Error::ConstraintForm(format!(
                        "{}: `{v}` is not declared as an observation",
                        c.label
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Whether a gradient norm passes its constraint's threshold.
pub fn satisfied(norm: f64, threshold: f64) -> bool {
    norm < threshold || norm <= EXACT
}

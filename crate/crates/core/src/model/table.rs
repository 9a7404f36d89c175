use serde::Serialize;

use super::scope::{Scope, VariableId};
use crate::error::{Error, Result};

/// Tolerance on the unit-sum invariant of a [`JointTable`].
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A probability distribution over the `2^n` states of a [`Scope`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointTable {
    scope: Scope,
    probs: Vec<f64>,
}

impl JointTable {
    /// Validates length, non-negativity and unit sum.
    pub fn new(scope: Scope, probs: Vec<f64>) -> Result<Self> {
        let t = Self::from_parts(scope, probs)?;
        t.validate()?;
        Ok(t)
    }

    /// Checks only the length; used for intermediate products that are
    /// normalized afterwards.
    pub(crate) fn from_parts(scope: Scope, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != scope.num_states() {
            return Err(Error::Arity {
                expected: scope.num_states(),
                found: probs.len(),
            });
        }
        Ok(Self { scope, probs })
    }

    pub fn uniform(scope: Scope) -> Self {
        let n = scope.num_states();
        Self {
            scope,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((i, p)) = self
            .probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidTable(format!(
                "entry {i} of {} is {p}",
                self.scope
            )));
        }
        let total = self.total();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidTable(format!(
                "entries over {} sum to {total}",
                self.scope
            )));
        }
        Ok(())
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Rescales to unit sum. Fails on a table with no mass.
    pub fn normalized(mut self) -> Result<Self> {
        let total = self.total();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidTable(format!(
                "cannot normalize table over {} with total {total}",
                self.scope
            )));
        }
        self.probs.iter_mut().for_each(|p| *p /= total);
        Ok(self)
    }

    /// Unnormalized event masses of `sub`, divided by the table total.
    ///
    /// Dividing by the total (instead of assuming it is one) keeps Bayesian
    /// events exact: an event holding all the mass reports exactly 1.
    pub fn marginal_probs(&self, sub: &Scope) -> Result<Vec<f64>> {
        let proj = self.scope.projection(sub)?;
        let mut out = vec![0.0; sub.num_states()];
        for (s, &p) in self.probs.iter().enumerate() {
            out[proj[s]] += p;
        }
        let total: f64 = out.iter().sum();
        if total > 0.0 {
            out.iter_mut().for_each(|p| *p /= total);
        }
        Ok(out)
    }

    /// `[P(!v), P(v)]` for a variable of the scope.
    pub fn variable_marginal(&self, v: &VariableId) -> Result<[f64; 2]> {
        let m = self.marginal_probs(&Scope::new(vec![v.clone()])?)?;
        Ok([m[0], m[1]])
    }

    /// Reorders the table onto a permutation of its scope.
    pub fn reordered(&self, order: &Scope) -> Result<JointTable> {
        if order.len() != self.scope.len() || !order.is_subset_of(&self.scope) {
            return Err(Error::ScopeMismatch(format!(
                "{order} is not a permutation of {}",
                self.scope
            )));
        }
        marginalize(self, order)
    }
}

/// Sums `table` onto `sub`, which must be a subset of its scope.
pub fn marginalize(table: &JointTable, sub: &Scope) -> Result<JointTable> {
    if !sub.is_subset_of(&table.scope) {
        return Err(Error::ScopeMismatch(format!(
            "{sub} is not a subset of {}",
            table.scope
        )));
    }
    let proj = table.scope.projection(sub)?;
    let mut out = vec![0.0; sub.num_states()];
    for (s, &p) in table.probs.iter().enumerate() {
        out[proj[s]] += p;
    }
    JointTable::from_parts(sub.clone(), out)
}

/// Extends `head_joint` with a child variable `body` whose conditional
/// `P(body = true | head state i)` is `cond[i]`.
pub fn multiply_condition(
    head_joint: &JointTable,
    cond: &[f64],
    body: VariableId,
) -> Result<JointTable> {
    if cond.len() != head_joint.len() {
        return Err(Error::Arity {
            expected: head_joint.len(),
            found: cond.len(),
        });
    }
    if let Some(c) = cond.iter().find(|c| !(0.0..=1.0).contains(*c)) {
        return Err(Error::InvalidTable(format!(
            "conditional {c} outside [0, 1]"
        )));
    }
    let scope = head_joint.scope.with(body)?;
    let probs = head_joint
        .probs
        .iter()
        .zip(cond)
        .flat_map(|(&p, &c)| [p * (1.0 - c), p * c])
        .collect();
    JointTable::from_parts(scope, probs)
}

/// Joint over `a.scope ++ (b.scope \ a.scope)` as `a * b / b(sep)`, where
/// `sep` is the shared variable set. Exact when `b` is conditionally
/// independent of the rest of `a` given `sep`; plain product when disjoint.
pub fn combine(a: &JointTable, b: &JointTable) -> Result<JointTable> {
    let scope = a.scope.union(&b.scope);
    let pa = scope.projection(&a.scope)?;
    let pb = scope.projection(&b.scope)?;
    let probs = match b.scope.intersection(&a.scope) {
        None => (0..scope.num_states())
            .map(|u| a.probs[pa[u]] * b.probs[pb[u]])
            .collect(),
        Some(sep) => {
            let sep_marg = marginalize(b, &sep)?;
            let ps = scope.projection(&sep)?;
            (0..scope.num_states())
                .map(|u| {
                    let m = sep_marg.probs[ps[u]];
                    if m > 0.0 {
                        a.probs[pa[u]] * b.probs[pb[u]] / m
                    } else {
                        0.0
                    }
                })
                .collect()
        }
    };
    JointTable::from_parts(scope, probs)
}

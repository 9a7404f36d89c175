use serde::Serialize;

use super::evidence::{satisfied, EvidenceSet};
use super::policy::{Candidate, OrderingPolicy, PolicyRegistry};
use super::propagate::{apply_evidence, home_of, home_table, Home};
use crate::engine::constraint_gradient;
use crate::error::Result;
use crate::model::{ConstraintSet, VariableId};
use crate::preprocess::PreparedNetwork;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientReport {
    pub label: String,
    /// Largest-magnitude component, sign kept.
    pub gradient: f64,
    pub norm: f64,
    pub threshold: f64,
    pub satisfied: bool,
}

/// One use of one constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    /// 1-based step and pass numbers.
    pub step: usize,
    pub pass: usize,
    pub constraint: usize,
    pub label: String,
    pub gradient_before: f64,
    /// Clause indices whose tables changed.
    pub touched: Vec<usize>,
    /// `P(v)` for every network variable after the step.
    pub marginals: Vec<(VariableId, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunTrace {
    pub policy: String,
    pub steps: Vec<StepRecord>,
    pub passes: usize,
    pub converged: bool,
    pub final_gradients: Vec<GradientReport>,
}

impl RunTrace {
    /// `P(v)` after the given number of constraint uses (at least one).
    pub fn marginal_after(&self, uses: usize, v: &VariableId) -> Option<f64> {
        let step = self.steps.get(uses.checked_sub(1)?)?;
        step.marginals.iter().find(|(w, _)| w == v).map(|(_, p)| *p)
    }

    /// Steps belonging to pass `pass` (1-based).
    pub fn pass_steps(&self, pass: usize) -> impl Iterator<Item = &StepRecord> {
        self.steps.iter().filter(move |s| s.pass == pass)
    }
}

pub fn gradient_reports(
    net: &PreparedNetwork,
    constraints: &[ConstraintSet],
) -> Result<Vec<GradientReport>> {
    constraints
        .iter()
        .map(|c| {
            let home = home_of(net, c)?;
            let g = constraint_gradient(home_table(net, home), c)?;
            let norm = g.norm();
            Ok(GradientReport {
                label: c.label.clone(),
                gradient: g.signed(),
                norm,
                threshold: c.threshold,
                satisfied: satisfied(norm, c.threshold),
            })
        })
        .collect()
}

/// `[P(!v), P(v)]` from the home clause of `v`.
pub fn posterior_marginal(net: &PreparedNetwork, v: &VariableId) -> Result<[f64; 2]> {
    let m = net.marginal(v)?;
    debug_assert!(
        net.nodes()
            .iter()
            .filter(|n| n.scope().contains(v))
            .all(|n| n
                .table
                .variable_marginal(v)
                .is_ok_and(|w| (w[1] - m[1]).abs() < 1e-9)),
        "clauses disagree on the marginal of {v}"
    );
    Ok(m)
}

/// Runs with the policy named in `ev`, looked up in the default registry.
pub fn run_reasoning(
    net: &PreparedNetwork,
    ev: &EvidenceSet,
) -> Result<(PreparedNetwork, RunTrace)> {
    let registry = PolicyRegistry::default();
    run_reasoning_with(net, ev, registry.get(&ev.policy)?)
}

/// The reasoning loop.
///
/// Termination is tested at the start of each pass: when every gradient is
/// within its threshold the run stops. Otherwise a pass uses every
/// constraint exactly once, the policy choosing among the not-yet-used
/// constraints from the gradients current at that moment. Propagation
/// happens inside each step. A run that is still unsatisfied after
/// `max_passes` passes ends with `converged == false`.
pub fn run_reasoning_with(
    net: &PreparedNetwork,
    ev: &EvidenceSet,
    policy: &dyn OrderingPolicy,
) -> Result<(PreparedNetwork, RunTrace)> {
    ev.validate(net)?;
    let mut net = net.clone();
    let homes: Vec<Home> = ev
        .constraints
        .iter()
        .map(|c| home_of(&net, c))
        .collect::<Result<_>>()?;
    let mut steps = Vec::new();
    let mut passes = 0;
    let converged = loop {
        let grads = gradient_reports(&net, &ev.constraints)?;
        if grads.iter().all(|g| g.satisfied) {
            break true;
        }
        if passes == ev.max_passes {
            break false;
        }
        passes += 1;
        let mut unused: Vec<usize> = (0..ev.constraints.len()).collect();
        while !unused.is_empty() {
            let candidates = unused
                .iter()
                .map(|&i| {
                    let g = constraint_gradient(home_table(&net, homes[i]), &ev.constraints[i])?;
                    Ok((
                        Candidate {
                            index: i,
                            gradient: g.norm(),
                        },
                        g.signed(),
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let just: Vec<Candidate> = candidates.iter().map(|(c, _)| *c).collect();
            let pick = policy.select(&just);
            let (chosen, signed) = candidates[pick];
            unused.remove(pick);
            let c = &ev.constraints[chosen.index];
            let touched = apply_evidence(&mut net, c, &ev.solver)?;
            steps.push(StepRecord {
                step: steps.len() + 1,
                pass: passes,
                constraint: chosen.index,
                label: c.label.clone(),
                gradient_before: signed,
                touched,
                marginals: net
                    .variables()
                    .iter()
                    .map(|v| Ok((v.clone(), net.marginal(v)?[1])))
                    .collect::<Result<_>>()?,
            });
        }
    };
    let final_gradients = gradient_reports(&net, &ev.constraints)?;
    Ok((
        net,
        RunTrace {
            policy: policy.name().to_string(),
            steps,
            passes,
            converged,
            final_gradients,
        },
    ))
}

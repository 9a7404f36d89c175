//! Ground truth on the full joint distribution, for networks small enough to
//! enumerate.

use serde::Serialize;

use crate::engine::{apply_constraint, constraint_gradient, cross_entropy, SolverOptions};
use crate::error::{Error, Result};
use crate::model::{combine, marginalize, ConstraintSet, JointTable, Scope, VariableId};
use crate::preprocess::{NodeKind, PreparedNetwork};

pub const DEFAULT_VAR_LIMIT: usize = 25;
pub const MAX_CYCLES: usize = 100_000;

/// A distribution over every variable of a network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullJoint {
    pub table: JointTable,
}

impl FullJoint {
    pub fn scope(&self) -> &Scope {
        self.table.scope()
    }

    pub fn marginal(&self, v: &VariableId) -> Result<[f64; 2]> {
        self.table.variable_marginal(v)
    }

    pub fn marginal_over(&self, sub: &Scope) -> Result<JointTable> {
        marginalize(&self.table, sub)?.normalized()
    }
}

pub fn expand_full_joint(net: &PreparedNetwork) -> Result<FullJoint> {
    expand_full_joint_with_limit(net, DEFAULT_VAR_LIMIT)
}

/// Product of the root prior and every rule's conditional, each conditional
/// read off its clause table as `table / marginal(head)`.
pub fn expand_full_joint_with_limit(net: &PreparedNetwork, limit: usize) -> Result<FullJoint> {
    let m = net.variables().len();
    if m > limit {
        return Err(Error::TooLarge { vars: m, limit });
    }
    let mut joint: Option<JointTable> = None;
    for n in net.nodes() {
        joint = Some(match (&n.kind, joint) {
            (NodeKind::Clique, None) => n.table.clone(),
            (NodeKind::Clique, Some(j)) => combine(&j, &n.table)?,
            (NodeKind::Rule { head, body, .. }, Some(j)) => {
                extend_by_rule(&j, &n.table, head, body)?
            }
            (NodeKind::Rule { .. }, None) => unreachable!("query cliques come first"),
        });
    }
    let table = joint.ok_or(Error::MissingQuery)?.normalized()?;
    Ok(FullJoint { table })
}

fn extend_by_rule(
    joint: &JointTable,
    clause: &JointTable,
    head: &Scope,
    body: &VariableId,
) -> Result<JointTable> {
    let head_marg = marginalize(clause, head)?;
    let local = head.with(body.clone())?;
    let ordered = clause.reordered(&local)?;
    // P(body = true | head state)
    let cond: Vec<f64> = head_marg
        .probs()
        .iter()
        .enumerate()
        .map(|(h, &m)| {
            if m > 0.0 {
                ordered.probs()[2 * h + 1] / m
            } else {
                0.0
            }
        })
        .collect();
    let proj = joint.scope().projection(head)?;
    let scope = joint.scope().with(body.clone())?;
    let probs = joint
        .probs()
        .iter()
        .enumerate()
        .flat_map(|(s, &p)| {
            let c = cond[proj[s]];
            [p * (1.0 - c), p * c]
        })
        .collect();
    JointTable::new(scope, probs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleOutcome {
    pub joint: FullJoint,
    /// Full cycles over the constraint list.
    pub cycles: usize,
}

/// MCE posterior of `joint` under all `constraints`, by applying each in
/// list order (Jeffrey for marginals, the closed form for conditionals, the
/// dual solver for linear sets) and repeating the cycle until every
/// gradient norm is at most `tol`.
pub fn oracle_mce(
    joint: &FullJoint,
    constraints: &[ConstraintSet],
    tol: f64,
) -> Result<OracleOutcome> {
    let opts = SolverOptions {
        tolerance: tol.min(SolverOptions::default().tolerance),
        ..SolverOptions::default()
    };
    let mut table = joint.table.clone();
    let worst = |t: &JointTable| -> Result<f64> {
        constraints
            .iter()
            .map(|c| constraint_gradient(t, c).map(|g| g.norm()))
            .try_fold(0.0_f64, |m, g| g.map(|g| m.max(g)))
    };
    let mut cycles = 0;
    while worst(&table)? > tol {
        if cycles == MAX_CYCLES {
            return Err(Error::NonConvergence {
                iterations: cycles,
                gradient_norm: worst(&table)?,
                best_lambdas: Vec::new(),
            });
        }
        for c in constraints {
            table = apply_constraint(&table, c, &opts)?;
        }
        cycles += 1;
    }
    Ok(OracleOutcome {
        joint: FullJoint { table },
        cycles,
    })
}

/// `(CE of the full joints, clause-wise sum)` where the clause-wise sum is
/// `CE(root) + sum over rules of (CE(clause) - CE(head))`, all taken between
/// `posterior` and `prior`.
pub fn ce_decomposition_check(
    prior: &PreparedNetwork,
    posterior: &PreparedNetwork,
) -> Result<(f64, f64)> {
    let full_prior = expand_full_joint(prior)?;
    let full_post = expand_full_joint(posterior)?;
    let full = cross_entropy(&full_post.table, &full_prior.table)?;

    let root = Scope::new(prior.root_variables())?;
    let mut sum = cross_entropy(
        &full_post.marginal_over(&root)?,
        &full_prior.marginal_over(&root)?,
    )?;
    for (a, b) in posterior.nodes().iter().zip(prior.nodes()) {
        if let NodeKind::Rule { head, .. } = &b.kind {
            if a.scope() != b.scope() {
                return Err(Error::ScopeMismatch(format!(
                    "networks differ: {} vs {}",
                    a.scope(),
                    b.scope()
                )));
            }
            let post = a.table.clone().normalized()?;
            let pri = b.table.clone().normalized()?;
            sum += cross_entropy(&post, &pri)?;
            sum -= cross_entropy(
                &marginalize(&post, head)?.normalized()?,
                &marginalize(&pri, head)?.normalized()?,
            )?;
        }
    }
    Ok((full, sum))
}

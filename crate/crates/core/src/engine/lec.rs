use serde::Serialize;

use super::cg::{fletcher_reeves, SolverOptions};
use super::conditional::{classify, Side};
use crate::error::{Error, Result};
use crate::model::{ConstraintKind, ConstraintSet, JointTable, LinearRow, Scope};

/// Final state of the dual minimization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualState {
    /// One multiplier per constraint row, followed by the multiplier of the
    /// implicit normalization row.
    pub lambdas: Vec<f64>,
    pub dual_value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    /// `sum_j a_kj p_j - b_k` for each constraint row on the normalized result.
    pub residuals: Vec<f64>,
}

/// Solves a set of linear equality rows by minimizing the convex dual
/// `D(l) = sum_j q_j exp(-(sum_k l_k a_kj + 1)) + sum_k l_k b_k`.
///
/// A row of ones with right-hand side 1 is always appended, so the solution
/// is a distribution without a separate normalization step.
pub fn lec_solve(
    table: &JointTable,
    c: &ConstraintSet,
    opts: &SolverOptions,
) -> Result<(JointTable, DualState)> {
    let rows = constraint_rows(table.scope(), c)?;
    solve_rows(table, &rows, opts)
}

/// Rows of any constraint kind lifted onto the states of `scope`.
pub fn constraint_rows(scope: &Scope, c: &ConstraintSet) -> Result<Vec<LinearRow>> {
    match &c.kind {
        ConstraintKind::Linear { scope: sub, rows } => {
            let proj = scope.projection(sub)?;
            Ok(rows
                .iter()
                .map(|r| LinearRow {
                    coeffs: proj.iter().map(|&l| r.coeffs[l]).collect(),
                    rhs: r.rhs,
                })
                .collect())
        }
        ConstraintKind::Marginal {
            scope: sub,
            targets,
        } => {
            // the last event is implied by the normalization row
            let proj = scope.projection(sub)?;
            Ok(targets[..targets.len() - 1]
                .iter()
                .enumerate()
                .map(|(l, &t)| LinearRow {
                    coeffs: proj.iter().map(|&e| f64::from(u8::from(e == l))).collect(),
                    rhs: t,
                })
                .collect())
        }
        ConstraintKind::Conditional {
            target,
            condition,
            prob,
        } => {
            // P(x | S) = t  <=>  (1 - t) P(S, x) - t P(S, !x) = 0
            let sides = classify(scope, target, condition)?;
            Ok(vec![LinearRow {
                coeffs: sides
                    .iter()
                    .map(|s| match s {
                        Side::Outside => 0.0,
                        Side::TargetTrue => 1.0 - prob,
                        Side::TargetFalse => -prob,
                    })
                    .collect(),
                rhs: 0.0,
            }])
        }
    }
}

/// [`lec_solve`] on rows already expressed over the states of `table`.
pub fn solve_rows(
    table: &JointTable,
    rows: &[LinearRow],
    opts: &SolverOptions,
) -> Result<(JointTable, DualState)> {
    let n = table.len();
    if let Some(bad) = rows.iter().find(|r| r.coeffs.len() != n) {
        return Err(Error::Arity {
            expected: n,
            found: bad.coeffs.len(),
        });
    }
    let q = prior_probs(table)?;
    let all = with_normalization(rows, n);
    let k = all.len();

    let mut weights = vec![0.0; n];
    let dual = |lambda: &[f64], grad: &mut [f64]| -> f64 {
        dual_into(&q, &all, lambda, grad, &mut weights)
    };

    // l = 0 on the user rows and -1 on the normalization row reproduces q
    let mut x0 = vec![0.0; k];
    x0[k - 1] = -1.0;
    let min = fletcher_reeves(dual, x0, opts)?;

    let mut p = vec![0.0; n];
    exp_weights(&q, &all, &min.x, &mut p);
    let post = JointTable::from_parts(table.scope().clone(), p)?.normalized()?;
    let residuals = rows
        .iter()
        .map(|r| dot(&r.coeffs, post.probs()) - r.rhs)
        .collect();
    Ok((
        post,
        DualState {
            gradient_norm: min.gradient.iter().map(|g| g * g).sum::<f64>().sqrt(),
            lambdas: min.x,
            dual_value: min.value,
            iterations: min.iterations,
            residuals,
        },
    ))
}

/// Value and gradient of the dual at `lambda`, whose last entry is the
/// multiplier of the normalization row.
pub fn dual_objective(
    table: &JointTable,
    rows: &[LinearRow],
    lambda: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let n = table.len();
    let all = with_normalization(rows, n);
    if lambda.len() != all.len() {
        return Err(Error::Arity {
            expected: all.len(),
            found: lambda.len(),
        });
    }
    let q = prior_probs(table)?;
    let mut grad = vec![0.0; all.len()];
    let mut weights = vec![0.0; n];
    let value = dual_into(&q, &all, lambda, &mut grad, &mut weights);
    Ok((value, grad))
}

fn prior_probs(table: &JointTable) -> Result<Vec<f64>> {
    let total = table.total();
    if !(total > 0.0) {
        return Err(Error::Infeasible("prior table has no mass".into()));
    }
    Ok(table.probs().iter().map(|p| p / total).collect())
}

fn with_normalization(rows: &[LinearRow], n: usize) -> Vec<LinearRow> {
    let mut all = rows.to_vec();
    all.push(LinearRow {
        coeffs: vec![1.0; n],
        rhs: 1.0,
    });
    all
}

fn dual_into(
    q: &[f64],
    all: &[LinearRow],
    lambda: &[f64],
    grad: &mut [f64],
    weights: &mut [f64],
) -> f64 {
    exp_weights(q, all, lambda, weights);
    let mut value: f64 = weights.iter().sum();
    for (i, row) in all.iter().enumerate() {
        value += lambda[i] * row.rhs;
        grad[i] = row.rhs - dot(&row.coeffs, weights);
    }
    value
}

fn exp_weights(q: &[f64], rows: &[LinearRow], lambda: &[f64], out: &mut [f64]) {
    for (j, w) in out.iter_mut().enumerate() {
        if q[j] == 0.0 {
            *w = 0.0;
            continue;
        }
        let s: f64 = rows.iter().zip(lambda).map(|(r, l)| l * r.coeffs[j]).sum();
        *w = q[j] * (-(s + 1.0)).exp();
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

use crate::error::{Error, Result};
use crate::model::{ConstraintKind, ConstraintSet, JointTable, Scope, VariableId};

/// Membership of each table state in the condition event, split by the
/// value of the target variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    Outside,
    TargetFalse,
    TargetTrue,
}

pub(crate) fn classify(
    scope: &Scope,
    target: &VariableId,
    condition: &[(VariableId, bool)],
) -> Result<Vec<Side>> {
    let t = scope
        .position(target)
        .ok_or_else(|| Error::ScopeMismatch(format!("`{target}` is not in {scope}")))?;
    let cond = condition
        .iter()
        .map(|(v, b)| {
            scope
                .position(v)
                .map(|p| (p, *b))
                .ok_or_else(|| Error::ScopeMismatch(format!("`{v}` is not in {scope}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..scope.num_states())
        .map(|s| {
            if cond.iter().all(|&(p, b)| scope.bit(s, p) == b) {
                if scope.bit(s, t) {
                    Side::TargetTrue
                } else {
                    Side::TargetFalse
                }
            } else {
                Side::Outside
            }
        })
        .collect())
}

/// Current `(P(S), P(x | S))` of a conditional constraint on `table`.
pub(crate) fn conditional_state(
    table: &JointTable,
    target: &VariableId,
    condition: &[(VariableId, bool)],
) -> Result<(f64, f64)> {
    let sides = classify(table.scope(), target, condition)?;
    let (mut m0, mut m1) = (0.0, 0.0);
    for (side, &p) in sides.iter().zip(table.probs()) {
        match side {
            Side::TargetFalse => m0 += p,
            Side::TargetTrue => m1 += p,
            Side::Outside => {}
        }
    }
    let total = table.total();
    let event = (m0 + m1) / total;
    let cond = if m0 + m1 > 0.0 { m1 / (m0 + m1) } else { 0.0 };
    Ok((event, cond))
}

/// Closed-form update for `P(x | S) = t`, renormalized to unit sum.
///
/// With `R = P(!x|S) P0(S, x) / (P(x|S) P0(S, !x))`, states in `S` with
/// `x = false` are scaled by `R^t` and states with `x = true` by `R^(t-1)`;
/// states outside `S` keep their mass before renormalization. The exponent
/// on the `x = true` part is negative: that is the sign for which the result
/// coincides with the dual (linear-row) solution of the same constraint.
pub fn conditional_update(table: &JointTable, c: &ConstraintSet) -> Result<JointTable> {
    let ConstraintKind::Conditional {
        target,
        condition,
        prob,
    } = &c.kind
    else {
        return Err(Error::ConstraintForm(format!(
            "{} is not a conditional constraint",
            c.label
        )));
    };
    if condition.iter().any(|(v, _)| v == target) {
        return Err(Error::ConstraintForm(format!(
            "{}: `{target}` appears in its own condition",
            c.label
        )));
    }
    let sides = classify(table.scope(), target, condition)?;
    let (mut m0, mut m1) = (0.0, 0.0);
    for (side, &p) in sides.iter().zip(table.probs()) {
        match side {
            Side::TargetFalse => m0 += p,
            Side::TargetTrue => m1 += p,
            Side::Outside => {}
        }
    }
    if m0 + m1 <= 0.0 {
        return Err(Error::Infeasible(format!(
            "{}: condition event has zero prior probability",
            c.label
        )));
    }
    let t = *prob;
    let (f0, f1) = if t == 1.0 {
        if m1 <= 0.0 {
            return Err(infeasible(c, target, true));
        }
        (0.0, 1.0)
    } else if t == 0.0 {
        if m0 <= 0.0 {
            return Err(infeasible(c, target, false));
        }
        (1.0, 0.0)
    } else {
        if m1 <= 0.0 {
            return Err(infeasible(c, target, true));
        }
        if m0 <= 0.0 {
            return Err(infeasible(c, target, false));
        }
        let ln_r = ((1.0 - t) * m1).ln() - (t * m0).ln();
        ((t * ln_r).exp(), ((t - 1.0) * ln_r).exp())
    };
    let probs = table
        .probs()
        .iter()
        .zip(&sides)
        .map(|(&p, side)| match side {
            Side::Outside => p,
            Side::TargetFalse => p * f0,
            Side::TargetTrue => p * f1,
        })
        .collect();
    JointTable::from_parts(table.scope().clone(), probs)?.normalized()
}

fn infeasible(c: &ConstraintSet, target: &VariableId, value: bool) -> Error {
    Error::Infeasible(format!(
        "{}: `{target}` = {value} has zero prior probability inside the condition",
        c.label
    ))
}

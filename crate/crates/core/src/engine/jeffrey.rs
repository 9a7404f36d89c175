use crate::error::{Error, Result};
use crate::model::{ConstraintKind, ConstraintSet, JointTable, Scope};

/// MCE posterior of `table` under a marginal constraint set: every state of
/// event `l` is scaled by `P(S_l) / P0(S_l)`.
pub fn jeffrey_update(table: &JointTable, c: &ConstraintSet) -> Result<JointTable> {
    match &c.kind {
        ConstraintKind::Marginal { scope, targets } => jeffrey_on(table, scope, targets),
        _ => Err(Error::ConstraintForm(format!(
            "{} is not a marginal constraint set",
            c.label
        ))),
    }
}

/// Jeffrey's rule over the event partition induced by `partition`.
///
/// Events with zero prior mass and zero target stay empty; a positive target
/// on an empty event is infeasible.
pub fn jeffrey_on(table: &JointTable, partition: &Scope, targets: &[f64]) -> Result<JointTable> {
    if targets.len() != partition.num_states() {
        return Err(Error::Arity {
            expected: partition.num_states(),
            found: targets.len(),
        });
    }
    let proj = table.scope().projection(partition)?;
    let mut mass = vec![0.0; partition.num_states()];
    for (s, &p) in table.probs().iter().enumerate() {
        mass[proj[s]] += p;
    }
    let scale = mass
        .iter()
        .zip(targets)
        .enumerate()
        .map(|(l, (&m, &t))| {
            if m > 0.0 {
                Ok(t / m)
            } else if t > 0.0 {
                Err(Error::Infeasible(format!(
                    "event {l} of {partition} has zero prior probability but target {t}"
                )))
            } else {
                Ok(0.0)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let probs = table
        .probs()
        .iter()
        .enumerate()
        .map(|(s, &p)| p * scale[proj[s]])
        .collect();
    JointTable::from_parts(table.scope().clone(), probs)
}

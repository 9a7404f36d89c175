use crate::error::{Error, Result};
use crate::model::JointTable;

/// `sum_j p_j ln(p_j / q_j)` with `0 ln(0/q) = 0`.
pub fn cross_entropy(p: &JointTable, q: &JointTable) -> Result<f64> {
    if p.scope() != q.scope() {
        return Err(Error::ScopeMismatch(format!(
            "cross entropy of {} against {}",
            p.scope(),
            q.scope()
        )));
    }
    cross_entropy_probs(p.probs(), q.probs())
}

/// Slice form of [`cross_entropy`]; both slices must have equal length.
pub fn cross_entropy_probs(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Arity {
            expected: q.len(),
            found: p.len(),
        });
    }
    let mut ce = 0.0;
    for (state, (&pj, &qj)) in p.iter().zip(q).enumerate() {
        if pj > 0.0 {
            if qj <= 0.0 {
                return Err(Error::AbsoluteContinuity { state });
            }
            ce += pj * (pj / qj).ln();
        }
    }
    Ok(ce)
}

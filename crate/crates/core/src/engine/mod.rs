//! Update kernels: Jeffrey's rule, the closed-form conditional update and the
//! dual solver for general linear constraints.

mod cg;
mod conditional;
mod entropy;
mod gradient;
mod jeffrey;
mod lec;

pub use cg::{fletcher_reeves, Minimum, SolverOptions};
pub use conditional::conditional_update;
pub use entropy::{cross_entropy, cross_entropy_probs};
pub use gradient::{constraint_gradient, ConstraintGradient};
pub use jeffrey::{jeffrey_on, jeffrey_update};
pub use lec::{constraint_rows, dual_objective, lec_solve, solve_rows, DualState};

use crate::error::Result;
use crate::model::{ConstraintKind, ConstraintSet, JointTable};

/// Applies one constraint set with the kernel matching its form.
pub fn apply_constraint(
    table: &JointTable,
    c: &ConstraintSet,
    opts: &SolverOptions,
) -> Result<JointTable> {
    match c.kind {
        ConstraintKind::Marginal { .. } => jeffrey_update(table, c),
        ConstraintKind::Conditional { .. } => conditional_update(table, c),
        ConstraintKind::Linear { .. } => lec_solve(table, c, opts).map(|(t, _)| t),
    }
}

//! Domain types shared by the parser, preprocessor, engine and scheduler.

mod clause;
mod constraint;
mod scope;
mod table;

pub use clause::{Clause, CliquePrior, Pr};
pub use constraint::{ConstraintKind, ConstraintSet, LinearRow};
pub use scope::{state_index, Assignment, Scope, VariableId};
pub use table::{combine, marginalize, multiply_condition, JointTable, SUM_TOLERANCE};

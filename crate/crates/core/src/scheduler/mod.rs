//! Phase two: apply evidence constraint sets one at a time, propagating
//! each change through the clause forest, until every gradient is within
//! its threshold.

mod evidence;
mod policy;
mod propagate;
mod run;

pub use evidence::{
    satisfied, EvidenceSet, DEFAULT_MAX_PASSES, DEFAULT_POLICY, DEFAULT_THRESHOLD, EXACT,
};
pub use policy::{Candidate, GreatestGradient, OrderingPolicy, PolicyRegistry, ProgramOrder};
pub use propagate::{apply_evidence, home_of, home_table, propagate_clause_update, Home};
pub use run::{
    gradient_reports, posterior_marginal, run_reasoning, run_reasoning_with, GradientReport,
    RunTrace, StepRecord,
};

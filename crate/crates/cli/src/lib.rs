//! Command-line front end: `run`, `check` and `oracle` over RCNDL model
//! files and evidence files.
//!
//! Exit codes: 0 when every constraint reached its threshold, 2 when the
//! scheduler ran out of passes or a solver failed to converge, 1 for any
//! input problem (unreadable file, syntax, preprocessing, infeasible
//! evidence).

mod commands;
mod error;
pub mod evidence;
pub mod report;

pub use commands::{
    check_report, cmd_check, cmd_oracle, cmd_run, load_evidence, load_network, oracle_report,
    run_report, Outcome, RunFlags, ORACLE_TOLERANCE,
};
pub use error::{CliError, EXIT_CONVERGED, EXIT_INPUT, EXIT_NOT_CONVERGED};
pub use evidence::parse_evidence;

use std::fmt;

use thiserror::Error;

/// Line/column of a token in RCNDL source, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    // scope / table plumbing
    #[error("scope mismatch: {0}")]
    ScopeMismatch(String),
    #[error("invalid scope: {0}")]
    InvalidScope(String),
    #[error("arity mismatch: expected {expected} entries, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("invalid probability table: {0}")]
    InvalidTable(String),

    // parser
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Position, msg: String },
    #[error("{pos}: probability {value} outside [0, 1] (only -1.0 marks an unknown)")]
    Range { pos: Position, value: f64 },
    #[error("{pos}: expected {expected} probabilities, found {found}")]
    ListArity {
        pos: Position,
        expected: usize,
        found: usize,
    },
    #[error("{pos}: second query clause; a program has at most one")]
    DuplicateQuery { pos: Position },

    // preprocessor
    #[error("{pos}: variable `{var}` is used in a rule head but never introduced")]
    UndeclaredVariable { pos: Position, var: String },
    #[error("{pos}: variable `{var}` is introduced more than once")]
    DuplicateDefinition { pos: Position, var: String },
    #[error("rules form a dependency cycle: {0}")]
    Cycle(String),
    #[error("clause network is multiply connected: {0}")]
    MultiplyConnected(String),
    #[error("{pos}: {msg}")]
    Incomplete { pos: Position, msg: String },
    #[error("program has no query clause")]
    MissingQuery,
    #[error("{pos}: observed variable `{var}` does not occur in any clause")]
    UnknownObservation { pos: Position, var: String },
    #[error("clause scope too large: {vars} variables (limit {limit})")]
    TooLarge { vars: usize, limit: usize },

    // engine / scheduler
    #[error("infeasible evidence: {0}")]
    Infeasible(String),
    #[error("absolute continuity violated at state {state}: p > 0 where q = 0")]
    AbsoluteContinuity { state: usize },
    #[error("constraint form error: {0}")]
    ConstraintForm(String),
    #[error("dual solver diverged: |lambda| reached {norm:.3e}")]
    Divergence { norm: f64 },
    #[error("dual solver did not converge in {iterations} iterations (gradient norm {gradient_norm:.3e})")]
    NonConvergence {
        iterations: usize,
        gradient_norm: f64,
        best_lambdas: Vec<f64>,
    },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown ordering policy `{0}`")]
    UnknownPolicy(String),
}

pub type Result<T> = std::result::Result<T, Error>;

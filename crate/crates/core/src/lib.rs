//! Minimum cross entropy (MCE) reasoning over recursive causal networks.
//!
//! A network is written in RCNDL: a root query carrying the prior of the
//! root variables, rules carrying conditional probability lists, and
//! observation declarations. [`parser`] turns the text into clauses,
//! [`preprocess`] propagates the prior so every clause carries a joint
//! table, and [`scheduler`] applies evidence one constraint set at a time
//! through the update kernels in [`engine`], ordered by gradient, until
//! every gradient falls below its threshold. [`oracle`] solves the same
//! problems on the full joint distribution for validation.
//!
//! All tables index states with the first scope variable as the most
//! significant bit and `false` before `true`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod format;
pub mod model;
pub mod oracle;
pub mod parser;
pub mod preprocess;
pub mod scheduler;

pub use error::{Error, Position, Result};

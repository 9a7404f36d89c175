use std::path::Path;

use clap::Args;
use rcndl_core::model::ConstraintSet;
use rcndl_core::oracle::{expand_full_joint, oracle_mce};
use rcndl_core::parser::parse_program;
use rcndl_core::preprocess::{preprocess, render_intermediate, PreparedNetwork};
use rcndl_core::scheduler::{
    posterior_marginal, run_reasoning_with, EvidenceSet, PolicyRegistry, DEFAULT_MAX_PASSES,
    DEFAULT_POLICY, DEFAULT_THRESHOLD,
};

use crate::error::{CliError, EXIT_CONVERGED, EXIT_NOT_CONVERGED};
use crate::evidence::parse_evidence;
use crate::report::{
    intermediate_tables, CheckReport, Comparison, OracleReport, Posterior, RunReport,
};

/// Oracle convergence tolerance on the largest gradient component.
pub const ORACLE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Args)]
pub struct RunFlags {
    /// Gradient threshold for constraints that do not set their own
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Give up (exit code 2) after this many passes
    #[arg(long, default_value_t = DEFAULT_MAX_PASSES)]
    pub max_passes: usize,
    /// Constraint ordering policy: greatest-gradient or program
    #[arg(long, default_value = DEFAULT_POLICY)]
    pub order: String,
    /// Print the preprocessed intermediate form first
    #[arg(long)]
    pub dump_intermediate: bool,
    /// Print one line per constraint use
    #[arg(long)]
    pub trace: bool,
    /// Machine-readable output at full precision
    #[arg(long)]
    pub json: bool,
}

impl Default for RunFlags {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            max_passes: DEFAULT_MAX_PASSES,
            order: DEFAULT_POLICY.to_string(),
            dump_intermediate: false,
            trace: false,
            json: false,
        }
    }
}

/// What a command prints and the exit code it wants.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_network(path: &Path) -> Result<PreparedNetwork, CliError> {
    let text = read(path)?;
    parse_program(&text)
        .and_then(|p| preprocess(&p))
        .map_err(|source| CliError::Input {
            path: path.to_path_buf(),
            source,
        })
}

/// No path means no evidence.
pub fn load_evidence(path: Option<&Path>, threshold: f64) -> Result<Vec<ConstraintSet>, CliError> {
    let Some(path) = path else {
        return Ok(Vec::new());
    };
    parse_evidence(&read(path)?, threshold).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

pub fn check_report(net: &PreparedNetwork) -> Result<CheckReport, CliError> {
    Ok(CheckReport {
        tables: intermediate_tables(net)?,
        text: render_intermediate(net)?,
    })
}

pub fn run_report(
    net: &PreparedNetwork,
    constraints: Vec<ConstraintSet>,
    flags: &RunFlags,
) -> Result<(RunReport, PreparedNetwork), CliError> {
    let registry = PolicyRegistry::default();
    let policy = registry.get(&flags.order)?;
    let ev = EvidenceSet::new(constraints)
        .with_policy(policy.name())
        .with_max_passes(flags.max_passes);
    let (post, trace) = run_reasoning_with(net, &ev, policy)?;
    let posteriors = post
        .variables()
        .iter()
        .map(|v| {
            Ok(Posterior {
                variable: v.to_string(),
                probability: posterior_marginal(&post, v)?[1],
            })
        })
        .collect::<rcndl_core::Result<_>>()?;
    let intermediate = if flags.dump_intermediate {
        Some(check_report(net)?)
    } else {
        None
    };
    let report = RunReport {
        policy: trace.policy,
        passes: trace.passes,
        converged: trace.converged,
        posteriors,
        gradients: trace.final_gradients,
        intermediate,
        trace: flags.trace.then_some(trace.steps),
    };
    Ok((report, post))
}

/// Scheduler and oracle on the same evidence.
pub fn oracle_report(
    net: &PreparedNetwork,
    constraints: Vec<ConstraintSet>,
    flags: &RunFlags,
) -> Result<OracleReport, CliError> {
    let prior = expand_full_joint(net)?;
    let (run, _) = run_report(net, constraints.clone(), flags)?;
    let outcome = oracle_mce(&prior, &constraints, ORACLE_TOLERANCE)?;
    let comparisons = run
        .posteriors
        .iter()
        .map(|p| {
            let oracle = outcome.joint.marginal(&p.variable.as_str().into())?[1];
            Ok(Comparison {
                variable: p.variable.clone(),
                scheduler: p.probability,
                oracle,
                diff: (p.probability - oracle).abs(),
            })
        })
        .collect::<rcndl_core::Result<Vec<_>>>()?;
    let max_diff = comparisons.iter().fold(0.0_f64, |m, c| m.max(c.diff));
    Ok(OracleReport {
        run,
        oracle_cycles: outcome.cycles,
        comparisons,
        max_diff,
    })
}

fn exit_code(converged: bool) -> i32 {
    if converged {
        EXIT_CONVERGED
    } else {
        EXIT_NOT_CONVERGED
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// `rcndl run`: posterior marginals, pass count and final gradients.
pub fn cmd_run(
    model: &Path,
    evidence: Option<&Path>,
    flags: &RunFlags,
) -> Result<Outcome, CliError> {
    let net = load_network(model)?;
    let constraints = load_evidence(evidence, flags.threshold)?;
    let (report, _) = run_report(&net, constraints, flags)?;
    let stdout = if flags.json {
        to_json(&report)?
    } else {
        report.render_text()
    };
    Ok(Outcome {
        stdout,
        code: exit_code(report.converged),
    })
}

/// `rcndl check`: the preprocessed intermediate form.
pub fn cmd_check(model: &Path, json: bool) -> Result<Outcome, CliError> {
    let net = load_network(model)?;
    let report = check_report(&net)?;
    let stdout = if json { to_json(&report)? } else { report.text };
    Ok(Outcome {
        stdout,
        code: EXIT_CONVERGED,
    })
}

/// `rcndl oracle`: scheduler posteriors next to the full-joint solution.
pub fn cmd_oracle(
    model: &Path,
    evidence: Option<&Path>,
    flags: &RunFlags,
) -> Result<Outcome, CliError> {
    let net = load_network(model)?;
    let constraints = load_evidence(evidence, flags.threshold)?;
    let report = oracle_report(&net, constraints, flags)?;
    let stdout = if flags.json {
        to_json(&report)?
    } else {
        report.render_text()
    };
    Ok(Outcome {
        stdout,
        code: exit_code(report.run.converged),
    })
}

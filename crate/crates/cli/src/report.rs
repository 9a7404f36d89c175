use std::fmt::Write;

use rcndl_core::format::fixed6;
use rcndl_core::model::Scope;
use rcndl_core::preprocess::{NodeKind, PreparedNetwork};
use rcndl_core::scheduler::{GradientReport, StepRecord};
use rcndl_core::Result;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Posterior {
    pub variable: String,
    /// `P(variable = true)`.
    pub probability: f64,
}

/// One line of the intermediate form, numbers at full precision.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntermediateTable {
    /// `query`, `rule` or `observation`.
    pub clause: &'static str,
    pub scope: Vec<String>,
    pub probs: Vec<f64>,
}

pub fn intermediate_tables(net: &PreparedNetwork) -> Result<Vec<IntermediateTable>> {
    let names = |s: &Scope| s.vars().iter().map(|v| v.to_string()).collect();
    let mut out: Vec<IntermediateTable> = net
        .nodes()
        .iter()
        .map(|n| IntermediateTable {
            clause: match n.kind {
                NodeKind::Clique => "query",
                NodeKind::Rule { .. } => "rule",
            },
            scope: names(n.scope()),
            probs: n.table.probs().to_vec(),
        })
        .collect();
    for o in net.observations() {
        let scope = Scope::new(o.vars.clone())?;
        out.push(IntermediateTable {
            clause: "observation",
            scope: names(&scope),
            probs: net.joint_over(&scope)?.into_probs(),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub tables: Vec<IntermediateTable>,
    #[serde(skip)]
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub policy: String,
    pub passes: usize,
    pub converged: bool,
    pub posteriors: Vec<Posterior>,
    pub gradients: Vec<GradientReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intermediate: Option<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<StepRecord>>,
}

impl RunReport {
    pub fn posterior(&self, var: &str) -> Option<f64> {
        self.posteriors
            .iter()
            .find(|p| p.variable == var)
            .map(|p| p.probability)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        if let Some(check) = &self.intermediate {
            out.push_str(&check.text);
            out.push('\n');
        }
        if let Some(steps) = &self.trace {
            for s in steps {
                let ps: Vec<String> = s
                    .marginals
                    .iter()
                    .map(|(v, p)| format!("P({v}) = {}", fixed6(*p)))
                    .collect();
                let _ = writeln!(
                    out,
                    "step {} (pass {}): {} gradient {} -> {}",
                    s.step,
                    s.pass,
                    s.label,
                    fixed6(s.gradient_before),
                    ps.join(", ")
                );
            }
            out.push('\n');
        }
        self.render_summary(&mut out);
        for p in &self.posteriors {
            let _ = writeln!(out, "P({}) = {}", p.variable, fixed6(p.probability));
        }
        for g in &self.gradients {
            let _ = writeln!(
                out,
                "gradient {} = {} (threshold {}, {})",
                g.label,
                fixed6(g.gradient),
                fixed6(g.threshold),
                if g.satisfied {
                    "satisfied"
                } else {
                    "not satisfied"
                }
            );
        }
        out
    }

    fn render_summary(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "policy {}: {} pass{}, {}",
            self.policy,
            self.passes,
            if self.passes == 1 { "" } else { "es" },
            if self.converged {
                "converged"
            } else {
                "not converged"
            }
        );
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub variable: String,
    pub scheduler: f64,
    pub oracle: f64,
    pub diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub run: RunReport,
    pub oracle_cycles: usize,
    pub comparisons: Vec<Comparison>,
    pub max_diff: f64,
}

impl OracleReport {
    pub fn oracle(&self, var: &str) -> Option<f64> {
        self.comparisons
            .iter()
            .find(|c| c.variable == var)
            .map(|c| c.oracle)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        if let Some(check) = &self.run.intermediate {
            out.push_str(&check.text);
            out.push('\n');
        }
        self.run.render_summary(&mut out);
        let _ = writeln!(
            out,
            "oracle: {} cycle{}",
            self.oracle_cycles,
            if self.oracle_cycles == 1 { "" } else { "s" }
        );
        let width = self
            .comparisons
            .iter()
            .map(|c| c.variable.len() + 3)
            .max()
            .unwrap_or(0)
            .max(8);
        let _ = writeln!(
            out,
            "{:<width$}  {:>9}  {:>9}  {:>9}",
            "variable", "scheduler", "oracle", "|diff|"
        );
        for c in &self.comparisons {
            let _ = writeln!(
                out,
                "{:<width$}  {:>9}  {:>9}  {:>9}",
                format!("P({})", c.variable),
                fixed6(c.scheduler),
                fixed6(c.oracle),
                fixed6(c.diff)
            );
        }
        let _ = writeln!(out, "max |diff| = {}", fixed6(self.max_diff));
        out
    }
}

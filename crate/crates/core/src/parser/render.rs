use std::fmt::Write;

use super::SourceProgram;
use crate::model::{Clause, Pr, VariableId};

/// Canonical text for a program: one clause per line, probabilities at full
/// precision, unknowns as `-1.0`.
pub fn render_program(p: &SourceProgram) -> String {
    let mut out = String::new();
    for c in p.iter() {
        render_clause(&mut out, c);
        out.push('\n');
    }
    out
}

fn render_clause(out: &mut String, c: &Clause) {
    match c {
        Clause::RootClique { cliques } => {
            out.push_str("?- ");
            for (i, clique) in cliques.iter().enumerate() {
                if i > 0 {
                    out.push_str("; ");
                }
                props(out, clique.scope.vars());
                out.push_str(" : ");
                list(out, &clique.prior);
            }
        }
        Clause::Rule { head, body, cond } => {
            props(out, head.vars());
            let _ = write!(out, " -> {body} : ");
            list(out, cond);
        }
        Clause::Observation { vars } => props(out, vars),
    }
    out.push('.');
}

fn props(out: &mut String, vars: &[VariableId]) {
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(v.as_str());
    }
}

fn list(out: &mut String, values: &[Pr]) {
    out.push('[');
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        match v {
            // Debug keeps the shortest text that parses back to the same f64
            Some(x) => {
                let _ = write!(out, "{x:?}");
            }
            None => out.push_str("-1.0"),
        }
    }
    out.push(']');
}

use serde::Serialize;

use super::scope::{Scope, VariableId};

/// One probability literal of a `pr_list`; `None` marks the `-1.0` unknown.
pub type Pr = Option<f64>;

/// Joint prior of one clique of the root, listed in scope state order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliquePrior {
    pub scope: Scope,
    pub prior: Vec<Pr>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Clause {
    /// `?- A : [..]; B, C : [..].` - the root of the network.
    RootClique { cliques: Vec<CliquePrior> },
    /// `head -> body : [..].` where `cond[i]` is `P(body | head state i)`.
    Rule {
        head: Scope,
        body: VariableId,
        cond: Vec<Pr>,
    },
    /// `B, C.` - variables that evidence may be given for.
    Observation { vars: Vec<VariableId> },
}

impl Clause {
    /// Variables this clause brings into the network.
    pub fn introduced(&self) -> Vec<&VariableId> {
        match self {
            Clause::RootClique { cliques } => {
                let mut out: Vec<&VariableId> = Vec::new();
                for c in cliques {
                    for v in c.scope.vars() {
                        if !out.contains(&v) {
                            out.push(v);
                        }
                    }
                }
                out
            }
            Clause::Rule { body, .. } => vec![body],
            Clause::Observation { .. } => Vec::new(),
        }
    }

    pub fn is_query(&self) -> bool {
        matches!(self, Clause::RootClique { .. })
    }
}

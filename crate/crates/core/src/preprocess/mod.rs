//! Phase one: validate the clause network, order it, and push the root
//! prior outward so every clause carries a joint table.

mod dump;
mod network;

pub use dump::render_intermediate;
pub use network::{Edge, Group, Node, NodeKind, Observation, PreparedNetwork, MAX_GROUP_VARS};

use std::collections::HashMap;

use crate::error::{Error, Position, Result};
use crate::model::{multiply_condition, Clause, CliquePrior, JointTable, Pr, Scope, VariableId};
use crate::parser::SourceProgram;
use network::normalized_marginal;

/// Tolerance on the sum of a fully specified query clique.
pub const PRIOR_SUM_TOLERANCE: f64 = 1e-6;

/// Overlapping query cliques must agree on their shared marginal to this.
pub const OVERLAP_TOLERANCE: f64 = 1e-9;

/// Exact joint over `head`, assembled from the prepared clauses holding it.
pub fn compute_head_joint(net: &PreparedNetwork, head: &Scope) -> Result<JointTable> {
    net.joint_over(head)
}

pub fn preprocess(p: &SourceProgram) -> Result<PreparedNetwork> {
    let query = p.query().ok_or(Error::MissingQuery)?;
    let order = topological_order(p)?;

    let mut net = PreparedNetwork::empty();
    let Clause::RootClique { cliques } = &query.clause else {
        unreachable!("query() returns the query clause")
    };
    let query_index = p
        .clauses
        .iter()
        .position(|c| c.clause.is_query())
        .expect("query exists");
    add_root(&mut net, cliques, query_index, query.pos)?;

    for i in order {
        let sc = &p.clauses[i];
        if let Clause::Rule { head, body, cond } = &sc.clause {
            add_rule(&mut net, head, body, cond, i, sc.pos)?;
        }
    }

    for (i, sc) in p.clauses.iter().enumerate() {
        if let Clause::Observation { vars } = &sc.clause {
            if let Some(v) = vars.iter().find(|v| !net.home.contains_key(*v)) {
                return Err(Error::UnknownObservation {
                    pos: sc.pos,
                    var: v.to_string(),
                });
            }
            net.observations.push(Observation {
                vars: vars.clone(),
                clause: i,
                pos: sc.pos,
            });
        }
    }
    Ok(net)
}

/// Rule clauses in dependency order, ties broken by program order.
fn topological_order(p: &SourceProgram) -> Result<Vec<usize>> {
    let mut introducer: HashMap<&VariableId, usize> = HashMap::new();
    for (i, sc) in p.clauses.iter().enumerate() {
        for v in sc.clause.introduced() {
            if introducer.insert(v, i).is_some() {
                return Err(Error::DuplicateDefinition {
                    pos: sc.pos,
                    var: v.to_string(),
                });
            }
        }
    }
    let rules: Vec<usize> = p
        .clauses
        .iter()
        .enumerate()
        .filter(|(_, sc)| matches!(sc.clause, Clause::Rule { .. }))
        .map(|(i, _)| i)
        .collect();
    let mut deps: HashMap<usize, Vec<usize>> = HashMap::new();
    for &i in &rules {
        let Clause::Rule { head, .. } = &p.clauses[i].clause else {
            unreachable!()
        };
        let mut d = Vec::new();
        for v in head.vars() {
            let &src = introducer.get(v).ok_or_else(|| Error::UndeclaredVariable {
                pos: p.clauses[i].pos,
                var: v.to_string(),
            })?;
            if !p.clauses[src].clause.is_query() && !d.contains(&src) {
                d.push(src);
            }
        }
        deps.insert(i, d);
    }

    let mut done: Vec<usize> = Vec::new();
    let mut pending = rules;
    while !pending.is_empty() {
        let ready = pending
            .iter()
            .position(|i| deps[i].iter().all(|d| done.contains(d)));
        match ready {
            Some(k) => done.push(pending.remove(k)),
            None => {
                let names: Vec<String> = pending
                    .iter()
                    .map(|&i| match &p.clauses[i].clause {
                        Clause::Rule { head, body, .. } => format!("{head} -> {body}"),
                        _ => unreachable!(),
                    })
                    .collect();
                return Err(Error::Cycle(names.join(", ")));
            }
        }
    }
    Ok(done)
}

fn complete_prior(prior: &[Pr], scope: &Scope, pos: Position) -> Result<Vec<f64>> {
    let known: f64 = prior.iter().flatten().sum();
    let unknown = prior.iter().filter(|p| p.is_none()).count();
    if unknown == 0 {
        if (known - 1.0).abs() > PRIOR_SUM_TOLERANCE {
            return Err(Error::Incomplete {
                pos,
                msg: format!("prior of {scope} sums to {known}"),
            });
        }
        return Ok(prior.iter().map(|p| p.unwrap() / known).collect());
    }
    if known > 1.0 + PRIOR_SUM_TOLERANCE {
        return Err(Error::Incomplete {
            pos,
            msg: format!("known entries of {scope} already sum to {known}"),
        });
    }
    // maximum entropy: spread the residual evenly over the unknowns
    let fill = (1.0 - known).max(0.0) / unknown as f64;
    let probs: Vec<f64> = prior.iter().map(|p| p.unwrap_or(fill)).collect();
    let total: f64 = probs.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Incomplete {
            pos,
            msg: format!("prior of {scope} has no mass"),
        });
    }
    Ok(probs.into_iter().map(|p| p / total).collect())
}

fn add_root(
    net: &mut PreparedNetwork,
    cliques: &[CliquePrior],
    clause: usize,
    pos: Position,
) -> Result<()> {
    for clique in cliques {
        let table = JointTable::new(
            clique.scope.clone(),
            complete_prior(&clique.prior, &clique.scope, pos)?,
        )?;

        // each existing tree component may share variables with the new
        // clique only through a single clique of that component
        let comp = net.components();
        let mut labels: Vec<usize> = comp.clone();
        labels.sort_unstable();
        labels.dedup();
        let mut links = Vec::new();
        for label in labels {
            let in_comp: Vec<usize> = (0..net.groups.len())
                .filter(|&g| comp[g] == label)
                .collect();
            let comp_vars: Vec<VariableId> = clique
                .scope
                .vars()
                .iter()
                .filter(|v| {
                    in_comp
                        .iter()
                        .any(|&g| net.groups[g].joint.scope().contains(v))
                })
                .cloned()
                .collect();
            if comp_vars.is_empty() {
                continue;
            }
            let shared = Scope::new(comp_vars)?;
            let Some(&g) = in_comp
                .iter()
                .find(|&&g| shared.is_subset_of(net.groups[g].joint.scope()))
            else {
                let mut names: Vec<String> = in_comp
                    .iter()
                    .filter(|&&g| {
                        shared
                            .vars()
                            .iter()
                            .any(|v| net.groups[g].joint.scope().contains(v))
                    })
                    .map(|&g| net.groups[g].joint.scope().to_string())
                    .collect();
                names.push(clique.scope.to_string());
                return Err(Error::MultiplyConnected(format!(
                    "query cliques {} form a cycle",
                    names.join(", ")
                )));
            };
            let here = normalized_marginal(&table, &shared)?;
            let there = normalized_marginal(&net.groups[g].joint, &shared)?;
            let gap = here
                .probs()
                .iter()
                .zip(there.probs())
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
            if gap > OVERLAP_TOLERANCE {
                return Err(Error::Incomplete {
                    pos,
                    msg: format!(
                        "query cliques {} and {} disagree on {shared} by {gap:.3e}",
                        net.groups[g].joint.scope(),
                        clique.scope
                    ),
                });
            }
            links.push((g, shared));
        }

        let node = net.nodes.len();
        let group = net.groups.len();
        for v in clique.scope.vars() {
            if !net.home.contains_key(v) {
                net.home.insert(v.clone(), node);
                net.variables.push(v.clone());
            }
        }
        net.nodes.push(Node {
            kind: NodeKind::Clique,
            table: table.clone(),
            group,
            clause,
            pos,
        });
        net.groups.push(network::Group {
            members: vec![node],
            joint: table,
        });
        for (g, separator) in links {
            net.edges.push(Edge {
                a: g,
                b: group,
                separator,
            });
        }
    }
    Ok(())
}

fn add_rule(
    net: &mut PreparedNetwork,
    head: &Scope,
    body: &VariableId,
    cond: &[Pr],
    clause: usize,
    pos: Position,
) -> Result<()> {
    // unknown conditionals carry no information: P(body | head) = 1/2
    let cond: Vec<f64> = cond.iter().map(|c| c.unwrap_or(0.5)).collect();

    // head variables grouped by tree component; a component whose head
    // variables are spread over several groups gets those groups merged
    let mut per_comp: Vec<(usize, Vec<VariableId>)> = Vec::new();
    let comp = net.components();
    for v in head.vars() {
        let g = net.nodes[net.home[v]].group;
        match per_comp.iter_mut().find(|(c, _)| *c == comp[g]) {
            Some((_, vs)) => vs.push(v.clone()),
            None => per_comp.push((comp[g], vec![v.clone()])),
        }
    }
    let mut links: Vec<(usize, Scope)> = Vec::new();
    for (_, vars) in per_comp {
        let g = match net.group_containing(&vars) {
            Some(g) => g,
            None => {
                let mut targets: Vec<usize> = Vec::new();
                for v in &vars {
                    let g = net.nodes[net.home[v]].group;
                    if !targets.contains(&g) {
                        targets.push(g);
                    }
                }
                let sub = net.subtree(&targets);
                let merged = net.merge(&sub)?;
                // earlier links may point at renumbered groups
                for (lg, sep) in &mut links {
                    *lg = net
                        .group_containing(sep.vars())
                        .expect("separator still held");
                }
                merged
            }
        };
        links.push((g, Scope::new(vars)?));
    }

    let head_joint = compute_head_joint(net, head)?;
    let table = multiply_condition(&head_joint, &cond, body.clone())?;
    let node = net.nodes.len();
    let group = net.groups.len();
    net.home.insert(body.clone(), node);
    net.variables.push(body.clone());
    net.nodes.push(Node {
        kind: NodeKind::Rule {
            head: head.clone(),
            body: body.clone(),
            cond,
        },
        table: table.clone(),
        group,
        clause,
        pos,
    });
    net.groups.push(network::Group {
        members: vec![node],
        joint: table,
    });
    for (g, separator) in links {
        net.edges.push(Edge {
            a: g,
            b: group,
            separator,
        });
    }
    Ok(())
}

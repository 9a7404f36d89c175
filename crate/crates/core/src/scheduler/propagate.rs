use std::collections::VecDeque;

use crate::engine::{apply_constraint, jeffrey_on, SolverOptions};
use crate::error::{Error, Result};
use crate::model::{ConstraintSet, JointTable};
use crate::preprocess::PreparedNetwork;

/// Where a constraint is applied: the first clause whose scope holds all its
/// variables, or failing that the first group joint that does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Home {
    Node(usize),
    Group(usize),
}

pub fn home_of(net: &PreparedNetwork, c: &ConstraintSet) -> Result<Home> {
    let vars = c.variables();
    if let Some(v) = vars.iter().find(|v| net.home_node(v).is_none()) {
        return Err(Error::UnknownVariable(v.to_string()));
    }
    if let Some(n) = net.node_containing(&vars) {
        return Ok(Home::Node(n));
    }
    net.group_containing(&vars).map(Home::Group).ok_or_else(|| {
        Error::ConstraintForm(format!("no clause holds all variables of {}", c.label))
    })
}

/// Current table of a home, on which gradients are measured.
pub fn home_table(net: &PreparedNetwork, home: Home) -> &JointTable {
    match home {
        Home::Node(n) => &net.nodes[n].table,
        Home::Group(g) => &net.groups[g].joint,
    }
}

/// Applies one constraint to its home and propagates; returns the indices
/// of the clauses whose tables were rewritten.
pub fn apply_evidence(
    net: &mut PreparedNetwork,
    c: &ConstraintSet,
    opts: &SolverOptions,
) -> Result<Vec<usize>> {
    match home_of(net, c)? {
        Home::Node(n) => {
            let updated = apply_constraint(&net.nodes[n].table, c, opts)?;
            propagate_clause_update(net, n, updated)
        }
        Home::Group(g) => {
            net.groups[g].joint = apply_constraint(&net.groups[g].joint, c, opts)?;
            propagate_group(net, g)
        }
    }
}

/// Installs `table` as the new table of clause `node` and pushes the change
/// through the clause forest.
///
/// The clause's group joint is Jeffrey-updated over the clause scope, then
/// each neighbouring group, breadth first, is Jeffrey-updated with the new
/// separator marginal of the group it was reached from. Every group is
/// visited once; member clause tables are re-read from their group joints.
pub fn propagate_clause_update(
    net: &mut PreparedNetwork,
    node: usize,
    table: JointTable,
) -> Result<Vec<usize>> {
    let g = net.nodes[node].group;
    let scope = net.nodes[node].table.scope().clone();
    if table.scope() != &scope {
        return Err(Error::ScopeMismatch(format!(
            "update over {} for clause over {scope}",
            table.scope()
        )));
    }
    let targets: Vec<f64> = {
        let total = table.total();
        table.probs().iter().map(|p| p / total).collect()
    };
    net.groups[g].joint = jeffrey_on(&net.groups[g].joint, &scope, &targets)?;
    propagate_group(net, g)
}

fn propagate_group(net: &mut PreparedNetwork, start: usize) -> Result<Vec<usize>> {
    net.refresh_members(start)?;
    let mut touched = net.groups[start].members.clone();
    let mut seen = vec![false; net.groups.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(g) = queue.pop_front() {
        let next: Vec<(usize, crate::model::Scope)> = net
            .neighbors(g)
            .filter(|(h, _)| !seen[*h])
            .map(|(h, e)| (h, e.separator.clone()))
            .collect();
        for (h, sep) in next {
            seen[h] = true;
            let targets = net.groups[g].joint.marginal_probs(&sep)?;
            net.groups[h].joint =
                jeffrey_on(&net.groups[h].joint, &sep, &targets).map_err(|e| match e {
                    Error::Infeasible(msg) => Error::Infeasible(format!(
                        "propagating {} to {}: {msg}",
                        net.groups[g].joint.scope(),
                        net.groups[h].joint.scope()
                    )),
                    e => e,
                })?;
            net.refresh_members(h)?;
            touched.extend(net.groups[h].members.iter().copied());
            queue.push_back(h);
        }
    }
    touched.sort_unstable();
    Ok(touched)
}

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Position, Result};
use crate::model::{combine, marginalize, JointTable, Scope, VariableId};

/// Largest union scope a group joint may span.
pub const MAX_GROUP_VARS: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeKind {
    /// One clique of the query clause.
    Clique,
    /// `head -> body` with the completed conditional list.
    Rule {
        head: Scope,
        body: VariableId,
        cond: Vec<f64>,
    },
}

/// A clause (or query clique) together with its current joint table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Node {
    pub kind: NodeKind,
    pub table: JointTable,
    /// Group whose joint this table is a marginal of.
    pub group: usize,
    /// Index of the originating clause in the source program.
    pub clause: usize,
    pub pos: Position,
}

impl Node {
    pub fn scope(&self) -> &Scope {
        self.table.scope()
    }
}

/// Clauses that share one joint over the union of their scopes.
///
/// A group holds several clauses when a rule head needed variables from
/// several clauses of one tree; keeping their joint (instead of only the
/// clause tables) keeps later updates exact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Group {
    pub members: Vec<usize>,
    pub joint: JointTable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub separator: Scope,
}

impl Edge {
    pub fn other(&self, g: usize) -> Option<usize> {
        if self.a == g {
            Some(self.b)
        } else if self.b == g {
            Some(self.a)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation {
    pub vars: Vec<VariableId>,
    pub clause: usize,
    pub pos: Position,
}

/// A network in which every clause carries its joint prior, organised as a
/// forest of groups joined by separators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreparedNetwork {
    pub(crate) nodes: Vec<Node>,
    pub(crate) groups: Vec<Group>,
    pub(crate) edges: Vec<Edge>,
    pub(crate) observations: Vec<Observation>,
    pub(crate) variables: Vec<VariableId>,
    pub(crate) home: HashMap<VariableId, usize>,
}

impl PreparedNetwork {
    pub(crate) fn empty() -> Self {
        Self {
            nodes: Vec::new(),
            groups: Vec::new(),
            edges: Vec::new(),
            observations: Vec::new(),
            variables: Vec::new(),
            home: HashMap::new(),
        }
    }

    /// Clause nodes in topological order, query cliques first.
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    /// Every variable, in order of introduction.
    pub fn variables(&self) -> &[VariableId] {
        &self.variables
    }

    /// The node that introduces `v`.
    pub fn home_node(&self, v: &VariableId) -> Option<usize> {
        self.home.get(v).copied()
    }

    pub fn is_observed(&self, v: &VariableId) -> bool {
        self.observations.iter().any(|o| o.vars.contains(v))
    }

    /// Variables introduced by the query clause.
    pub fn root_variables(&self) -> Vec<VariableId> {
        self.variables
            .iter()
            .filter(|v| matches!(self.nodes[self.home[*v]].kind, NodeKind::Clique))
            .cloned()
            .collect()
    }

    /// First node (topological order) whose scope holds all of `vars`.
    pub fn node_containing(&self, vars: &[VariableId]) -> Option<usize> {
        self.nodes
            .iter()
            .position(|n| vars.iter().all(|v| n.scope().contains(v)))
    }

    /// First group whose joint holds all of `vars`.
    pub fn group_containing(&self, vars: &[VariableId]) -> Option<usize> {
        self.groups
            .iter()
            .position(|g| vars.iter().all(|v| g.joint.scope().contains(v)))
    }

    pub fn neighbors(&self, g: usize) -> impl Iterator<Item = (usize, &Edge)> + '_ {
        self.edges
            .iter()
            .filter_map(move |e| e.other(g).map(|h| (h, e)))
    }

    /// `[P(!v), P(v)]` read from the home clause of `v`.
    pub fn marginal(&self, v: &VariableId) -> Result<[f64; 2]> {
        let node = self
            .home_node(v)
            .ok_or_else(|| Error::UnknownVariable(v.to_string()))?;
        self.nodes[node].table.variable_marginal(v)
    }

    /// Largest disagreement between the marginals of one variable as seen by
    /// different clauses.
    pub fn consistency_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for v in &self.variables {
            let seen: Vec<f64> = self
                .nodes
                .iter()
                .filter(|n| n.scope().contains(v))
                .filter_map(|n| n.table.variable_marginal(v).ok())
                .map(|m| m[1])
                .collect();
            for w in seen.windows(2) {
                worst = worst.max((w[0] - w[1]).abs());
            }
        }
        worst
    }

    /// Exact joint over an arbitrary set of network variables, in `scope`
    /// order: the groups holding them are glued along the connecting subtree
    /// and the rest is summed out.
    pub fn joint_over(&self, scope: &Scope) -> Result<JointTable> {
        if let Some(g) = self.group_containing(scope.vars()) {
            return normalized_marginal(&self.groups[g].joint, scope);
        }
        let comp = self.components();
        let mut per_comp: Vec<(usize, Vec<usize>)> = Vec::new();
        for v in scope.vars() {
            let node = self
                .home_node(v)
                .ok_or_else(|| Error::UnknownVariable(v.to_string()))?;
            let g = self.nodes[node].group;
            match per_comp.iter_mut().find(|(c, _)| *c == comp[g]) {
                Some((_, gs)) => gs.push(g),
                None => per_comp.push((comp[g], vec![g])),
            }
        }
        let mut joint: Option<JointTable> = None;
        for (_, gs) in per_comp {
            let sub = self.subtree(&gs);
            let glued = self.subtree_joint(&sub)?;
            let vars: Vec<VariableId> = scope
                .vars()
                .iter()
                .filter(|v| glued.scope().contains(v))
                .cloned()
                .collect();
            let part = marginalize(&glued, &Scope::new(vars)?)?;
            joint = Some(match joint {
                None => part,
                Some(j) => combine(&j, &part)?,
            });
        }
        let joint = joint.expect("scope is non-empty");
        normalized_marginal(&joint, scope)
    }

    /// Tree component label of every group.
    pub(crate) fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.groups.len()];
        for start in 0..self.groups.len() {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = start;
            let mut queue = VecDeque::from([start]);
            while let Some(g) = queue.pop_front() {
                for (h, _) in self.neighbors(g) {
                    if label[h] == usize::MAX {
                        label[h] = start;
                        queue.push_back(h);
                    }
                }
            }
        }
        label
    }

    /// Minimal set of groups connecting `targets`, which must share a
    /// component; the first target comes first.
    pub(crate) fn subtree(&self, targets: &[usize]) -> Vec<usize> {
        let root = targets[0];
        let mut parent = vec![usize::MAX; self.groups.len()];
        parent[root] = root;
        let mut queue = VecDeque::from([root]);
        while let Some(g) = queue.pop_front() {
            for (h, _) in self.neighbors(g) {
                if parent[h] == usize::MAX {
                    parent[h] = g;
                    queue.push_back(h);
                }
            }
        }
        let mut keep = vec![root];
        for &t in &targets[1..] {
            let mut g = t;
            while !keep.contains(&g) {
                keep.push(g);
                g = parent[g];
            }
        }
        keep
    }

    /// Joint over the union scope of a connected set of groups.
    pub(crate) fn subtree_joint(&self, sub: &[usize]) -> Result<JointTable> {
        let mut joint = self.groups[sub[0]].joint.clone();
        let mut done = vec![sub[0]];
        let mut queue = VecDeque::from([sub[0]]);
        while let Some(g) = queue.pop_front() {
            for (h, _) in self.neighbors(g) {
                if sub.contains(&h) && !done.contains(&h) {
                    let union = joint.scope().union(self.groups[h].joint.scope());
                    if union.len() > MAX_GROUP_VARS {
                        return Err(Error::TooLarge {
                            vars: union.len(),
                            limit: MAX_GROUP_VARS,
                        });
                    }
                    joint = combine(&joint, &self.groups[h].joint)?;
                    done.push(h);
                    queue.push_back(h);
                }
            }
        }
        joint.normalized()
    }

    /// Replaces the groups in `sub` (connected) by one group holding their
    /// glued joint; outside edges are re-attached. Returns the new index.
    pub(crate) fn merge(&mut self, sub: &[usize]) -> Result<usize> {
        let joint = self.subtree_joint(sub)?;
        let keep = *sub.iter().min().expect("non-empty subtree");
        let mut members: Vec<usize> = sub
            .iter()
            .flat_map(|&g| self.groups[g].members.clone())
            .collect();
        members.sort_unstable();
        self.edges
            .retain(|e| !(sub.contains(&e.a) && sub.contains(&e.b)));
        for e in &mut self.edges {
            if sub.contains(&e.a) {
                e.a = keep;
            }
            if sub.contains(&e.b) {
                e.b = keep;
            }
        }
        self.groups[keep] = Group { members, joint };

        // compact: drop the absorbed groups and renumber
        let mut remap = vec![usize::MAX; self.groups.len()];
        let mut next = 0;
        for (g, slot) in remap.iter_mut().enumerate() {
            if g == keep || !sub.contains(&g) {
                *slot = next;
                next += 1;
            }
        }
        let old = std::mem::take(&mut self.groups);
        self.groups = old
            .into_iter()
            .enumerate()
            .filter(|(g, _)| remap[*g] != usize::MAX)
            .map(|(_, grp)| grp)
            .collect();
        for e in &mut self.edges {
            e.a = remap[e.a];
            e.b = remap[e.b];
        }
        for (g, grp) in self.groups.iter().enumerate() {
            for &m in &grp.members {
                self.nodes[m].group = g;
            }
        }
        Ok(remap[keep])
    }

    /// Re-derives every member table of group `g` from its joint.
    pub(crate) fn refresh_members(&mut self, g: usize) -> Result<()> {
        for i in 0..self.groups[g].members.len() {
            let m = self.groups[g].members[i];
            let scope = self.nodes[m].table.scope().clone();
            self.nodes[m].table = normalized_marginal(&self.groups[g].joint, &scope)?;
        }
        Ok(())
    }
}

pub(crate) fn normalized_marginal(table: &JointTable, scope: &Scope) -> Result<JointTable> {
    marginalize(table, scope)?.normalized()
}

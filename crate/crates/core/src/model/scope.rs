use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A proposition name. Compared by exact string equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct VariableId(String);

impl VariableId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidScope("empty variable name".into()));
        }
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VariableId {
    /// Panics on an empty name; use [`VariableId::new`] for untrusted input.
    fn from(s: &str) -> Self {
        Self::new(s).expect("variable names are non-empty")
    }
}

/// An ordered, duplicate-free list of binary variables.
///
/// State `j` of a scope with `n` variables assigns `vars[k]` the bit
/// `(j >> (n - 1 - k)) & 1`: the first variable is the most significant bit
/// and `false` (0) sorts before `true` (1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Scope {
    vars: Vec<VariableId>,
}

impl Scope {
    pub fn new(vars: Vec<VariableId>) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::InvalidScope(
                "scope must hold at least one variable".into(),
            ));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::InvalidScope(format!("variable `{v}` listed twice")));
            }
        }
        Ok(Self { vars })
    }

    /// Builds a scope from names; panics on duplicates. Intended for literals.
    pub fn of(names: &[&str]) -> Self {
        Self::new(names.iter().map(|n| VariableId::from(*n)).collect())
            .expect("literal scope must be valid")
    }

    pub fn vars(&self) -> &[VariableId] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    /// Number of joint states, `2^len`.
    pub fn num_states(&self) -> usize {
        1usize << self.vars.len()
    }

    pub fn contains(&self, v: &VariableId) -> bool {
        self.vars.contains(v)
    }

    pub fn position(&self, v: &VariableId) -> Option<usize> {
        self.vars.iter().position(|x| x == v)
    }

    pub fn is_subset_of(&self, other: &Scope) -> bool {
        self.vars.iter().all(|v| other.contains(v))
    }

    /// Value of the variable at `pos` in `state`.
    pub fn bit(&self, state: usize, pos: usize) -> bool {
        (state >> (self.vars.len() - 1 - pos)) & 1 == 1
    }

    /// The assignment encoded by `state`, in scope order.
    pub fn assignment(&self, state: usize) -> Vec<bool> {
        (0..self.vars.len()).map(|k| self.bit(state, k)).collect()
    }

    /// Inverse of [`Scope::assignment`] for a value list in scope order.
    pub fn index_of_values(&self, values: &[bool]) -> usize {
        values.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    /// For every state of `self`, the index of the matching state of `sub`.
    pub fn projection(&self, sub: &Scope) -> Result<Vec<usize>> {
        let positions = sub
            .vars
            .iter()
            .map(|v| {
                self.position(v)
                    .ok_or_else(|| Error::ScopeMismatch(format!("`{v}` is not in scope {self}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((0..self.num_states())
            .map(|s| {
                positions
                    .iter()
                    .fold(0, |acc, &p| (acc << 1) | self.bit(s, p) as usize)
            })
            .collect())
    }

    /// Variables of `self` followed by the variables of `other` not already present.
    pub fn union(&self, other: &Scope) -> Scope {
        let mut vars = self.vars.clone();
        vars.extend(other.vars.iter().filter(|v| !self.contains(v)).cloned());
        Scope { vars }
    }

    /// Variables of `self` that also occur in `other`, in `self` order.
    pub fn intersection(&self, other: &Scope) -> Option<Scope> {
        let vars: Vec<_> = self
            .vars
            .iter()
            .filter(|v| other.contains(v))
            .cloned()
            .collect();
        (!vars.is_empty()).then_some(Scope { vars })
    }

    /// Appends a variable that must not already be present.
    pub fn with(&self, v: VariableId) -> Result<Scope> {
        let mut vars = self.vars.clone();
        vars.push(v);
        Scope::new(vars)
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

/// Source of variable values for [`state_index`].
pub trait Assignment {
    fn value_of(&self, v: &VariableId) -> Option<bool>;
    fn count(&self) -> usize;
}

impl Assignment for HashMap<VariableId, bool> {
    fn value_of(&self, v: &VariableId) -> Option<bool> {
        self.get(v).copied()
    }
    fn count(&self) -> usize {
        self.len()
    }
}

impl Assignment for BTreeMap<VariableId, bool> {
    fn value_of(&self, v: &VariableId) -> Option<bool> {
        self.get(v).copied()
    }
    fn count(&self) -> usize {
        self.len()
    }
}

/// Index of the state of `scope` selected by `assignment`, which must cover
/// exactly the scope's variables.
pub fn state_index<A: Assignment + ?Sized>(scope: &Scope, assignment: &A) -> Result<usize> {
    if assignment.count() != scope.len() {
        return Err(Error::ScopeMismatch(format!(
            "assignment has {} variables, scope {scope} has {}",
            assignment.count(),
            scope.len()
        )));
    }
    scope.vars.iter().try_fold(0usize, |acc, v| {
        let bit = assignment
            .value_of(v)
            .ok_or_else(|| Error::ScopeMismatch(format!("assignment lacks `{v}`")))?;
        Ok((acc << 1) | bit as usize)
    })
}

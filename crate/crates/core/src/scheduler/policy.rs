use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// A constraint that has not yet been used in the current pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    /// Position in the evidence list.
    pub index: usize,
    /// Current L-infinity gradient norm.
    pub gradient: f64,
}

/// Chooses which unused constraint to apply next within a pass.
pub trait OrderingPolicy: Send + Sync {
    fn name(&self) -> &str;

    /// Index into `candidates` (never empty) of the constraint to use next.
    fn select(&self, candidates: &[Candidate]) -> usize;
}

/// Largest gradient first; ties go to the earlier constraint.
#[derive(Debug, Default, Clone, Copy)]
pub struct GreatestGradient;

impl OrderingPolicy for GreatestGradient {
    fn name(&self) -> &str {
        "greatest-gradient"
    }

    fn select(&self, candidates: &[Candidate]) -> usize {
        let mut best = 0;
        for (i, c) in candidates.iter().enumerate().skip(1) {
            let b = &candidates[best];
            if c.gradient > b.gradient || (c.gradient == b.gradient && c.index < b.index) {
                best = i;
            }
        }
        best
    }
}

/// Evidence order, ignoring gradients.
#[derive(Debug, Default, Clone, Copy)]
pub struct ProgramOrder;

impl OrderingPolicy for ProgramOrder {
    fn name(&self) -> &str {
        "program"
    }

    fn select(&self, candidates: &[Candidate]) -> usize {
        candidates
            .iter()
            .enumerate()
            .min_by_key(|(_, c)| c.index)
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

/// Ordering policies addressable by name.
pub struct PolicyRegistry {
    policies: BTreeMap<String, Box<dyn OrderingPolicy>>,
}

impl PolicyRegistry {
    pub fn empty() -> Self {
        Self {
            policies: BTreeMap::new(),
        }
    }

    /// Registers a policy under its own name, replacing any previous one.
    pub fn register(&mut self, policy: Box<dyn OrderingPolicy>) {
        self.policies.insert(policy.name().to_string(), policy);
    }

    pub fn get(&self, name: &str) -> Result<&dyn OrderingPolicy> {
        self.policies
            .get(name)
            .map(|p| p.as_ref())
            .ok_or_else(|| Error::UnknownPolicy(name.to_string()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.policies.keys().map(String::as_str).collect()
    }
}

impl Default for PolicyRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(GreatestGradient));
        r.register(Box::new(ProgramOrder));
        r
    }
}

use std::collections::{BTreeMap, BTreeSet};

use super::interval::Thresholds;
use super::value::AbstractValue;
use crate::cfg::{Place, VarId};

/// Relational fact `index < array.length`, established by a condition and
/// valid until either side is written.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundsFact {
    pub index: VarId,
    pub array: Place,
}

impl BoundsFact {
    fn mentions(&self, var: VarId) -> bool {
        self.index == var || self.array.vars().contains(&var)
    }
}

/// Map from variables to abstract values. An unreachable state is Bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractState {
    reachable: bool,
    vars: BTreeMap<VarId, AbstractValue>,
    facts: BTreeSet<BoundsFact>,
}

impl Default for AbstractState {
    fn default() -> Self {
        AbstractState::new()
    }
}

impl AbstractState {
    /// A reachable state with no variables.
    pub fn new() -> Self {
        AbstractState { reachable: true, vars: BTreeMap::new(), facts: BTreeSet::new() }
    }

    pub fn bottom() -> Self {
        AbstractState { reachable: false, vars: BTreeMap::new(), facts: BTreeSet::new() }
    }

    pub fn is_bottom(&self) -> bool {
        !self.reachable
    }

    pub fn set_bottom(&mut self) {
        *self = AbstractState::bottom();
    }

    pub fn get(&self, v: VarId) -> Option<&AbstractValue> {
        self.vars.get(&v)
    }

    pub fn get_mut(&mut self, v: VarId) -> Option<&mut AbstractValue> {
        self.vars.get_mut(&v)
    }

    /// Binds `v`, dropping facts that mention it.
    pub fn set(&mut self, v: VarId, value: AbstractValue) {
        if self.reachable {
            self.kill_facts(v);
            self.vars.insert(v, value);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, &AbstractValue)> {
        self.vars.iter()
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn facts(&self) -> &BTreeSet<BoundsFact> {
        &self.facts
    }

    pub fn add_fact(&mut self, fact: BoundsFact) {
        if self.reachable {
            self.facts.insert(fact);
        }
    }

    pub fn kill_facts(&mut self, v: VarId) {
        self.facts.retain(|f| !f.mentions(v));
    }

    /// Pointwise join over shared variables; variables bound on only one side
    /// (locals out of scope) are dropped.
    pub fn join(&self, other: &AbstractState) -> AbstractState {
        self.merge(other, |a, b| a.join(b))
    }

    /// Pointwise widening of `self` (older) by `newer`.
    pub fn widen(&self, newer: &AbstractState, thresholds: &Thresholds) -> AbstractState {
        self.merge(newer, |a, b| a.widen(b, thresholds))
    }

    fn merge(&self, other: &AbstractState, f: impl Fn(&AbstractValue, &AbstractValue) -> AbstractValue) -> AbstractState {
        if !self.reachable {
            return other.clone();
        }
        if !other.reachable {
            return self.clone();
        }
        let vars = self.vars.iter().filter_map(|(k, a)| other.vars.get(k).map(|b| (*k, f(a, b)))).collect();
        let facts = self.facts.intersection(&other.facts).cloned().collect();
        AbstractState { reachable: true, vars, facts }
    }

    /// `self ⊑ other`: Bottom is below everything; otherwise every variable
    /// of `other` is bound in `self` to a smaller value, and `self` keeps
    /// every fact of `other`.
    pub fn leq(&self, other: &AbstractState) -> bool {
        if !self.reachable {
            return true;
        }
        if !other.reachable {
            return false;
        }
        other.vars.iter().all(|(k, b)| self.vars.get(k).is_some_and(|a| a.leq(b))) && other.facts.is_subset(&self.facts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Domain, Interval};

    fn scalar(lo: i64, hi: i64) -> AbstractValue {
        AbstractValue::scalar(Interval::new(lo, hi), Domain::Uint(8))
    }

    #[test]
    fn join_drops_unshared_keys() {
        let mut a = AbstractState::new();
        a.set(VarId::Local(0), scalar(1, 2));
        a.set(VarId::Local(1), scalar(0, 0));
        let mut b = AbstractState::new();
        b.set(VarId::Local(0), scalar(5, 6));
        let j = a.join(&b);
        assert_eq!(j.get(VarId::Local(0)), Some(&scalar(1, 6)));
        assert_eq!(j.get(VarId::Local(1)), None);
        assert!(a.leq(&j) && b.leq(&j));
        assert_eq!(AbstractState::bottom().join(&a), a);
    }

    #[test]
    fn facts_die_on_write() {
        let mut s = AbstractState::new();
        s.set(VarId::Local(0), scalar(0, 0));
        s.add_fact(BoundsFact { index: VarId::Local(0), array: Place::var(VarId::State(0)) });
        assert_eq!(s.facts().len(), 1);
        s.set(VarId::Local(0), scalar(1, 1));
        assert!(s.facts().is_empty());
    }
}

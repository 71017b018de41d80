use indexmap::IndexMap;

use crate::domain::{Money, SystemState};

/// Statistics accumulated for one canonical state across sample trees.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TableEntry {
    /// Largest backed-up value seen so far.
    pub best: Option<Money>,
    /// Number of sample trees containing the state.
    pub visits: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl TableEntry {
    pub fn mean(&self) -> Option<Money> {
        (self.visits > 0).then(|| self.sum / self.visits as f64)
    }

    /// Records one sample tree's value for this state.
    pub fn observe(&mut self, value: Money) {
        self.best = Some(self.best.map_or(value, |b| b.max(value)));
        self.visits += 1;
        self.sum += value;
        self.sum_sq += value * value;
    }
}

/// Lookup table `L`. Insertion-ordered so iteration and sampling are reproducible.
#[derive(Debug, Clone, Default)]
pub struct LookupTable {
    entries: IndexMap<SystemState, TableEntry>,
}

impl LookupTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, state: &SystemState) -> Option<&TableEntry> {
        self.entries.get(state)
    }

    pub fn visits(&self, state: &SystemState) -> u64 {
        self.get(state).map_or(0, |e| e.visits)
    }

    pub fn observe(&mut self, state: SystemState, value: Money) {
        self.entries.entry(state).or_default().observe(value);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get_index(&self, i: usize) -> Option<(&SystemState, &TableEntry)> {
        self.entries.get_index(i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SystemState, &TableEntry)> {
        self.entries.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(best: f64, visits: u64) -> TableEntry {
        TableEntry { best: Some(best), visits, sum: best * visits as f64, sum_sq: 0.0 }
    }

    #[test]
    fn max_merge_keeps_larger() {
        let mut e = entry(7000.0, 5);
        e.observe(6500.0);
        assert_eq!((e.best, e.visits), (Some(7000.0), 6));
        let mut e = entry(7000.0, 5);
        e.observe(7100.0);
        assert_eq!((e.best, e.visits), (Some(7100.0), 6));
    }

    #[test]
    fn fresh_entry_is_unknown() {
        let table = LookupTable::new();
        assert!(table.get(&SystemState::initial()).is_none());
        assert_eq!(table.visits(&SystemState::initial()), 0);
        assert_eq!(TableEntry::default().mean(), None);
    }
}

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::StateId;
use crate::diagram::DiagramWindow;
use crate::table::{StateTable, Triple};

/// Local transition relation of a family of diagrams: every pair
/// (local configuration, next state of its center) that occurs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalRelation {
    entries: BTreeMap<Triple, BTreeSet<StateId>>,
}

/// A triple observed with more than one next state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conflict {
    pub triple: Triple,
    pub results: Vec<StateId>,
}

impl LocalRelation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, triple: Triple, result: StateId) -> bool {
        self.entries.entry(triple).or_default().insert(result)
    }

    pub fn contains(&self, triple: Triple, result: StateId) -> bool {
        self.entries.get(&triple).is_some_and(|s| s.contains(&result))
    }

    /// Number of (triple, result) pairs.
    pub fn len(&self) -> usize {
        self.entries.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Triple, StateId)> + '_ {
        self.entries.iter().flat_map(|(t, rs)| rs.iter().map(move |r| (*t, *r)))
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.entries.keys()
    }

    pub fn results(&self, triple: Triple) -> Option<&BTreeSet<StateId>> {
        self.entries.get(&triple)
    }

    pub fn is_subset(&self, other: &LocalRelation) -> bool {
        self.pairs().all(|(t, r)| other.contains(t, r))
    }

    /// Functional check. Returns every triple that has two or more results.
    pub fn is_deterministic(&self) -> (bool, Vec<Conflict>) {
        let conflicts: Vec<Conflict> = self
            .entries
            .iter()
            .filter(|(_, rs)| rs.len() > 1)
            .map(|(t, rs)| Conflict { triple: *t, results: rs.iter().copied().collect() })
            .collect();
        (conflicts.is_empty(), conflicts)
    }

    /// The relation as a table; `None` when it is not functional.
    pub fn to_table(&self, alphabet_len: usize) -> Option<StateTable> {
        let mut table = StateTable::new(alphabet_len);
        for (t, rs) in &self.entries {
            if rs.len() != 1 {
                return None;
            }
            table.insert(*t, *rs.first()?);
        }
        Some(table)
    }

    /// Restriction to entries whose middle state is not the outside state.
    pub fn inner(&self) -> LocalRelation {
        LocalRelation {
            entries: self
                .entries
                .iter()
                .filter(|((_, m, _), _)| *m != StateId::OUTSIDE)
                .map(|(t, rs)| (*t, rs.clone()))
                .collect(),
        }
    }
}

impl FromIterator<(Triple, StateId)> for LocalRelation {
    fn from_iter<I: IntoIterator<Item = (Triple, StateId)>>(iter: I) -> Self {
        let mut rel = LocalRelation::new();
        for (t, r) in iter {
            rel.insert(t, r);
        }
        rel
    }
}

/// Collects `((d(t,p-1), d(t,p), d(t,p+1)), d(t+1,p))` over every explicit
/// cell of every window with `t < horizon`. Neighbours outside the window
/// come from the fill columns.
pub fn extract_relation<'a, I>(windows: I) -> LocalRelation
where
    I: IntoIterator<Item = &'a DiagramWindow>,
{
    let mut rel = LocalRelation::new();
    for w in windows {
        for t in 0..w.horizon() {
            for p in 1..=w.width() as i64 {
                rel.insert(w.triple(t, p), w.get(t + 1, p));
            }
        }
    }
    rel
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(i: u8) -> StateId {
        StateId(i)
    }

    #[test]
    fn constructed_conflict_is_reported() {
        let q = s(1);
        let b = s(2);
        let rel: LocalRelation = [((q, q, q), q), ((q, q, q), b)].into_iter().collect();
        let (ok, conflicts) = rel.is_deterministic();
        assert!(!ok);
        assert_eq!(conflicts, vec![Conflict { triple: (q, q, q), results: vec![q, b] }]);
        assert!(rel.to_table(3).is_none());
    }

    #[test]
    fn quiescent_window_relation() {
        let q = s(1);
        let o = StateId::OUTSIDE;
        let rows = vec![vec![q; 4]; 3];
        let w = DiagramWindow::from_rows(rows, vec![o; 3], vec![q; 3]);
        let rel = extract_relation([&w]);
        assert!(rel.contains((q, q, q), q));
        assert!(rel.contains((o, q, q), q));
        assert_eq!(rel.len(), 2);
        assert!(rel.is_deterministic().0);
    }
}

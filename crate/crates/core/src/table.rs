use serde::{Deserialize, Serialize};

use crate::alphabet::StateId;

/// A local configuration `(left, mid, right)`.
pub type Triple = (StateId, StateId, StateId);

const ABSENT: u8 = u8::MAX;

/// Partial local transition function stored densely over `n³` triples.
///
/// Looking up a triple outside the domain yields `None`; there is no
/// default value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateTable {
    n: usize,
    cells: Vec<u8>,
    len: usize,
}

impl StateTable {
    pub fn new(n: usize) -> Self {
        StateTable { n, cells: vec![ABSENT; n * n * n], len: 0 }
    }

    /// Size of the alphabet this table ranges over.
    pub fn alphabet_len(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, (l, m, r): Triple) -> usize {
        (l.index() * self.n + m.index()) * self.n + r.index()
    }

    #[inline]
    pub fn get(&self, t: Triple) -> Option<StateId> {
        match self.cells[self.slot(t)] {
            ABSENT => None,
            v => Some(StateId(v)),
        }
    }

    /// Inserts an entry, returning the previous result if any.
    pub fn insert(&mut self, t: Triple, result: StateId) -> Option<StateId> {
        let i = self.slot(t);
        let prev = self.cells[i];
        self.cells[i] = result.0;
        if prev == ABSENT {
            self.len += 1;
            None
        } else {
            Some(StateId(prev))
        }
    }

    pub fn remove(&mut self, t: Triple) -> Option<StateId> {
        let i = self.slot(t);
        let prev = self.cells[i];
        self.cells[i] = ABSENT;
        if prev == ABSENT {
            None
        } else {
            self.len -= 1;
            Some(StateId(prev))
        }
    }

    pub fn contains(&self, t: Triple) -> bool {
        self.get(t).is_some()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Entries in lexicographic triple order.
    pub fn iter(&self) -> impl Iterator<Item = (Triple, StateId)> + '_ {
        let n = self.n;
        self.cells.iter().enumerate().filter(|(_, &v)| v != ABSENT).map(move |(i, &v)| {
            let r = i % n;
            let m = (i / n) % n;
            let l = i / (n * n);
            ((StateId(l as u8), StateId(m as u8), StateId(r as u8)), StateId(v))
        })
    }

    /// Entries whose middle state is not the outside state.
    pub fn inner_entries(&self) -> impl Iterator<Item = (Triple, StateId)> + '_ {
        self.iter().filter(|((_, m, _), _)| *m != StateId::OUTSIDE)
    }

    /// True iff every entry of `self` is also an entry of `other` with the same result.
    pub fn is_submap_of(&self, other: &StateTable) -> bool {
        self.iter().all(|(t, v)| t.0.index() < other.n
            && t.1.index() < other.n
            && t.2.index() < other.n
            && other.get(t) == Some(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(i: u8) -> StateId {
        StateId(i)
    }

    #[test]
    fn absent_lookup_is_none() {
        let mut t = StateTable::new(3);
        assert_eq!(t.get((s(1), s(1), s(1))), None);
        assert_eq!(t.insert((s(1), s(1), s(1)), s(2)), None);
        assert_eq!(t.get((s(1), s(1), s(1))), Some(s(2)));
        assert_eq!(t.insert((s(1), s(1), s(1)), s(1)), Some(s(2)));
        assert_eq!(t.len(), 1);
        assert_eq!(t.remove((s(1), s(1), s(1))), Some(s(1)));
        assert!(t.is_empty());
    }

    #[test]
    fn iteration_is_lexicographic() {
        let mut t = StateTable::new(3);
        t.insert((s(2), s(0), s(1)), s(0));
        t.insert((s(0), s(1), s(2)), s(1));
        t.insert((s(0), s(1), s(1)), s(2));
        let keys: Vec<_> = t.iter().map(|(k, _)| k).collect();
        assert_eq!(keys, vec![(s(0), s(1), s(1)), (s(0), s(1), s(2)), (s(2), s(0), s(1))]);
        assert_eq!(t.inner_entries().count(), 2);
    }
}

//! Super-local transitions: the harvesting unit for induced relations.
//!
//! A record pairs a quintuple of states at time `t` (positions `p-2..=p+2`)
//! with the triple those cells produce at `t+1` (positions `p-1..=p+1`).
//! Together with the triples of the initial row this is all that is needed
//! to compute the relation induced by any local mapping of the source.

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::StateId;
use crate::automaton::Automaton;
use crate::diagram::{run_diagram, DiagramWindow};
use crate::error::{Error, Result};
use crate::table::Triple;

pub type Quint = [StateId; 5];
pub type ResultTriple = [StateId; 3];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperTransitions {
    pub initial_triples: BTreeSet<Triple>,
    pub quints: BTreeMap<Quint, ResultTriple>,
    /// Last time step that contributed a new quintuple.
    pub saturated_at: usize,
    pub horizon: usize,
    pub window: usize,
}

impl SuperTransitions {
    /// True when no new record appeared during the last `window` steps.
    pub fn is_saturated(&self) -> bool {
        self.horizon - self.saturated_at >= self.window
    }

    pub fn len(&self) -> usize {
        self.quints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quints.is_empty()
    }

    /// Recomputes every result triple through the table of `ca`.
    pub fn is_consistent_with(&self, ca: &Automaton) -> bool {
        let t = ca.table();
        self.quints.iter().all(|(q, r)| {
            (0..3).all(|i| t.get((q[i], q[i + 1], q[i + 2])) == Some(r[i]))
        })
    }

    /// Every source triple a local mapping must assign: the three windows of
    /// each quintuple, each result triple, and the initial triples.
    pub fn triples(&self) -> BTreeSet<Triple> {
        let mut out = self.initial_triples.clone();
        for (q, r) in &self.quints {
            for i in 0..3 {
                out.insert((q[i], q[i + 1], q[i + 2]));
            }
            out.insert((r[0], r[1], r[2]));
        }
        out
    }
}

fn quint_at(w: &DiagramWindow, t: usize, p: i64) -> Quint {
    [w.get(t, p - 2), w.get(t, p - 1), w.get(t, p), w.get(t, p + 1), w.get(t, p + 2)]
}

/// Harvests the super-local transitions of `ca` over rows `0..t_max`.
///
/// Quintuples are centered at `p >= 1`; the ones centered further left only
/// see outside cells and contribute nothing to the inner relation. The
/// diagram is run one step past `t_max` so every result triple has a table
/// entry of its own.
pub fn collect_supers(ca: &Automaton, t_max: usize, window: usize) -> Result<SuperTransitions> {
    if window == 0 || window > t_max {
        return Err(Error::Config(format!("need 1 <= window <= t_max, got window={window}, t_max={t_max}")));
    }
    let w = run_diagram(ca, t_max + 1)?;
    let mut initial_triples = BTreeSet::new();
    for p in -1..=(w.width() as i64 + 1) {
        initial_triples.insert(w.triple(0, p));
    }
    let mut quints = BTreeMap::new();
    let mut saturated_at = 0;
    for t in 0..t_max {
        // Beyond p = t+4 the quintuple is entirely quiescent.
        for p in 1..=(t as i64 + 4) {
            let q = quint_at(&w, t, p);
            let r = [w.get(t + 1, p - 1), w.get(t + 1, p), w.get(t + 1, p + 1)];
            if quints.insert(q, r).is_none() {
                saturated_at = t;
            }
        }
    }
    Ok(SuperTransitions { initial_triples, quints, saturated_at, horizon: t_max, window })
}

/// Runs [`collect_supers`] and doubles the horizon until the harvest is
/// saturated or the horizon would exceed `cap`.
pub fn collect_supers_saturated(ca: &Automaton, t_max: usize, window: usize, cap: usize) -> Result<SuperTransitions> {
    let mut t = t_max;
    loop {
        let sup = collect_supers(ca, t, window)?;
        if sup.is_saturated() || t.saturating_mul(2) > cap {
            return Ok(sup);
        }
        t *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const POSITIVE: &str = "\
states: Q B
outside: *
boundary: B
quiescent: Q
generator: Q
* * * -> *
* * B -> *
* * Q -> *
* B Q -> Q
B Q Q -> Q
Q Q Q -> Q
* Q Q -> Q
";

    #[test]
    fn one_row_harvest() {
        let ca = Automaton::parse(POSITIVE).unwrap();
        let sup = collect_supers(&ca, 1, 1).unwrap();
        let id = |n: &str| ca.state(n).unwrap();
        let (o, b, q) = (StateId::OUTSIDE, id("B"), id("Q"));
        let want: BTreeSet<Triple> = [(o, o, o), (o, o, b), (o, b, q), (b, q, q), (q, q, q)].into();
        assert_eq!(sup.initial_triples, want);
        assert_eq!(sup.quints.len(), 4);
        assert!(sup.quints.contains_key(&[o, o, b, q, q]));
        assert!(sup.is_consistent_with(&ca));
    }

    #[test]
    fn saturation_flag() {
        let ca = Automaton::parse(POSITIVE).unwrap();
        let sup = collect_supers(&ca, 20, 5).unwrap();
        assert!(sup.is_saturated());
        assert!(sup.saturated_at <= 2);
        assert!(collect_supers(&ca, 3, 4).is_err());
        let grown = collect_supers_saturated(&ca, 2, 2, 64).unwrap();
        assert!(grown.is_saturated());
    }
}

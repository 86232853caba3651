//! Compiled form of the induced relation of a mapping, parameterised by the
//! mapping's value vector.
//!
//! Every harvested record becomes a key of three operands plus a result
//! operand, each either a constant target state or a reference to one
//! mapping entry. Determinism is tracked through per-key result counts, so a
//! change of a few entries only touches the records that read them.

use crate::alphabet::StateId;
use crate::error::{Error, Result};
use crate::localmap::LocalMapping;
use crate::supers::SuperTransitions;
use crate::table::{StateTable, Triple};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Const(u8),
    Entry(u32),
}

#[derive(Clone, Copy, Debug)]
struct Record {
    key: [Op; 3],
    res: Op,
}

#[derive(Clone, Debug)]
pub struct Evaluator {
    n: usize,
    records: Vec<Record>,
    deps: Vec<Vec<u32>>,
}

/// Multiset view of the relation: result counts per key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counts {
    n: usize,
    counts: Vec<u32>,
    distinct: Vec<u8>,
    conflicts: u32,
}

impl Counts {
    #[inline]
    fn add(&mut self, key: usize, res: usize) {
        let c = &mut self.counts[key * self.n + res];
        if *c == 0 {
            self.distinct[key] += 1;
            if self.distinct[key] == 2 {
                self.conflicts += 1;
            }
        }
        *c += 1;
    }

    #[inline]
    fn sub(&mut self, key: usize, res: usize) {
        let c = &mut self.counts[key * self.n + res];
        *c -= 1;
        if *c == 0 {
            if self.distinct[key] == 2 {
                self.conflicts -= 1;
            }
            self.distinct[key] -= 1;
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.conflicts == 0
    }

    pub fn conflicts(&self) -> u32 {
        self.conflicts
    }
}

impl Evaluator {
    pub fn new(m: &LocalMapping, sup: &SuperTransitions) -> Result<Self> {
        let domain = m.domain();
        let miss = |t: Triple| Error::DomainMiss(m.source().triple_names(t));
        let op = |t: Triple| -> Result<Op> {
            if t.1 == StateId::OUTSIDE {
                Ok(Op::Const(StateId::OUTSIDE.0))
            } else {
                domain.index(t).map(|i| Op::Entry(i as u32)).ok_or_else(|| miss(t))
            }
        };
        let z = |s: StateId| m.zmap_value(s).map(|v| Op::Const(v.0)).ok_or_else(|| miss((s, s, s)));
        let mut records = Vec::new();
        for &(a, b, c) in &sup.initial_triples {
            records.push(Record { key: [z(a)?, z(b)?, z(c)?], res: op((a, b, c))? });
        }
        for (q, r) in &sup.quints {
            records.push(Record {
                key: [op((q[0], q[1], q[2]))?, op((q[1], q[2], q[3]))?, op((q[2], q[3], q[4]))?],
                res: op((r[0], r[1], r[2]))?,
            });
        }
        // Compliance pins both quiescence entries of the simulated automaton,
        // whether or not the harvest reaches them.
        let q = Op::Const(m.target_roles().quiescent.0);
        for l in [q, Op::Const(StateId::OUTSIDE.0)] {
            records.push(Record { key: [l, q, q], res: q });
        }
        let mut deps = vec![Vec::new(); domain.len()];
        for (ri, rec) in records.iter().enumerate() {
            for o in rec.key.iter().chain(std::iter::once(&rec.res)) {
                if let Op::Entry(i) = *o {
                    let d = &mut deps[i as usize];
                    if d.last() != Some(&(ri as u32)) {
                        d.push(ri as u32);
                    }
                }
            }
        }
        Ok(Evaluator { n: m.targets().len(), records, deps })
    }

    pub fn alphabet_len(&self) -> usize {
        self.n
    }

    pub fn records(&self) -> usize {
        self.records.len()
    }

    /// Number of records that read entry `i`.
    pub fn dependents(&self, i: usize) -> usize {
        self.deps[i].len()
    }

    #[inline]
    fn val(op: Op, values: &[u8]) -> u8 {
        match op {
            Op::Const(c) => c,
            Op::Entry(i) => values[i as usize],
        }
    }

    #[inline]
    fn key_res(&self, r: &Record, values: &[u8]) -> (usize, usize) {
        let n = self.n;
        let k = (Self::val(r.key[0], values) as usize * n + Self::val(r.key[1], values) as usize) * n
            + Self::val(r.key[2], values) as usize;
        (k, Self::val(r.res, values) as usize)
    }

    pub fn counts(&self, values: &[u8]) -> Counts {
        let n = self.n;
        let mut c = Counts { n, counts: vec![0; n * n * n * n], distinct: vec![0; n * n * n], conflicts: 0 };
        for r in &self.records {
            let (k, v) = self.key_res(r, values);
            c.add(k, v);
        }
        c
    }

    /// Full recomputation: the induced table, or `None` when two records
    /// disagree on a key.
    pub fn table(&self, values: &[u8]) -> Option<StateTable> {
        let mut t = StateTable::new(self.n);
        for r in &self.records {
            let (k, v) = self.key_res(r, values);
            let n = self.n;
            let triple = (StateId((k / (n * n)) as u8), StateId(((k / n) % n) as u8), StateId((k % n) as u8));
            match t.get(triple) {
                Some(prev) if prev.index() != v => return None,
                Some(_) => {}
                None => {
                    t.insert(triple, StateId(v as u8));
                }
            }
        }
        Some(t)
    }

    pub fn is_deterministic(&self, values: &[u8]) -> bool {
        self.table(values).is_some()
    }

    /// Applies `changes` to `values` and `counts`, reports determinism, then
    /// restores both. `scratch` is reused between calls.
    pub fn probe(&self, counts: &mut Counts, values: &mut [u8], changes: &[(usize, u8)], scratch: &mut Vec<u32>) -> bool {
        scratch.clear();
        for &(i, _) in changes {
            scratch.extend_from_slice(&self.deps[i]);
        }
        if changes.len() > 1 {
            scratch.sort_unstable();
            scratch.dedup();
        }
        self.retract(counts, values, scratch);
        let olds: Vec<u8> = changes.iter().map(|&(i, v)| std::mem::replace(&mut values[i], v)).collect();
        self.assert_records(counts, values, scratch);
        let ok = counts.is_deterministic();
        self.retract(counts, values, scratch);
        // Reverse order restores the original value of a repeated entry.
        for (&(i, _), &o) in changes.iter().zip(&olds).rev() {
            values[i] = o;
        }
        self.assert_records(counts, values, scratch);
        ok
    }

    fn retract(&self, counts: &mut Counts, values: &[u8], affected: &[u32]) {
        for &ri in affected {
            let (k, v) = self.key_res(&self.records[ri as usize], values);
            counts.sub(k, v);
        }
    }

    fn assert_records(&self, counts: &mut Counts, values: &[u8], affected: &[u32]) {
        for &ri in affected {
            let (k, v) = self.key_res(&self.records[ri as usize], values);
            counts.add(k, v);
        }
    }
}

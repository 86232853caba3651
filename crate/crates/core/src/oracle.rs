//! Brute-force enumeration of tiny sequence-generation candidates and
//! finite-horizon classification of the time sets they produce.
//!
//! Matching is exact agreement on `[1, T]`, so it is a necessary condition
//! only: two families agreeing up to `T` are both reported.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, StateId};
use crate::automaton::{Automaton, Roles};
use crate::diagram::run_diagram;
use crate::error::{Error, Result};
use crate::par::Pool;
use crate::rtsg::GENERATOR_COLUMN;
use crate::sequence::SequenceSpec;
use crate::table::{StateTable, Triple};

const NAMES: [&str; 3] = ["Q", "X", "Y"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationSpace {
    /// Number of non-outside states.
    pub states: usize,
    /// Allows `states == 3`, whose space has `3^35` tables per role assignment.
    pub allow_large: bool,
}

impl EnumerationSpace {
    pub fn new(states: usize) -> Self {
        EnumerationSpace { states, allow_large: false }
    }

    /// Inner entries per table, the pinned quiescent entry included.
    pub fn entries(&self) -> usize {
        (self.states + 1) * self.states * self.states
    }

    /// Tables per role assignment.
    pub fn tables_per_assignment(&self) -> u128 {
        (self.states as u128).pow(self.entries() as u32 - 1)
    }

    pub fn assignments(&self) -> usize {
        self.states * self.states
    }
}

/// Lazily yields every candidate of `space`. The quiescent state is the first
/// state; the boundary and generator states range over all states, so role
/// coincidences are covered. Every inner entry is defined, `(Q,Q,Q)` is
/// pinned to `Q` and entries with an outside middle yield `*`. The left-edge
/// entry `(*,Q,Q)` stays free: some two-state generators, such as the one for
/// `4n`, need it to leave `Q`.
pub fn enumerate_candidates(space: EnumerationSpace) -> Result<Candidates> {
    let s = space.states;
    if s == 0 || s > 3 {
        return Err(Error::SpaceTooLarge(format!("{s} states is outside 1..=3")));
    }
    if s == 3 && !space.allow_large {
        return Err(Error::SpaceTooLarge("three states needs the explicit large-space flag".into()));
    }
    let alphabet = Alphabet::new(&NAMES[..s])?;
    let q = StateId(1);
    let mut free = Vec::new();
    for l in 0..=s as u8 {
        for m in 1..=s as u8 {
            for r in 1..=s as u8 {
                let t = (StateId(l), StateId(m), StateId(r));
                if t != (q, q, q) {
                    free.push(t);
                }
            }
        }
    }
    Ok(Candidates { alphabet, s, free, digits: vec![0; space.entries() - 1], role: 0, done: false })
}

pub struct Candidates {
    alphabet: Alphabet,
    s: usize,
    free: Vec<Triple>,
    digits: Vec<u8>,
    role: usize,
    done: bool,
}

impl Iterator for Candidates {
    type Item = Automaton;

    fn next(&mut self) -> Option<Automaton> {
        if self.done {
            return None;
        }
        let s = self.s;
        let q = StateId(1);
        let roles = Roles {
            outside: StateId::OUTSIDE,
            quiescent: q,
            boundary: StateId(1 + (self.role / s) as u8),
            generator: StateId(1 + (self.role % s) as u8),
        };
        let mut table = StateTable::new(s + 1);
        for r in 0..=s as u8 {
            table.insert((StateId::OUTSIDE, StateId::OUTSIDE, StateId(r)), StateId::OUTSIDE);
        }
        table.insert((q, q, q), q);
        for (t, d) in self.free.iter().zip(&self.digits) {
            table.insert(*t, StateId(1 + d));
        }
        let ca = Automaton::new(self.alphabet.clone(), roles, table).expect("valid candidate");

        // Advance the mixed-radix counter, then the role assignment.
        let mut carry = true;
        for d in self.digits.iter_mut() {
            *d += 1;
            if (*d as usize) < s {
                carry = false;
                break;
            }
            *d = 0;
        }
        if carry {
            self.role += 1;
            if self.role == s * s {
                self.done = true;
            }
        }
        Some(ca)
    }
}

/// Generator indicator of `ca` on the checked column over `[0, horizon]`.
pub fn generated_prefix(ca: &Automaton, horizon: u64) -> Result<Vec<bool>> {
    let w = run_diagram(ca, horizon as usize)?;
    let g = ca.roles().generator;
    Ok((0..=horizon as usize).map(|t| w.get(t, GENERATOR_COLUMN) == g).collect())
}

/// Named families with parameters bounded by the horizon.
pub fn family_catalog(horizon: u64) -> Vec<SequenceSpec> {
    let h = horizon as i64;
    let mut out = vec![SequenceSpec::Fibonacci, SequenceSpec::Primes];
    for k in 2..=8 {
        out.push(SequenceSpec::Power(k));
    }
    for a in 1..=h.max(1) {
        for b in -a..=h {
            out.push(SequenceSpec::Linear { a, b });
        }
    }
    for base in 2..=4u64 {
        for scale in 1..=4 {
            for offset in -4..=4 {
                out.push(SequenceSpec::Exponential { base, scale, offset });
            }
        }
    }
    // Families with fewer than two members in range say nothing at this horizon.
    out.retain(|f| f.members_upto(horizon).len() >= 2);
    out
}

/// Matches bitmaps against the family catalog of one horizon.
pub struct Classifier {
    horizon: u64,
    index: HashMap<Vec<bool>, Vec<SequenceSpec>>,
}

impl Classifier {
    pub fn new(horizon: u64) -> Self {
        let mut index: HashMap<Vec<bool>, Vec<SequenceSpec>> = HashMap::new();
        for f in family_catalog(horizon) {
            let mut key = f.indicator(horizon);
            key.remove(0);
            index.entry(key).or_default().push(f);
        }
        Classifier { horizon, index }
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// Every catalog family whose indicator agrees with `prefix` on
    /// `1 <= t <= horizon`; empty means unmatched. Time 0 is the initial
    /// configuration, as in [`crate::verify_solution`].
    pub fn classify(&self, prefix: &[bool]) -> Vec<SequenceSpec> {
        if prefix.len() as u64 != self.horizon + 1 {
            return Vec::new();
        }
        self.index.get(&prefix[1..]).cloned().unwrap_or_default()
    }
}

/// One-shot form of [`Classifier::classify`] with `T = prefix.len() - 1`.
pub fn classify_prefix(prefix: &[bool]) -> Vec<SequenceSpec> {
    if prefix.is_empty() {
        return Vec::new();
    }
    Classifier::new(prefix.len() as u64 - 1).classify(prefix)
}

pub fn prefix_hex(prefix: &[bool]) -> String {
    let mut bytes = vec![0u8; prefix.len().div_ceil(8)];
    for (t, &b) in prefix.iter().enumerate() {
        if b {
            bytes[t / 8] |= 1 << (t % 8);
        }
    }
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub index: u64,
    pub states: usize,
    pub boundary: String,
    pub quiescent: String,
    pub generator: String,
    pub table: String,
    pub prefix: String,
    pub families: Vec<String>,
}

/// Enumerates `space` up to `limit` candidates and classifies each prefix.
pub fn build_catalog(space: EnumerationSpace, horizon: u64, limit: Option<u64>, pool: &Pool) -> Result<Vec<CatalogEntry>> {
    let classifier = Classifier::new(horizon);
    let cands: Vec<Automaton> = match limit {
        Some(n) => enumerate_candidates(space)?.take(n as usize).collect(),
        None => enumerate_candidates(space)?.collect(),
    };
    let entries = pool.map(&cands, |ca| -> Result<(Vec<bool>, Vec<String>)> {
        let p = generated_prefix(ca, horizon)?;
        let fams = classifier.classify(&p).iter().map(ToString::to_string).collect();
        Ok((p, fams))
    });
    cands
        .iter()
        .zip(entries)
        .enumerate()
        .map(|(i, (ca, res))| {
            let (p, families) = res?;
            let r = ca.roles();
            Ok(CatalogEntry {
                index: i as u64,
                states: ca.count_states(),
                boundary: ca.name(r.boundary).into(),
                quiescent: ca.name(r.quiescent).into(),
                generator: ca.name(r.generator).into(),
                table: ca.to_text(),
                prefix: prefix_hex(&p),
                families,
            })
        })
        .collect()
}

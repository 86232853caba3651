//! Dedup keys up to relabelling of the states that carry no role.
//!
//! The key of a table is its dense cell array (`n³` bytes, `0xFF` for absent
//! entries) minimised over every permutation that fixes `*`, `B`, `Q` and
//! `S`. Two tables get the same key iff one is a role-preserving relabelling
//! of the other.

use std::fmt;

use crate::alphabet::StateId;
use crate::automaton::{Automaton, Roles};
use crate::table::StateTable;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(pub Vec<u8>);

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({} bytes)", self.0.len())
    }
}

const ABSENT: u8 = u8::MAX;

/// States moved by the permutation group: everything except the outside
/// state and the three role states.
pub fn free_states(n: usize, roles: Roles) -> Vec<u8> {
    (1..n as u8)
        .filter(|&s| ![roles.boundary, roles.quiescent, roles.generator].contains(&StateId(s)))
        .collect()
}

/// Lexicographic successor of `v`; false once `v` is the last permutation.
fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn dense(table: &StateTable) -> Vec<u8> {
    let n = table.alphabet_len();
    let mut cells = vec![ABSENT; n * n * n];
    for ((l, m, r), v) in table.iter() {
        cells[(l.index() * n + m.index()) * n + r.index()] = v.0;
    }
    cells
}

fn permute(cells: &[u8], n: usize, perm: &[u8], out: &mut [u8]) {
    out.fill(ABSENT);
    for l in 0..n {
        for m in 0..n {
            for r in 0..n {
                let v = cells[(l * n + m) * n + r];
                if v != ABSENT {
                    let (pl, pm, pr) = (perm[l] as usize, perm[m] as usize, perm[r] as usize);
                    out[(pl * n + pm) * n + pr] = perm[v as usize];
                }
            }
        }
    }
}

/// Minimal key and the permutation reaching it (`perm[old] = new`).
pub fn canonical_table(table: &StateTable, roles: Roles) -> (CanonicalKey, Vec<u8>) {
    let n = table.alphabet_len();
    let cells = dense(table);
    let free = free_states(n, roles);
    let mut order = free.clone();
    let mut best: Option<(Vec<u8>, Vec<u8>)> = None;
    let mut buf = vec![ABSENT; cells.len()];
    loop {
        let mut perm: Vec<u8> = (0..n as u8).collect();
        for (slot, &s) in free.iter().zip(&order) {
            perm[s as usize] = *slot;
        }
        permute(&cells, n, &perm, &mut buf);
        if best.as_ref().is_none_or(|(b, _)| buf < *b) {
            best = Some((buf.clone(), perm));
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    let (key, perm) = best.expect("at least the identity permutation");
    (CanonicalKey(key), perm)
}

pub fn canonical_key(ca: &Automaton) -> CanonicalKey {
    canonical_table(ca.table(), ca.roles()).0
}

/// The representative of `ca`'s class whose table is the key itself.
pub fn canonical_form(ca: &Automaton) -> (CanonicalKey, Automaton) {
    let (key, perm) = canonical_table(ca.table(), ca.roles());
    let rep = ca.permuted(&perm).expect("role-fixing permutation");
    (key, rep)
}

//! Scripted six-to-five state reduction.
//!
//! The seed uses states `Q B A C D E` with `A` as generator. Every mapping
//! entry whose seed result is `A` is sent to `D` on the leftmost cell and to
//! `E` elsewhere; all other entries keep their result. `D` becomes the new
//! generator, so the seed must never hold `D` on its leftmost cell. Entry
//! overrides that restore determinism are kept as a separate patch file.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::alphabet::{Alphabet, StateId};
use crate::automaton::{Automaton, Roles};
use crate::error::{Error, Result};
use crate::localmap::LocalMapping;

pub const SEED_STATES: [&str; 6] = ["Q", "B", "A", "C", "D", "E"];
pub const REDUCED_STATES: [&str; 5] = ["Q", "B", "C", "D", "E"];

fn require(seed: &Automaton) -> Result<()> {
    let mut names: Vec<&str> = seed.alphabet().names()[1..].iter().map(String::as_str).collect();
    names.sort_unstable();
    let mut want = SEED_STATES.to_vec();
    want.sort_unstable();
    if names != want {
        return Err(Error::SeedShape(format!("expected states {}", SEED_STATES.join(" "))));
    }
    let r = seed.roles();
    for (role, s, want) in [("boundary", r.boundary, "B"), ("quiescent", r.quiescent, "Q"), ("generator", r.generator, "A")] {
        if seed.name(s) != want {
            return Err(Error::SeedShape(format!("{role} state must be `{want}`")));
        }
    }
    Ok(())
}

/// The base reduction mapping, before any patch.
pub fn handcraft_script(seed: &Automaton) -> Result<LocalMapping> {
    require(seed)?;
    let targets = Alphabet::new(&REDUCED_STATES)?;
    let t = |n: &str| targets.id(n).expect("reduced state");
    let roles = Roles { outside: StateId::OUTSIDE, boundary: t("B"), quiescent: t("Q"), generator: t("D") };
    let mut zmap = BTreeMap::new();
    for n in ["*", "B", "Q"] {
        zmap.insert(seed.state(n).expect("seed state"), targets.id(n).expect("reduced state"));
    }
    let a = seed.roles().generator;
    let values = seed
        .table()
        .inner_entries()
        .map(|((l, _, _), v)| {
            if v == a {
                if l == StateId::OUTSIDE { t("D") } else { t("E") }
            } else {
                t(seed.name(v))
            }
        })
        .collect();
    LocalMapping::from_parts(Arc::new(seed.clone()), targets, roles, zmap, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_other_shapes() {
        let ca = Automaton::parse("states: Q B\noutside: *\nboundary: B\nquiescent: Q\ngenerator: B\n").unwrap();
        assert!(matches!(handcraft_script(&ca), Err(Error::SeedShape(_))));
    }

    #[test]
    fn generator_entries_are_split() {
        let text = "\
states: Q B A C D E
outside: *
boundary: B
quiescent: Q
generator: A
* B Q -> A
* A Q -> C
A Q Q -> A
B Q Q -> Q
Q Q Q -> Q
* Q Q -> Q
";
        let ca = Automaton::parse(text).unwrap();
        let m = handcraft_script(&ca).unwrap();
        let v = |l, mm, r| m.targets().name(m.smap_value(ca.triple(l, mm, r).unwrap()).unwrap()).to_string();
        assert_eq!(v("*", "B", "Q"), "D");
        assert_eq!(v("A", "Q", "Q"), "E");
        assert_eq!(v("*", "A", "Q"), "C");
        assert_eq!(m.targets().name(m.target_roles().generator), "D");
    }
}

//! Cellular automata with partial tables and the four special roles of a
//! sequence-generation candidate, plus the line-oriented text format.
//!
//! ```text
//! states: Q B A
//! outside: *
//! boundary: B
//! quiescent: Q
//! generator: A
//! * B Q -> A     # one entry per line
//! ```

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, StateId, OUTSIDE_NAME};
use crate::error::{Error, Result};
use crate::table::{StateTable, Triple};

/// Special states. Only the outside state must differ from the others.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Roles {
    pub outside: StateId,
    pub boundary: StateId,
    pub quiescent: StateId,
    pub generator: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Automaton {
    alphabet: Alphabet,
    roles: Roles,
    table: StateTable,
}

impl Automaton {
    pub fn new(alphabet: Alphabet, roles: Roles, table: StateTable) -> Result<Self> {
        let n = alphabet.len();
        if table.alphabet_len() != n {
            return Err(Error::InvalidAutomaton(format!(
                "table spans {} states but the alphabet has {n}",
                table.alphabet_len()
            )));
        }
        if roles.outside != StateId::OUTSIDE {
            return Err(Error::InvalidAutomaton("outside state must be `*`".into()));
        }
        for (role, s) in [
            ("boundary", roles.boundary),
            ("quiescent", roles.quiescent),
            ("generator", roles.generator),
        ] {
            if s.index() >= n {
                return Err(Error::InvalidAutomaton(format!("{role} state out of range")));
            }
            if s == roles.outside {
                return Err(Error::InvalidAutomaton(format!(
                    "{role} state must differ from the outside state"
                )));
            }
        }
        Ok(Automaton { alphabet, roles, table })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn roles(&self) -> Roles {
        self.roles
    }

    pub fn table(&self) -> &StateTable {
        &self.table
    }

    pub fn table_mut(&mut self) -> &mut StateTable {
        &mut self.table
    }

    pub fn name(&self, s: StateId) -> &str {
        self.alphabet.name(s)
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.alphabet.id(name)
    }

    pub fn triple_names(&self, (l, m, r): Triple) -> (String, String, String) {
        (self.name(l).to_string(), self.name(m).to_string(), self.name(r).to_string())
    }

    /// Parses a triple written as three state names.
    pub fn triple(&self, l: &str, m: &str, r: &str) -> Option<Triple> {
        Some((self.state(l)?, self.state(m)?, self.state(r)?))
    }

    /// Number of states, not counting the outside state.
    pub fn count_states(&self) -> usize {
        self.alphabet.len() - 1
    }

    /// Number of table entries whose middle state is not the outside state.
    pub fn count_transitions(&self) -> usize {
        self.table.inner_entries().count()
    }

    /// Returns a copy with the states renamed through `perm`, where `perm[i]`
    /// is the new index of old state `i`. Names travel with their states.
    pub fn permuted(&self, perm: &[u8]) -> Result<Automaton> {
        let n = self.alphabet.len();
        if perm.len() != n || perm[0] != 0 {
            return Err(Error::InvalidAutomaton("permutation must fix the outside state".into()));
        }
        let mut names = vec![String::new(); n];
        for (old, &new) in perm.iter().enumerate() {
            names[new as usize] = self.alphabet.names()[old].clone();
        }
        let alphabet = Alphabet::new(&names[1..])?;
        let p = |s: StateId| StateId(perm[s.index()]);
        let mut table = StateTable::new(n);
        for ((l, m, r), v) in self.table.iter() {
            table.insert((p(l), p(m), p(r)), p(v));
        }
        let roles = Roles {
            outside: StateId::OUTSIDE,
            boundary: p(self.roles.boundary),
            quiescent: p(self.roles.quiescent),
            generator: p(self.roles.generator),
        };
        Automaton::new(alphabet, roles, table)
    }

    pub fn parse(text: &str) -> Result<Automaton> {
        let mut alphabet: Option<Alphabet> = None;
        let mut role_names: [Option<(usize, String)>; 3] = [None, None, None];
        let mut entries: Vec<(usize, [String; 4])> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            if let Some((key, rest)) = line.split_once(':') {
                let key = key.trim();
                let toks: Vec<&str> = rest.split_whitespace().collect();
                match key {
                    "states" => {
                        if alphabet.is_some() {
                            return Err(perr("duplicate `states` header".into()));
                        }
                        let a = Alphabet::new(&toks).map_err(|e| perr(e.to_string()))?;
                        alphabet = Some(a);
                    }
                    "outside" => {
                        if toks != [OUTSIDE_NAME] {
                            return Err(perr("the outside state must be named `*`".into()));
                        }
                    }
                    "boundary" | "quiescent" | "generator" => {
                        if toks.len() != 1 {
                            return Err(perr(format!("`{key}` takes exactly one state name")));
                        }
                        let slot = match key {
                            "boundary" => 0,
                            "quiescent" => 1,
                            _ => 2,
                        };
                        if role_names[slot].is_some() {
                            return Err(perr(format!("duplicate `{key}` header")));
                        }
                        role_names[slot] = Some((line_no, toks[0].to_string()));
                    }
                    other => return Err(perr(format!("unknown header `{other}`"))),
                }
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 5 || toks[3] != "->" {
                return Err(perr("expected `<left> <mid> <right> -> <result>`".into()));
            }
            entries.push((
                line_no,
                [toks[0].into(), toks[1].into(), toks[2].into(), toks[4].into()],
            ));
        }

        let alphabet = alphabet.ok_or(Error::Parse { line: 0, msg: "missing `states` header".into() })?;
        let mut roles = [StateId::OUTSIDE; 3];
        for (slot, key) in ["boundary", "quiescent", "generator"].iter().enumerate() {
            let (line, name) = role_names[slot]
                .clone()
                .ok_or(Error::Parse { line: 0, msg: format!("missing `{key}` header") })?;
            roles[slot] = alphabet
                .id(&name)
                .ok_or(Error::Parse { line, msg: format!("unknown state `{name}`") })?;
        }
        let mut table = StateTable::new(alphabet.len());
        for (line, [l, m, r, v]) in entries {
            let look = |s: &str| {
                alphabet.id(s).ok_or(Error::Parse { line, msg: format!("unknown state `{s}`") })
            };
            let t = (look(&l)?, look(&m)?, look(&r)?);
            let v = look(&v)?;
            if table.insert(t, v).is_some() {
                return Err(Error::Parse { line, msg: format!("duplicate entry for `{l} {m} {r}`") });
            }
        }
        let roles = Roles {
            outside: StateId::OUTSIDE,
            boundary: roles[0],
            quiescent: roles[1],
            generator: roles[2],
        };
        Automaton::new(alphabet, roles, table).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Automaton> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Automaton::parse(&text).map_err(|e| match e {
            Error::Parse { line, msg } => Error::Parse { line, msg: format!("{}: {msg}", path.display()) },
            other => other,
        })
    }

    /// Canonical text form: headers, then entries in index order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self.alphabet.inner_states().map(|s| self.name(s)).collect();
        let _ = writeln!(out, "states: {}", names.join(" "));
        let _ = writeln!(out, "outside: {OUTSIDE_NAME}");
        let _ = writeln!(out, "boundary: {}", self.name(self.roles.boundary));
        let _ = writeln!(out, "quiescent: {}", self.name(self.roles.quiescent));
        let _ = writeln!(out, "generator: {}", self.name(self.roles.generator));
        for ((l, m, r), v) in self.table.iter() {
            let _ = writeln!(out, "{} {} {} -> {}", self.name(l), self.name(m), self.name(r), self.name(v));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# a two-state generator of all positive times
states: Q B
outside: *
boundary: B
quiescent: Q
generator: Q
* * * -> *
* * B -> *
* * Q -> *
* B Q -> Q
B Q Q -> Q   # trailing comment
Q Q Q -> Q
* Q Q -> Q
";

    #[test]
    fn parse_and_count() {
        let ca = Automaton::parse(SMALL).unwrap();
        assert_eq!(ca.count_states(), 2);
        assert_eq!(ca.count_transitions(), 4);
        assert_eq!(ca.name(ca.roles().generator), "Q");
        assert_eq!(ca.roles().quiescent, ca.roles().generator);
    }

    #[test]
    fn text_round_trip() {
        let ca = Automaton::parse(SMALL).unwrap();
        let again = Automaton::parse(&ca.to_text()).unwrap();
        assert_eq!(ca, again);
        assert_eq!(again.to_text(), ca.to_text());
    }

    #[test]
    fn duplicate_triple_is_an_error() {
        let text = format!("{SMALL}Q Q Q -> B\n");
        match Automaton::parse(&text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 14);
                assert!(msg.contains("duplicate"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_table_counts() {
        let ca = Automaton::parse("states: Q B\noutside: *\nboundary: B\nquiescent: Q\ngenerator: B\n").unwrap();
        assert_eq!((ca.count_states(), ca.count_transitions()), (2, 0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "states: Q B\noutside: *\nboundary: B\nquiescent: Q\ngenerator: Q\nQ Q X -> Q\n";
        assert!(matches!(Automaton::parse(bad), Err(Error::Parse { line: 6, .. })));
        let bad = "states: Q B\noutside: *\nboundary: *\nquiescent: Q\ngenerator: Q\n";
        assert!(Automaton::parse(bad).is_err());
        let bad = "states: Q B\noutside: X\n";
        assert!(matches!(Automaton::parse(bad), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn permutation_keeps_names_with_states() {
        let ca = Automaton::parse(SMALL).unwrap();
        let p = ca.permuted(&[0, 2, 1]).unwrap();
        assert_eq!(p.name(p.roles().boundary), "B");
        assert_eq!(p.roles().boundary, StateId(1));
        assert_eq!(p.count_transitions(), ca.count_transitions());
    }
}

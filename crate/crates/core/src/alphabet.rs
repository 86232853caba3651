//! State identifiers and named alphabets.
//!
//! States are dense indices in memory and names in files. The name `*` is
//! reserved for the outside state and always sits at index 0.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reserved name of the outside state.
pub const OUTSIDE_NAME: &str = "*";

/// Largest supported alphabet, outside state included.
pub const MAX_STATES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateId(pub u8);

impl StateId {
    pub const OUTSIDE: StateId = StateId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// An ordered list of unique state names, `*` first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(char::is_whitespace) && !name.contains('#')
}

impl Alphabet {
    /// Builds an alphabet from the non-outside state names. `*` is
    /// prepended; listing it explicitly is allowed once.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut out = vec![OUTSIDE_NAME.to_string()];
        for n in names {
            let n = n.as_ref();
            if n == OUTSIDE_NAME {
                continue;
            }
            if !valid_name(n) || n == "->" {
                return Err(Error::InvalidAutomaton(format!("invalid state name `{n}`")));
            }
            if out.iter().any(|o| o == n) {
                return Err(Error::InvalidAutomaton(format!("duplicate state name `{n}`")));
            }
            out.push(n.to_string());
        }
        if out.len() > MAX_STATES {
            return Err(Error::InvalidAutomaton(format!(
                "at most {} states are supported",
                MAX_STATES - 1
            )));
        }
        Ok(Alphabet { names: out })
    }

    /// Number of states including the outside state.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s.index()]
    }

    pub fn id(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name).map(|i| StateId(i as u8))
    }

    /// All states, outside state first.
    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.names.len()).map(|i| StateId(i as u8))
    }

    /// All states except the outside state.
    pub fn inner_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (1..self.names.len()).map(|i| StateId(i as u8))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outside_is_index_zero() {
        let a = Alphabet::new(&["Q", "B"]).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a.id("*"), Some(StateId::OUTSIDE));
        assert_eq!(a.name(StateId(2)), "B");
    }

    #[test]
    fn rejects_duplicates_and_bad_names() {
        assert!(Alphabet::new(&["Q", "Q"]).is_err());
        assert!(Alphabet::new(&["a b"]).is_err());
        assert!(Alphabet::new(&[""]).is_err());
        assert!(Alphabet::new(&["->"]).is_err());
    }

    #[test]
    fn explicit_outside_is_tolerated() {
        let a = Alphabet::new(&["*", "Q"]).unwrap();
        assert_eq!(a.names(), &["*".to_string(), "Q".to_string()]);
    }
}

//! Candidacy and solution checks for real-time sequence generation.
//!
//! The generator condition is checked on the leftmost non-outside cell,
//! position 1; reports record that column explicitly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::automaton::Automaton;
use crate::diagram::run_diagram;
use crate::error::Error;
use crate::sequence::SequenceSpec;

/// Column whose states are compared against the sequence.
pub const GENERATOR_COLUMN: i64 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    Triple(String, String, String),
    Time(u64),
    Cell { t: u64, p: i64 },
    None,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Triple(l, m, r) => write!(f, "({l} {m} {r})"),
            Witness::Time(t) => write!(f, "t={t}"),
            Witness::Cell { t, p } => write!(f, "t={t} p={p}"),
            Witness::None => write!(f, "-"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub witness: Witness,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.rule, self.witness, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidacyReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
    pub checked_horizon: u64,
    pub checked_column: i64,
    /// Times at which the checked column held the generator state.
    pub generator_times: Vec<u64>,
}

/// Checks the shape of the initial configuration, the outside-state closure
/// of every table entry, and the two pinned quiescence entries.
pub fn check_candidate(ca: &Automaton) -> CandidacyReport {
    let mut violations = Vec::new();
    let roles = ca.roles();
    let star = roles.outside;

    // (a) `… * * B Q Q …` needs B and Q to be ordinary states.
    for (name, s) in [("boundary", roles.boundary), ("quiescent", roles.quiescent)] {
        if s == star {
            violations.push(Violation {
                rule: "initial-shape".into(),
                witness: Witness::None,
                message: format!("{name} state coincides with the outside state"),
            });
        }
    }

    // (b) result is `*` iff mid is `*`.
    for ((l, m, r), v) in ca.table().iter() {
        if (m == star) != (v == star) {
            let (ln, mn, rn) = ca.triple_names((l, m, r));
            violations.push(Violation {
                rule: "outside-closure".into(),
                witness: Witness::Triple(ln, mn, rn),
                message: format!("yields `{}`", ca.name(v)),
            });
        }
    }

    // (c) quiescence.
    let q = roles.quiescent;
    for t in [(q, q, q), (star, q, q)] {
        if ca.table().get(t) != Some(q) {
            let (ln, mn, rn) = ca.triple_names(t);
            let message = match ca.table().get(t) {
                None => "missing quiescent entry".to_string(),
                Some(v) => format!("yields `{}` instead of the quiescent state", ca.name(v)),
            };
            violations.push(Violation { rule: "quiescence".into(), witness: Witness::Triple(ln, mn, rn), message });
        }
    }

    CandidacyReport { pass: violations.is_empty(), violations }
}

/// Runs the diagram to `horizon` and compares the generator column against
/// `seq` for every `1 <= t <= horizon`. Time 0 is the initial configuration
/// and is not compared. The result certifies the prefix only.
pub fn verify_solution(ca: &Automaton, seq: &SequenceSpec, horizon: u64) -> SolutionReport {
    let members = seq.members_upto(horizon);
    let mut report = SolutionReport {
        pass: false,
        violations: Vec::new(),
        checked_horizon: horizon,
        checked_column: GENERATOR_COLUMN,
        generator_times: Vec::new(),
    };
    let window = match run_diagram(ca, horizon as usize) {
        Ok(w) => w,
        Err(Error::MissingTransition { names, t, p, .. }) => {
            report.violations.push(Violation {
                rule: "missing-transition".into(),
                witness: Witness::Triple(names.0, names.1, names.2),
                message: format!("no entry for a configuration reached at t={t} p={p}"),
            });
            return report;
        }
        Err(e) => {
            report.violations.push(Violation {
                rule: "simulation".into(),
                witness: Witness::None,
                message: e.to_string(),
            });
            return report;
        }
    };
    let g = ca.roles().generator;
    for t in 1..=horizon {
        let on = window.get(t as usize, GENERATOR_COLUMN) == g;
        if on {
            report.generator_times.push(t);
        }
        let want = members.contains(&t);
        if on != want {
            report.violations.push(Violation {
                rule: "generator".into(),
                witness: Witness::Time(t),
                message: if want {
                    "time is in the sequence but the generator state is absent".into()
                } else {
                    "generator state appears at a time outside the sequence".into()
                },
            });
        }
    }
    report.pass = report.violations.is_empty();
    report
}

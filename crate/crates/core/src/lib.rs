//! One-dimensional cellular automata with partial transition tables,
//! real-time sequence generation, local mappings between automata and the
//! exploration of compliant local simulations.

pub mod alphabet;
pub mod automaton;
pub mod diagram;
pub mod error;
pub mod explore;
pub mod handcraft;
pub mod localmap;
pub mod oracle;
pub mod par;
pub mod relation;
pub mod rtsg;
pub mod sequence;
pub mod supers;
pub mod table;

pub use alphabet::{Alphabet, StateId};
pub use automaton::{Automaton, Roles};
pub use diagram::{run_diagram, DiagramWindow};
pub use error::{Error, Result};
pub use handcraft::handcraft_script;
pub use localmap::{
    apply_mapping_to_window, build_simulated_ca, check_compliance, identity_mapping, induce_relation,
    is_local_simulation, ComplianceReport, LocalMapping,
};
pub use relation::{extract_relation, LocalRelation};
pub use rtsg::{check_candidate, verify_solution, CandidacyReport, SolutionReport};
pub use sequence::{builtin_sequence, SequenceSpec};
pub use supers::{collect_supers, collect_supers_saturated, SuperTransitions};
pub use table::{StateTable, Triple};

use std::sync::OnceLock;

use proptest::prelude::*;

use locasim_core::explore::canonical::canonical_key;
use locasim_core::explore::checkpoint::Reader;
use locasim_core::explore::eval::Evaluator;
use locasim_core::explore::{entry_choices, start_mapping};
use locasim_core::oracle::{enumerate_candidates, EnumerationSpace};
use locasim_core::*;

const SEED: &str = include_str!("../../../data/seed-6state.ca");

struct Fixture {
    seed: Automaton,
    sup: SuperTransitions,
    start: LocalMapping,
    choices: Vec<Vec<u8>>,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let seed = Automaton::parse(SEED).unwrap();
        let sup = collect_supers_saturated(&seed, 400, 100, 6400).unwrap();
        let start = start_mapping(&seed, seed.count_states()).unwrap();
        let choices = entry_choices(&start);
        Fixture { seed, sup, start, choices }
    })
}

/// A mapping obtained from the identity by `changes`, each reduced into the
/// allowed range of its entry.
fn modified(changes: &[(usize, usize)]) -> LocalMapping {
    let f = fixture();
    let mut m = f.start.clone();
    for &(i, v) in changes {
        let i = i % f.choices.len();
        let c = &f.choices[i];
        m.set_smap(m.domain().triple(i), StateId(c[v % c.len()])).unwrap();
    }
    m
}

fn values(m: &LocalMapping) -> Vec<u8> {
    m.values().iter().map(|s| s.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verification_is_prefix_monotone(t in 0u64..200, dt in 0u64..60) {
        let seed = &fixture().seed;
        let long = verify_solution(seed, &SequenceSpec::cube(), t + dt);
        let short = verify_solution(seed, &SequenceSpec::cube(), t);
        prop_assert!(!long.pass || short.pass);
    }

    #[test]
    fn incremental_admission_matches_full_recompute(
        base in prop::collection::vec((0usize..1000, 0usize..8), 0..6),
        change in prop::collection::vec((0usize..1000, 0usize..8), 1..4),
    ) {
        let f = fixture();
        let m = modified(&base);
        let eval = Evaluator::new(&m, &f.sup).unwrap();
        let mut vals = values(&m);
        let before = vals.clone();
        let mut counts = eval.counts(&vals);
        let snapshot = counts.clone();
        let changes: Vec<(usize, u8)> = change
            .iter()
            .map(|&(i, v)| {
                let i = i % f.choices.len();
                (i, f.choices[i][v % f.choices[i].len()])
            })
            .collect();
        let mut scratch = Vec::new();
        let fast = eval.probe(&mut counts, &mut vals, &changes, &mut scratch);
        prop_assert_eq!(&vals, &before);
        prop_assert_eq!(&counts, &snapshot);
        let mut next = before.clone();
        for &(i, v) in &changes {
            next[i] = v;
        }
        prop_assert_eq!(fast, eval.is_deterministic(&next));
    }

    #[test]
    fn evaluator_agrees_with_induced_relation(base in prop::collection::vec((0usize..1000, 0usize..8), 0..6)) {
        let f = fixture();
        let m = modified(&base);
        let eval = Evaluator::new(&m, &f.sup).unwrap();
        let (det, _) = is_local_simulation(&m, &f.sup).unwrap();
        prop_assert_eq!(det, eval.is_deterministic(&values(&m)));
        if det {
            let sim = build_simulated_ca(&m, &f.sup).unwrap();
            prop_assert_eq!(&eval.table(&values(&m)).unwrap(), sim.table());
        }
    }

    #[test]
    fn neighbours_stay_compliant(base in prop::collection::vec((0usize..1000, 0usize..8), 0..10)) {
        prop_assert!(check_compliance(&modified(&base)).pass);
    }

    #[test]
    fn induced_relation_matches_mapped_diagram(base in prop::collection::vec((0usize..1000, 0usize..8), 0..10), h in 4usize..40) {
        let f = fixture();
        let m = modified(&base);
        let sup = collect_supers(&f.seed, h, h).unwrap();
        // The harvest at `h` reads the diagram up to `h + 1`.
        let w = run_diagram(&f.seed, h + 1).unwrap();
        let mapped = apply_mapping_to_window(&m, &w).unwrap();
        prop_assert_eq!(induce_relation(&m, &sup).unwrap().inner(), extract_relation([&mapped]).inner());
    }

    #[test]
    fn canonical_key_ignores_free_relabelling(order in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let seed = &fixture().seed;
        let r = seed.roles();
        let mut perm: Vec<u8> = (0..seed.alphabet().len() as u8).collect();
        let free: Vec<u8> = (1..perm.len() as u8)
            .filter(|&s| ![r.boundary, r.quiescent, r.generator].contains(&StateId(s)))
            .collect();
        prop_assert_eq!(free.len(), 3);
        for (i, &old) in free.iter().enumerate() {
            perm[old as usize] = free[order[i]];
        }
        let relabelled = seed.permuted(&perm).unwrap();
        prop_assert_eq!(canonical_key(&relabelled), canonical_key(seed));
        prop_assert_eq!(
            verify_solution(&relabelled, &SequenceSpec::cube(), 130).pass,
            verify_solution(seed, &SequenceSpec::cube(), 130).pass
        );
    }

    #[test]
    fn candidacy_is_invariant_under_renaming(i in 0usize..8192, swap in any::<bool>()) {
        let space = EnumerationSpace { states: 2, allow_large: false };
        let ca = enumerate_candidates(space).unwrap().nth(i).unwrap();
        let perm: Vec<u8> = if swap { vec![0, 2, 1] } else { vec![0, 1, 2] };
        let renamed = ca.permuted(&perm).unwrap();
        prop_assert_eq!(check_candidate(&renamed).pass, check_candidate(&ca).pass);
        prop_assert_eq!(
            verify_solution(&renamed, &SequenceSpec::Linear { a: 2, b: 0 }, 32).pass,
            verify_solution(&ca, &SequenceSpec::Linear { a: 2, b: 0 }, 32).pass
        );
    }

    #[test]
    fn checkpoint_reader_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..64)) {
        let mut with_magic = b"LSIM\x01\0\0\0".to_vec();
        with_magic.extend_from_slice(&bytes);
        for buf in [&bytes, &with_magic] {
            if let Ok(mut r) = Reader::new(buf) {
                let _ = r.str();
                let _ = r.bytes();
                let _ = r.u64();
            }
        }
    }
}

#[test]
fn text_round_trips() {
    let f = fixture();
    assert_eq!(Automaton::parse(&f.seed.to_text()).unwrap(), f.seed);
    let m = modified(&[(5, 1), (17, 2)]);
    let back = LocalMapping::parse(m.source_arc().clone(), &m.to_text()).unwrap();
    assert_eq!(back, m);
}

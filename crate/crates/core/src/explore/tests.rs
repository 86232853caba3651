use super::*;
use crate::supers::collect_supers;

const COUNTER: &str = "\
states: Q B A
outside: *
boundary: B
quiescent: Q
generator: A
* * * -> *
* * B -> *
* B Q -> A
* A Q -> B
B Q Q -> Q
A Q Q -> Q
Q Q Q -> Q
* Q Q -> Q
";

fn setup(states: usize) -> (LocalMapping, SuperTransitions) {
    let ca = Automaton::parse(COUNTER).unwrap();
    let sup = collect_supers(&ca, 40, 10).unwrap();
    (start_mapping(&ca, states).unwrap(), sup)
}

fn cfg(workers: usize) -> ExploreConfig {
    ExploreConfig {
        verify: Some((SequenceSpec::Linear { a: 2, b: -1 }, 40)),
        workers,
        cross_check: true,
        sample_every: 1,
        ..ExploreConfig::default()
    }
}

fn collect(ex: &mut Explorer) -> (StopReason, Vec<SolutionRecord>) {
    let mut out = Vec::new();
    let stop = ex.run(|s| out.push(s.record())).unwrap();
    (stop, out)
}

#[test]
fn start_is_first_solution() {
    let (m, sup) = setup(3);
    let mut ex = Explorer::new(m, &sup, cfg(1)).unwrap();
    let (_, sols) = collect(&mut ex);
    assert_eq!(sols[0].index, 0);
    assert_eq!(sols[0].parent, None);
    assert_eq!(sols[0].transitions, 6);
    assert_eq!(sols[0].verified, Some(true));
}

#[test]
fn widened_targets_exhaust_and_verify() {
    let (m, sup) = setup(4);
    assert_eq!(m.targets().len(), 5);
    let mut ex = Explorer::new(m, &sup, cfg(1)).unwrap();
    let (stop, sols) = collect(&mut ex);
    assert_eq!(stop, StopReason::FrontierExhausted);
    assert!(sols.len() > 1);
    assert!(sols.iter().all(|s| s.verified == Some(true)));
    let st = ex.stats();
    assert_eq!(st.cross_check_mismatches, 0);
    assert_eq!(st.histogram_total(), sols.len() as u64);
    let keys: HashSet<&str> = sols.iter().map(|s| s.ca.as_str()).collect();
    assert_eq!(keys.len(), sols.len());
}

#[test]
fn worker_count_does_not_change_stream() {
    let (m, sup) = setup(4);
    let mut a = Explorer::new(m.clone(), &sup, cfg(1)).unwrap();
    let mut b = Explorer::new(m, &sup, ExploreConfig { batch_nodes: 3, ..cfg(4) }).unwrap();
    assert_eq!(collect(&mut a).1, collect(&mut b).1);
}

#[test]
fn checkpoint_resume_matches_uninterrupted() {
    let (m, sup) = setup(4);
    let mut full = Explorer::new(m.clone(), &sup, cfg(1)).unwrap();
    let (_, whole) = collect(&mut full);

    let mut first = Explorer::new(m.clone(), &sup, ExploreConfig { node_budget: 40, ..cfg(1) }).unwrap();
    let (stop, mut part) = collect(&mut first);
    assert_eq!(stop, StopReason::NodeBudget);
    let bytes = first.checkpoint();
    let mut second = Explorer::resume(m, &sup, cfg(2), &bytes).unwrap();
    let (_, rest) = collect(&mut second);
    part.extend(rest);
    assert_eq!(part, whole);
    assert_eq!(second.stats().histogram, full.stats().histogram);
}

#[test]
fn resume_rejects_other_configuration() {
    let (m, sup) = setup(4);
    let mut ex = Explorer::new(m.clone(), &sup, ExploreConfig { node_budget: 10, ..cfg(1) }).unwrap();
    collect(&mut ex);
    let bytes = ex.checkpoint();
    assert!(Explorer::resume(m.clone(), &sup, ExploreConfig { k: 1, ..cfg(1) }, &bytes).is_err());
    assert!(Explorer::resume(m, &sup, cfg(1), &bytes[..bytes.len() - 3]).is_err());
}

#[test]
fn random_extras_are_reproducible() {
    let (m, sup) = setup(4);
    for order in [ModOrder::ModifyThenAdmit, ModOrder::AdmitThenModify] {
        let c = ExploreConfig { k: 2, rng_seed: 9, order, node_budget: 400, ..cfg(1) };
        let mut a = Explorer::new(m.clone(), &sup, c.clone()).unwrap();
        let mut b = Explorer::new(m.clone(), &sup, ExploreConfig { workers: 3, ..c }).unwrap();
        let (_, sa) = collect(&mut a);
        assert_eq!(sa, collect(&mut b).1);
        assert!(sa.iter().all(|s| s.verified == Some(true)));
    }
}

#[test]
fn memory_budget_stops() {
    let (m, sup) = setup(4);
    let mut ex = Explorer::new(m, &sup, ExploreConfig { memory_budget: 1, ..cfg(1) }).unwrap();
    let (stop, sols) = collect(&mut ex);
    assert_eq!(stop, StopReason::MemoryBudget);
    assert_eq!(sols.len(), 1);
}

#[test]
fn choices_pin_quiescence_and_generator() {
    let (m, _) = setup(4);
    let ch = entry_choices(&m);
    let d = m.domain();
    let src = m.source();
    let q = src.roles().quiescent;
    let i = d.index((q, q, q)).unwrap();
    assert_eq!(ch[i].len(), 1);
    let g = d.index(src.triple("*", "B", "Q").unwrap()).unwrap();
    assert_eq!(ch[g], vec![m.target_roles().generator.0]);
    assert_eq!(neighbors(&m).len(), moves(&ch, &m.values().iter().map(|s| s.0).collect::<Vec<_>>()).len());
}

#[test]
fn start_must_fit() {
    let ca = Automaton::parse(COUNTER).unwrap();
    assert!(start_mapping(&ca, 2).is_err());
}

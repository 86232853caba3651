//! Breadth-first exploration of the compliant local simulations reachable
//! from a start mapping by single-entry modifications.
//!
//! Nodes are mappings over the fixed source domain. A node is expanded by
//! probing every allowed single-entry change (plus `k` random extra changes
//! when configured); deterministic candidates whose simulated automaton is
//! new up to role-preserving relabelling join the FIFO frontier and are
//! emitted as solutions.
//!
//! Expansion runs in parallel batches taken from the front of the frontier.
//! Results are merged strictly in frontier order and every budget check
//! happens between two expansions, so the emitted stream does not depend on
//! the worker count or batch size.

pub mod canonical;
pub mod checkpoint;
pub mod eval;
pub mod stats;

use std::collections::{HashSet, VecDeque};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, StateId};
use crate::automaton::{Automaton, Roles};
use crate::error::{Error, Result};
use crate::localmap::{check_compliance, identity_mapping, LocalMapping};
use crate::par::Pool;
use crate::rtsg::{check_candidate, verify_solution};
use crate::sequence::SequenceSpec;
use crate::supers::SuperTransitions;
use crate::table::StateTable;

use canonical::{canonical_table, CanonicalKey};
use checkpoint::{Reader, Writer};
use eval::Evaluator;
pub use stats::{ExplorationStats, GrowthSample, StopReason};

/// Where the `k` extra modifications sit relative to the admission test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModOrder {
    /// The single change and the extra changes are tested together.
    ModifyThenAdmit,
    /// The single change is tested alone; when admitted, the extra changes
    /// are applied on top and tested as a second candidate.
    AdmitThenModify,
}

#[derive(Clone, Debug)]
pub struct ExploreConfig {
    pub k: usize,
    /// Maximum number of candidate evaluations, checked between expansions.
    pub node_budget: u64,
    /// Bound on the estimated bytes held by the visited set and frontier.
    pub memory_budget: u64,
    pub rng_seed: u64,
    /// Re-verify every emission against this sequence up to this horizon.
    pub verify: Option<(SequenceSpec, u64)>,
    pub order: ModOrder,
    pub workers: usize,
    /// Frontier nodes per parallel batch; 0 picks `4 * workers`.
    pub batch_nodes: usize,
    /// Compare every incremental verdict with a full recomputation.
    pub cross_check: bool,
    /// Growth is sampled every this many expansions.
    pub sample_every: u64,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        ExploreConfig {
            k: 0,
            node_budget: 100_000,
            memory_budget: 4 << 30,
            rng_seed: 0,
            verify: Some((SequenceSpec::cube(), 130)),
            order: ModOrder::ModifyThenAdmit,
            workers: 1,
            batch_nodes: 0,
            cross_check: false,
            sample_every: 16,
        }
    }
}

/// One emitted solution.
#[derive(Clone, Debug)]
pub struct Solution {
    pub index: u64,
    pub parent: Option<u64>,
    /// Canonical representative of the simulated automaton.
    pub ca: Automaton,
    pub transitions: usize,
    pub used_states: usize,
    /// Mapping values over the source domain.
    pub values: Vec<u8>,
    pub verified: Option<bool>,
}

/// Line-oriented record of a solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub index: u64,
    pub parent: Option<u64>,
    pub states: usize,
    pub transitions: usize,
    pub used_states: usize,
    pub verified: Option<bool>,
    pub ca: String,
}

impl Solution {
    pub fn record(&self) -> SolutionRecord {
        SolutionRecord {
            index: self.index,
            parent: self.parent,
            states: self.ca.count_states(),
            transitions: self.transitions,
            used_states: self.used_states,
            verified: self.verified,
            ca: self.ca.to_text(),
        }
    }
}

/// Values each entry may take: pinned entries keep their value, entries
/// with an outside left neighbour keep the generator iff the source yields
/// its generator there, every other entry ranges over the non-outside targets.
pub fn entry_choices(m: &LocalMapping) -> Vec<Vec<u8>> {
    let src = m.source();
    let sr = src.roles();
    let tr = m.target_roles();
    let q = sr.quiescent;
    let inner: Vec<u8> = m.targets().inner_states().map(|s| s.0).collect();
    m.domain()
        .triples()
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            if t == (q, q, q) || t == (StateId::OUTSIDE, q, q) {
                vec![m.values()[i].0]
            } else if t.0 == StateId::OUTSIDE {
                if src.table().get(t) == Some(sr.generator) {
                    vec![tr.generator.0]
                } else {
                    inner.iter().copied().filter(|&v| v != tr.generator.0).collect()
                }
            } else {
                inner.clone()
            }
        })
        .collect()
}

fn moves(choices: &[Vec<u8>], values: &[u8]) -> Vec<(usize, u8)> {
    let mut out = Vec::new();
    for (i, c) in choices.iter().enumerate() {
        for &v in c {
            if v != values[i] {
                out.push((i, v));
            }
        }
    }
    out
}

/// Every mapping at distance one from `m` within the allowed ranges.
pub fn neighbors(m: &LocalMapping) -> Vec<LocalMapping> {
    let choices = entry_choices(m);
    let values: Vec<u8> = m.values().iter().map(|s| s.0).collect();
    moves(&choices, &values)
        .into_iter()
        .map(|(i, v)| {
            let mut n = m.clone();
            n.set_smap(m.domain().triple(i), StateId(v)).expect("entry in domain");
            n
        })
        .collect()
}

/// The identity mapping of `ca`, with the target set widened to `states`
/// non-outside states by appending fresh names.
pub fn start_mapping(ca: &Automaton, states: usize) -> Result<LocalMapping> {
    let id = identity_mapping(ca);
    let have = ca.count_states();
    if states < have {
        return Err(Error::Config(format!("the start automaton needs {have} states, {states} requested")));
    }
    if states == have {
        return Ok(id);
    }
    let mut names: Vec<String> = ca.alphabet().names()[1..].to_vec();
    let mut i = 1;
    while names.len() < states {
        let cand = format!("N{i}");
        if !names.contains(&cand) {
            names.push(cand);
        }
        i += 1;
    }
    let targets = Alphabet::new(&names)?;
    LocalMapping::from_parts(id.source_arc().clone(), targets, ca.roles(), id.zmap().clone(), id.values().to_vec())
}

fn used_states(t: &StateTable) -> usize {
    let mut seen = [false; 256];
    for ((l, m, r), v) in t.iter() {
        for s in [l, m, r, v] {
            seen[s.index()] = true;
        }
    }
    seen[1..].iter().filter(|&&b| b).count()
}

#[derive(Clone, Debug)]
struct Node {
    serial: u64,
    parent: Option<u64>,
    values: Vec<u8>,
}

struct Candidate {
    values: Vec<u8>,
    key: CanonicalKey,
    table: StateTable,
    perm: Vec<u8>,
}

struct Expansion {
    evaluations: u64,
    admitted: Vec<Candidate>,
    mismatches: u64,
}

const KEY_OVERHEAD: u64 = 48;
const NODE_OVERHEAD: u64 = 56;

pub struct Explorer {
    cfg: ExploreConfig,
    start: LocalMapping,
    eval: Evaluator,
    choices: Vec<Vec<u8>>,
    free: Vec<usize>,
    targets: Alphabet,
    roles: Roles,
    frontier: VecDeque<Node>,
    visited: HashSet<CanonicalKey>,
    memory: u64,
    next_serial: u64,
    started: bool,
    stats: ExplorationStats,
    pool: Pool,
    fingerprint: String,
}

impl Explorer {
    /// Prepares a run from `start`, which must be a compliant local simulation.
    pub fn new(start: LocalMapping, sup: &SuperTransitions, cfg: ExploreConfig) -> Result<Self> {
        let report = check_compliance(&start);
        if !report.pass {
            return Err(Error::NonCompliant("the start mapping violates a compliance condition".into()));
        }
        let eval = Evaluator::new(&start, sup)?;
        let values: Vec<u8> = start.values().iter().map(|s| s.0).collect();
        if !eval.is_deterministic(&values) {
            return Err(Error::NonDeterministic(eval.counts(&values).conflicts() as usize));
        }
        let choices = entry_choices(&start);
        let free = (0..choices.len()).filter(|&i| choices[i].len() > 1).collect();
        let fingerprint = format!(
            "{}\n{}\nk={} order={:?} seed={} records={}",
            start.source().to_text(),
            start.to_text(),
            cfg.k,
            cfg.order,
            cfg.rng_seed,
            eval.records()
        );
        Ok(Explorer {
            pool: Pool::new(cfg.workers.max(1)),
            targets: start.targets().clone(),
            roles: start.target_roles(),
            cfg,
            start,
            eval,
            choices,
            free,
            frontier: VecDeque::new(),
            visited: HashSet::new(),
            memory: 0,
            next_serial: 0,
            started: false,
            stats: ExplorationStats::default(),
            fingerprint,
        })
    }

    pub fn stats(&self) -> &ExplorationStats {
        &self.stats
    }

    pub fn config(&self) -> &ExploreConfig {
        &self.cfg
    }

    pub fn set_node_budget(&mut self, budget: u64) {
        self.cfg.node_budget = budget;
    }

    pub fn visited_len(&self) -> usize {
        self.visited.len()
    }

    pub fn frontier_len(&self) -> usize {
        self.frontier.len()
    }

    /// Entries with more than one allowed value.
    pub fn free_entries(&self) -> usize {
        self.free.len()
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.eval
    }

    pub fn start_mapping(&self) -> &LocalMapping {
        &self.start
    }

    fn cost(&self, node: &Node) -> u64 {
        moves(&self.choices, &node.values).len() as u64
    }

    fn extras(&self, rng: &mut ChaCha8Rng, base: &[u8], first: (usize, u8)) -> Vec<(usize, u8)> {
        let mut changes = vec![first];
        if self.free.is_empty() {
            return changes;
        }
        for _ in 0..self.cfg.k {
            let j = self.free[rng.gen_range(0..self.free.len())];
            let cur = changes.iter().rev().find(|c| c.0 == j).map_or(base[j], |c| c.1);
            let opts: Vec<u8> = self.choices[j].iter().copied().filter(|&v| v != cur).collect();
            if opts.is_empty() {
                continue;
            }
            changes.push((j, opts[rng.gen_range(0..opts.len())]));
        }
        changes
    }

    fn expand(&self, node: &Node) -> Expansion {
        let mut values = node.values.clone();
        let mut counts = self.eval.counts(&values);
        let mut scratch = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.rng_seed);
        rng.set_stream(node.serial);
        let mut out = Expansion { evaluations: 0, admitted: Vec::new(), mismatches: 0 };
        let mut test = |changes: &[(usize, u8)], values: &mut Vec<u8>, out: &mut Expansion| {
            let ok = self.eval.probe(&mut counts, values, changes, &mut scratch);
            if !ok && !self.cfg.cross_check {
                return;
            }
            let mut next = values.clone();
            for &(i, v) in changes {
                next[i] = v;
            }
            let table = self.eval.table(&next);
            if ok != table.is_some() {
                out.mismatches += 1;
            }
            if let (true, Some(table)) = (ok, table) {
                let (key, perm) = canonical_table(&table, self.roles);
                out.admitted.push(Candidate { values: next, key, table, perm });
            }
        };
        for (i, v) in moves(&self.choices, &node.values) {
            out.evaluations += 1;
            match (self.cfg.order, self.cfg.k) {
                (_, 0) => test(&[(i, v)], &mut values, &mut out),
                (ModOrder::ModifyThenAdmit, _) => {
                    let changes = self.extras(&mut rng, &node.values, (i, v));
                    test(&changes, &mut values, &mut out);
                }
                (ModOrder::AdmitThenModify, _) => {
                    let before = out.admitted.len();
                    test(&[(i, v)], &mut values, &mut out);
                    let changes = self.extras(&mut rng, &node.values, (i, v));
                    if out.admitted.len() > before {
                        test(&changes, &mut values, &mut out);
                    }
                }
            }
        }
        out
    }

    fn make_solution(&self, c: Candidate, index: u64, parent: Option<u64>) -> Solution {
        let transitions = c.table.inner_entries().count();
        let used = used_states(&c.table);
        let ca = Automaton::new(self.targets.clone(), self.roles, c.table)
            .and_then(|a| a.permuted(&c.perm))
            .expect("targets and roles validated at start");
        Solution { index, parent, ca, transitions, used_states: used, values: c.values, verified: None }
    }

    fn admit(&mut self, c: Candidate, parent: Option<u64>, fresh: &mut Vec<Solution>) {
        if self.visited.contains(&c.key) {
            return;
        }
        self.memory += c.key.0.len() as u64 + KEY_OVERHEAD + c.values.len() as u64 + NODE_OVERHEAD;
        self.visited.insert(c.key.clone());
        let index = self.next_serial;
        self.next_serial += 1;
        self.frontier.push_back(Node { serial: index, parent, values: c.values.clone() });
        fresh.push(self.make_solution(c, index, parent));
    }

    fn verify_and_emit<F: FnMut(&Solution)>(&mut self, mut fresh: Vec<Solution>, sink: &mut F) {
        if let Some((seq, h)) = &self.cfg.verify {
            let verdicts = self.pool.map(&fresh, |s| check_candidate(&s.ca).pass && verify_solution(&s.ca, seq, *h).pass);
            for (s, ok) in fresh.iter_mut().zip(verdicts) {
                s.verified = Some(ok);
                self.stats.verified += 1;
                if !ok {
                    self.stats.verification_failures += 1;
                }
            }
        }
        for s in &fresh {
            self.stats.record(s.index, s.transitions, s.used_states, || s.ca.to_text());
            sink(s);
        }
    }

    fn memory_exceeded(&self) -> bool {
        self.memory > self.cfg.memory_budget
    }

    /// Runs until the frontier empties or a budget is hit. Emits each new
    /// solution, the start automaton first, through `sink`.
    pub fn run<F: FnMut(&Solution)>(&mut self, mut sink: F) -> Result<StopReason> {
        let clock = Instant::now();
        if !self.started {
            self.started = true;
            let values: Vec<u8> = self.start.values().iter().map(|s| s.0).collect();
            let table = self.eval.table(&values).ok_or(Error::NonDeterministic(0))?;
            let (key, perm) = canonical_table(&table, self.roles);
            let mut fresh = Vec::new();
            self.admit(Candidate { values, key, table, perm }, None, &mut fresh);
            self.verify_and_emit(fresh, &mut sink);
        }
        let batch_nodes = if self.cfg.batch_nodes == 0 { 4 * self.pool.workers() } else { self.cfg.batch_nodes };
        let stop = loop {
            if self.frontier.is_empty() {
                break StopReason::FrontierExhausted;
            }
            if self.stats.evaluations >= self.cfg.node_budget {
                break StopReason::NodeBudget;
            }
            if self.memory_exceeded() {
                break StopReason::MemoryBudget;
            }
            let mut batch = Vec::new();
            let mut planned = self.stats.evaluations;
            while batch.len() < batch_nodes && planned < self.cfg.node_budget {
                let Some(node) = self.frontier.pop_front() else { break };
                planned += self.cost(&node);
                batch.push(node);
            }
            let expansions = self.pool.map(&batch, |n| self.expand(n));
            let mut fresh = Vec::new();
            let mut rest = batch.into_iter().zip(expansions);
            let mut first = true;
            while let Some((node, exp)) = rest.next() {
                if !first && self.memory_exceeded() {
                    let mut back: Vec<Node> = std::iter::once(node).chain(rest.map(|(n, _)| n)).collect();
                    while let Some(n) = back.pop() {
                        self.frontier.push_front(n);
                    }
                    break;
                }
                first = false;
                self.memory -= node.values.len() as u64 + NODE_OVERHEAD;
                self.stats.evaluations += exp.evaluations;
                self.stats.expansions += 1;
                self.stats.admitted_raw += exp.admitted.len() as u64;
                self.stats.cross_check_mismatches += exp.mismatches;
                for c in exp.admitted {
                    self.admit(c, Some(node.serial), &mut fresh);
                }
                if self.stats.expansions.is_multiple_of(self.cfg.sample_every.max(1)) {
                    self.stats.growth.push(GrowthSample {
                        expansions: self.stats.expansions,
                        evaluations: self.stats.evaluations,
                        visited: self.visited.len() as u64,
                    });
                }
            }
            self.verify_and_emit(fresh, &mut sink);
        };
        self.stats.stop = Some(stop);
        self.stats.frontier = self.frontier.len() as u64;
        self.stats.elapsed_ms += clock.elapsed().as_millis() as u64;
        Ok(stop)
    }

    /// Serialises the frontier, the visited keys and the counters.
    pub fn checkpoint(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.str(&self.fingerprint);
        w.u8(self.started as u8);
        w.u64(self.next_serial);
        w.u64(self.memory);
        w.u64(self.frontier.len() as u64);
        for n in &self.frontier {
            w.u64(n.serial);
            w.opt_u64(n.parent);
            w.bytes(&n.values);
        }
        let mut keys: Vec<&CanonicalKey> = self.visited.iter().collect();
        keys.sort();
        w.u64(keys.len() as u64);
        for k in keys {
            w.bytes(&k.0);
        }
        let s = &self.stats;
        for v in [s.evaluations, s.expansions, s.admitted_raw, s.distinct, s.verified, s.verification_failures, s.cross_check_mismatches, s.elapsed_ms] {
            w.u64(v);
        }
        w.u64(s.histogram.len() as u64);
        for (&k, &v) in &s.histogram {
            w.u64(k as u64);
            w.u64(v);
        }
        w.opt_u64(s.best_transitions.map(|b| b as u64));
        w.opt_u64(s.best_index);
        w.str(s.best_ca.as_deref().unwrap_or(""));
        w.u64(s.best_trajectory.len() as u64);
        for &(i, t) in &s.best_trajectory {
            w.u64(i);
            w.u64(t as u64);
        }
        w.u64(s.growth.len() as u64);
        for g in &s.growth {
            w.u64(g.expansions);
            w.u64(g.evaluations);
            w.u64(g.visited);
        }
        w.u64(s.four_state.len() as u64);
        for &i in &s.four_state {
            w.u64(i);
        }
        w.finish()
    }

    /// Rebuilds a run from a checkpoint written by an explorer over the same
    /// start mapping, harvest, `k`, order and random seed. Budgets, workers
    /// and verification settings come from `cfg`.
    pub fn resume(start: LocalMapping, sup: &SuperTransitions, cfg: ExploreConfig, bytes: &[u8]) -> Result<Self> {
        let mut ex = Explorer::new(start, sup, cfg)?;
        let mut r = Reader::new(bytes)?;
        if r.str()? != ex.fingerprint {
            return Err(Error::Checkpoint("checkpoint belongs to a different start mapping or configuration".into()));
        }
        ex.started = r.u8()? != 0;
        ex.next_serial = r.u64()?;
        ex.memory = r.u64()?;
        let width = ex.choices.len();
        for _ in 0..r.len()? {
            let serial = r.u64()?;
            let parent = r.opt_u64()?;
            let values = r.bytes()?;
            if values.len() != width || values.iter().any(|&v| v as usize >= ex.targets.len()) {
                return Err(Error::Checkpoint("frontier node does not fit the mapping domain".into()));
            }
            ex.frontier.push_back(Node { serial, parent, values });
        }
        for _ in 0..r.len()? {
            ex.visited.insert(CanonicalKey(r.bytes()?));
        }
        let s = &mut ex.stats;
        for slot in [
            &mut s.evaluations,
            &mut s.expansions,
            &mut s.admitted_raw,
            &mut s.distinct,
            &mut s.verified,
            &mut s.verification_failures,
            &mut s.cross_check_mismatches,
            &mut s.elapsed_ms,
        ] {
            *slot = r.u64()?;
        }
        for _ in 0..r.len()? {
            let k = r.u64()? as usize;
            s.histogram.insert(k, r.u64()?);
        }
        s.best_transitions = r.opt_u64()?.map(|b| b as usize);
        s.best_index = r.opt_u64()?;
        s.best_ca = Some(r.str()?).filter(|t| !t.is_empty());
        for _ in 0..r.len()? {
            let i = r.u64()?;
            s.best_trajectory.push((i, r.u64()? as usize));
        }
        for _ in 0..r.len()? {
            s.growth.push(GrowthSample { expansions: r.u64()?, evaluations: r.u64()?, visited: r.u64()? });
        }
        for _ in 0..r.len()? {
            s.four_state.push(r.u64()?);
        }
        r.finish()?;
        s.frontier = ex.frontier.len() as u64;
        Ok(ex)
    }
}

#[cfg(test)]
mod tests;

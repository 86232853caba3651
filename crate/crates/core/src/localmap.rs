//! Local mappings `ℓ = (ℓ_z, ℓ_s)` from a source automaton onto a target
//! state set, their induced relations, and the compliance conditions that
//! make the induced automaton solve the same sequence problem.
//!
//! Mapping file format:
//!
//! ```text
//! targets: Q B C D E
//! boundary: B          # optional when a target shares the source role's name
//! quiescent: Q
//! generator: D
//! zmap: B -> B
//! smap: * B Q -> D
//! ```
//!
//! `smap` entries whose middle state is `*` are implicit and always map to
//! the target `*`. A patch file holds only `zmap`/`smap` lines and overrides
//! the matching lines of a base mapping.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, StateId, OUTSIDE_NAME};
use crate::automaton::{Automaton, Roles};
use crate::diagram::DiagramWindow;
use crate::error::{Error, Result};
use crate::relation::{Conflict, LocalRelation};
use crate::supers::SuperTransitions;
use crate::table::{StateTable, Triple};

/// The inner entries of a source table, indexed densely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    n: usize,
    triples: Vec<Triple>,
    slots: Vec<u32>,
}

const NO_SLOT: u32 = u32::MAX;

impl Domain {
    pub fn of(table: &StateTable) -> Self {
        let n = table.alphabet_len();
        let triples: Vec<Triple> = table.inner_entries().map(|(t, _)| t).collect();
        let mut slots = vec![NO_SLOT; n * n * n];
        for (i, &(l, m, r)) in triples.iter().enumerate() {
            slots[(l.index() * n + m.index()) * n + r.index()] = i as u32;
        }
        Domain { n, triples, slots }
    }

    #[inline]
    pub fn index(&self, (l, m, r): Triple) -> Option<usize> {
        let (l, m, r) = (l.index(), m.index(), r.index());
        if l >= self.n || m >= self.n || r >= self.n {
            return None;
        }
        match self.slots[(l * self.n + m) * self.n + r] {
            NO_SLOT => None,
            i => Some(i as usize),
        }
    }

    pub fn triple(&self, i: usize) -> Triple {
        self.triples[i]
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalMapping {
    source: Arc<Automaton>,
    domain: Arc<Domain>,
    targets: Alphabet,
    roles: Roles,
    zmap: BTreeMap<StateId, StateId>,
    values: Vec<StateId>,
}

/// States of the source initial configuration: `*`, `B` and `Q`.
fn initial_states(ca: &Automaton) -> Vec<StateId> {
    let r = ca.roles();
    let mut v = vec![r.outside, r.boundary, r.quiescent];
    v.sort();
    v.dedup();
    v
}

impl LocalMapping {
    /// Builds a mapping from explicit parts. `values` follows the order of
    /// the source table's inner entries.
    pub fn from_parts(
        source: Arc<Automaton>,
        targets: Alphabet,
        roles: Roles,
        zmap: BTreeMap<StateId, StateId>,
        values: Vec<StateId>,
    ) -> Result<Self> {
        let domain = Arc::new(Domain::of(source.table()));
        Self::with_domain(source, domain, targets, roles, zmap, values)
    }

    pub(crate) fn with_domain(
        source: Arc<Automaton>,
        domain: Arc<Domain>,
        targets: Alphabet,
        roles: Roles,
        zmap: BTreeMap<StateId, StateId>,
        values: Vec<StateId>,
    ) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::InvalidMapping(format!(
                "expected {} smap values, got {}",
                domain.len(),
                values.len()
            )));
        }
        let n = targets.len();
        if values.iter().chain(zmap.values()).any(|v| v.index() >= n) {
            return Err(Error::InvalidMapping("value outside the target alphabet".into()));
        }
        let want = initial_states(&source);
        if zmap.keys().copied().collect::<Vec<_>>() != want {
            return Err(Error::InvalidMapping("zmap must cover exactly the initial states".into()));
        }
        // Validates the target roles.
        Automaton::new(targets.clone(), roles, StateTable::new(n))
            .map_err(|e| Error::InvalidMapping(e.to_string()))?;
        Ok(LocalMapping { source, domain, targets, roles, zmap, values })
    }

    pub fn source(&self) -> &Automaton {
        &self.source
    }

    pub fn source_arc(&self) -> &Arc<Automaton> {
        &self.source
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn targets(&self) -> &Alphabet {
        &self.targets
    }

    pub fn target_roles(&self) -> Roles {
        self.roles
    }

    pub fn zmap(&self) -> &BTreeMap<StateId, StateId> {
        &self.zmap
    }

    pub fn values(&self) -> &[StateId] {
        &self.values
    }

    pub fn zmap_value(&self, s: StateId) -> Option<StateId> {
        self.zmap.get(&s).copied()
    }

    /// `ℓ_s(t)`. Triples with an outside middle map to the target outside state.
    #[inline]
    pub fn smap_value(&self, t: Triple) -> Option<StateId> {
        if t.1 == StateId::OUTSIDE {
            return Some(StateId::OUTSIDE);
        }
        self.domain.index(t).map(|i| self.values[i])
    }

    pub fn set_smap(&mut self, t: Triple, v: StateId) -> Result<StateId> {
        let i = self.domain.index(t).ok_or_else(|| Error::DomainMiss(self.source.triple_names(t)))?;
        if v.index() >= self.targets.len() {
            return Err(Error::InvalidMapping("value outside the target alphabet".into()));
        }
        Ok(std::mem::replace(&mut self.values[i], v))
    }

    pub fn set_values(&mut self, values: Vec<StateId>) {
        assert_eq!(values.len(), self.values.len());
        self.values = values;
    }

    fn miss(&self, t: Triple) -> Error {
        Error::DomainMiss(self.source.triple_names(t))
    }

    /// Parses a mapping file for `source`.
    pub fn parse(source: Arc<Automaton>, text: &str) -> Result<Self> {
        let mut targets: Option<Alphabet> = None;
        let mut role_names: [Option<String>; 3] = [None, None, None];
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            let (key, rest) = line.split_once(':').ok_or_else(|| perr("expected `key: value`".into()))?;
            match key.trim() {
                "targets" => {
                    let toks: Vec<&str> = rest.split_whitespace().collect();
                    targets = Some(Alphabet::new(&toks).map_err(|e| perr(e.to_string()))?);
                }
                k @ ("boundary" | "quiescent" | "generator") => {
                    let slot = ["boundary", "quiescent", "generator"].iter().position(|x| *x == k).unwrap_or(0);
                    role_names[slot] = Some(rest.trim().to_string());
                }
                "outside" => {
                    if rest.trim() != OUTSIDE_NAME {
                        return Err(perr("the outside state must be named `*`".into()));
                    }
                }
                "zmap" | "smap" => lines.push((line_no, line.to_string())),
                other => return Err(perr(format!("unknown key `{other}`"))),
            }
        }
        let targets = targets.ok_or(Error::Parse { line: 0, msg: "missing `targets` line".into() })?;
        let src_roles = source.roles();
        let src_names = [src_roles.boundary, src_roles.quiescent, src_roles.generator].map(|s| source.name(s).to_string());
        let mut ids = [StateId::OUTSIDE; 3];
        for slot in 0..3 {
            let name = role_names[slot].clone().unwrap_or_else(|| src_names[slot].clone());
            ids[slot] = targets.id(&name).ok_or(Error::Parse {
                line: 0,
                msg: format!("target role state `{name}` is not a target"),
            })?;
        }
        let roles = Roles { outside: StateId::OUTSIDE, boundary: ids[0], quiescent: ids[1], generator: ids[2] };
        let mut zmap = BTreeMap::new();
        let domain = Arc::new(Domain::of(source.table()));
        let mut values: Vec<Option<StateId>> = vec![None; domain.len()];
        apply_lines(&source, &domain, &targets, &lines, &mut zmap, &mut values, false)?;
        if let Some(i) = values.iter().position(Option::is_none) {
            return Err(Error::DomainMiss(source.triple_names(domain.triple(i))));
        }
        let values = values.into_iter().map(|v| v.unwrap_or(StateId::OUTSIDE)).collect();
        Self::with_domain(source, domain, targets, roles, zmap, values)
    }

    /// Applies the `zmap`/`smap` lines of a patch file on top of `self`.
    pub fn apply_patch(&mut self, text: &str) -> Result<usize> {
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once(':').map(|(k, _)| k.trim()) {
                Some("zmap" | "smap") => lines.push((i + 1, line.to_string())),
                _ => {
                    return Err(Error::Parse { line: i + 1, msg: "patch files hold only `zmap`/`smap` lines".into() })
                }
            }
        }
        let mut values: Vec<Option<StateId>> = self.values.iter().copied().map(Some).collect();
        let mut zmap = self.zmap.clone();
        apply_lines(&self.source, &self.domain, &self.targets, &lines, &mut zmap, &mut values, true)?;
        self.zmap = zmap;
        self.values = values.into_iter().map(|v| v.unwrap_or(StateId::OUTSIDE)).collect();
        Ok(lines.len())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self.targets.inner_states().map(|s| self.targets.name(s)).collect();
        let _ = writeln!(out, "targets: {}", names.join(" "));
        let _ = writeln!(out, "boundary: {}", self.targets.name(self.roles.boundary));
        let _ = writeln!(out, "quiescent: {}", self.targets.name(self.roles.quiescent));
        let _ = writeln!(out, "generator: {}", self.targets.name(self.roles.generator));
        for (s, v) in &self.zmap {
            let _ = writeln!(out, "zmap: {} -> {}", self.source.name(*s), self.targets.name(*v));
        }
        for (i, &t) in self.domain.triples().iter().enumerate() {
            let (l, m, r) = self.source.triple_names(t);
            let _ = writeln!(out, "smap: {l} {m} {r} -> {}", self.targets.name(self.values[i]));
        }
        out
    }

    /// An automaton over the target alphabet with the target roles and an empty table.
    pub fn target_shell(&self) -> Automaton {
        Automaton::new(self.targets.clone(), self.roles, StateTable::new(self.targets.len()))
            .expect("roles validated at construction")
    }
}

fn apply_lines(
    source: &Automaton,
    domain: &Domain,
    targets: &Alphabet,
    lines: &[(usize, String)],
    zmap: &mut BTreeMap<StateId, StateId>,
    values: &mut [Option<StateId>],
    overriding: bool,
) -> Result<()> {
    let initial = initial_states(source);
    for (line, text) in lines {
        let line = *line;
        let perr = |msg: String| Error::Parse { line, msg };
        let (key, rest) = text.split_once(':').unwrap_or(("", text));
        let (lhs, rhs) = rest.split_once("->").ok_or_else(|| perr("expected `->`".into()))?;
        let dst = targets
            .id(rhs.trim())
            .ok_or_else(|| perr(format!("unknown target state `{}`", rhs.trim())))?;
        let src: Vec<&str> = lhs.split_whitespace().collect();
        let look = |s: &str| source.state(s).ok_or_else(|| perr(format!("unknown source state `{s}`")));
        match key.trim() {
            "zmap" => {
                if src.len() != 1 {
                    return Err(perr("zmap takes one source state".into()));
                }
                let s = look(src[0])?;
                if !initial.contains(&s) {
                    return Err(perr(format!("`{}` does not occur in the initial configuration", src[0])));
                }
                if zmap.insert(s, dst).is_some() && !overriding {
                    return Err(perr(format!("duplicate zmap for `{}`", src[0])));
                }
            }
            _ => {
                if src.len() != 3 {
                    return Err(perr("smap takes three source states".into()));
                }
                let t = (look(src[0])?, look(src[1])?, look(src[2])?);
                if t.1 == StateId::OUTSIDE {
                    if dst != StateId::OUTSIDE {
                        return Err(perr("entries with an outside middle map to `*`".into()));
                    }
                    continue;
                }
                let i = domain.index(t).ok_or_else(|| perr("triple is not in the source table".into()))?;
                if values[i].replace(dst).is_some() && !overriding {
                    return Err(perr("duplicate smap entry".into()));
                }
            }
        }
    }
    Ok(())
}

/// The mapping given by the source table itself; its simulated automaton is
/// the source again.
pub fn identity_mapping(ca: &Automaton) -> LocalMapping {
    let source = Arc::new(ca.clone());
    let zmap = initial_states(ca).into_iter().map(|s| (s, s)).collect();
    let values = ca.table().inner_entries().map(|(_, v)| v).collect();
    LocalMapping::from_parts(source, ca.alphabet().clone(), ca.roles(), zmap, values)
        .expect("identity mapping is well formed")
}

/// Applies the mapping cell by cell: row 0 through `ℓ_z`, row `t` through
/// `ℓ_s` of the source triples at `t-1`. The fill columns are mapped the
/// same way, so the result describes the full mapped rows.
pub fn apply_mapping_to_window(m: &LocalMapping, w: &DiagramWindow) -> Result<DiagramWindow> {
    let zrow: Vec<StateId> = w
        .row(0)
        .iter()
        .map(|&s| m.zmap_value(s).ok_or_else(|| m.miss((s, s, s))))
        .collect::<Result<_>>()?;
    let z = |s: StateId| m.zmap_value(s).ok_or_else(|| m.miss((s, s, s)));
    let mut rows = vec![zrow];
    let mut left = vec![z(w.get(0, 0))?];
    let mut right = vec![z(w.get(0, w.width() as i64 + 1))?];
    let s = |t: Triple| m.smap_value(t).ok_or_else(|| m.miss(t));
    for t in 1..=w.horizon() {
        let row = (1..=w.width() as i64).map(|p| s(w.triple(t - 1, p))).collect::<Result<Vec<_>>>()?;
        rows.push(row);
        left.push(s(w.triple(t - 1, 0))?);
        right.push(s(w.triple(t - 1, w.width() as i64 + 1))?);
    }
    Ok(DiagramWindow::from_rows(rows, left, right))
}

/// Relation of the family associated with `m`, computed from the harvested
/// super-local transitions.
pub fn induce_relation(m: &LocalMapping, sup: &SuperTransitions) -> Result<LocalRelation> {
    let mut rel = LocalRelation::new();
    let z = |s: StateId| m.zmap_value(s).ok_or_else(|| m.miss((s, s, s)));
    let s = |t: Triple| m.smap_value(t).ok_or_else(|| m.miss(t));
    for &(a, b, c) in &sup.initial_triples {
        rel.insert((z(a)?, z(b)?, z(c)?), s((a, b, c))?);
    }
    for (q, r) in &sup.quints {
        let key = (s((q[0], q[1], q[2]))?, s((q[1], q[2], q[3]))?, s((q[2], q[3], q[4]))?);
        rel.insert(key, s((r[0], r[1], r[2]))?);
    }
    Ok(rel)
}

/// Determinism of the induced relation, with the conflicting triples.
pub fn is_local_simulation(m: &LocalMapping, sup: &SuperTransitions) -> Result<(bool, Vec<Conflict>)> {
    Ok(induce_relation(m, sup)?.is_deterministic())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: u8,
    pub pass: bool,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub pass: bool,
    pub conditions: Vec<ConditionReport>,
}

impl ComplianceReport {
    pub fn condition(&self, c: u8) -> &ConditionReport {
        &self.conditions[c as usize]
    }
}

/// Checks the four compliance conditions:
/// (0) `ℓ_z` sends `*`, `B`, `Q` to their target counterparts;
/// (1) `ℓ_s` yields `*` exactly on outside-middle triples;
/// (2) on triples with an outside left neighbour, `ℓ_s` yields the target
///     generator exactly where the source table yields the source generator;
/// (3) `ℓ_s(Q,Q,Q) = ℓ_s(*,Q,Q) = Q`.
pub fn check_compliance(m: &LocalMapping) -> ComplianceReport {
    let src = m.source();
    let sr = src.roles();
    let tr = m.target_roles();
    let name = |t: Triple| {
        let (l, mm, r) = src.triple_names(t);
        format!("({l} {mm} {r})")
    };
    let tname = |s: StateId| m.targets().name(s).to_string();
    let mut w: [Vec<String>; 4] = Default::default();

    for (s, want) in [(sr.outside, tr.outside), (sr.boundary, tr.boundary), (sr.quiescent, tr.quiescent)] {
        match m.zmap_value(s) {
            Some(v) if v == want => {}
            other => w[0].push(format!(
                "zmap {} -> {} (expected {})",
                src.name(s),
                other.map_or("nothing".to_string(), tname),
                tname(want)
            )),
        }
    }
    for (i, &t) in m.domain().triples().iter().enumerate() {
        let v = m.values()[i];
        if v == StateId::OUTSIDE {
            w[1].push(format!("{} -> *", name(t)));
        }
        if t.0 == StateId::OUTSIDE {
            let src_gen = src.table().get(t) == Some(sr.generator);
            if (v == tr.generator) != src_gen {
                w[2].push(format!(
                    "{} -> {} while the source yields {}",
                    name(t),
                    tname(v),
                    src.table().get(t).map_or("nothing", |s| src.name(s))
                ));
            }
        }
    }
    let q = sr.quiescent;
    for t in [(q, q, q), (sr.outside, q, q)] {
        match m.smap_value(t) {
            Some(v) if v == tr.quiescent => {}
            Some(v) => w[3].push(format!("{} -> {}", name(t), tname(v))),
            None => w[3].push(format!("{} has no value", name(t))),
        }
    }
    let conditions: Vec<ConditionReport> = w
        .into_iter()
        .enumerate()
        .map(|(c, witnesses)| ConditionReport { condition: c as u8, pass: witnesses.is_empty(), witnesses })
        .collect();
    ComplianceReport { pass: conditions.iter().all(|c| c.pass), conditions }
}

/// The automaton associated with the family of `m`: target alphabet and
/// roles, table equal to the induced relation.
pub fn build_simulated_ca(m: &LocalMapping, sup: &SuperTransitions) -> Result<Automaton> {
    let report = check_compliance(m);
    if !report.pass {
        let first = report.conditions.iter().find(|c| !c.pass).expect("a failing condition");
        return Err(Error::NonCompliant(format!(
            "condition ({}) fails: {}",
            first.condition,
            first.witnesses.first().cloned().unwrap_or_default()
        )));
    }
    relation_to_ca(m, &induce_relation(m, sup)?)
}

/// Turns a functional relation over the targets of `m` into an automaton.
pub fn relation_to_ca(m: &LocalMapping, rel: &LocalRelation) -> Result<Automaton> {
    let (ok, conflicts) = rel.is_deterministic();
    if !ok {
        return Err(Error::NonDeterministic(conflicts.len()));
    }
    let mut table = rel.to_table(m.targets().len()).ok_or(Error::NonDeterministic(0))?;
    let q = m.target_roles().quiescent;
    for t in [(q, q, q), (StateId::OUTSIDE, q, q)] {
        match table.get(t) {
            None => {
                table.insert(t, q);
            }
            Some(v) if v != q => return Err(Error::NonDeterministic(1)),
            Some(_) => {}
        }
    }
    Automaton::new(m.targets().clone(), m.target_roles(), table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::run_diagram;
    use crate::relation::extract_relation;
    use crate::supers::collect_supers;

    const COUNTER: &str = "\
# generator fires at every odd time
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

    fn counter() -> Automaton {
        Automaton::parse(COUNTER).unwrap()
    }

    #[test]
    fn identity_reproduces_source() {
        let ca = counter();
        let m = identity_mapping(&ca);
        assert!(check_compliance(&m).pass);
        let sup = collect_supers(&ca, 20, 10).unwrap();
        let sim = build_simulated_ca(&m, &sup).unwrap();
        assert!(sim.table().is_submap_of(ca.table()));
        assert_eq!(sim.count_transitions(), ca.count_transitions());
    }

    #[test]
    fn induced_matches_mapped_window() {
        let ca = counter();
        let m = identity_mapping(&ca);
        let sup = collect_supers(&ca, 12, 4).unwrap();
        let w = run_diagram(&ca, 12).unwrap();
        let mapped = apply_mapping_to_window(&m, &w).unwrap();
        assert_eq!(mapped, w);
        let direct = extract_relation([&mapped]).inner();
        assert_eq!(induce_relation(&m, &sup).unwrap().inner(), direct);
    }

    #[test]
    fn condition_two_violation() {
        let ca = counter();
        let mut m = identity_mapping(&ca);
        let (o, q) = (StateId::OUTSIDE, ca.state("Q").unwrap());
        // (* A Q) -> B in the source; sending it to the generator breaks (2).
        m.set_smap((o, ca.state("A").unwrap(), q), ca.state("A").unwrap()).unwrap();
        let r = check_compliance(&m);
        assert!(!r.pass);
        assert!(!r.condition(2).pass);
        assert!(r.condition(0).pass && r.condition(1).pass && r.condition(3).pass);
    }

    #[test]
    fn text_round_trip_and_patch() {
        let ca = Arc::new(counter());
        let m = identity_mapping(&ca);
        let text = m.to_text();
        let back = LocalMapping::parse(ca.clone(), &text).unwrap();
        assert_eq!(back, m);
        let mut p = back.clone();
        assert_eq!(p.apply_patch("smap: A Q Q -> B\n").unwrap(), 1);
        assert_ne!(p, m);
        let t = ca.triple("A", "Q", "Q").unwrap();
        assert_eq!(p.smap_value(t), ca.state("B"));
        assert!(p.apply_patch("targets: Q\n").is_err());
        assert!(LocalMapping::parse(ca.clone(), &text.replace("smap: A Q Q -> Q\n", "")).is_err());
    }
}

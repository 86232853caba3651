use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use locasim_core::explore::stats::{histogram_total, parse_histogram, stats_report};
use locasim_core::explore::{start_mapping, ExploreConfig, Explorer, ModOrder, SolutionRecord, StopReason};
use locasim_core::oracle::{build_catalog, EnumerationSpace};
use locasim_core::par::Pool;
use locasim_core::{
    build_simulated_ca, check_candidate, check_compliance, collect_supers, collect_supers_saturated, handcraft_script,
    is_local_simulation, verify_solution, Automaton, Error, LocalMapping, SequenceSpec, SuperTransitions,
};

use crate::render::{render_ppm, render_text, GlyphMap};
use crate::{exit, Cli, Command, Format, HarvestArgs, Order};

pub struct CmdError {
    pub code: u8,
    pub message: String,
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::UnknownSequence(_)
            | Error::SequenceParams(_)
            | Error::Config(_)
            | Error::SeedShape(_)
            | Error::InvalidMapping(_)
            | Error::SpaceTooLarge(_) => exit::USAGE,
            _ => exit::FAULT,
        };
        CmdError { code, message: e.to_string() }
    }
}

impl From<io::Error> for CmdError {
    fn from(e: io::Error) -> Self {
        CmdError { code: exit::FAULT, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> CmdError {
    CmdError { code: exit::USAGE, message: message.into() }
}

type CmdResult = Result<u8, CmdError>;

fn read(path: &str) -> Result<String, CmdError> {
    fs::read_to_string(path).map_err(|e| CmdError { code: exit::FAULT, message: format!("{path}: {e}") })
}

fn output(path: Option<&str>) -> Result<Box<dyn Write>, CmdError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CmdError { code: exit::FAULT, message: format!("{p}: {e}") })?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn record<W: Write + ?Sized, T: Serialize>(w: &mut W, value: &T) -> Result<(), CmdError> {
    serde_json::to_writer(&mut *w, value).map_err(|e| CmdError { code: exit::FAULT, message: e.to_string() })?;
    w.write_all(b"\n")?;
    Ok(())
}

fn sequence(text: &str) -> Result<SequenceSpec, CmdError> {
    Ok(SequenceSpec::from_str(text)?)
}

/// `123`, `64K`, `512M`, `4G`.
fn parse_bytes(text: &str) -> Result<u64, CmdError> {
    let t = text.trim();
    let (num, mul) = match t.chars().last() {
        Some('K' | 'k') => (&t[..t.len() - 1], 1u64 << 10),
        Some('M' | 'm') => (&t[..t.len() - 1], 1 << 20),
        Some('G' | 'g') => (&t[..t.len() - 1], 1 << 30),
        _ => (t, 1),
    };
    num.trim()
        .parse::<u64>()
        .ok()
        .and_then(|n| n.checked_mul(mul))
        .ok_or_else(|| usage(format!("bad memory size `{text}`")))
}

fn harvest(ca: &Automaton, h: &HarvestArgs) -> Result<SuperTransitions, CmdError> {
    let sup = collect_supers_saturated(ca, h.supers_horizon, h.window, h.supers_cap)?;
    if sup.horizon != h.supers_horizon {
        eprintln!("harvest grew to horizon {} to reach saturation", sup.horizon);
    }
    if !sup.is_saturated() {
        eprintln!(
            "warning: harvest not saturated (last new record at t={}, horizon {})",
            sup.saturated_at, sup.horizon
        );
    }
    Ok(sup)
}

pub fn run(cli: Cli) -> CmdResult {
    let workers = cli.workers;
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a, workers),
        Command::Handcraft(a) => handcraft(a),
        Command::CollectSupers(a) => supers(a),
        Command::MapApply(a) => map_apply(a),
        Command::Explore(a) => explore(a, workers),
        Command::Enumerate(a) => enumerate(a, workers),
        Command::Stats(a) => stats(a),
    }
}

fn simulate(a: crate::SimulateArgs) -> CmdResult {
    let ca = Automaton::load(&a.ca)?;
    let w = locasim_core::run_diagram(&ca, a.horizon)?;
    let mut out = output(a.out.as_deref())?;
    match a.format {
        Format::Text => {
            let glyphs = match &a.glyphs {
                Some(spec) => GlyphMap::parse(&ca, spec).map_err(usage)?,
                None => GlyphMap::default_for(&ca),
            };
            out.write_all(render_text(&w, &glyphs).as_bytes())?;
        }
        Format::Ppm => out.write_all(&render_ppm(&w, &ca, a.cell_size))?,
    }
    out.flush()?;
    Ok(exit::OK)
}

#[derive(Serialize)]
struct VerifyRecord {
    source: String,
    seq: String,
    horizon: u64,
    states: usize,
    transitions: usize,
    candidate: bool,
    pass: bool,
    column: i64,
    generator_times: Vec<u64>,
    violations: Vec<String>,
}

fn verify_one(source: &str, ca: &Automaton, seq: &SequenceSpec, horizon: u64) -> VerifyRecord {
    let cand = check_candidate(ca);
    let rep = verify_solution(ca, seq, horizon);
    let mut violations: Vec<String> = cand.violations.iter().map(ToString::to_string).collect();
    violations.extend(rep.violations.iter().map(ToString::to_string));
    VerifyRecord {
        source: source.to_string(),
        seq: seq.to_string(),
        horizon,
        states: ca.count_states(),
        transitions: ca.count_transitions(),
        candidate: cand.pass,
        pass: cand.pass && rep.pass,
        column: rep.checked_column,
        generator_times: rep.generator_times,
        violations,
    }
}

fn verify(a: crate::VerifyArgs, workers: usize) -> CmdResult {
    let seq = sequence(&a.seq)?;
    let mut out = output(None)?;
    let mut all = true;
    if let Some(path) = &a.ca {
        let ca = Automaton::load(path)?;
        let r = verify_one(path, &ca, &seq, a.horizon);
        eprintln!(
            "{path}: {} states, {} transitions, {} to horizon {} (column {})",
            r.states,
            r.transitions,
            if r.pass { "verified" } else { "NOT verified" },
            a.horizon,
            r.column
        );
        for v in r.violations.iter().take(10) {
            eprintln!("  {v}");
        }
        all = r.pass;
        record(&mut out, &r)?;
    } else if let Some(path) = &a.solutions {
        let recs = read_solutions(path)?;
        let cas = recs
            .iter()
            .map(|r| Automaton::parse(&r.ca).map(|ca| (r.index, ca)))
            .collect::<Result<Vec<_>, _>>()?;
        let pool = Pool::new(workers);
        let results = pool.map(&cas, |(i, ca)| verify_one(&format!("{path}#{i}"), ca, &seq, a.horizon));
        let failed = results.iter().filter(|r| !r.pass).count();
        for r in &results {
            record(&mut out, r)?;
        }
        eprintln!("{path}: {} solutions, {} verified to horizon {}, {failed} failed", results.len(), results.len() - failed, a.horizon);
        all = failed == 0;
    }
    out.flush()?;
    Ok(if all { exit::OK } else { exit::FAILED })
}

fn read_solutions(path: &str) -> Result<Vec<SolutionRecord>, CmdError> {
    let f = File::open(path).map_err(|e| CmdError { code: exit::FAULT, message: format!("{path}: {e}") })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: SolutionRecord = serde_json::from_str(&line)
            .map_err(|e| usage(format!("{path}:{}: {e}", i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

/// Compliance, determinism and verification of a mapping, reported on
/// standard error. Returns the simulated automaton when all three hold.
fn check_mapping(
    m: &LocalMapping,
    sup: &SuperTransitions,
    seq: Option<&SequenceSpec>,
    horizon: u64,
) -> Result<(serde_json::Value, Option<Automaton>), CmdError> {
    let comp = check_compliance(m);
    for c in comp.conditions.iter().filter(|c| !c.pass) {
        eprintln!("condition ({}) fails:", c.condition);
        for w in c.witnesses.iter().take(10) {
            eprintln!("  {w}");
        }
    }
    let (det, conflicts) = is_local_simulation(m, sup)?;
    if !det {
        eprintln!("induced relation has {} conflicting triples", conflicts.len());
    }
    let mut verified = None;
    let mut ca = None;
    if comp.pass && det {
        let sim = build_simulated_ca(m, sup)?;
        if let Some(seq) = seq {
            let rep = verify_solution(&sim, seq, horizon);
            for v in rep.violations.iter().take(10) {
                eprintln!("  {v}");
            }
            verified = Some(rep.pass && check_candidate(&sim).pass);
        }
        ca = Some(sim);
    }
    let summary = json!({
        "compliant": comp.pass,
        "deterministic": det,
        "conflicts": conflicts.len(),
        "states": ca.as_ref().map(Automaton::count_states),
        "transitions": ca.as_ref().map(Automaton::count_transitions),
        "verified": verified,
        "horizon": horizon,
    });
    let ok = comp.pass && det && verified != Some(false);
    Ok((summary, ca.filter(|_| ok)))
}

fn handcraft(a: crate::HandcraftArgs) -> CmdResult {
    let seed = Automaton::load(&a.seed)?;
    let seq = sequence(&a.seq)?;
    let mut m = handcraft_script(&seed)?;
    let overrides = match &a.patch {
        Some(p) => m.apply_patch(&read(p)?)?,
        None => 0,
    };
    if let Some(p) = &a.mapping_out {
        fs::write(p, m.to_text())?;
    }
    let sup = harvest(&seed, &a.harvest)?;
    let (mut summary, ca) = check_mapping(&m, &sup, Some(&seq), a.horizon)?;
    summary["overrides"] = json!(overrides);
    let mut out = output(None)?;
    record(&mut out, &summary)?;
    out.flush()?;
    match ca {
        Some(ca) => {
            if let Some(p) = &a.ca_out {
                fs::write(p, ca.to_text())?;
            }
            eprintln!("handcrafted {} states, {} transitions", ca.count_states(), ca.count_transitions());
            Ok(exit::OK)
        }
        None => {
            eprintln!("handcrafted mapping is not a compliant local simulation that verifies");
            Ok(exit::FAILED)
        }
    }
}

fn supers(a: crate::SupersArgs) -> CmdResult {
    let ca = Automaton::load(&a.ca)?;
    let sup = collect_supers(&ca, a.horizon, a.window)?;
    let names = |v: &[locasim_core::StateId]| v.iter().map(|&s| ca.name(s).to_string()).collect::<Vec<_>>();
    let mut out = output(a.out.as_deref())?;
    for &(l, m, r) in &sup.initial_triples {
        record(&mut out, &json!({ "initial": names(&[l, m, r]) }))?;
    }
    for (q, r) in &sup.quints {
        record(&mut out, &json!({ "quint": names(q), "result": names(r) }))?;
    }
    out.flush()?;
    eprintln!(
        "{} initial triples, {} super-local transitions, last new at t={}, {}saturated (window {})",
        sup.initial_triples.len(),
        sup.len(),
        sup.saturated_at,
        if sup.is_saturated() { "" } else { "not " },
        sup.window
    );
    Ok(exit::OK)
}

fn map_apply(a: crate::MapApplyArgs) -> CmdResult {
    let source = Arc::new(Automaton::load(&a.source)?);
    let mut m = LocalMapping::parse(source.clone(), &read(&a.mapping)?)?;
    if let Some(p) = &a.patch {
        let n = m.apply_patch(&read(p)?)?;
        eprintln!("{n} overrides applied");
    }
    let seq = a.seq.as_deref().map(sequence).transpose()?;
    let sup = harvest(&source, &a.harvest)?;
    let (summary, ca) = check_mapping(&m, &sup, seq.as_ref(), a.horizon)?;
    eprintln!("{summary}");
    match ca {
        Some(ca) => {
            let mut out = output(a.out.as_deref())?;
            out.write_all(ca.to_text().as_bytes())?;
            out.flush()?;
            Ok(exit::OK)
        }
        None => Ok(exit::FAILED),
    }
}

fn explore(a: crate::ExploreArgs, workers: usize) -> CmdResult {
    let ca = Automaton::load(&a.ca)?;
    let seq = sequence(&a.seq)?;
    let states = a.states.unwrap_or(ca.count_states());
    let start = start_mapping(&ca, states)?;
    let sup = harvest(&ca, &a.harvest)?;
    let cfg = ExploreConfig {
        k: a.k,
        node_budget: a.budget_nodes,
        memory_budget: parse_bytes(&a.budget_mem)?,
        rng_seed: a.rng_seed,
        verify: (!a.no_verify).then_some((seq, a.horizon)),
        order: match a.order {
            Order::ModifyThenAdmit => ModOrder::ModifyThenAdmit,
            Order::AdmitThenModify => ModOrder::AdmitThenModify,
        },
        workers,
        batch_nodes: 0,
        cross_check: a.cross_check,
        sample_every: a.sample_every,
    };
    let mut ex = match &a.resume {
        Some(p) => {
            let bytes = fs::read(p).map_err(|e| CmdError { code: exit::FAULT, message: format!("{p}: {e}") })?;
            Explorer::resume(start, &sup, cfg, &bytes)?
        }
        None => Explorer::new(start, &sup, cfg)?,
    };
    let mut out: Box<dyn Write> = match (&a.out, &a.resume) {
        (Some(p), Some(_)) => Box::new(BufWriter::new(OpenOptions::new().append(true).create(true).open(p)?)),
        (p, _) => output(p.as_deref())?,
    };
    let mut failure = None;
    let stop = ex.run(|s| {
        if failure.is_none() {
            if let Err(e) = record(&mut out, &s.record()) {
                failure = Some(e);
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    out.flush()?;
    if let Some(p) = &a.checkpoint {
        fs::write(p, ex.checkpoint())?;
    }
    let st = ex.stats();
    if let Some(p) = &a.stats_out {
        let text = serde_json::to_string_pretty(st).map_err(|e| CmdError { code: exit::FAULT, message: e.to_string() })?;
        fs::write(p, text + "\n")?;
    }
    let hist: Vec<String> = st.histogram.iter().map(|(k, v)| format!("{k}:{v}")).collect();
    eprintln!(
        "stop: {}; {} evaluations, {} expansions, {} distinct ({} before dedup), frontier {}, best {} transitions",
        serde_json::to_value(stop).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        st.evaluations,
        st.expansions,
        st.distinct,
        st.admitted_raw,
        st.frontier,
        st.best_transitions.map_or("-".into(), |b| b.to_string()),
    );
    eprintln!("histogram: {}", hist.join(" "));
    if st.verification_failures > 0 {
        eprintln!("{} emitted solutions failed re-verification", st.verification_failures);
        return Ok(exit::FAILED);
    }
    Ok(match stop {
        StopReason::FrontierExhausted => exit::OK,
        StopReason::NodeBudget | StopReason::MemoryBudget => exit::BUDGET,
    })
}

fn enumerate(a: crate::EnumerateArgs, workers: usize) -> CmdResult {
    let space = EnumerationSpace { states: a.states, allow_large: a.allow_large };
    let entries = build_catalog(space, a.horizon, a.limit, &Pool::new(workers))?;
    let mut out = output(a.out.as_deref())?;
    for e in &entries {
        record(&mut out, e)?;
    }
    out.flush()?;
    let distinct: std::collections::BTreeSet<&str> = entries.iter().map(|e| e.prefix.as_str()).collect();
    eprintln!("{} candidates, {} distinct prefixes to horizon {}", entries.len(), distinct.len(), a.horizon);
    Ok(exit::OK)
}

fn stats(a: crate::StatsArgs) -> CmdResult {
    let recs = read_solutions(&a.solutions)?;
    let s = stats_report(recs.iter().map(|r| r.transitions));
    let mut improvements = Vec::new();
    let mut best = usize::MAX;
    for r in &recs {
        if r.transitions < best {
            best = r.transitions;
            improvements.push(json!({ "index": r.index, "transitions": best }));
        }
    }
    let mut report = json!({
        "distinct": s.distinct,
        "histogram_total": histogram_total(&s.histogram),
        "histogram": s.histogram,
        "best_transitions": s.best_transitions,
        "improvements": improvements,
        "verified": recs.iter().filter(|r| r.verified == Some(true)).count(),
        "unverified": recs.iter().filter(|r| r.verified != Some(true)).count(),
    });
    if let Some(p) = &a.reference {
        let h = parse_histogram(&read(p)?)?;
        report["reference"] = json!({
            "total": histogram_total(&h),
            "min": h.keys().next(),
            "max": h.keys().next_back(),
        });
    }
    let mut out = output(None)?;
    record(&mut out, &report)?;
    out.flush()?;
    Ok(exit::OK)
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    FrontierExhausted,
    NodeBudget,
    MemoryBudget,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthSample {
    pub expansions: u64,
    pub evaluations: u64,
    pub visited: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationStats {
    /// Candidate mappings evaluated; the node budget counts these.
    pub evaluations: u64,
    /// Frontier nodes whose neighbourhood was evaluated.
    pub expansions: u64,
    /// Deterministic candidates before dedup.
    pub admitted_raw: u64,
    /// Distinct solutions up to role-preserving relabelling.
    pub distinct: u64,
    pub histogram: BTreeMap<usize, u64>,
    pub best_transitions: Option<usize>,
    pub best_index: Option<u64>,
    pub best_ca: Option<String>,
    /// `(discovery index, transitions)` at every strict improvement.
    pub best_trajectory: Vec<(u64, usize)>,
    pub growth: Vec<GrowthSample>,
    /// Discovery indices of solutions using at most four non-outside states.
    pub four_state: Vec<u64>,
    pub verified: u64,
    pub verification_failures: u64,
    pub cross_check_mismatches: u64,
    pub frontier: u64,
    pub stop: Option<StopReason>,
    pub elapsed_ms: u64,
}

impl ExplorationStats {
    pub fn record(&mut self, index: u64, transitions: usize, used_states: usize, ca_text: impl FnOnce() -> String) {
        self.distinct += 1;
        *self.histogram.entry(transitions).or_default() += 1;
        if self.best_transitions.is_none_or(|b| transitions < b) {
            self.best_transitions = Some(transitions);
            self.best_index = Some(index);
            self.best_ca = Some(ca_text());
            self.best_trajectory.push((index, transitions));
        }
        if used_states <= 4 {
            self.four_state.push(index);
        }
    }

    pub fn histogram_total(&self) -> u64 {
        histogram_total(&self.histogram)
    }
}

pub fn histogram_total(h: &BTreeMap<usize, u64>) -> u64 {
    h.values().sum()
}

/// Minimal summary recomputed from a solution stream.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamStats {
    pub distinct: u64,
    pub histogram: BTreeMap<usize, u64>,
    pub best_transitions: Option<usize>,
    /// Best-so-far after each solution, in stream order.
    pub best_so_far: Vec<usize>,
}

pub fn stats_report<I: IntoIterator<Item = usize>>(transition_counts: I) -> StreamStats {
    let mut s = StreamStats::default();
    for t in transition_counts {
        s.distinct += 1;
        *s.histogram.entry(t).or_default() += 1;
        let b = s.best_transitions.map_or(t, |b| b.min(t));
        s.best_transitions = Some(b);
        s.best_so_far.push(b);
    }
    s
}

/// Parses a two-column `transitions count` table; `#` starts a comment.
pub fn parse_histogram(text: &str) -> Result<BTreeMap<usize, u64>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
        let perr = |msg: &str| Error::Parse { line: i + 1, msg: msg.into() };
        if toks.len() != 2 {
            return Err(perr("expected `transitions count`"));
        }
        let k = toks[0].parse().map_err(|_| perr("bad transition count"))?;
        let v = toks[1].parse().map_err(|_| perr("bad solution count"))?;
        if out.insert(k, v).is_some() {
            return Err(perr("duplicate transition count"));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_summary() {
        let s = stats_report([70, 68, 71, 68, 66]);
        assert_eq!(s.distinct, 5);
        assert_eq!(histogram_total(&s.histogram), 5);
        assert_eq!(s.best_so_far, vec![70, 68, 68, 68, 66]);
    }

    #[test]
    fn histogram_text() {
        let h = parse_histogram("# t n\n58 1\n59, 7\n").unwrap();
        assert_eq!(histogram_total(&h), 8);
        assert!(parse_histogram("58 1\n58 2\n").is_err());
    }
}

//! Finite windows of space-time diagrams.
//!
//! A run from the sequence-generation initial configuration `… * * B Q Q …`
//! is simulated exactly on positions `1..=T+2`: every cell at `p <= 0` is the
//! outside state and every cell at `p >= t + 2` is still quiescent, so the
//! window plus its two fill columns describes the whole row.

use serde::{Deserialize, Serialize};

use crate::alphabet::StateId;
use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::table::Triple;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramWindow {
    horizon: usize,
    width: usize,
    cells: Vec<StateId>,
    /// Virtual state of every cell at `p <= 0`, per row.
    left_fill: Vec<StateId>,
    /// Virtual state of every cell at `p > width`, per row.
    right_fill: Vec<StateId>,
}

impl DiagramWindow {
    /// Assembles a window from explicit rows. All rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<StateId>>, left_fill: Vec<StateId>, right_fill: Vec<StateId>) -> Self {
        assert!(!rows.is_empty(), "a window has at least one row");
        let width = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == width));
        assert_eq!(left_fill.len(), rows.len());
        assert_eq!(right_fill.len(), rows.len());
        DiagramWindow {
            horizon: rows.len() - 1,
            width,
            cells: rows.into_iter().flatten().collect(),
            left_fill,
            right_fill,
        }
    }

    /// Last time step held by the window.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Number of explicit columns (positions `1..=width`).
    pub fn width(&self) -> usize {
        self.width
    }

    /// State at time `t` and position `p`, virtual cells included.
    #[inline]
    pub fn get(&self, t: usize, p: i64) -> StateId {
        if p <= 0 {
            self.left_fill[t]
        } else if p as usize > self.width {
            self.right_fill[t]
        } else {
            self.cells[t * self.width + p as usize - 1]
        }
    }

    pub fn row(&self, t: usize) -> &[StateId] {
        &self.cells[t * self.width..(t + 1) * self.width]
    }

    pub fn triple(&self, t: usize, p: i64) -> Triple {
        (self.get(t, p - 1), self.get(t, p), self.get(t, p + 1))
    }

    /// States of the leftmost non-outside cell (`p = 1`) for `t = 0..=horizon`.
    pub fn leftmost_column(&self) -> Vec<StateId> {
        (0..=self.horizon).map(|t| self.get(t, 1)).collect()
    }

    /// First cell at or beyond the light cone (`p >= t + 2`) that is not `quiescent`.
    pub fn light_cone_violation(&self, quiescent: StateId) -> Option<(usize, i64)> {
        for t in 0..=self.horizon {
            for p in (t + 2)..=self.width {
                if self.get(t, p as i64) != quiescent {
                    return Some((t, p as i64));
                }
            }
            if self.right_fill[t] != quiescent {
                return Some((t, self.width as i64 + 1));
            }
        }
        None
    }
}

/// Simulates `ca` from its sequence-generation initial configuration up to `horizon`.
pub fn run_diagram(ca: &Automaton, horizon: usize) -> Result<DiagramWindow> {
    let roles = ca.roles();
    let width = horizon + 2;
    let table = ca.table();
    let mut cells = Vec::with_capacity((horizon + 1) * width);
    cells.push(roles.boundary);
    cells.extend(std::iter::repeat_n(roles.quiescent, width - 1));
    let mut right_fill = vec![roles.quiescent];
    let missing = |triple: Triple, t: usize, p: i64| Error::MissingTransition {
        triple,
        names: ca.triple_names(triple),
        t,
        p,
    };
    for t in 1..=horizon {
        let prev = (t - 1) * width;
        let fill = right_fill[t - 1];
        for p in 0..width {
            let l = if p == 0 { roles.outside } else { cells[prev + p - 1] };
            let m = cells[prev + p];
            let r = if p + 1 < width { cells[prev + p + 1] } else { fill };
            let next = table.get((l, m, r)).ok_or_else(|| missing((l, m, r), t, p as i64 + 1))?;
            cells.push(next);
        }
        let next_fill = table
            .get((fill, fill, fill))
            .ok_or_else(|| missing((fill, fill, fill), t, width as i64 + 1))?;
        right_fill.push(next_fill);
    }
    Ok(DiagramWindow {
        horizon,
        width,
        cells,
        left_fill: vec![roles.outside; horizon + 1],
        right_fill,
    })
}

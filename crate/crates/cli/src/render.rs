//! Text and portable-pixmap renderings of a space-time diagram window.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use locasim_core::{Automaton, DiagramWindow, StateId};

const FALLBACK: &str = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// One glyph per state, injective.
#[derive(Clone, Debug)]
pub struct GlyphMap {
    glyphs: Vec<char>,
}

impl GlyphMap {
    /// Quiescent cells render as `.`, the others as the first character of
    /// their name when those are distinct, else as digits and letters.
    pub fn default_for(ca: &Automaton) -> Self {
        let q = ca.roles().quiescent;
        let n = ca.alphabet().len();
        let mut glyphs: Vec<char> = (0..n)
            .map(|i| {
                let s = StateId(i as u8);
                if s == q { '.' } else { ca.name(s).chars().next().unwrap_or('?') }
            })
            .collect();
        if glyphs.iter().collect::<BTreeSet<_>>().len() != n {
            glyphs = std::iter::once('*').chain(FALLBACK.chars()).take(n).collect();
            glyphs[q.index()] = '.';
            if glyphs.iter().collect::<BTreeSet<_>>().len() != n {
                glyphs = std::iter::once('*').chain(FALLBACK.chars()).take(n).collect();
            }
        }
        GlyphMap { glyphs }
    }

    /// Parses `NAME=c,NAME=c`; unnamed states keep their default glyph.
    pub fn parse(ca: &Automaton, spec: &str) -> Result<Self, String> {
        let mut map = Self::default_for(ca);
        let mut given = BTreeMap::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, glyph) = item.split_once('=').ok_or_else(|| format!("expected NAME=c, got `{item}`"))?;
            let s = ca.state(name.trim()).ok_or_else(|| format!("unknown state `{}`", name.trim()))?;
            let mut chars = glyph.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(format!("glyph for `{}` must be one character", name.trim()));
            };
            given.insert(s, c);
        }
        for (s, c) in given {
            map.glyphs[s.index()] = c;
        }
        if map.glyphs.iter().collect::<BTreeSet<_>>().len() != map.glyphs.len() {
            return Err("glyph map is not injective".into());
        }
        Ok(map)
    }

    pub fn glyph(&self, s: StateId) -> char {
        self.glyphs[s.index()]
    }
}

/// One line per time step, one character per cell of positions `1..=width`.
pub fn render_text(w: &DiagramWindow, glyphs: &GlyphMap) -> String {
    let mut out = String::with_capacity((w.horizon() + 1) * (w.width() + 1));
    for t in 0..=w.horizon() {
        out.extend(w.row(t).iter().map(|&s| glyphs.glyph(s)));
        out.push('\n');
    }
    out
}

fn palette(n: usize, ca: &Automaton) -> Vec<[u8; 3]> {
    let r = ca.roles();
    (0..n)
        .map(|i| {
            let s = StateId(i as u8);
            if s == r.quiescent {
                [255, 255, 255]
            } else if s == r.generator {
                [200, 20, 20]
            } else if s == r.boundary {
                [20, 20, 20]
            } else if s == r.outside {
                [128, 128, 128]
            } else {
                // Spread the other states around a fixed hue circle.
                let h = (i as f64 * 0.618_034).fract() * 6.0;
                let x = (1.0 - ((h % 2.0) - 1.0).abs()) * 200.0;
                let c = 200.0;
                let (a, b, d) = match h as u32 {
                    0 => (c, x, 0.0),
                    1 => (x, c, 0.0),
                    2 => (0.0, c, x),
                    3 => (0.0, x, c),
                    4 => (x, 0.0, c),
                    _ => (c, 0.0, x),
                };
                [a as u8 + 30, b as u8 + 30, d as u8 + 30]
            }
        })
        .collect()
}

/// Binary P6 image, `cell` pixels per cell.
pub fn render_ppm(w: &DiagramWindow, ca: &Automaton, cell: usize) -> Vec<u8> {
    let cell = cell.max(1);
    let colors = palette(ca.alphabet().len(), ca);
    let (width, height) = (w.width() * cell, (w.horizon() + 1) * cell);
    let mut out = Vec::with_capacity(width * height * 3 + 32);
    let mut header = String::new();
    let _ = write!(header, "P6\n{width} {height}\n255\n");
    out.extend_from_slice(header.as_bytes());
    for t in 0..=w.horizon() {
        let mut line = Vec::with_capacity(width * 3);
        for &s in w.row(t) {
            for _ in 0..cell {
                line.extend_from_slice(&colors[s.index()]);
            }
        }
        for _ in 0..cell {
            out.extend_from_slice(&line);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use locasim_core::run_diagram;

    const TWO: &str = "states: Q B\noutside: *\nboundary: B\nquiescent: Q\ngenerator: B\n* B Q -> B\nB Q Q -> Q\nQ Q Q -> Q\n";

    #[test]
    fn text_has_one_line_per_step() {
        let ca = Automaton::parse(TWO).unwrap();
        let w = run_diagram(&ca, 3).unwrap();
        let text = render_text(&w, &GlyphMap::default_for(&ca));
        assert_eq!(text, "B....\nB....\nB....\nB....\n");
    }

    #[test]
    fn glyphs_must_be_injective() {
        let ca = Automaton::parse(TWO).unwrap();
        assert!(GlyphMap::parse(&ca, "Q=B").is_err());
        assert!(GlyphMap::parse(&ca, "Q=_,B=#").is_ok());
        assert!(GlyphMap::parse(&ca, "Z=x").is_err());
    }

    #[test]
    fn ppm_size() {
        let ca = Automaton::parse(TWO).unwrap();
        let w = run_diagram(&ca, 2).unwrap();
        let img = render_ppm(&w, &ca, 2);
        let header = b"P6\n8 6\n255\n";
        assert_eq!(&img[..header.len()], header);
        assert_eq!(img.len(), header.len() + 8 * 6 * 3);
    }
}

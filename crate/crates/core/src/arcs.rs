//! Half-open arcs of the unit circle and finite unions of them.
//!
//! An [`ArcSet`] is kept as sorted, pairwise disjoint, non-abutting intervals
//! `[lo, hi)` inside `[0, 2pi)`; an arc crossing angle zero is stored as two
//! pieces. Intervals merge only when they overlap or their endpoints are
//! bitwise equal, so set algebra never blurs two distinct sets together.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::wrap_tau;

/// The arc `[start, start + length)` taken modulo `2pi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    start: f64,
    length: f64,
}

impl Arc {
    pub fn new(start: f64, length: f64) -> Result<Self> {
        if !start.is_finite() || !length.is_finite() {
            return Err(Error::InvalidArc(format!(
                "non-finite arc (start {start}, length {length})"
            )));
        }
        if length <= 0.0 || length > TAU {
            return Err(Error::InvalidArc(format!(
                "length {length} outside (0, 2pi]"
            )));
        }
        let start = if length == TAU { 0.0 } else { wrap_tau(start) };
        Ok(Self { start, length })
    }

    pub fn full() -> Self {
        Self {
            start: 0.0,
            length: TAU,
        }
    }

    /// Arc centred at `center` with the given half-width; full circle once
    /// the half-width reaches `pi`.
    pub fn centered(center: f64, half_width: f64) -> Self {
        if 2.0 * half_width >= TAU {
            return Self::full();
        }
        Self {
            start: wrap_tau(center - half_width),
            length: 2.0 * half_width,
        }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_full(&self) -> bool {
        self.length >= TAU
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let off = wrap_tau(theta - self.start);
        off < self.length
    }
}

/// A finite union of arcs in canonical form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ArcSet {
    pieces: Vec<(f64, f64)>,
}

impl ArcSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        Self {
            pieces: vec![(0.0, TAU)],
        }
    }

    pub fn from_arc(arc: &Arc) -> Self {
        let mut pieces = Vec::with_capacity(2);
        push_arc(&mut pieces, arc);
        Self::normalize(pieces)
    }

    pub fn from_arcs<I: IntoIterator<Item = Arc>>(arcs: I) -> Self {
        let mut pieces = Vec::new();
        for a in arcs {
            push_arc(&mut pieces, &a);
        }
        Self::normalize(pieces)
    }

    /// Builds a set from raw `[lo, hi)` pieces, each inside `[0, 2pi]`.
    pub fn from_pieces<I: IntoIterator<Item = (f64, f64)>>(pieces: I) -> Result<Self> {
        let mut out = Vec::new();
        for (lo, hi) in pieces {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi && hi <= TAU) {
                return Err(Error::InvalidArc(format!("bad piece [{lo}, {hi})")));
            }
            if lo < hi {
                out.push((lo, hi));
            }
        }
        Ok(Self::normalize(out))
    }

    fn normalize(mut pieces: Vec<(f64, f64)>) -> Self {
        pieces.retain(|&(lo, hi)| lo < hi);
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
        for (lo, hi) in pieces {
            match out.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => out.push((lo, hi)),
            }
        }
        Self { pieces: out }
    }

    /// Canonical `[lo, hi)` pieces inside `[0, 2pi)`.
    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0] == (0.0, TAU)
    }

    /// Total angular length.
    pub fn measure(&self) -> f64 {
        self.pieces.iter().map(|(lo, hi)| hi - lo).sum()
    }

    /// Member arcs, with the piece ending at `2pi` glued to the piece starting
    /// at `0` so arcs crossing angle zero come back whole.
    pub fn arcs(&self) -> Vec<Arc> {
        if self.is_full() {
            return vec![Arc::full()];
        }
        let mut p = self.pieces.clone();
        let mut wrap = None;
        if p.len() >= 2 && p[0].0 == 0.0 && p[p.len() - 1].1 == TAU {
            let first = p.remove(0);
            let last = p.pop().expect("at least two pieces");
            wrap = Some(Arc {
                start: last.0,
                length: (TAU - last.0) + first.1,
            });
        }
        let mut arcs: Vec<Arc> = p
            .into_iter()
            .map(|(lo, hi)| Arc {
                start: lo,
                length: hi - lo,
            })
            .collect();
        arcs.extend(wrap);
        arcs
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        let t = wrap_tau(theta);
        let idx = self.pieces.partition_point(|&(lo, _)| lo <= t);
        idx > 0 && t < self.pieces[idx - 1].1
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let mut p = self.pieces.clone();
        p.extend_from_slice(&other.pieces);
        Self::normalize(p)
    }

    pub fn intersection(&self, other: &ArcSet) -> ArcSet {
        let (a, b) = (&self.pieces, &other.pieces);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if lo < hi {
                out.push((lo, hi));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::normalize(out)
    }

    pub fn complement(&self) -> ArcSet {
        let mut out = Vec::with_capacity(self.pieces.len() + 1);
        let mut cursor = 0.0;
        for &(lo, hi) in &self.pieces {
            if lo > cursor {
                out.push((cursor, lo));
            }
            cursor = hi;
        }
        if cursor < TAU {
            out.push((cursor, TAU));
        }
        Self { pieces: out }
    }

    pub fn difference(&self, other: &ArcSet) -> ArcSet {
        self.intersection(&other.complement())
    }

    pub fn is_disjoint(&self, other: &ArcSet) -> bool {
        self.intersection(other).is_empty()
    }

    /// Exact containment `self ⊆ other`.
    pub fn is_subset(&self, other: &ArcSet) -> bool {
        self.difference(other).is_empty()
    }
}

fn push_arc(out: &mut Vec<(f64, f64)>, arc: &Arc) {
    if arc.is_full() {
        out.push((0.0, TAU));
        return;
    }
    let end = arc.start + arc.length;
    if end <= TAU {
        out.push((arc.start, end));
    } else {
        out.push((arc.start, TAU));
        out.push((0.0, end - TAU));
    }
}

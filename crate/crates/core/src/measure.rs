//! Boundary measures, Poisson integrals and harmonic measure.
//!
//! Positive harmonic functions are represented by nonnegative boundary
//! measures through the Poisson integral. Two concrete kinds are provided:
//! finite atomic measures ([`BoundaryMeasure`]) and step densities on a
//! partition of the circle into cells ([`StepDensity`]). Harmonic measure of
//! an arc is evaluated in closed form from the boundary correspondence of the
//! automorphism that moves the evaluation point to the origin.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::arcs::ArcSet;
use crate::error::{Error, Result};
use crate::geometry::{hyperbolic_distance, wrap_tau, DiscPoint, Mobius};

/// `(1 - |z|^2) / |e^{i theta} - z|^2`, i.e. `2 pi` times the Poisson kernel.
pub fn poisson_weight(z: &DiscPoint, theta: f64) -> f64 {
    let s = z.depth();
    let r = z.modulus();
    let half = 0.5 * (theta - z.arg());
    let dist_sq = s * s + 4.0 * r * half.sin().powi(2);
    z.one_minus_mod_sq() / dist_sq
}

/// The normalized Poisson kernel `P_z(e^{i theta})`, integrating to one.
pub fn poisson_kernel(z: &DiscPoint, theta: f64) -> f64 {
    poisson_weight(z, theta) / TAU
}

/// Harmonic measure at `z` of the interval `[lo, hi)` of real angles
/// (no wrapping required; `hi - lo` may be any value in `[0, 2pi]`).
pub fn harmonic_measure_interval(z: &DiscPoint, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if hi - lo >= TAU {
        return 1.0;
    }
    let t = Mobius::to_origin(*z);
    ((t.boundary_lift(hi) - t.boundary_lift(lo)) / TAU).clamp(0.0, 1.0)
}

/// Harmonic measure `omega(z, E)` of an arc set.
pub fn harmonic_measure(z: &DiscPoint, set: &ArcSet) -> f64 {
    if set.is_full() {
        return 1.0;
    }
    let total: f64 = set
        .pieces()
        .iter()
        .map(|&(lo, hi)| harmonic_measure_interval(z, lo, hi))
        .sum();
    total.clamp(0.0, 1.0)
}

/// A finite nonnegative atomic measure on the circle.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMeasure {
    atoms: Vec<(f64, f64)>,
}

impl BoundaryMeasure {
    /// Atoms are normalized to angles in `[0, 2pi)`, sorted, and coincident
    /// angles are merged. Zero masses are dropped.
    pub fn new<I: IntoIterator<Item = (f64, f64)>>(atoms: I) -> Result<Self> {
        let mut v: Vec<(f64, f64)> = Vec::new();
        for (theta, mass) in atoms {
            if !theta.is_finite() || !mass.is_finite() || mass < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "atom",
                    reason: format!("atom ({theta}, {mass}) needs finite angle and mass >= 0"),
                });
            }
            if mass > 0.0 {
                v.push((wrap_tau(theta), mass));
            }
        }
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (t, m) in v {
            match atoms.last_mut() {
                Some(last) if last.0 == t => last.1 += m,
                _ => atoms.push((t, m)),
            }
        }
        Ok(Self { atoms })
    }

    pub fn atom(theta: f64, mass: f64) -> Result<Self> {
        Self::new([(theta, mass)])
    }

    /// `n` equal atoms of total mass `total`, a discrete stand-in for the
    /// uniform measure.
    pub fn uniform(n: usize, total: f64) -> Result<Self> {
        Self::new((0..n).map(|k| (k as f64 * TAU / n as f64, total / n as f64)))
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.atoms.iter().map(|&(t, m)| (t, m * s)))
    }

    /// `u(z) = sum mass * 2 pi P_z(angle)`, so `u(0)` is the total mass.
    pub fn poisson_integral(&self, z: &DiscPoint) -> f64 {
        self.atoms
            .iter()
            .map(|&(t, m)| m * poisson_weight(z, t))
            .sum()
    }
}

/// Largest `|log2 u(z) - log2 u(w)| - beta(z, w)` over the given pairs.
/// A nonpositive value means Harnack's inequality holds on the sample.
pub fn harnack_check(mu: &BoundaryMeasure, pairs: &[(DiscPoint, DiscPoint)]) -> f64 {
    pairs
        .iter()
        .map(|(z, w)| {
            let lhs = (mu.poisson_integral(z).log2() - mu.poisson_integral(w).log2()).abs();
            lhs - hyperbolic_distance(z, w)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Uniform angles plus angles clustered around the radial projections of
/// chosen points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub resolution: usize,
    /// Extra angles per refinement point.
    pub refinement: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            resolution: 4096,
            refinement: 32,
        }
    }
}

impl GridSpec {
    pub fn new(resolution: usize, refinement: usize) -> Result<Self> {
        if resolution < 16 {
            return Err(Error::InvalidParameter {
                name: "resolution",
                reason: format!("grid resolution must be at least 16, got {resolution}"),
            });
        }
        Ok(Self {
            resolution,
            refinement,
        })
    }

    /// Same grid with four times the uniform and per-point resolution.
    pub fn refined(&self) -> Self {
        Self {
            resolution: self.resolution * 4,
            refinement: self.refinement * 4,
        }
    }

    pub fn build(&self, focus: &[DiscPoint]) -> BoundaryGrid {
        let mut angles: Vec<f64> = (0..self.resolution)
            .map(|k| k as f64 * TAU / self.resolution as f64)
            .collect();
        for z in focus {
            let c = z.boundary_angle();
            let mut extra = Vec::with_capacity(self.refinement);
            if self.refinement > 0 {
                extra.push(c);
            }
            let mut k = 0;
            while extra.len() < self.refinement {
                let off = PI * z.depth() * (-(k as f64) / 2.0).exp2();
                extra.push(wrap_tau(c + off));
                if extra.len() < self.refinement {
                    extra.push(wrap_tau(c - off));
                }
                k += 1;
            }
            angles.extend(extra);
        }
        BoundaryGrid::from_angles(angles)
    }
}

/// Sorted distinct angles together with the cells they own: the cell of an
/// angle runs between the midpoints to its circular neighbours.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryGrid {
    angles: Vec<f64>,
    /// `(start, length)` with `start` a real angle (possibly negative).
    cells: Vec<(f64, f64)>,
}

impl BoundaryGrid {
    pub fn from_angles(mut angles: Vec<f64>) -> Self {
        for a in angles.iter_mut() {
            *a = wrap_tau(*a);
        }
        angles.sort_by(f64::total_cmp);
        angles.dedup();
        let n = angles.len();
        let mut cells = Vec::with_capacity(n);
        if n == 1 {
            cells.push((angles[0] - PI, TAU));
        } else {
            for g in 0..n {
                let prev = if g == 0 { angles[n - 1] - TAU } else { angles[g - 1] };
                let next = if g + 1 == n { angles[0] + TAU } else { angles[g + 1] };
                let lo = 0.5 * (prev + angles[g]);
                let hi = 0.5 * (angles[g] + next);
                cells.push((lo, hi - lo));
            }
        }
        Self { angles, cells }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn cells(&self) -> &[(f64, f64)] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// `omega(z, cell_g)` for every cell, computed exactly.
    pub fn cell_measures(&self, z: &DiscPoint) -> Vec<f64> {
        let t = Mobius::to_origin(*z);
        self.cells
            .iter()
            .map(|&(lo, len)| ((t.boundary_lift(lo + len) - t.boundary_lift(lo)) / TAU).max(0.0))
            .collect()
    }

    /// Index of the cell holding `theta`.
    pub fn cell_of(&self, theta: f64) -> usize {
        let n = self.angles.len();
        let t = wrap_tau(theta);
        let i = self.angles.partition_point(|&a| a <= t);
        // nearest of the two neighbouring angles, circularly
        let (left, right) = (if i == 0 { n - 1 } else { i - 1 }, i % n);
        let dl = wrap_tau(t - self.angles[left]);
        let dr = wrap_tau(self.angles[right] - t);
        if dr < dl {
            right
        } else {
            left
        }
    }
}

/// A piecewise-constant boundary density on the cells of a grid. The
/// harmonic extension is `sum value_g * omega(z, cell_g)`, exact per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct StepDensity {
    cells: Vec<(f64, f64)>,
    values: Vec<f64>,
}

impl StepDensity {
    pub fn new(cells: Vec<(f64, f64)>, values: Vec<f64>) -> Result<Self> {
        if cells.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: cells.len(),
                found: values.len(),
            });
        }
        Ok(Self { cells, values })
    }

    pub fn on_grid(grid: &BoundaryGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid.cells().to_vec(), values)
    }

    pub fn cells(&self) -> &[(f64, f64)] {
        &self.cells
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn evaluate(&self, z: &DiscPoint) -> f64 {
        let t = Mobius::to_origin(*z);
        self.cells
            .iter()
            .zip(&self.values)
            .filter(|(_, &v)| v != 0.0)
            .map(|(&(lo, len), &v)| {
                v * (t.boundary_lift(lo + len) - t.boundary_lift(lo)) / TAU
            })
            .sum()
    }

    /// Mass `value * length / 2pi` placed at each cell midpoint. Requires
    /// nonnegative values.
    pub fn to_atoms(&self) -> Result<BoundaryMeasure> {
        BoundaryMeasure::new(
            self.cells
                .iter()
                .zip(&self.values)
                .map(|(&(lo, len), &v)| (lo + 0.5 * len, v * len / TAU)),
        )
    }
}

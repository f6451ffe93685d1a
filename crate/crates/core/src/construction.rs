//! The stopping-time family `{G_n}` of pairwise disjoint boundary sets and
//! the one-sided interpolant built from it.
//!
//! Pipeline: [`fit_m0`] and [`choose_params`] fix the constants, then
//! [`build_e_sets`] removes the arcs under shifted points from `M0 I_k`,
//! [`build_gn`] runs the induction in decreasing `1 - |z_n|`, and
//! [`verify_estimates`] measures the cover and tail quantities exactly.
//! [`solve_hinfty_partition`] and [`assemble_u`] then give `u(T, S)`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arcs::ArcSet;
use crate::density::{fit_condition_a, DensityConstants};
use crate::error::{Error, Result};
use crate::geometry::{
    base_arc, box_beta_constant, box_growth, hyperbolic_distance, wrap_tau, CarlesonBox, DiscPoint,
};
use crate::interp::Side;
use crate::measure::{harmonic_measure, BoundaryMeasure, GridSpec, StepDensity};
use crate::sequence::PointSequence;
use crate::simplex::LinearProgram;

/// Boxes `20 M0 Q(z_k)` bound where shifted points are placed.
const BOX_SCALE: f64 = 20.0;
/// Absolute constant in `omega(z_n, G_k) <= C3 (1-|z_n|)/(1-|p|)`.
pub const C3: f64 = 2.0;
/// `|e^{it} - z_n| >= C1 |1 - z_n conj(z_k)|` on `I_k` when `2 M0 I_k` misses `M0 I_n`.
pub const C1: f64 = 1.0 / (4.0 * PI);
/// `beta <= C2 - log2(1 - rho^2)`.
pub const C2: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub delta: f64,
    pub m0: f64,
    pub gamma: f64,
    /// The threshold `N` separating near (`beta <= N`) from far nodes.
    pub cap_n: u64,
    pub eta: f64,
    pub alpha: f64,
}

impl ConstructionParams {
    pub fn new(delta: f64, m0: f64, gamma: f64, cap_n: u64, eta: f64, alpha: f64) -> Result<Self> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(delta > 0.0 && delta < 1.0) {
            return bad("delta", format!("must lie in (0, 1), got {delta}"));
        }
        if !(m0.is_finite() && m0 > 0.0) {
            return bad("m0", format!("must be positive, got {m0}"));
        }
        if !(0.0..1.0).contains(&alpha) {
            return bad("alpha", format!("must lie in [0, 1), got {alpha}"));
        }
        let c = box_beta_constant(m0);
        if !(gamma > 0.0 && alpha + c * gamma < 1.0) {
            return bad("gamma", format!("need 0 < gamma and alpha + C(m0) gamma < 1, got {gamma}"));
        }
        let eta_cap = ((1.0 - alpha) / 2.0).min(gamma / (2.0 * c));
        if !(eta > 0.0 && eta < eta_cap) {
            return bad("eta", format!("must lie in (0, {eta_cap}), got {eta}"));
        }
        Ok(Self {
            delta,
            m0,
            gamma,
            cap_n,
            eta,
            alpha,
        })
    }

    /// `C(m0)` from the box comparison of `beta` with depth ratios.
    pub fn c_m0(&self) -> f64 {
        box_beta_constant(self.m0)
    }

    pub fn lambda(&self) -> f64 {
        self.delta / 25.0
    }

    fn n(&self) -> f64 {
        self.cap_n as f64
    }
}

/// Smallest power of two `M0` with `omega(z_k, M0 I_k) >= 1 - delta/100`
/// for every `k`.
pub fn fit_m0(seq: &PointSequence, delta: f64) -> f64 {
    let need = 1.0 - delta / 100.0;
    let mut m0 = 1.0f64;
    loop {
        let ok = seq
            .points()
            .iter()
            .all(|z| harmonic_measure(z, &base_arc(z, m0)) >= need);
        if ok {
            return m0;
        }
        m0 *= 2.0;
    }
}

/// The point on the radius through `z_n`, nearer the origin, at hyperbolic
/// distance `gamma * beta(z_k, z_n)` from `z_n`.
///
/// Along a radius `2^b = (1-|p|)(1+|z_n|) / ((1+|p|)(1-|z_n|))`, which is
/// solved for `1 - |p|` directly.
pub fn shifted_point(zk: &DiscPoint, zn: &DiscPoint, gamma: f64) -> Result<DiscPoint> {
    let shift = gamma * hyperbolic_distance(zk, zn);
    if shift == 0.0 {
        return Ok(*zn);
    }
    let s = zn.depth();
    let t = shift.exp2() * s / (2.0 - s);
    if t > 1.0 + 4.0 * f64::EPSILON {
        return Err(Error::ShiftPastOrigin {
            shift,
            available: hyperbolic_distance(&DiscPoint::ORIGIN, zn),
        });
    }
    let depth = (2.0 * t / (1.0 + t)).min(1.0);
    if depth >= 1.0 {
        return Ok(DiscPoint::ORIGIN);
    }
    DiscPoint::from_depth(depth, zn.arg())
}

/// Largest number of other points in any unit shell `j <= beta < j + 1`
/// around a point of the sequence.
pub fn shell_count(seq: &PointSequence) -> usize {
    (0..seq.len())
        .into_par_iter()
        .map(|n| {
            let mut shells: Vec<usize> = Vec::new();
            for (k, b) in seq.distances_from(n).into_iter().enumerate() {
                if k == n {
                    continue;
                }
                let j = b.floor() as usize;
                if shells.len() <= j {
                    shells.resize(j + 1, 0);
                }
                shells[j] += 1;
            }
            shells.into_iter().max().unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// The closed-form majorants that `N` must beat.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailBounds {
    /// `sum_{beta >= N} (1 - |z_n^gamma(k)|) / (1 - |z_k|)`, bounded by lambda.
    pub shifted_mass: f64,
    /// Parts (A) + (B) of the tail sum.
    pub near_far: f64,
    /// Part (C) of the tail sum.
    pub stolz: f64,
    /// Measured separation constant `C4`.
    pub c4: usize,
}

pub fn tail_bounds(p: &ConstructionParams, m_const: f64, c4: usize) -> TailBounds {
    let c = p.c_m0();
    let k = box_growth(p.m0);
    let n = p.n();
    let e1 = p.alpha + c * p.gamma - 1.0;
    let shifted_mass = m_const * k.powf(1.0 - c * p.gamma) * (n * e1).exp2() / (1.0 - e1.exp2());
    let c_ab = (2.0 * p.m0 * c.exp2()).max(p.m0 * C2.exp2() / (C1 * C1));
    let e2 = p.eta + p.alpha - 1.0;
    let near_far = c_ab * m_const * p.alpha.exp2() * (n * e2).exp2() / (1.0 - e2.exp2());
    let e3 = p.eta - p.gamma / c;
    let stolz = C3 * c4 as f64 * p.gamma.exp2() * (n * e3).exp2() / (1.0 - e3.exp2());
    TailBounds {
        shifted_mass,
        near_far,
        stolz,
        c4,
    }
}

fn bounds_hold(p: &ConstructionParams, m_const: f64, c4: usize) -> bool {
    let t = tail_bounds(p, m_const, c4);
    let c = p.c_m0();
    // containment M0 I_n inside I(z_n^gamma(k)), and the lower half of the
    // depth sandwich, both for beta >= N
    let contain = p.n() * p.gamma >= 1.0 + p.m0.log2();
    let sandwich = p.n() - 2.0 >= (1.0 + 2.0 * p.gamma) / (p.gamma * (1.0 - 1.0 / c)) + c;
    t.shifted_mass <= p.lambda()
        && t.near_far <= p.delta / 3.0
        && t.stolz <= p.delta / 3.0
        && contain
        && sandwich
}

/// Constants for the construction on `seq`, which must satisfy condition
/// (a) at `constants`.
pub fn choose_params(
    seq: &PointSequence,
    constants: &DensityConstants,
    delta: f64,
) -> Result<ConstructionParams> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("must lie in (0, 1), got {delta}"),
        });
    }
    check_depths(seq)?;
    let (fitted, _) = fit_condition_a(seq, constants.alpha);
    if fitted > constants.m_const * (1.0 + 1e-12) {
        return Err(Error::DensityViolated {
            fitted,
            bound: constants.m_const,
        });
    }
    let alpha = constants.alpha;
    let m0 = fit_m0(seq, delta);
    let c = box_beta_constant(m0);
    let gamma = (1.0 - alpha) / (2.0 * c);
    let eta = ((1.0 - alpha) / 2.0).min(gamma / (2.0 * c)) / 2.0;
    let c4 = shell_count(seq);
    let mut p = ConstructionParams::new(delta, m0, gamma, 1, eta, alpha)?;

    // Jump near the answer with the slowest-decaying majorant, then step.
    let e3 = eta - gamma / c;
    let start = (delta / 3.0 * (1.0 - e3.exp2()) / (C3 * c4.max(1) as f64 * gamma.exp2())).log2() / e3;
    p.cap_n = (start.floor().max(1.0) as u64).saturating_sub(2).max(1);
    while !bounds_hold(&p, constants.m_const, c4) {
        p.cap_n += 1;
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftedPoint {
    pub owner: usize,
    pub index: usize,
    pub point: DiscPoint,
}

/// `B(k)`: points at least as deep as `z_k`, inside `20 M0 Q(z_k)` and at
/// `beta >= N`.
fn b_set(seq: &PointSequence, k: usize, p: &ConstructionParams) -> Vec<usize> {
    let zk = seq.get(k);
    let boxk = CarlesonBox::over(&zk, BOX_SCALE * p.m0);
    (0..seq.len())
        .filter(|&n| {
            let zn = seq.get(n);
            n != k
                && zn.depth() <= zk.depth()
                && boxk.contains(&zn)
                && hyperbolic_distance(&zk, &zn) >= p.n()
        })
        .collect()
}

/// Boundary arcs are stored as angles in `[0, 2pi)`, so arcs narrower than
/// a few ulps of `2pi` cannot be represented. The construction refuses
/// points deeper than this.
pub const MIN_DEPTH: f64 = 1e-12;

fn check_depths(seq: &PointSequence) -> Result<()> {
    match seq.points().iter().position(|z| z.depth() < MIN_DEPTH) {
        Some(i) => Err(Error::InvalidParameter {
            name: "seq",
            reason: format!(
                "point {i} has 1-|z| = {:e}, below the arc resolution {MIN_DEPTH:e}",
                seq.get(i).depth()
            ),
        }),
        None => Ok(()),
    }
}

/// `E_k` without the lower bound check, with `omega(z_k, E_k)`.
fn e_sets_unchecked(
    seq: &PointSequence,
    p: &ConstructionParams,
) -> Result<Vec<(ArcSet, f64, Vec<ShiftedPoint>)>> {
    (0..seq.len())
        .into_par_iter()
        .map(|k| {
            let zk = seq.get(k);
            let mut shifted = Vec::new();
            let mut holes = ArcSet::empty();
            for n in b_set(seq, k, p) {
                let point = shifted_point(&zk, &seq.get(n), p.gamma)?;
                holes = holes.union(&base_arc(&point, 1.0));
                shifted.push(ShiftedPoint {
                    owner: k,
                    index: n,
                    point,
                });
            }
            let e = base_arc(&zk, p.m0).difference(&holes);
            let omega = harmonic_measure(&zk, &e);
            Ok((e, omega, shifted))
        })
        .collect()
}

/// `E_k = M0 I_k \ U_{n in B(k)} I(z_n^gamma(k))` with the bound
/// `omega(z_k, E_k) >= 1 - delta/10` enforced.
pub fn build_e_sets(
    seq: &PointSequence,
    p: &ConstructionParams,
) -> Result<(Vec<ArcSet>, Vec<ShiftedPoint>)> {
    check_depths(seq)?;
    let bound = 1.0 - p.delta / 10.0;
    let mut sets = Vec::with_capacity(seq.len());
    let mut all = Vec::new();
    for (k, (e, omega, s)) in e_sets_unchecked(seq, p)?.into_iter().enumerate() {
        if omega < bound {
            return Err(Error::EstimateViolated {
                node: k,
                omega,
                bound,
            });
        }
        sets.push(e);
        all.extend(s);
    }
    Ok((sets, all))
}

/// How the induction produced `G_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GnCase {
    /// No earlier node within `N`: `G_j = E_j`.
    Far,
    /// Earlier near sets already cover `z_j` up to `delta`: `G_j` empty.
    Covered,
    /// `G_j = E_j` minus the earlier near sets.
    Completed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GnFamily {
    pub params: ConstructionParams,
    /// Node indices in construction order.
    pub order: Vec<usize>,
    pub g_sets: Vec<ArcSet>,
    pub e_sets: Vec<ArcSet>,
    /// `A(n) = { k : beta(z_k, z_n) <= N }`, including `n`.
    pub neighbors: Vec<Vec<usize>>,
    pub cases: Vec<GnCase>,
    pub shifted: Vec<ShiftedPoint>,
    /// Measure removed from `G_j` by subtracting earlier far sets as well;
    /// zero whenever the far sets already miss `E_j`.
    pub trimmed: Vec<f64>,
}

/// Decreasing depth, then ascending boundary angle, then input index.
pub fn construction_order(seq: &PointSequence) -> Vec<usize> {
    let mut order: Vec<usize> = (0..seq.len()).collect();
    order.sort_by(|&a, &b| {
        let (za, zb) = (seq.get(a), seq.get(b));
        zb.depth()
            .total_cmp(&za.depth())
            .then(za.boundary_angle().total_cmp(&zb.boundary_angle()))
            .then(a.cmp(&b))
    });
    order
}

pub fn build_gn(seq: &PointSequence, p: &ConstructionParams) -> Result<GnFamily> {
    let d = seq.len();
    let (e_sets, shifted) = build_e_sets(seq, p)?;
    let order = construction_order(seq);
    let neighbors: Vec<Vec<usize>> = (0..d)
        .into_par_iter()
        .map(|n| {
            seq.distances_from(n)
                .into_iter()
                .enumerate()
                .filter(|&(_, b)| b <= p.n())
                .map(|(k, _)| k)
                .collect()
        })
        .collect();

    let mut g_sets = vec![ArcSet::empty(); d];
    let mut cases = vec![GnCase::Far; d];
    let mut trimmed = vec![0.0; d];
    let mut all_earlier = ArcSet::empty();
    for (pos, &j) in order.iter().enumerate() {
        let zj = seq.get(j);
        let near: Vec<usize> = order[..pos]
            .iter()
            .copied()
            .filter(|&k| hyperbolic_distance(&seq.get(k), &zj) <= p.n())
            .collect();
        let (g, case) = if near.is_empty() {
            (e_sets[j].clone(), GnCase::Far)
        } else {
            let cover = near
                .iter()
                .fold(ArcSet::empty(), |acc, &k| acc.union(&g_sets[k]));
            if harmonic_measure(&zj, &cover) >= 1.0 - p.delta {
                (ArcSet::empty(), GnCase::Covered)
            } else {
                (e_sets[j].difference(&cover), GnCase::Completed)
            }
        };
        let safe = g.difference(&all_earlier);
        trimmed[j] = g.measure() - safe.measure();
        all_earlier = all_earlier.union(&safe);
        g_sets[j] = safe;
        cases[j] = case;
    }
    Ok(GnFamily {
        params: *p,
        order,
        g_sets,
        e_sets,
        neighbors,
        cases,
        shifted,
        trimmed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimates {
    /// `omega(z_n, U_{k in A(n)} G_k) - (1 - delta)`.
    pub cover_margin: Vec<f64>,
    /// `sum_{k not in A(n)} 2^(eta beta) omega(z_n, G_k)`.
    pub tail_sum: Vec<f64>,
}

impl Estimates {
    pub fn holds(&self, delta: f64) -> bool {
        self.cover_margin.iter().all(|&m| m >= 0.0) && self.tail_sum.iter().all(|&t| t < delta)
    }
}

pub fn verify_estimates(fam: &GnFamily, seq: &PointSequence) -> Estimates {
    let p = &fam.params;
    let (cover_margin, tail_sum) = (0..seq.len())
        .into_par_iter()
        .map(|n| {
            let zn = seq.get(n);
            let near = fam.neighbors[n]
                .iter()
                .fold(ArcSet::empty(), |acc, &k| acc.union(&fam.g_sets[k]));
            let margin = harmonic_measure(&zn, &near) - (1.0 - p.delta);
            let mut is_near = vec![false; seq.len()];
            for &k in &fam.neighbors[n] {
                is_near[k] = true;
            }
            let tail: f64 = (0..seq.len())
                .filter(|&k| !is_near[k] && !fam.g_sets[k].is_empty())
                .map(|k| {
                    let b = hyperbolic_distance(&seq.get(k), &zn);
                    (p.eta * b).exp2() * harmonic_measure(&zn, &fam.g_sets[k])
                })
                .fold(0.0, |a, t| a + t);
            (margin, tail)
        })
        .unzip();
    Estimates {
        cover_margin,
        tail_sum,
    }
}

/// A boundary function `h` with `|h| <= 1`, `h(z_n) >= gamma` on `T` and
/// `h(z_n) <= -gamma` on `S`, with `gamma` as large as the grid allows.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundedInterpolant {
    pub h: StepDensity,
    pub gamma_level: f64,
    /// `h(z_n)` re-evaluated from the density.
    pub at_nodes: Vec<f64>,
}

/// Maximizes `gamma` over step densities `h = 2p - 1`, `0 <= p <= 1`, on the
/// grid cells. The value at `z_n` is `sum_g h_g omega(z_n, cell_g)` exactly.
pub fn solve_hinfty_partition(
    seq: &PointSequence,
    sides: &[Side],
    spec: &GridSpec,
    tolerance: f64,
) -> Result<BoundedInterpolant> {
    let d = seq.len();
    if sides.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            found: sides.len(),
        });
    }
    let grid = spec.build(seq.points());
    let g = grid.len();
    let kernel: Vec<Vec<f64>> = seq.points().par_iter().map(|z| grid.cell_measures(z)).collect();
    // columns: p_g, gamma, one surplus per row
    let cols = g + 1 + d;
    let mut a = vec![0.0; d * cols];
    let mut b = vec![0.0; d];
    for n in 0..d {
        let row = &mut a[n * cols..(n + 1) * cols];
        for (j, k) in kernel[n].iter().enumerate() {
            row[j] = 2.0 * k;
        }
        b[n] = kernel[n].iter().sum();
        let sign = if sides[n] == Side::T { -1.0 } else { 1.0 };
        row[g] = sign;
        row[g + 1 + n] = sign;
    }
    let mut c = vec![0.0; cols];
    c[g] = -1.0;
    let mut upper = vec![1.0; g + 1];
    upper.extend(std::iter::repeat_n(f64::INFINITY, d));
    let sol = LinearProgram::new(a, b, c, upper)?.solve()?;
    let values: Vec<f64> = sol.x[..g].iter().map(|p| (2.0 * p - 1.0).clamp(-1.0, 1.0)).collect();
    let h = StepDensity::on_grid(&grid, values)?;
    let at_nodes: Vec<f64> = seq.points().iter().map(|z| h.evaluate(z)).collect();
    let gamma_level = at_nodes
        .iter()
        .zip(sides)
        .map(|(v, s)| if *s == Side::T { *v } else { -*v })
        .fold(f64::INFINITY, f64::min);
    if gamma_level <= tolerance {
        return Err(Error::GammaResolution {
            gamma: gamma_level,
            resolution: spec.resolution,
            suggested: spec.refined().resolution,
        });
    }
    Ok(BoundedInterpolant {
        h,
        gamma_level,
        at_nodes,
    })
}

/// `u = sum_k w_k (1 + h) 1_{G_k} dtheta / 2pi`, as an exact step density on
/// the pieces `cell ∩ G_k` and as grid atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct AssembledU {
    pub density: StepDensity,
    /// Node owning each piece of `density`.
    pub owners: Vec<usize>,
    /// Mass `w_k (1 + h_g) |cell_g| / 2pi` at each grid angle lying in `G_k`.
    pub atoms: BoundaryMeasure,
}

impl AssembledU {
    pub fn evaluate(&self, z: &DiscPoint) -> f64 {
        self.density.evaluate(z)
    }

    /// `u(z)` restricted to pieces whose owner passes `keep`.
    pub fn evaluate_where(&self, z: &DiscPoint, keep: impl Fn(usize) -> bool) -> f64 {
        let t = crate::geometry::Mobius::to_origin(*z);
        self.density
            .cells()
            .iter()
            .zip(self.density.values())
            .zip(&self.owners)
            .filter(|(_, &k)| keep(k))
            .map(|((&(lo, len), &v), _)| v * (t.boundary_lift(lo + len) - t.boundary_lift(lo)) / TAU)
            .sum()
    }
}

/// Pieces of the real interval `[lo, lo + len)` lying in `set`.
fn overlap(lo: f64, len: f64, set: &ArcSet) -> Vec<(f64, f64)> {
    let hi = lo + len;
    let mut out = Vec::new();
    for shift in [-TAU, 0.0, TAU] {
        for &(a, b) in set.pieces() {
            let x = lo.max(a + shift);
            let y = hi.min(b + shift);
            if y > x {
                out.push((x, y - x));
            }
        }
    }
    out
}

pub fn assemble_u(values: &[f64], fam: &GnFamily, h: &StepDensity) -> Result<AssembledU> {
    if values.len() != fam.g_sets.len() {
        return Err(Error::LengthMismatch {
            expected: fam.g_sets.len(),
            found: values.len(),
        });
    }
    let mut cells = Vec::new();
    let mut vals = Vec::new();
    let mut owners = Vec::new();
    let mut atoms = Vec::new();
    for (k, g) in fam.g_sets.iter().enumerate() {
        if g.is_empty() {
            continue;
        }
        for (&(lo, len), &hv) in h.cells().iter().zip(h.values()) {
            let weight = values[k] * (1.0 + hv).max(0.0);
            let mid = wrap_tau(lo + 0.5 * len);
            if g.contains_angle(mid) {
                atoms.push((mid, weight * len / TAU));
            }
            for piece in overlap(lo, len, g) {
                cells.push(piece);
                vals.push(weight);
                owners.push(k);
            }
        }
    }
    Ok(AssembledU {
        density: StepDensity::new(cells, vals)?,
        owners,
        atoms: BoundaryMeasure::new(atoms)?,
    })
}

/// `u(z_n)` for the full sum and for the sum over `T` only, with the
/// one-sided verdict of the full sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndgameReport {
    pub u: Vec<f64>,
    pub u_t_only: Vec<f64>,
    pub holds: Vec<bool>,
}

impl EndgameReport {
    pub fn all_hold(&self) -> bool {
        self.holds.iter().all(|&h| h)
    }
}

pub fn check_endgame(
    seq: &PointSequence,
    values: &[f64],
    sides: &[Side],
    u: &AssembledU,
) -> EndgameReport {
    let (mut uu, mut ut, mut holds) = (Vec::new(), Vec::new(), Vec::new());
    for (n, z) in seq.points().iter().enumerate() {
        let full = u.evaluate(z);
        uu.push(full);
        ut.push(u.evaluate_where(z, |k| sides[k] == Side::T));
        holds.push(match sides[n] {
            Side::T => full >= values[n],
            Side::S => full <= values[n],
        });
    }
    EndgameReport {
        u: uu,
        u_t_only: ut,
        holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::generate_compatible_values;
    use proptest::prelude::*;

    fn radial(depth: u32) -> PointSequence {
        PointSequence::new(
            "radial",
            (1..=depth)
                .map(|j| DiscPoint::from_depth((-(j as f64)).exp2(), 0.0).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn radial_params(depth: u32, delta: f64) -> (PointSequence, ConstructionParams) {
        let s = radial(depth);
        let (m, _) = fit_condition_a(&s, 0.5);
        let p = choose_params(&s, &DensityConstants::new(m, 0.5).unwrap(), delta).unwrap();
        (s, p)
    }

    /// Bisection for the depth of the radial point at distance `b` from `zn`.
    fn bisect_shift(zn: &DiscPoint, b: f64) -> f64 {
        let (mut lo, mut hi) = (zn.depth(), 1.0);
        while hi - lo > 1e-12 * hi {
            let mid = 0.5 * (lo + hi);
            let p = DiscPoint::from_depth(mid, zn.arg()).unwrap();
            if hyperbolic_distance(&p, zn) < b {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn m0_at_origin_and_monotone() {
        let s = PointSequence::new("o", vec![DiscPoint::ORIGIN]).unwrap();
        assert_eq!(fit_m0(&s, 0.1), 1.0);
        let one = PointSequence::new("p", vec![DiscPoint::new(0.9, 0.0).unwrap()]).unwrap();
        let m0 = fit_m0(&one, 0.5);
        let z = one.get(0);
        assert!(harmonic_measure(&z, &base_arc(&z, m0)) >= 0.995);
        assert!(harmonic_measure(&z, &base_arc(&z, m0 / 2.0)) < 0.995);
        let r = radial(6);
        let ms: Vec<f64> = [0.05, 0.1, 0.2, 0.4, 0.8].iter().map(|&d| fit_m0(&r, d)).collect();
        assert!(ms.windows(2).all(|w| w[1] <= w[0]), "{ms:?}");
    }

    #[test]
    fn shifted_point_examples() {
        let zn = DiscPoint::new(1.0 / 3.0, 0.0).unwrap();
        let p = shifted_point(&DiscPoint::ORIGIN, &zn, 1.0).unwrap();
        assert!(p.modulus() < 1e-12);
        assert!((hyperbolic_distance(&p, &zn) - 1.0).abs() < 1e-10);
        let q = shifted_point(&DiscPoint::ORIGIN, &zn, 0.0).unwrap();
        assert_eq!(q, zn);
        assert!(matches!(
            shifted_point(&DiscPoint::ORIGIN, &zn, 1.5),
            Err(Error::ShiftPastOrigin { .. })
        ));
    }

    #[test]
    fn lambda_leaves_room_for_e_sets() {
        let d = 0.3;
        assert!(1.0 - d / 100.0 - 2.0 * d / 25.0 >= 1.0 - d / 10.0);
    }

    #[test]
    fn n_grows_as_delta_shrinks() {
        let s = radial(6);
        let (m, _) = fit_condition_a(&s, 0.5);
        let c = DensityConstants::new(m, 0.5).unwrap();
        let ns: Vec<u64> = [0.4, 0.2, 0.1, 0.05]
            .iter()
            .map(|&d| choose_params(&s, &c, d).unwrap().cap_n)
            .collect();
        assert!(ns.windows(2).all(|w| w[1] >= w[0]), "{ns:?}");
    }

    #[test]
    fn params_respect_invariants_and_bounds() {
        let (s, p) = radial_params(10, 0.2);
        assert!(p.alpha + p.c_m0() * p.gamma < 1.0);
        assert!(p.eta < ((1.0 - p.alpha) / 2.0).min(p.gamma / (2.0 * p.c_m0())));
        let t = tail_bounds(&p, fit_condition_a(&s, 0.5).0, shell_count(&s));
        assert!(t.shifted_mass <= p.lambda());
        assert!(t.near_far <= p.delta / 3.0 && t.stolz <= p.delta / 3.0);
        let mut q = p;
        q.cap_n -= 1;
        assert!(!bounds_hold(&q, fit_condition_a(&s, 0.5).0, shell_count(&s)));
    }

    #[test]
    fn choose_params_rejects_dense_sequences() {
        let s = radial(6);
        let c = DensityConstants::new(0.5, 0.5).unwrap();
        assert!(matches!(choose_params(&s, &c, 0.2), Err(Error::DensityViolated { .. })));
    }

    #[test]
    fn radial_pipeline() {
        let (s, p) = radial_params(10, 0.2);
        let fam = build_gn(&s, &p).unwrap();
        for k in 0..s.len() {
            assert!(fam.g_sets[k].is_subset(&fam.e_sets[k]));
            assert!(fam.e_sets[k].is_subset(&base_arc(&s.get(k), p.m0)));
            assert!(harmonic_measure(&s.get(k), &fam.e_sets[k]) >= 1.0 - p.delta / 10.0);
            for j in k + 1..s.len() {
                assert!(fam.g_sets[k].is_disjoint(&fam.g_sets[j]));
            }
        }
        let est = verify_estimates(&fam, &s);
        assert!(est.holds(p.delta), "{est:?}");
        assert!(fam.trimmed.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn single_node_family() {
        let s = PointSequence::new("one", vec![DiscPoint::new(0.3, 0.4).unwrap()]).unwrap();
        let p = choose_params(&s, &DensityConstants::new(1.0, 0.5).unwrap(), 0.2).unwrap();
        let fam = build_gn(&s, &p).unwrap();
        assert_eq!(fam.g_sets[0], fam.e_sets[0]);
        assert_eq!(fam.cases[0], GnCase::Far);
        let est = verify_estimates(&fam, &s);
        assert!(est.cover_margin[0] >= p.delta - p.delta / 10.0);
        assert_eq!(est.tail_sum[0], 0.0);
    }

    #[test]
    fn two_far_nodes_keep_their_e_sets() {
        let s = PointSequence::new(
            "far",
            vec![
                DiscPoint::from_depth(1e-3, 0.0).unwrap(),
                DiscPoint::from_depth(1e-3, PI).unwrap(),
            ],
        )
        .unwrap();
        let m0 = fit_m0(&s, 0.2);
        let c = box_beta_constant(m0);
        let gamma = 0.25 / c;
        let p = ConstructionParams::new(0.2, m0, gamma, 10, gamma / (4.0 * c), 0.5).unwrap();
        assert!(hyperbolic_distance(&s.get(0), &s.get(1)) > p.n());
        let fam = build_gn(&s, &p).unwrap();
        assert_eq!(fam.cases, vec![GnCase::Far, GnCase::Far]);
        assert_eq!(fam.g_sets, fam.e_sets);
        assert!(fam.g_sets[0].is_disjoint(&fam.g_sets[1]));
        let est = verify_estimates(&fam, &s);
        // tail terms obey omega(z_n, G_k) <= 2 M0 2^C(M0) 2^-beta
        let b = hyperbolic_distance(&s.get(0), &s.get(1));
        for n in 0..2 {
            assert!(est.tail_sum[n] <= (p.eta * b).exp2() * 2.0 * m0 * c.exp2() * (-b).exp2());
        }
    }

    #[test]
    fn e_sets_of_far_pairs_are_disjoint() {
        // m0 = 1 breaks the harmonic measure bound but not the geometry
        let pts: Vec<DiscPoint> = (1..=12)
            .map(|j| DiscPoint::from_depth((-3.0 * j as f64).exp2(), 0.0).unwrap())
            .collect();
        let s = PointSequence::new("radial3", pts).unwrap();
        let c = box_beta_constant(1.0);
        let gamma = 0.95 / c;
        let n = (1.0 / gamma).ceil() as u64;
        let p = ConstructionParams::new(0.5, 1.0, gamma, n, gamma / (4.0 * c), 0.0).unwrap();
        let e = e_sets_unchecked(&s, &p).unwrap();
        assert!(e.iter().any(|x| !x.2.is_empty()));
        let mut far = 0;
        for k in 0..s.len() {
            for j in 0..s.len() {
                if hyperbolic_distance(&s.get(k), &s.get(j)) > p.n() {
                    far += 1;
                    assert!(e[k].0.is_disjoint(&e[j].0), "{k} {j}");
                }
            }
        }
        assert!(far > 0);
        assert!(matches!(build_e_sets(&s, &p), Err(Error::EstimateViolated { .. })));
    }

    #[test]
    fn too_deep_points_are_refused() {
        let s = PointSequence::new("deep", vec![DiscPoint::from_depth(1e-20, 0.0).unwrap()]).unwrap();
        let c = DensityConstants::new(1.0, 0.5).unwrap();
        assert!(matches!(choose_params(&s, &c, 0.2), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn hinfty_single_node() {
        let s = PointSequence::new("one", vec![DiscPoint::new(0.2, -0.1).unwrap()]).unwrap();
        let spec = GridSpec::new(64, 4).unwrap();
        let b = solve_hinfty_partition(&s, &[Side::T], &spec, 1e-9).unwrap();
        assert!((b.gamma_level - 1.0).abs() < 1e-9);
        assert!(b.h.values().iter().all(|&v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn hinfty_pair_and_symmetry() {
        let z = DiscPoint::from_depth(0.2, 0.3).unwrap();
        let w = DiscPoint::from_depth(0.2, 0.3 + 0.6).unwrap();
        let s = PointSequence::new("pair", vec![z, w]).unwrap();
        let spec = GridSpec::new(512, 16).unwrap();
        let a = solve_hinfty_partition(&s, &[Side::T, Side::S], &spec, 1e-9).unwrap();
        let b = solve_hinfty_partition(&s, &[Side::S, Side::T], &spec, 1e-9).unwrap();
        assert!(a.gamma_level > 0.0);
        assert!((a.gamma_level - b.gamma_level).abs() < 1e-9);
        assert!(a.h.evaluate(&z) >= a.gamma_level - 1e-12);
        assert!(a.h.evaluate(&w) <= -a.gamma_level + 1e-12);
        assert!(a.h.values().iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn u_of_a_single_full_set() {
        let z = DiscPoint::new(0.5, 0.2).unwrap();
        let s = PointSequence::new("one", vec![z]).unwrap();
        let p = choose_params(&s, &DensityConstants::new(1.0, 0.5).unwrap(), 0.5).unwrap();
        let mut fam = build_gn(&s, &p).unwrap();
        fam.g_sets[0] = ArcSet::full();
        let grid = GridSpec::new(64, 0).unwrap().build(&[]);
        let h = StepDensity::on_grid(&grid, vec![0.0; grid.len()]).unwrap();
        let u = assemble_u(&[1.0], &fam, &h).unwrap();
        assert!((u.evaluate(&z) - 1.0).abs() < 1e-12);
        assert!((u.atoms.total_mass() - 1.0).abs() < 1e-12);
        let u3 = assemble_u(&[3.0], &fam, &h).unwrap();
        assert!((u3.evaluate(&z) - 3.0 * u.evaluate(&z)).abs() < 1e-12);
    }

    #[test]
    fn radial_endgame() {
        let (s, p) = radial_params(6, 0.2);
        let fam = build_gn(&s, &p).unwrap();
        let sides: Vec<Side> = (0..s.len()).map(|n| if n % 2 == 0 { Side::T } else { Side::S }).collect();
        let hb = solve_hinfty_partition(&s, &sides, &GridSpec::default(), 1e-9).unwrap();
        let eps = p.eta.min(0.02) / 2.0;
        for seed in 0..3 {
            let w = generate_compatible_values(&s, eps, seed);
            let u = assemble_u(&w, &fam, &hb.h).unwrap();
            let rep = check_endgame(&s, &w, &sides, &u);
            assert!(rep.all_hold(), "{rep:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn shift_matches_distance_and_bisection(
            dn in 1e-6f64..0.5, dk in 0.5f64..1.0, tk in -3.0f64..3.0, tn in -3.0f64..3.0, g in 0.0f64..0.3,
        ) {
            let zn = DiscPoint::from_depth(dn, tn).unwrap();
            let zk = DiscPoint::from_depth(dk, tk).unwrap();
            let b = g * hyperbolic_distance(&zk, &zn);
            if let Ok(p) = shifted_point(&zk, &zn, g) {
                prop_assert!((p.arg() - zn.arg()).abs() < 1e-15 || p.is_origin());
                prop_assert!(p.depth() >= zn.depth());
                prop_assert!((hyperbolic_distance(&p, &zn) - b).abs() < 1e-10);
                if p.depth() < 0.99 {
                    let q = bisect_shift(&zn, b);
                    prop_assert!((q - p.depth()).abs() <= 1e-10 * p.depth().max(1e-3));
                }
            }
        }

        #[test]
        fn depth_sandwich(m0e in 0u32..6, ln in 4.0f64..40.0, off in -1.0f64..1.0) {
            let m0 = 2f64.powi(m0e as i32);
            let c = box_beta_constant(m0);
            let gamma = 0.5 / (2.0 * c);
            let eta = gamma / (4.0 * c);
            let mut p = ConstructionParams::new(0.2, m0, gamma, 1, eta, 0.5).unwrap();
            while !(p.n() - 2.0 >= (1.0 + 2.0 * p.gamma) / (p.gamma * (1.0 - 1.0 / c)) + c) {
                p.cap_n += 1;
            }
            let zk = DiscPoint::from_depth(0.5, 0.0).unwrap();
            let dn = 0.5 * (-ln - p.n()).exp2();
            let zn = DiscPoint::from_depth(dn, off * PI * 20.0 * m0 * 0.5 * 0.999).unwrap();
            prop_assume!(CarlesonBox::over(&zk, 20.0 * m0).contains(&zn));
            prop_assume!(hyperbolic_distance(&zk, &zn) >= p.n());
            let q = shifted_point(&zk, &zn, gamma).unwrap();
            let ratio = zk.depth() / zn.depth();
            let r = q.depth() / zn.depth();
            prop_assert!(ratio.powf(gamma / c) <= r * (1.0 + 1e-12));
            prop_assert!(r <= ratio.powf(c * gamma) * (1.0 + 1e-12));
            // M0 I_n sits inside I(z_n^gamma(k))
            prop_assert!(base_arc(&zn, m0).is_subset(&base_arc(&q, 1.0)));
        }
    }
}

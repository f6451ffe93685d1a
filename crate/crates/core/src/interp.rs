//! Finite interpolation by positive harmonic functions.
//!
//! A problem asks for `u` in `h+` with `u(z_n) = w_n`. On a finite set of
//! boundary angles this is a linear feasibility question in the atom masses:
//! is `w` in the cone spanned by the Poisson columns
//! `(2 pi P_{z_n}(theta_g))_n`? Rows are divided by `w_n`, and paired slacks
//! absorb any mismatch; the problem is feasible when the total slack
//! vanishes. Otherwise the LP duals give a Farkas vector separating `w` from
//! the cone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::hyperbolic_distance;
use crate::measure::{poisson_weight, BoundaryGrid, BoundaryMeasure, GridSpec};
use crate::sequence::PointSequence;
use crate::simplex::{verify_farkas_exact, LinearProgram};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// Largest problem handed to the partition oracle (`2^d` LPs).
pub const PARTITION_CAP: usize = 20;
/// Certificates of problems up to this size are re-checked in exact
/// rational arithmetic.
pub const EXACT_CHECK_MAX: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationProblem {
    seq: PointSequence,
    values: Vec<f64>,
    epsilon: f64,
    tolerance: f64,
}

impl InterpolationProblem {
    pub fn new(seq: PointSequence, values: Vec<f64>, epsilon: f64, tolerance: f64) -> Result<Self> {
        if values.len() != seq.len() {
            return Err(Error::LengthMismatch {
                expected: seq.len(),
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: format!("values must be positive and finite, got {v}"),
            });
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("must lie in (0, 1], got {epsilon}"),
            });
        }
        if !(tolerance > 0.0 && tolerance <= 1e-3) {
            return Err(Error::InvalidParameter {
                name: "tolerance",
                reason: format!("must lie in (0, 1e-3], got {tolerance}"),
            });
        }
        Ok(Self {
            seq,
            values,
            epsilon,
            tolerance,
        })
    }

    pub fn seq(&self) -> &PointSequence {
        &self.seq
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(
            self.seq.clone(),
            self.values.iter().map(|v| v * s).collect(),
            self.epsilon,
            self.tolerance,
        )
    }
}

/// Worst pair for the compatibility inequality, with the ratio
/// `|log2 w_n - log2 w_m| / (eps beta(z_n, z_m))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstPair {
    pub first: usize,
    pub second: usize,
    pub ratio: f64,
}

/// Checks `|log2 w_n - log2 w_m| <= eps beta(z_n, z_m)` on all pairs.
pub fn check_compatibility(p: &InterpolationProblem) -> (bool, Option<WorstPair>) {
    log_compatibility(p.seq(), &p.values.iter().map(|v| v.log2()).collect::<Vec<_>>(), p.epsilon)
}

/// Compatibility of arbitrary per-point levels `L_n` in the form
/// `|L_n - L_m| <= eps beta(z_n, z_m)`.
pub(crate) fn log_compatibility(
    seq: &PointSequence,
    levels: &[f64],
    epsilon: f64,
) -> (bool, Option<WorstPair>) {
    let n = seq.len();
    let mut ok = true;
    let mut worst: Option<WorstPair> = None;
    for i in 0..n {
        for j in i + 1..n {
            let beta = hyperbolic_distance(&seq.get(i), &seq.get(j));
            let diff = (levels[i] - levels[j]).abs();
            let allowed = epsilon * beta;
            if diff > allowed * (1.0 + 1e-12) + 1e-14 {
                ok = false;
            }
            let ratio = if allowed > 0.0 { diff / allowed } else { f64::INFINITY };
            if worst.is_none_or(|w| ratio > w.ratio) {
                worst = Some(WorstPair {
                    first: i,
                    second: j,
                    ratio,
                });
            }
        }
    }
    (ok, worst)
}

/// Offsets `c_m` for [`generate_compatible_values`] are drawn from
/// `[0, OFFSET_RANGE)`, one dyadic unit of hyperbolic distance.
pub const OFFSET_RANGE: f64 = 1.0;

/// `w_n = 2^(eps L(n))` with `L(n) = min_m (c_m + beta(z_n, z_m))`.
pub fn generate_compatible_values(seq: &PointSequence, epsilon: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets: Vec<f64> = (0..seq.len()).map(|_| rng.gen_range(0.0..OFFSET_RANGE)).collect();
    values_from_offsets(seq, epsilon, &offsets)
}

pub fn values_from_offsets(seq: &PointSequence, epsilon: f64, offsets: &[f64]) -> Vec<f64> {
    (0..seq.len())
        .map(|n| {
            let l = (0..seq.len())
                .map(|m| offsets[m] + hyperbolic_distance(&seq.get(n), &seq.get(m)))
                .fold(f64::INFINITY, f64::min);
            (epsilon * l).exp2()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Feasible,
    Infeasible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    T,
    S,
}

/// A vector `x` with `<x, w> > 0` and `sum_n x_n 2 pi P_{z_n}(theta_g) <= 0`
/// for every grid angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub x: Vec<f64>,
    pub sides: Vec<Side>,
    /// `<x, w>`.
    pub margin: f64,
    /// `max_g sum_n x_n 2 pi P_{z_n}(theta_g)`, nonpositive when sound.
    pub worst_column: f64,
    /// Outcome of the exact rational re-check, when the problem is small enough.
    pub exact: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationResult {
    pub status: Status,
    pub measure: Option<BoundaryMeasure>,
    pub certificate: Option<Certificate>,
    /// `|u(z_n) - w_n| / w_n` re-evaluated from the returned measure.
    pub residuals: Vec<f64>,
    /// Total relative slack at the LP optimum.
    pub slack: f64,
    pub grid_size: usize,
}

impl InterpolationResult {
    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, &r| m.max(r))
    }
}

/// The Poisson matrix of a problem on a fixed grid, rows scaled by `1/w_n`.
pub struct PoissonSystem {
    grid: BoundaryGrid,
    d: usize,
    /// Row-major `d x grid.len()`, unscaled.
    kernel: Vec<f64>,
    values: Vec<f64>,
}

impl PoissonSystem {
    pub fn new(seq: &PointSequence, values: &[f64], spec: &GridSpec) -> Self {
        let grid = spec.build(seq.points());
        let g = grid.len();
        let kernel: Vec<f64> = seq
            .points()
            .par_iter()
            .flat_map_iter(|z| grid.angles().iter().map(move |&t| poisson_weight(z, t)))
            .collect();
        debug_assert_eq!(kernel.len(), seq.len() * g);
        Self {
            grid,
            d: seq.len(),
            kernel,
            values: values.to_vec(),
        }
    }

    pub fn grid(&self) -> &BoundaryGrid {
        &self.grid
    }

    fn scaled_row(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let g = self.grid.len();
        let w = self.values[n];
        self.kernel[n * g..(n + 1) * g].iter().map(move |k| k / w)
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let g = self.grid.len();
        (0..self.d).map(|n| self.kernel[n * g + j]).collect()
    }

    /// `min sum(s+ + s-)` with `A' m + s+ - s- = 1`. Returns
    /// `(masses, slack, duals)`.
    fn direct_lp(&self) -> Result<(Vec<f64>, f64, Vec<f64>)> {
        let (d, g) = (self.d, self.grid.len());
        let cols = g + 2 * d;
        let mut a = vec![0.0; d * cols];
        for n in 0..d {
            for (j, v) in self.scaled_row(n).enumerate() {
                a[n * cols + j] = v;
            }
            a[n * cols + g + n] = 1.0;
            a[n * cols + g + d + n] = -1.0;
        }
        let mut c = vec![0.0; cols];
        for v in &mut c[g..] {
            *v = 1.0;
        }
        let lp = LinearProgram::new(a, vec![1.0; d], c, vec![f64::INFINITY; cols])?;
        let sol = lp.solve()?;
        Ok((sol.x[..g].to_vec(), sol.objective.max(0.0), sol.duals))
    }

    /// One-sided problem: `A' m >= 1` on T (with penalized shortfall) and
    /// `A' m <= 1` on S. Returns the total shortfall.
    fn one_sided_lp(&self, sides: &[Side]) -> Result<(Vec<f64>, f64)> {
        let (d, g) = (self.d, self.grid.len());
        let t_rows: Vec<usize> = (0..d).filter(|&n| sides[n] == Side::T).collect();
        // columns: masses, one surplus/slack per row, one shortfall per T row
        let cols = g + d + t_rows.len();
        let mut a = vec![0.0; d * cols];
        for n in 0..d {
            for (j, v) in self.scaled_row(n).enumerate() {
                a[n * cols + j] = v;
            }
            a[n * cols + g + n] = if sides[n] == Side::T { -1.0 } else { 1.0 };
        }
        let mut c = vec![0.0; cols];
        for (k, &n) in t_rows.iter().enumerate() {
            a[n * cols + g + d + k] = 1.0;
            c[g + d + k] = 1.0;
        }
        let lp = LinearProgram::new(a, vec![1.0; d], c, vec![f64::INFINITY; cols])?;
        let sol = lp.solve()?;
        Ok((sol.x[..g].to_vec(), sol.objective.max(0.0)))
    }

    fn measure_from(&self, masses: &[f64]) -> Result<BoundaryMeasure> {
        BoundaryMeasure::new(
            self.grid
                .angles()
                .iter()
                .zip(masses)
                .filter(|(_, &m)| m > 0.0)
                .map(|(&t, &m)| (t, m)),
        )
    }

    /// Turns LP duals into a certificate whose grid inequalities hold
    /// strictly in floating point: subtract a multiple of the all-ones
    /// vector (every column is positive) until no column is positive.
    fn certificate(&self, duals: &[f64]) -> Certificate {
        let (d, g) = (self.d, self.grid.len());
        let column_value = |y: &[f64], j: usize| -> f64 {
            (0..d).map(|n| y[n] * self.kernel[n * g + j] / self.values[n]).sum()
        };
        let mut y = duals.to_vec();
        let mut shift: f64 = 0.0;
        for j in 0..g {
            let v = column_value(&y, j);
            if v > 0.0 {
                let colsum: f64 = (0..d).map(|n| self.kernel[n * g + j] / self.values[n]).sum();
                shift = shift.max(v / colsum);
            }
        }
        if shift > 0.0 {
            let pad = shift * (1.0 + 1e-6) + 1e-15 * y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for v in &mut y {
                *v -= pad;
            }
        }
        let x: Vec<f64> = y.iter().zip(&self.values).map(|(y, w)| y / w).collect();
        let margin: f64 = x.iter().zip(&self.values).map(|(a, b)| a * b).sum();
        let worst_column = (0..g)
            .map(|j| (0..d).map(|n| x[n] * self.kernel[n * g + j]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        let exact = (d <= EXACT_CHECK_MAX).then(|| {
            let cols: Vec<Vec<f64>> = (0..g).map(|j| self.column(j)).collect();
            verify_farkas_exact(&x, &self.values, cols.iter().map(|c| c.as_slice()))
        });
        Certificate {
            sides: x.iter().map(|&v| if v >= 0.0 { Side::T } else { Side::S }).collect(),
            x,
            margin,
            worst_column,
            exact,
        }
    }
}

fn residuals(seq: &PointSequence, values: &[f64], mu: &BoundaryMeasure) -> Vec<f64> {
    seq.points()
        .iter()
        .zip(values)
        .map(|(z, w)| (mu.poisson_integral(z) - w).abs() / w)
        .collect()
}

/// Decides the problem on the grid. Feasible means total relative slack at
/// most `tolerance`; the returned measure is then re-evaluated at every node.
pub fn solve_direct(p: &InterpolationProblem, spec: &GridSpec) -> Result<InterpolationResult> {
    let sys = PoissonSystem::new(p.seq(), p.values(), spec);
    solve_direct_with(p, &sys)
}

pub fn solve_direct_with(p: &InterpolationProblem, sys: &PoissonSystem) -> Result<InterpolationResult> {
    let (masses, slack, duals) = sys.direct_lp()?;
    let grid_size = sys.grid().len();
    if slack <= p.tolerance {
        let mu = sys.measure_from(&masses)?;
        let res = residuals(p.seq(), p.values(), &mu);
        return Ok(InterpolationResult {
            status: Status::Feasible,
            measure: Some(mu),
            certificate: None,
            residuals: res,
            slack,
            grid_size,
        });
    }
    let cert = sys.certificate(&duals);
    let res = match sys.measure_from(&masses) {
        Ok(mu) => residuals(p.seq(), p.values(), &mu),
        Err(_) => vec![f64::NAN; p.len()],
    };
    Ok(InterpolationResult {
        status: Status::Infeasible,
        measure: None,
        certificate: Some(cert),
        residuals: res,
        slack,
        grid_size,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneSidedResult {
    pub feasible: bool,
    pub shortfall: f64,
    pub measure: Option<BoundaryMeasure>,
}

/// Nonnegative atoms with `u(z_n) >= w_n` on `T` and `u(z_n) <= w_n` on `S`.
pub fn solve_one_sided(
    seq: &PointSequence,
    values: &[f64],
    sides: &[Side],
    spec: &GridSpec,
    tolerance: f64,
) -> Result<OneSidedResult> {
    if sides.len() != seq.len() || values.len() != seq.len() {
        return Err(Error::LengthMismatch {
            expected: seq.len(),
            found: sides.len().min(values.len()),
        });
    }
    let sys = PoissonSystem::new(seq, values, spec);
    let (masses, shortfall) = sys.one_sided_lp(sides)?;
    let feasible = shortfall <= tolerance;
    Ok(OneSidedResult {
        feasible,
        shortfall,
        measure: if feasible { Some(sys.measure_from(&masses)?) } else { None },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionVerdict {
    pub feasible: bool,
    pub failing_partition: Option<Vec<Side>>,
    pub partitions_checked: usize,
}

fn sides_of(mask: u32, d: usize) -> Vec<Side> {
    (0..d)
        .map(|n| if mask >> n & 1 == 1 { Side::T } else { Side::S })
        .collect()
}

/// Feasible iff every one-sided problem is feasible; stops at the first
/// failing partition (in increasing bitmask order, bit `n` set = node `n`
/// in `T`).
pub fn solve_by_partitions(p: &InterpolationProblem, spec: &GridSpec) -> Result<PartitionVerdict> {
    let d = p.len();
    if d > PARTITION_CAP {
        return Err(Error::TooManyNodes {
            nodes: d,
            cap: PARTITION_CAP,
        });
    }
    let sys = PoissonSystem::new(p.seq(), p.values(), spec);
    for mask in 0..(1u32 << d) {
        let sides = sides_of(mask, d);
        let (_, shortfall) = sys.one_sided_lp(&sides)?;
        if shortfall > p.tolerance {
            return Ok(PartitionVerdict {
                feasible: false,
                failing_partition: Some(sides),
                partitions_checked: mask as usize + 1,
            });
        }
    }
    Ok(PartitionVerdict {
        feasible: true,
        failing_partition: None,
        partitions_checked: 1 << d,
    })
}

/// Fraction of `trials` seeded compatible value sets that are feasible, for
/// each `eps`. Trial `t` uses seed `seed + t` for every `eps`.
pub fn epsilon_profile(
    seq: &PointSequence,
    spec: &GridSpec,
    trials: usize,
    eps_grid: &[f64],
    seed: u64,
    tolerance: f64,
) -> Result<Vec<(f64, f64)>> {
    if trials == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            reason: "need at least one trial".into(),
        });
    }
    eps_grid
        .iter()
        .map(|&eps| {
            let hits = (0..trials)
                .into_par_iter()
                .map(|t| -> Result<usize> {
                    let values = generate_compatible_values(seq, eps, seed.wrapping_add(t as u64));
                    let p = InterpolationProblem::new(seq.clone(), values, eps, tolerance)?;
                    Ok(solve_direct(&p, spec)?.is_feasible() as usize)
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .sum::<usize>();
            Ok((eps, hits as f64 / trials as f64))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DiscPoint, Mobius};

    fn seq(points: Vec<DiscPoint>) -> PointSequence {
        PointSequence::new("t", points).unwrap()
    }

    fn radial(depth: u32) -> PointSequence {
        seq((1..=depth)
            .map(|j| DiscPoint::from_depth((-(j as f64)).exp2(), 0.0).unwrap())
            .collect())
    }

    fn harnack_pair() -> InterpolationProblem {
        let s = seq(vec![DiscPoint::ORIGIN, DiscPoint::new(1.0 / 3.0, 0.0).unwrap()]);
        InterpolationProblem::new(s, vec![1.0, 3.0], 1.0, DEFAULT_TOLERANCE).unwrap()
    }

    fn small_grid() -> GridSpec {
        GridSpec::new(512, 16).unwrap()
    }

    #[test]
    fn problem_validation() {
        let s = seq(vec![DiscPoint::ORIGIN]);
        assert!(InterpolationProblem::new(s.clone(), vec![1.0, 2.0], 0.5, 1e-8).is_err());
        assert!(InterpolationProblem::new(s.clone(), vec![0.0], 0.5, 1e-8).is_err());
        assert!(InterpolationProblem::new(s.clone(), vec![1.0], 0.0, 1e-8).is_err());
        assert!(InterpolationProblem::new(s, vec![1.0], 0.5, 1e-2).is_err());
    }

    #[test]
    fn compatibility_examples() {
        let s = seq(vec![DiscPoint::ORIGIN, DiscPoint::new(1.0 / 3.0, 0.0).unwrap()]);
        let p = InterpolationProblem::new(s.clone(), vec![4.0, 4.0], 0.1, 1e-8).unwrap();
        assert!(check_compatibility(&p).0);
        let eps: f64 = 0.37;
        let p = InterpolationProblem::new(s.clone(), vec![1.0, eps.exp2()], eps, 1e-8).unwrap();
        let (ok, w) = check_compatibility(&p);
        assert!(ok && (w.unwrap().ratio - 1.0).abs() < 1e-12);
        let (ok, w) = check_compatibility(&harnack_pair());
        assert!(!ok);
        assert_eq!((w.unwrap().first, w.unwrap().second), (0, 1));
    }

    #[test]
    fn generated_values_are_compatible() {
        let s = radial(7);
        for seed in 0..100 {
            let eps = 0.05 + 0.9 * (seed as f64 / 100.0);
            let v = generate_compatible_values(&s, eps, seed);
            let p = InterpolationProblem::new(s.clone(), v, eps, 1e-8).unwrap();
            assert!(check_compatibility(&p).0, "seed {seed}");
        }
        assert_eq!(values_from_offsets(&s, 0.3, &[0.0; 7]), vec![1.0; 7]);
        let one = seq(vec![DiscPoint::new(0.1, 0.2).unwrap()]);
        assert_eq!(values_from_offsets(&one, 0.5, &[3.0]), vec![1.5f64.exp2()]);
    }

    #[test]
    fn single_node_is_feasible() {
        let p = InterpolationProblem::new(seq(vec![DiscPoint::ORIGIN]), vec![5.0], 1.0, 1e-8).unwrap();
        let r = solve_direct(&p, &small_grid()).unwrap();
        assert!(r.is_feasible());
        assert!((r.measure.as_ref().unwrap().total_mass() - 5.0).abs() < 1e-12);
        assert!(r.max_residual() < 1e-12);
        let v = solve_by_partitions(&p, &small_grid()).unwrap();
        assert!(v.feasible && v.partitions_checked == 2);
    }

    #[test]
    fn harnack_violation_yields_certificate() {
        let p = harnack_pair();
        let r = solve_direct(&p, &GridSpec::default()).unwrap();
        assert_eq!(r.status, Status::Infeasible);
        let c = r.certificate.unwrap();
        assert!(c.margin > 0.0);
        assert!(c.worst_column <= 1e-9);
        assert_eq!(c.exact, Some(true));
        // raising the far value is what breaks the problem
        assert_eq!(c.sides, vec![Side::S, Side::T]);
        let v = solve_by_partitions(&p, &GridSpec::default()).unwrap();
        assert!(!v.feasible);
        assert_eq!(v.failing_partition, Some(vec![Side::S, Side::T]));
    }

    #[test]
    fn radial_compatible_values_are_feasible() {
        let s = radial(8);
        for seed in 0..20 {
            let v = generate_compatible_values(&s, 0.05, seed);
            let p = InterpolationProblem::new(s.clone(), v, 0.05, DEFAULT_TOLERANCE).unwrap();
            let r = solve_direct(&p, &GridSpec::default()).unwrap();
            assert!(r.is_feasible(), "seed {seed}: slack {}", r.slack);
            assert!(r.max_residual() <= DEFAULT_TOLERANCE, "{:?}", r.residuals);
        }
    }

    #[test]
    fn partition_oracle_agrees_on_radial() {
        let s = radial(5);
        for seed in 0..3 {
            let v = generate_compatible_values(&s, 0.05, seed);
            let p = InterpolationProblem::new(s.clone(), v, 0.05, DEFAULT_TOLERANCE).unwrap();
            let direct = solve_direct(&p, &small_grid()).unwrap();
            let parts = solve_by_partitions(&p, &small_grid()).unwrap();
            assert_eq!(direct.is_feasible(), parts.feasible);
        }
    }

    #[test]
    fn scaling_preserves_status() {
        let s = radial(4);
        let v = generate_compatible_values(&s, 0.1, 3);
        let p = InterpolationProblem::new(s, v, 0.1, DEFAULT_TOLERANCE).unwrap();
        let a = solve_direct(&p, &small_grid()).unwrap();
        let b = solve_direct(&p.scaled(7.5).unwrap(), &small_grid()).unwrap();
        assert_eq!(a.status, b.status);
        assert!(a.is_feasible());
        // the scaled measure solves the scaled problem
        let mu = a.measure.unwrap().scaled(7.5).unwrap();
        let q = p.scaled(7.5).unwrap();
        let res = residuals(q.seq(), q.values(), &mu);
        assert!(res.iter().all(|&r| r <= 1e-9), "{res:?}");
    }

    #[test]
    fn automorphisms_preserve_status() {
        let s = radial(4);
        let v = generate_compatible_values(&s, 0.2, 11);
        let moved = s.mapped(&Mobius::to_origin(DiscPoint::new(0.3, -0.4).unwrap())).unwrap();
        for (sq, expect) in [(s.clone(), true), (moved, true)] {
            let p = InterpolationProblem::new(sq, v.clone(), 0.2, DEFAULT_TOLERANCE).unwrap();
            assert_eq!(solve_direct(&p, &GridSpec::default()).unwrap().is_feasible(), expect);
        }
        let p = harnack_pair();
        let moved = p.seq().mapped(&Mobius::to_origin(DiscPoint::new(-0.5, 0.2).unwrap())).unwrap();
        let q = InterpolationProblem::new(moved, p.values().to_vec(), 1.0, DEFAULT_TOLERANCE).unwrap();
        assert!(!solve_direct(&q, &GridSpec::default()).unwrap().is_feasible());
    }

    #[test]
    fn profile_of_a_single_node_is_flat() {
        let s = seq(vec![DiscPoint::new(0.2, 0.2).unwrap()]);
        let prof = epsilon_profile(&s, &small_grid(), 3, &[0.1, 0.5, 1.0], 0, 1e-8).unwrap();
        assert!(prof.iter().all(|&(_, r)| r == 1.0));
    }
}

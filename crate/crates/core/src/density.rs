//! Density conditions for finite sequences.
//!
//! Every check computes the smallest constant for which the condition
//! holds at a given exponent (the "fitted" constant), then compares it
//! with the supplied one. The witness is the base point and scale where
//! the ratio is largest.
//!
//! Counting uses `beta <= l + DIST_SLACK`. Gallery points placed exactly on
//! a hyperbolic circle would otherwise drop in and out of the count
//! depending on rounding in the last bit.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hyperbolic_distance, CarlesonBox};
use crate::sequence::PointSequence;

/// Absolute slack on hyperbolic-distance comparisons.
pub const DIST_SLACK: f64 = 1e-9;
/// Relative slack when comparing a fitted constant with a supplied one.
const PASS_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityConstants {
    pub m_const: f64,
    pub alpha: f64,
}

impl DensityConstants {
    pub fn new(m_const: f64, alpha: f64) -> Result<Self> {
        if !(m_const.is_finite() && m_const > 0.0) {
            return Err(Error::InvalidParameter {
                name: "m_const",
                reason: format!("must be positive, got {m_const}"),
            });
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("must lie in (0, 1), got {alpha}"),
            });
        }
        Ok(Self { m_const, alpha })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    A,
    B,
    C,
    D,
    Separation,
    #[serde(rename = "carleson_33")]
    Carleson,
}

impl Condition {
    pub fn id(&self) -> &'static str {
        match self {
            Condition::A => "a",
            Condition::B => "b",
            Condition::C => "c",
            Condition::D => "d",
            Condition::Separation => "separation",
            Condition::Carleson => "carleson_33",
        }
    }
}

/// Where a checked quantity reaches its worst value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `#{j : beta(z_j, z_base) <= level} = count`.
    Ball { base: usize, level: u32, count: usize },
    /// `#{j : rho(z_j, z_base) <= radius} = count`.
    Disc { base: usize, radius: f64, count: usize },
    /// Dyadic layer `level` of `Q(z_base)` holds `count` points.
    Layer { base: usize, level: u32, count: usize },
    /// Power sum over `Q(z_base)`, relative to `(1 - |z_base|)^alpha`.
    PowerSum { base: usize, sum: f64 },
    Pair { first: usize, second: usize },
    /// Candidate box over `z_base` with the given side.
    Box { base: usize, side: f64, sum: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub passed: bool,
    /// Smallest constant making the condition hold at the tested exponent.
    pub fitted: f64,
    pub witness: Option<Witness>,
}

impl CheckOutcome {
    fn against(fitted: f64, witness: Witness, limit: f64) -> Self {
        Self {
            passed: fitted <= limit * (1.0 + PASS_SLACK),
            fitted,
            witness: Some(witness),
        }
    }
}

/// Max of `(ratio, witness)` pairs; ties go to the earlier base point so
/// that the result does not depend on evaluation order.
fn worst(items: impl ParallelIterator<Item = (f64, usize, Witness)>) -> (f64, Witness) {
    let (r, _, w) = items
        .reduce_with(|a, b| match a.0.partial_cmp(&b.0) {
            Some(Ordering::Greater) => a,
            Some(Ordering::Less) => b,
            _ => {
                if a.1 <= b.1 {
                    a
                } else {
                    b
                }
            }
        })
        .expect("nonempty sequence");
    (r, w)
}

fn sorted_distances(seq: &PointSequence, n: usize) -> Vec<f64> {
    let mut d = seq.distances_from(n);
    d.sort_by(f64::total_cmp);
    d
}

/// Fitted `M` for condition (a): `max count(beta <= l) / 2^(alpha l)`.
pub fn fit_condition_a(seq: &PointSequence, alpha: f64) -> (f64, Witness) {
    worst((0..seq.len()).into_par_iter().map(|n| {
        let d = sorted_distances(seq, n);
        let top = d.last().copied().unwrap_or(0.0).ceil() as u32 + 1;
        let mut best = (f64::NEG_INFINITY, n, Witness::Ball { base: n, level: 1, count: 0 });
        for l in 1..=top.max(1) {
            let count = d.partition_point(|&b| b <= l as f64 + DIST_SLACK);
            let ratio = count as f64 * (-alpha * l as f64).exp2();
            if ratio > best.0 {
                best = (ratio, n, Witness::Ball { base: n, level: l, count });
            }
        }
        best
    }))
}

pub fn check_condition_a(seq: &PointSequence, c: &DensityConstants) -> CheckOutcome {
    let (fitted, w) = fit_condition_a(seq, c.alpha);
    CheckOutcome::against(fitted, w, c.m_const)
}

/// Fitted `M_1` for condition (b), evaluated at the attained radii.
pub fn fit_condition_b(seq: &PointSequence, alpha: f64) -> (f64, Witness) {
    worst((0..seq.len()).into_par_iter().map(|n| {
        let d = sorted_distances(seq, n);
        let mut best = (f64::NEG_INFINITY, n, Witness::Disc { base: n, radius: 0.0, count: 0 });
        let mut i = 0;
        while i < d.len() {
            let beta = d[i];
            let count = d.partition_point(|&b| b <= beta + DIST_SLACK);
            // log2(1 - rho) = 1 - log2(2^beta + 1)
            let log_omr = 1.0 - (beta + (-beta).exp2().ln_1p() / std::f64::consts::LN_2);
            let ratio = count as f64 * (alpha * log_omr).exp2();
            if ratio > best.0 {
                let radius = crate::geometry::rho_from_beta(beta);
                best = (ratio, n, Witness::Disc { base: n, radius, count });
            }
            i = count.max(i + 1);
        }
        best
    }))
}

pub fn check_condition_b(seq: &PointSequence, c: &DensityConstants) -> CheckOutcome {
    let (fitted, w) = fit_condition_b(seq, c.alpha);
    CheckOutcome::against(fitted, w, c.m_const)
}

/// Members of `Q(z_n)` as depth ratios `(1-|z_j|)/(1-|z_n|)` in `(0, 1]`.
fn box_ratios(seq: &PointSequence, n: usize) -> Vec<f64> {
    let zn = seq.get(n);
    let q = CarlesonBox::over(&zn, 1.0);
    seq.points()
        .iter()
        .filter(|z| q.contains(z))
        .map(|z| z.depth() / zn.depth())
        .collect()
}

/// Layer index `l` with `2^(-l-1) < ratio <= 2^(-l)`.
fn layer_of(ratio: f64) -> u32 {
    (-ratio.log2()).floor().max(0.0) as u32
}

/// Fitted `M_2` for condition (c); layers `l >= 1` are half-open,
/// `2^(-l-1) d < 1 - |z_j| <= 2^(-l) d`.
pub fn fit_condition_c(seq: &PointSequence, alpha: f64) -> (f64, Witness) {
    worst((0..seq.len()).into_par_iter().map(|n| {
        let mut layers: BTreeMap<u32, usize> = BTreeMap::new();
        for r in box_ratios(seq, n) {
            let l = layer_of(r);
            if l >= 1 {
                *layers.entry(l).or_default() += 1;
            }
        }
        let mut best = (0.0, n, Witness::Layer { base: n, level: 1, count: 0 });
        for (&l, &count) in &layers {
            let ratio = count as f64 * (-alpha * l as f64).exp2();
            if ratio > best.0 {
                best = (ratio, n, Witness::Layer { base: n, level: l, count });
            }
        }
        best
    }))
}

pub fn check_condition_c(seq: &PointSequence, c: &DensityConstants) -> CheckOutcome {
    let (fitted, w) = fit_condition_c(seq, c.alpha);
    CheckOutcome::against(fitted, w, c.m_const)
}

/// Fitted `M_3` for condition (d): `max_n sum_{Q(z_n)} ((1-|z_j|)/(1-|z_n|))^alpha`.
pub fn fit_condition_d(seq: &PointSequence, alpha: f64) -> (f64, Witness) {
    worst((0..seq.len()).into_par_iter().map(|n| {
        let sum: f64 = box_ratios(seq, n).iter().map(|r| r.powf(alpha)).sum();
        (sum, n, Witness::PowerSum { base: n, sum })
    }))
}

pub fn check_condition_d(seq: &PointSequence, c: &DensityConstants) -> CheckOutcome {
    let (fitted, w) = fit_condition_d(seq, c.alpha);
    CheckOutcome::against(fitted, w, c.m_const)
}

/// Minimum pairwise hyperbolic distance, `+inf` for a single point.
pub fn check_separation(seq: &PointSequence) -> (f64, Option<(usize, usize)>) {
    let n = seq.len();
    let best = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let zi = seq.get(i);
            (i + 1..n).map(move |j| (hyperbolic_distance(&zi, &seq.get(j)), i, j))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    match best {
        Some((g, i, j)) => (g, Some((i, j))),
        None => (f64::INFINITY, None),
    }
}

/// `max (1/side) sum_{z_j in Q} (1 - |z_j|)` over the candidate boxes
/// `Q(z_n)`, `2Q(z_n)` and the whole disc.
pub fn check_carleson_33(seq: &PointSequence) -> (f64, Witness) {
    let total: f64 = seq.points().iter().map(|z| z.depth()).sum();
    let unit = (total, usize::MAX, Witness::Box { base: usize::MAX, side: 1.0, sum: total });
    let per_point = worst((0..seq.len()).into_par_iter().flat_map_iter(|n| {
        let zn = seq.get(n);
        [1.0, 2.0].into_iter().map(move |scale| {
            let q = CarlesonBox::over(&zn, scale);
            let sum: f64 = seq
                .points()
                .iter()
                .filter(|z| q.contains(z))
                .map(|z| z.depth())
                .sum();
            (sum / q.side(), n, Witness::Box { base: n, side: q.side(), sum })
        })
    }));
    if unit.0 > per_point.0 {
        (unit.0, unit.2)
    } else {
        per_point
    }
}

/// Exponent at which condition (a) implies (d) in [`implied_d`].
pub fn raised_alpha(alpha: f64) -> f64 {
    0.5 * (1.0 + alpha)
}

/// Constants for (b) implied by (a) at `c`.
///
/// `rho <= r` means `beta <= log2((1+r)/(1-r)) <= 1 + log2(1/(1-r))`; rounding
/// the radius up to an integer level costs one more factor `2^alpha`.
pub fn implied_b(c: &DensityConstants) -> DensityConstants {
    DensityConstants {
        m_const: 4f64.powf(c.alpha) * c.m_const,
        alpha: c.alpha,
    }
}

/// Constants for (a) implied by (b) at `c`: the level-`l` ball is the
/// pseudo-hyperbolic disc of radius `1 - 2/(2^l + 1)`, and
/// `(2^l + 1)/2 <= 2^l`.
pub fn implied_a_from_b(c: &DensityConstants) -> DensityConstants {
    *c
}

/// Every point of layer `l` of `Q(z_n)` is within `beta <= l + 8` of `z_n`,
/// since `|1 - conj(z_n) z_j| <= (2 + pi)(1 - |z_n|)` inside the box.
pub const LAYER_BETA_GAP: u32 = 8;

pub fn implied_c(c: &DensityConstants) -> DensityConstants {
    DensityConstants {
        m_const: (LAYER_BETA_GAP as f64 * c.alpha).exp2() * c.m_const,
        alpha: c.alpha,
    }
}

/// Summing the layer bound of [`implied_c`] against weights `2^(-l alpha')`
/// converges only for `alpha' > alpha`.
pub fn implied_d(c: &DensityConstants) -> DensityConstants {
    let a2 = raised_alpha(c.alpha);
    DensityConstants {
        m_const: (LAYER_BETA_GAP as f64 * c.alpha).exp2() * c.m_const
            / (1.0 - (c.alpha - a2).exp2()),
        alpha: a2,
    }
}

/// Upper bound for the Carleson constant of a sequence satisfying (a) at
/// `c`, valid for the point-anchored candidate boxes. Layer `j` of a box of
/// side `l <= 2(1-|z_n|)` lies within `beta <= j + 3 + 2 log2(3 + 2 pi)` of
/// `z_n`.
pub fn carleson_bound(c: &DensityConstants) -> f64 {
    let gap = 3.0 + 2.0 * (3.0 + 2.0 * PI).log2();
    (c.alpha * gap).exp2() * c.m_const / (1.0 - (c.alpha - 1.0).exp2())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub condition: Condition,
    pub passed: bool,
    /// Constants the condition was tested with (absent for separation and
    /// the Carleson condition).
    pub constants: Option<DensityConstants>,
    /// Fitted constant, separation gap, or Carleson constant.
    pub value: f64,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub label: String,
    pub size: usize,
    pub records: Vec<ConditionRecord>,
}

impl ClassificationReport {
    pub fn get(&self, c: Condition) -> Option<&ConditionRecord> {
        self.records.iter().find(|r| r.condition == c)
    }
}

/// Runs (a)–(d) at the same constants, plus separation and (3.3).
pub fn classify(seq: &PointSequence, c: &DensityConstants) -> ClassificationReport {
    let mut records = Vec::with_capacity(6);
    let checks: [(Condition, fn(&PointSequence, &DensityConstants) -> CheckOutcome); 4] = [
        (Condition::A, check_condition_a),
        (Condition::B, check_condition_b),
        (Condition::C, check_condition_c),
        (Condition::D, check_condition_d),
    ];
    for (cond, f) in checks {
        let out = f(seq, c);
        records.push(ConditionRecord {
            condition: cond,
            passed: out.passed,
            constants: Some(*c),
            value: out.fitted,
            witness: out.witness,
        });
    }
    let (gap, pair) = check_separation(seq);
    records.push(ConditionRecord {
        condition: Condition::Separation,
        passed: gap > 0.0,
        constants: None,
        value: gap,
        witness: pair.map(|(first, second)| Witness::Pair { first, second }),
    });
    let (carleson, w) = check_carleson_33(seq);
    records.push(ConditionRecord {
        condition: Condition::Carleson,
        passed: carleson.is_finite() && carleson > 0.0,
        constants: None,
        value: carleson,
        witness: Some(w),
    });
    ClassificationReport {
        label: seq.label().to_string(),
        size: seq.len(),
        records,
    }
}

/// One implication between verdicts: when `premise` holds, `conclusion`
/// must hold too.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Implication {
    pub name: String,
    pub premise: bool,
    pub conclusion: bool,
}

impl Implication {
    pub fn violated(&self) -> bool {
        self.premise && !self.conclusion
    }
}

/// Verdict of (a) at `c` against (b), (c), (d) at the transformed constants,
/// and (b) at `c` against (a) at the constants it implies.
pub fn implication_checks(seq: &PointSequence, c: &DensityConstants) -> Vec<Implication> {
    let a = check_condition_a(seq, c).passed;
    let b = check_condition_b(seq, c).passed;
    let imp = |name: &str, premise, conclusion| Implication {
        name: name.to_string(),
        premise,
        conclusion,
    };
    vec![
        imp("a=>b", a, check_condition_b(seq, &implied_b(c)).passed),
        imp("a=>c", a, check_condition_c(seq, &implied_c(c)).passed),
        imp("a=>d", a, check_condition_d(seq, &implied_d(c)).passed),
        imp("b=>a", b, check_condition_a(seq, &implied_a_from_b(c)).passed),
    ]
}

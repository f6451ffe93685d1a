//! Superlevel sets of positive harmonic functions and their radial
//! projections, and the extremal-values counting argument.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hyperbolic_distance, DiscPoint, Mobius};
use crate::interp::{solve_direct, InterpolationProblem};
use crate::measure::{BoundaryMeasure, GridSpec, StepDensity};
use crate::sequence::PointSequence;

pub const DEFAULT_RAYS: usize = 8192;
pub const DEFAULT_RADIAL: usize = 256;
/// Deepest radial sample, `1 - |z| = 10^-8`.
pub const DEPTH_EXPONENT: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProjectionEstimate {
    pub lambda: f64,
    /// `2pi * flagged / ray_count`.
    pub measure: f64,
    pub flagged: usize,
    pub ray_count: usize,
    pub radial_samples: usize,
}

/// Depths `10^(-8m/(R-1))`, `m = 0..R`; `m = 0` is the origin. Going from
/// `R` to `2R - 1` samples keeps every old radius.
pub fn radial_depths(radial: usize) -> Vec<f64> {
    if radial == 1 {
        return vec![1.0];
    }
    (0..radial)
        .map(|m| 10f64.powf(-DEPTH_EXPONENT * m as f64 / (radial - 1) as f64))
        .collect()
}

/// A positive harmonic function given by boundary data.
pub trait PositiveHarmonic: Sync {
    fn value(&self, z: &DiscPoint) -> f64;

    /// `max` of `value` over the points `(1 - s) e^{i theta}`, `s` in `depths`.
    fn ray_max(&self, theta: f64, depths: &[f64]) -> f64 {
        depths
            .iter()
            .map(|&s| self.value(&DiscPoint::from_depth(s, theta).expect("depth in (0, 1]")))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

impl PositiveHarmonic for BoundaryMeasure {
    fn value(&self, z: &DiscPoint) -> f64 {
        self.poisson_integral(z)
    }

    fn ray_max(&self, theta: f64, depths: &[f64]) -> f64 {
        // 4 sin^2((theta - phi)/2) per atom, reused along the ray
        let gaps: Vec<(f64, f64)> = self
            .atoms()
            .iter()
            .map(|&(phi, m)| (4.0 * (0.5 * (theta - phi)).sin().powi(2), m))
            .collect();
        depths
            .iter()
            .map(|&s| {
                let r = 1.0 - s;
                let omr2 = s * (2.0 - s);
                gaps.iter().map(|&(g, m)| m * omr2 / (s * s + r * g)).sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

impl PositiveHarmonic for StepDensity {
    fn value(&self, z: &DiscPoint) -> f64 {
        self.evaluate(z)
    }
}

/// `max_r u(r e^{i theta}) / u(0)` over the sample radii, for every ray
/// `theta = 2 pi i / rays`.
pub fn ray_maxima(u: &impl PositiveHarmonic, rays: usize, radial: usize) -> Result<Vec<f64>> {
    let u0 = u.value(&DiscPoint::ORIGIN);
    if !(u0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "mu",
            reason: "measure must have positive mass".into(),
        });
    }
    if rays == 0 || radial == 0 {
        return Err(Error::InvalidParameter {
            name: "rays",
            reason: "need at least one ray and one radial sample".into(),
        });
    }
    let depths = radial_depths(radial);
    Ok((0..rays)
        .into_par_iter()
        .map(|i| u.ray_max(TAU * i as f64 / rays as f64, &depths) / u0)
        .collect())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 1.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!("must exceed 1, got {lambda}"),
        });
    }
    Ok(())
}

fn estimate_from(maxima: &[f64], lambda: f64, radial: usize) -> RadialProjectionEstimate {
    let flagged = maxima.iter().filter(|&&m| m > lambda).count();
    RadialProjectionEstimate {
        lambda,
        measure: TAU * flagged as f64 / maxima.len() as f64,
        flagged,
        ray_count: maxima.len(),
        radial_samples: radial,
    }
}

/// Measure of the rays on which `u / u(0)` exceeds `lambda` at some sample.
pub fn radial_projection_measure(
    mu: &impl PositiveHarmonic,
    lambda: f64,
    rays: usize,
    radial: usize,
) -> Result<RadialProjectionEstimate> {
    check_lambda(lambda)?;
    Ok(estimate_from(&ray_maxima(mu, rays, radial)?, lambda, radial))
}

/// [`radial_projection_measure`] for several thresholds, sampling once.
pub fn radial_projection_profile(
    mu: &impl PositiveHarmonic,
    lambdas: &[f64],
    rays: usize,
    radial: usize,
) -> Result<Vec<RadialProjectionEstimate>> {
    for &l in lambdas {
        check_lambda(l)?;
    }
    let maxima = ray_maxima(mu, rays, radial)?;
    Ok(lambdas.iter().map(|&l| estimate_from(&maxima, l, radial)).collect())
}

/// `max measure * lambda` over a profile.
pub fn fitted_constant(profile: &[RadialProjectionEstimate]) -> f64 {
    profile.iter().map(|e| e.measure * e.lambda).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessityReport {
    pub base: usize,
    pub epsilon: f64,
    pub feasible: bool,
    pub slack: f64,
    /// `#A(j) = #{k : j - 1 <= beta(z_k, z_base) < j}` for `j = 1..`.
    pub shells: Vec<usize>,
    /// `max_j #A(j) / 2^((1 - eps) j)`, when feasible.
    pub fitted_c: Option<f64>,
    pub note: String,
}

impl NecessityReport {
    /// Whether `#A(j) <= c 2^((1 - eps) j)` on every shell.
    pub fn bounded_by(&self, c: f64) -> bool {
        self.fitted_c.is_some_and(|f| f <= c)
    }
}

/// Moves `base` to the origin and tries the extremal values
/// `w_k = 2^(eps beta(z_k, 0))`.
pub fn necessity_replay(
    seq: &PointSequence,
    epsilon: f64,
    base: usize,
    spec: &GridSpec,
    tolerance: f64,
) -> Result<NecessityReport> {
    if base >= seq.len() {
        return Err(Error::InvalidParameter {
            name: "base",
            reason: format!("index {base} out of range for {} points", seq.len()),
        });
    }
    let moved = seq.mapped(&Mobius::to_origin(seq.get(base)))?;
    let dist: Vec<f64> = moved
        .points()
        .iter()
        .map(|z| hyperbolic_distance(&DiscPoint::ORIGIN, z))
        .collect();
    let values: Vec<f64> = dist.iter().map(|b| (epsilon * b).exp2()).collect();
    let problem = InterpolationProblem::new(moved, values, epsilon, tolerance)?;
    let result = solve_direct(&problem, spec)?;

    let top = dist.iter().fold(0.0f64, |m, &b| m.max(b)).floor() as usize + 1;
    let mut shells = vec![0usize; top];
    for b in &dist {
        shells[b.floor() as usize] += 1;
    }
    let fitted_c = result.is_feasible().then(|| {
        shells
            .iter()
            .enumerate()
            .map(|(i, &c)| c as f64 / ((1.0 - epsilon) * (i + 1) as f64).exp2())
            .fold(0.0, f64::max)
    });
    let note = if result.is_feasible() {
        "extremal values attained; shell counts checked".to_string()
    } else {
        format!("extremal values not attainable: epsilon = {epsilon} exceeds the interpolation constant")
    };
    Ok(NecessityReport {
        base,
        epsilon,
        feasible: result.is_feasible(),
        slack: result.slack,
        shells,
        fitted_c,
        note,
    })
}

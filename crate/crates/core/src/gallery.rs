//! Deterministic test sequences.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{one_minus_rho_from_beta, DiscPoint, Mobius};
use crate::sequence::PointSequence;

/// Largest number of points a generator will produce.
pub const POINT_CAP: usize = 10_000;

pub const GENERATORS: [&str; 3] = ["radial", "lattice", "counterexample"];

fn positive(name: &'static str, v: u32) -> Result<()> {
    if v == 0 {
        return Err(Error::InvalidParameter {
            name,
            reason: "must be at least 1".into(),
        });
    }
    Ok(())
}

/// `1 - 2^-j` on the positive axis, `j = 1..=depth`.
pub fn radial_geometric(depth: u32) -> Result<PointSequence> {
    positive("depth", depth)?;
    let points = (1..=depth)
        .map(|j| DiscPoint::from_depth((-(j as f64)).exp2(), 0.0))
        .collect::<Result<Vec<_>>>()?;
    PointSequence::new(format!("radial_{depth}"), points)
}

/// `spread^j` equally spaced points at modulus `1 - 2^-j` for each level.
pub fn dyadic_lattice(depth: u32, spread: u32) -> Result<PointSequence> {
    positive("depth", depth)?;
    positive("spread", spread)?;
    let mut total: usize = 0;
    for j in 1..=depth {
        total = (spread as usize)
            .checked_pow(j)
            .and_then(|c| total.checked_add(c))
            .filter(|&t| t <= POINT_CAP)
            .ok_or_else(|| Error::InvalidParameter {
                name: "depth",
                reason: format!("lattice({depth}, {spread}) exceeds {POINT_CAP} points"),
            })?;
    }
    let mut points = Vec::with_capacity(total);
    for j in 1..=depth {
        let count = spread.pow(j);
        let s = (-(j as f64)).exp2();
        for i in 0..count {
            points.push(DiscPoint::from_depth(s, TAU * i as f64 / count as f64)?);
        }
    }
    PointSequence::new(format!("lattice_{depth}_{spread}"), points)
}

/// `n_k = 2k`.
pub fn circle_radius(k: u32) -> u32 {
    2 * k
}

/// `beta(r_k, r_{k+1}) = 8(k+1) + 2 n_{k+1}`, so `n_k < beta(r_k, r_{k+1}) / 4`.
pub fn level_gap(k: u32) -> f64 {
    8.0 * (k + 1) as f64 + 2.0 * circle_radius(k + 1) as f64
}

/// `beta(0, r_k)`.
pub fn base_distance(k: u32) -> f64 {
    (1..k).map(level_gap).sum()
}

/// Deepest level allowed: `2^(n_levels) <= POINT_CAP`.
pub fn max_levels() -> u32 {
    let mut l = 1;
    while 2f64.powi(circle_radius(l + 1) as i32) <= POINT_CAP as f64 {
        l += 1;
    }
    l
}

/// The base points `r_k`, on the positive axis.
pub fn base_point(k: u32) -> Result<DiscPoint> {
    if k == 1 {
        return Ok(DiscPoint::ORIGIN);
    }
    DiscPoint::from_depth(one_minus_rho_from_beta(base_distance(k)), 0.0)
}

/// `Z_1 = {r_k}` and `Z_2`, which holds `2^(n_k)` points equally spread on
/// the hyperbolic circle of radius `n_k` about each `r_k`.
pub fn counterexample_pair(levels: u32) -> Result<(PointSequence, PointSequence)> {
    positive("levels", levels)?;
    if levels > max_levels() {
        return Err(Error::InvalidParameter {
            name: "levels",
            reason: format!("at most {} levels keep 2^(n_k) <= {POINT_CAP}", max_levels()),
        });
    }
    let mut z1 = Vec::new();
    let mut z2 = Vec::new();
    for k in 1..=levels {
        let rk = base_point(k)?;
        z1.push(rk);
        let n = circle_radius(k);
        let count = 1usize << n;
        let s = one_minus_rho_from_beta(n as f64);
        let lift = Mobius::from_origin(rk);
        for i in 0..count {
            let w = DiscPoint::from_depth(s, TAU * i as f64 / count as f64)?;
            z2.push(lift.apply(&w));
        }
    }
    Ok((
        PointSequence::new(format!("counterexample_z1_{levels}"), z1)?,
        PointSequence::new(format!("counterexample_z2_{levels}"), z2)?,
    ))
}

/// `Z_1 ∪ Z_2`, with `Z_1` first.
pub fn counterexample_union(levels: u32) -> Result<PointSequence> {
    let (z1, z2) = counterexample_pair(levels)?;
    z1.union(&z2, format!("counterexample_union_{levels}"))
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{hyperbolic_distance, DiscPoint, Mobius};

/// A finite sequence of pairwise distinct points of the disc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSequence {
    label: String,
    points: Vec<DiscPoint>,
}

impl PointSequence {
    pub fn new(label: impl Into<String>, points: Vec<DiscPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySequence);
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        let key = |i: usize| (points[i].depth().to_bits(), points[i].arg().to_bits());
        order.sort_by_key(|&i| (key(i), i));
        for w in order.windows(2) {
            if key(w[0]) == key(w[1]) {
                return Err(Error::DuplicatePoint {
                    first: w[0].min(w[1]),
                    second: w[0].max(w[1]),
                });
            }
        }
        Ok(Self {
            label: label.into(),
            points,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[DiscPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize) -> DiscPoint {
        self.points[i]
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Image of every point under an automorphism. Fails only if rounding
    /// merges two points.
    pub fn mapped(&self, map: &Mobius) -> Result<Self> {
        Self::new(
            self.label.clone(),
            self.points.iter().map(|z| map.apply(z)).collect(),
        )
    }

    /// Subsequence by indices, in the given order.
    pub fn subsequence(&self, idx: &[usize]) -> Result<Self> {
        Self::new(
            self.label.clone(),
            idx.iter().map(|&i| self.points[i]).collect(),
        )
    }

    /// Concatenation; fails if the two share a point.
    pub fn union(&self, other: &PointSequence, label: impl Into<String>) -> Result<Self> {
        let mut p = self.points.clone();
        p.extend_from_slice(&other.points);
        Self::new(label, p)
    }

    /// `beta(z_i, z_j)` for all `j`, for a fixed `i`.
    pub fn distances_from(&self, i: usize) -> Vec<f64> {
        let zi = self.points[i];
        self.points
            .iter()
            .map(|z| hyperbolic_distance(&zi, z))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_rejected() {
        let p = DiscPoint::new(0.2, 0.1).unwrap();
        let q = DiscPoint::new(0.3, 0.1).unwrap();
        assert_eq!(
            PointSequence::new("d", vec![q, p, q]),
            Err(Error::DuplicatePoint { first: 0, second: 2 })
        );
        assert_eq!(
            PointSequence::new("d", vec![DiscPoint::ORIGIN, DiscPoint::ORIGIN]),
            Err(Error::DuplicatePoint { first: 0, second: 1 })
        );
        assert_eq!(PointSequence::new("e", vec![]), Err(Error::EmptySequence));
    }
}

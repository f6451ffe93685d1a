//! Geometry of the unit disc.
//!
//! Points are stored as `(depth, arg)` with `depth = 1 - |z|`. Every distance,
//! automorphism and region test below is written in terms of depths and angle
//! differences so that points extremely close to the boundary (depth far
//! below `f64::EPSILON`) keep full relative precision. The Cartesian view is
//! derived on demand.
//!
//! Hyperbolic distance uses the dyadic normalization
//! `beta(z, w) = log2((1 + rho) / (1 - rho))`, where `rho` is the
//! pseudo-hyperbolic distance `|z - w| / |1 - conj(w) z|`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::arcs::{Arc, ArcSet};
use crate::error::{Error, Result};

/// Wraps an angle into `(-pi, pi]`, leaving in-range values untouched.
pub fn wrap_pi(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    if t <= -PI {
        t += TAU;
    }
    t
}

/// Wraps an angle into `[0, 2pi)`.
pub fn wrap_tau(theta: f64) -> f64 {
    if (0.0..TAU).contains(&theta) {
        return theta;
    }
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Signed circular difference `a - b` in `(-pi, pi]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_pi(a - b)
}

/// A point of the open unit disc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscPoint {
    depth: f64,
    arg: f64,
}

impl DiscPoint {
    pub const ORIGIN: DiscPoint = DiscPoint {
        depth: 1.0,
        arg: 0.0,
    };

    /// Builds a point from Cartesian coordinates; rejects `x^2 + y^2 >= 1`.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) || x * x + y * y >= 1.0 {
            return Err(Error::OutsideDisc { x, y });
        }
        let r = x.hypot(y);
        let depth = 1.0 - r;
        if depth <= 0.0 {
            return Err(Error::OutsideDisc { x, y });
        }
        if r == 0.0 {
            return Ok(Self::ORIGIN);
        }
        Ok(Self {
            depth,
            arg: wrap_pi(y.atan2(x)),
        })
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && theta.is_finite()) || !(0.0..1.0).contains(&r) {
            return Err(Error::BadCoordinates {
                depth: 1.0 - r,
                arg: theta,
            });
        }
        Self::from_depth(1.0 - r, theta)
    }

    /// Builds a point at `1 - |z| = depth` on the ray of angle `theta`.
    pub fn from_depth(depth: f64, theta: f64) -> Result<Self> {
        if !(depth.is_finite() && theta.is_finite()) || depth <= 0.0 || depth > 1.0 {
            return Err(Error::BadCoordinates { depth, arg: theta });
        }
        if depth == 1.0 {
            return Ok(Self::ORIGIN);
        }
        Ok(Self {
            depth,
            arg: wrap_pi(theta),
        })
    }

    /// `1 - |z|`.
    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn modulus(&self) -> f64 {
        1.0 - self.depth
    }

    /// Argument in `(-pi, pi]`; zero for the origin.
    pub fn arg(&self) -> f64 {
        self.arg
    }

    /// `1 - |z|^2`, computed without cancellation.
    pub fn one_minus_mod_sq(&self) -> f64 {
        self.depth * (2.0 - self.depth)
    }

    pub fn x(&self) -> f64 {
        self.modulus() * self.arg.cos()
    }

    pub fn y(&self) -> f64 {
        self.modulus() * self.arg.sin()
    }

    pub fn is_origin(&self) -> bool {
        self.depth == 1.0
    }

    /// Radial projection of the point onto the circle, as an angle in `[0, 2pi)`.
    pub fn boundary_angle(&self) -> f64 {
        wrap_tau(self.arg)
    }
}

/// `|z - w|^2`, `|1 - conj(w) z|^2` and `1 - rho^2` for a pair of points.
#[derive(Clone, Copy, Debug)]
struct PairTerms {
    num: f64,
    den: f64,
    one_minus_rho_sq: f64,
}

fn pair_terms(z: &DiscPoint, w: &DiscPoint) -> PairTerms {
    let (sz, sw) = (z.depth, w.depth);
    let half = 0.5 * angle_diff(z.arg, w.arg);
    let sin_sq = half.sin().powi(2);
    let cross = 4.0 * (1.0 - sz) * (1.0 - sw) * sin_sq;
    let num = (sw - sz).powi(2) + cross;
    let one_minus_pq = sz + sw - sz * sw;
    let den = one_minus_pq * one_minus_pq + cross;
    PairTerms {
        num,
        den,
        one_minus_rho_sq: (z.one_minus_mod_sq() * w.one_minus_mod_sq()) / den,
    }
}

/// Pseudo-hyperbolic distance `|z - w| / |1 - conj(w) z|`, in `[0, 1)`.
pub fn pseudo_hyperbolic(z: &DiscPoint, w: &DiscPoint) -> f64 {
    if z == w {
        return 0.0;
    }
    let t = pair_terms(z, w);
    (t.num / t.den).sqrt().min(1.0 - f64::EPSILON / 2.0)
}

/// `1 - rho(z, w)^2 = (1 - |z|^2)(1 - |w|^2) / |1 - conj(w) z|^2`.
pub fn one_minus_rho_sq(z: &DiscPoint, w: &DiscPoint) -> f64 {
    if z == w {
        return 1.0;
    }
    pair_terms(z, w).one_minus_rho_sq.min(1.0)
}

/// Hyperbolic distance `log2((1 + rho) / (1 - rho))`.
pub fn hyperbolic_distance(z: &DiscPoint, w: &DiscPoint) -> f64 {
    if z == w {
        return 0.0;
    }
    let t = pair_terms(z, w);
    let rho = (t.num / t.den).sqrt();
    // log of 1 - rho^2 as a sum, so that very deep pairs do not underflow
    let log_omr = (z.one_minus_mod_sq().log2() + w.one_minus_mod_sq().log2() - t.den.log2()).min(0.0);
    (2.0 * (1.0 + rho).log2() - log_omr).max(0.0)
}

/// Pseudo-hyperbolic radius corresponding to hyperbolic radius `beta`.
pub fn rho_from_beta(beta: f64) -> f64 {
    let p = beta.exp2();
    (p - 1.0) / (p + 1.0)
}

/// `1 - rho` for hyperbolic radius `beta`, exact for large `beta`.
pub fn one_minus_rho_from_beta(beta: f64) -> f64 {
    2.0 / (beta.exp2() + 1.0)
}

/// Range allowed for `u(z)` by Harnack's inequality given `u(w)`.
pub fn harnack_interval(z: &DiscPoint, w: &DiscPoint, u_at_w: f64) -> (f64, f64) {
    let b = hyperbolic_distance(z, w);
    (u_at_w * (-b).exp2(), u_at_w * b.exp2())
}

/// `K(M) = 20M + 20 pi M + 1`.
pub fn box_growth(m: f64) -> f64 {
    20.0 * m + 20.0 * PI * m + 1.0
}

/// Upper constant `2 + 2 log2 K(M)` comparing `beta(z, w)` with
/// `log2((1-|z|)/(1-|w|))` for `w` in `20 M Q(z)`.
pub fn box_beta_constant(m: f64) -> f64 {
    2.0 + 2.0 * box_growth(m).log2()
}

/// The arc `scale * I(z)`: centred at `Arg z` with half-width
/// `pi * scale * (1 - |z|)`; the full circle once `scale * (1 - |z|) >= 1`.
pub fn base_arc(z: &DiscPoint, scale: f64) -> ArcSet {
    let hw = PI * scale * z.depth;
    if scale * z.depth >= 1.0 || hw >= PI {
        return ArcSet::full();
    }
    ArcSet::from_arc(&Arc::centered(z.boundary_angle(), hw))
}

/// Carleson box `{ r e^{i t} : 0 < 1 - r <= side, e^{i t} in base arc }` whose
/// base arc is centred at `center_angle` with half-width `pi * side`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlesonBox {
    center_angle: f64,
    side: f64,
}

impl CarlesonBox {
    /// Sides above 1 describe the whole disc and are clamped to 1.
    pub fn new(center_angle: f64, side: f64) -> Result<Self> {
        if !(side.is_finite() && side > 0.0 && center_angle.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "side",
                reason: format!("box side must be positive, got {side}"),
            });
        }
        Ok(Self {
            center_angle: wrap_pi(center_angle),
            side: side.min(1.0),
        })
    }

    /// `scale * Q(z)`.
    pub fn over(z: &DiscPoint, scale: f64) -> Self {
        Self {
            center_angle: z.arg,
            side: (scale * z.depth).min(1.0),
        }
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn center_angle(&self) -> f64 {
        self.center_angle
    }

    pub fn contains(&self, z: &DiscPoint) -> bool {
        if !(z.depth > 0.0 && z.depth <= self.side) {
            return false;
        }
        if self.side >= 1.0 {
            return true;
        }
        let d = angle_diff(z.arg, self.center_angle);
        let hw = PI * self.side;
        d > -hw && d <= hw
    }

    pub fn base(&self) -> ArcSet {
        if self.side >= 1.0 {
            return ArcSet::full();
        }
        ArcSet::from_arc(&Arc::centered(wrap_tau(self.center_angle), PI * self.side))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Direction {
    /// `(z - a) / (1 - conj(a) z)`
    ToOrigin,
    /// `(z + a) / (1 + conj(a) z)`
    FromOrigin,
}

/// Disc automorphism `tau_a(z) = (z - a) / (1 - conj(a) z)` or its inverse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius {
    center: DiscPoint,
    direction: Direction,
}

impl Mobius {
    /// The automorphism sending `a` to the origin.
    pub fn to_origin(a: DiscPoint) -> Self {
        Self {
            center: a,
            direction: Direction::ToOrigin,
        }
    }

    /// The automorphism sending the origin to `a`.
    pub fn from_origin(a: DiscPoint) -> Self {
        Self {
            center: a,
            direction: Direction::FromOrigin,
        }
    }

    pub fn identity() -> Self {
        Self::to_origin(DiscPoint::ORIGIN)
    }

    pub fn inverse(&self) -> Self {
        Self {
            center: self.center,
            direction: match self.direction {
                Direction::ToOrigin => Direction::FromOrigin,
                Direction::FromOrigin => Direction::ToOrigin,
            },
        }
    }

    pub fn center(&self) -> DiscPoint {
        self.center
    }

    pub fn apply(&self, z: &DiscPoint) -> DiscPoint {
        let a = &self.center;
        if a.is_origin() {
            return *z;
        }
        // Work in the frame where `a` lies on the positive real axis.
        let phi = angle_diff(z.arg, a.arg);
        let (sw, sq) = (z.depth, a.depth);
        let (p, q) = (1.0 - sw, 1.0 - sq);
        let one_minus_pq = sw + sq - sw * sq;
        let one_minus_q_sq = a.one_minus_mod_sq();
        let pq4 = 4.0 * p * q;
        let (den, numer, re) = match self.direction {
            Direction::ToOrigin => {
                let s = (0.5 * phi).sin().powi(2);
                let den = one_minus_pq * one_minus_pq + pq4 * s;
                let numer = (sq - sw).powi(2) + pq4 * s;
                let re = (sq - sw) * one_minus_pq - 2.0 * s * p * (1.0 + q * q);
                (den, numer, re)
            }
            Direction::FromOrigin => {
                let c = (0.5 * phi).cos().powi(2);
                let den = one_minus_pq * one_minus_pq + pq4 * c;
                let numer = (sq - sw).powi(2) + pq4 * c;
                let re = (sw - sq) * one_minus_pq + 2.0 * c * p * (1.0 + q * q);
                (den, numer, re)
            }
        };
        let im = p * phi.sin() * one_minus_q_sq;
        let modulus = (numer / den).sqrt();
        let omr_sq = z.one_minus_mod_sq() * one_minus_q_sq / den;
        let depth = (omr_sq / (1.0 + modulus)).clamp(f64::MIN_POSITIVE, 1.0);
        if depth >= 1.0 || modulus == 0.0 {
            return DiscPoint::ORIGIN;
        }
        DiscPoint {
            depth,
            arg: wrap_pi(a.arg + im.atan2(re)),
        }
    }

    /// Continuous increasing lift of the boundary correspondence: the image of
    /// `e^{i theta}` is `e^{i lift(theta)}`, and `lift(theta + 2pi) = lift(theta) + 2pi`.
    pub fn boundary_lift(&self, theta: f64) -> f64 {
        let a = &self.center;
        if a.is_origin() {
            return theta;
        }
        let q = a.modulus();
        let phi = theta - a.arg;
        let sn = phi.sin();
        match self.direction {
            Direction::ToOrigin => {
                let s = (0.5 * phi).sin().powi(2);
                theta + 2.0 * (q * sn).atan2(a.depth + 2.0 * q * s)
            }
            Direction::FromOrigin => {
                let c = (0.5 * phi).cos().powi(2);
                theta - 2.0 * (q * sn).atan2(a.depth + 2.0 * q * c)
            }
        }
    }

    /// Image of a boundary angle, in `[0, 2pi)`.
    pub fn apply_angle(&self, theta: f64) -> f64 {
        wrap_tau(self.boundary_lift(theta))
    }

    /// Exact image of an arc.
    pub fn apply_arc(&self, arc: &Arc) -> Arc {
        if arc.is_full() {
            return *arc;
        }
        let a0 = arc.start();
        let l0 = self.boundary_lift(a0);
        let l1 = self.boundary_lift(a0 + arc.length());
        Arc::new(wrap_tau(l0), (l1 - l0).clamp(f64::MIN_POSITIVE, TAU))
            .expect("image of a proper arc is a proper arc")
    }

    pub fn apply_arcset(&self, set: &ArcSet) -> ArcSet {
        if set.is_full() {
            return ArcSet::full();
        }
        ArcSet::from_arcs(set.arcs().iter().map(|a| self.apply_arc(a)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> DiscPoint {
        DiscPoint::new(x, y).unwrap()
    }

    #[test]
    fn rejects_points_on_or_outside_the_circle() {
        assert!(DiscPoint::new(1.0, 0.0).is_err());
        assert!(DiscPoint::new(0.6, 0.8).is_err());
        assert!(DiscPoint::new(f64::NAN, 0.0).is_err());
        assert!(DiscPoint::from_depth(0.0, 0.0).is_err());
        assert!(DiscPoint::from_polar(1.0, 0.0).is_err());
    }

    #[test]
    fn pseudo_hyperbolic_examples() {
        let o = DiscPoint::ORIGIN;
        assert_eq!(pseudo_hyperbolic(&o, &o), 0.0);
        assert!((pseudo_hyperbolic(&o, &pt(1.0 / 3.0, 0.0)) - 1.0 / 3.0).abs() < 1e-15);
        let (a, b) = (pt(0.5, 0.0), pt(-0.5, 0.0));
        assert!((pseudo_hyperbolic(&a, &b) - 0.8).abs() < 1e-15);
        // naive complex-arithmetic form as a second route
        let naive = {
            let (zx, zy, wx, wy) = (a.x(), a.y(), b.x(), b.y());
            let num = ((zx - wx).powi(2) + (zy - wy).powi(2)).sqrt();
            let (re, im) = (1.0 - (wx * zx + wy * zy), -(wx * zy - wy * zx));
            num / (re * re + im * im).sqrt()
        };
        assert!((naive - 0.8).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_distance_examples() {
        let o = DiscPoint::ORIGIN;
        assert!((hyperbolic_distance(&o, &pt(1.0 / 3.0, 0.0)) - 1.0).abs() < 1e-15);
        assert_eq!(hyperbolic_distance(&o, &o), 0.0);
        assert!((hyperbolic_distance(&o, &pt(0.5, 0.0)) - 3f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn deep_points_keep_relative_precision() {
        // beta(0, r) with 1 - r = 2 / (2^B + 1) is exactly B
        for b in [10.0, 60.0, 108.0, 300.0] {
            let z = DiscPoint::from_depth(one_minus_rho_from_beta(b), 0.3).unwrap();
            let d = hyperbolic_distance(&DiscPoint::ORIGIN, &z);
            assert!((d - b).abs() < 1e-12 * b, "{b} vs {d}");
        }
    }

    #[test]
    fn mobius_sends_center_to_origin() {
        let a = pt(0.3, 0.4);
        let t = Mobius::to_origin(a);
        assert!(t.apply(&a).is_origin());
        assert_eq!(Mobius::to_origin(DiscPoint::ORIGIN).apply(&pt(0.5, 0.0)), pt(0.5, 0.0));
        let back = t.inverse().apply(&DiscPoint::ORIGIN);
        assert!((back.x() - 0.3).abs() < 1e-15 && (back.y() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn mobius_matches_complex_formula() {
        let a = pt(-0.2, 0.55);
        let z = pt(0.7, -0.1);
        let w = Mobius::to_origin(a).apply(&z);
        // (z - a) / (1 - conj(a) z) by hand
        let (nr, ni) = (z.x() - a.x(), z.y() - a.y());
        let (dr, di) = (1.0 - (a.x() * z.x() + a.y() * z.y()), -(a.x() * z.y() - a.y() * z.x()));
        let d2 = dr * dr + di * di;
        let (xr, xi) = ((nr * dr + ni * di) / d2, (ni * dr - nr * di) / d2);
        assert!((w.x() - xr).abs() < 1e-14 && (w.y() - xi).abs() < 1e-14);
        let u = Mobius::from_origin(a).apply(&w);
        assert!((u.x() - z.x()).abs() < 1e-14 && (u.y() - z.y()).abs() < 1e-14);
    }

    #[test]
    fn boundary_map_agrees_with_interior_limit() {
        let a = pt(0.4, -0.3);
        let t = Mobius::to_origin(a);
        for k in 0..16 {
            let theta = k as f64 * TAU / 16.0;
            let z = DiscPoint::from_depth(1e-12, theta).unwrap();
            let img = t.apply(&z);
            assert!(angle_diff(img.arg(), t.apply_angle(theta)).abs() < 1e-9);
        }
    }

    #[test]
    fn harnack_interval_examples() {
        let o = DiscPoint::ORIGIN;
        assert_eq!(harnack_interval(&o, &o, 3.0), (3.0, 3.0));
        let (lo, hi) = harnack_interval(&pt(1.0 / 3.0, 0.0), &o, 1.0);
        assert!((lo - 0.5).abs() < 1e-15 && (hi - 2.0).abs() < 1e-15);
    }

    #[test]
    fn poisson_kernel_attains_harnack_upper_bound() {
        for k in 1..10 {
            let r = k as f64 / 10.0;
            let u = (1.0 + r) / (1.0 - r);
            let (_, hi) = harnack_interval(&pt(r, 0.0), &DiscPoint::ORIGIN, 1.0);
            assert!((hi / u - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn base_arc_examples() {
        let a = base_arc(&pt(0.5, 0.0), 1.0);
        assert!((a.measure() - PI).abs() < 1e-15);
        assert!(a.contains_angle(0.0) && a.contains_angle(PI / 2.0 - 1e-9));
        assert!(!a.contains_angle(PI / 2.0 + 1e-9));
        assert!(base_arc(&pt(0.99, 0.0), 200.0).is_full());
        let c = base_arc(&pt(0.0, 0.5), 0.5);
        assert!((c.measure() - PI / 2.0).abs() < 1e-15);
        assert!(c.contains_angle(PI / 2.0));
        assert!(c.contains_angle(PI / 4.0 + 1e-9) && !c.contains_angle(PI / 4.0 - 1e-9));
    }

    #[test]
    fn box_examples() {
        let zk = pt(0.2, 0.7);
        for m0 in [1.0, 2.0, 64.0] {
            assert!(CarlesonBox::over(&zk, 20.0 * m0).contains(&zk));
        }
        let b = CarlesonBox::new(0.0, 0.5).unwrap();
        assert!(!b.contains(&DiscPoint::ORIGIN));
        let b = CarlesonBox::new(0.0, 0.25).unwrap();
        assert!(b.contains(&pt(0.9, 0.0)));
        // angle pi/4 * 1 is the boundary of the base arc of half-width pi/4
        assert!(b.contains(&DiscPoint::from_polar(0.9, PI / 4.0).unwrap()));
        assert!(!b.contains(&DiscPoint::from_polar(0.9, PI / 4.0 + 1e-9).unwrap()));
        assert!(!b.contains(&pt(0.7, 0.0)));
    }

    #[test]
    fn rho_beta_identity() {
        let z = pt(0.1, -0.6);
        let w = pt(-0.35, 0.2);
        let b = hyperbolic_distance(&z, &w);
        assert!((pseudo_hyperbolic(&z, &w) - rho_from_beta(b)).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn point() -> impl Strategy<Value = DiscPoint> {
            (-30.0f64..0.0, -PI..PI).prop_map(|(e, t)| DiscPoint::from_depth(e.exp2(), t).unwrap())
        }

        fn interior() -> impl Strategy<Value = DiscPoint> {
            (0.0f64..0.95, -PI..PI).prop_map(|(r, t)| DiscPoint::from_polar(r, t).unwrap())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(2000))]

            #[test]
            fn mobius_preserves_beta(a in interior(), z in interior(), w in interior()) {
                let t = Mobius::to_origin(a);
                let d0 = hyperbolic_distance(&z, &w);
                let d1 = hyperbolic_distance(&t.apply(&z), &t.apply(&w));
                prop_assert!((d0 - d1).abs() < 1e-10, "{} vs {}", d0, d1);
            }

            #[test]
            fn rho_is_a_metric(a in point(), b in point(), c in point()) {
                let ab = pseudo_hyperbolic(&a, &b);
                let bc = pseudo_hyperbolic(&b, &c);
                let ac = pseudo_hyperbolic(&a, &c);
                prop_assert!(ac <= ab + bc + 1e-12);
                prop_assert!((ab - pseudo_hyperbolic(&b, &a)).abs() < 1e-15);
            }

            #[test]
            fn beta_and_rho_agree(z in interior(), w in interior()) {
                let b = hyperbolic_distance(&z, &w);
                prop_assert!((pseudo_hyperbolic(&z, &w) - rho_from_beta(b)).abs() < 1e-12);
            }

            #[test]
            fn beta_tracks_depth_ratio_inside_boxes(
                z in point(),
                m in 1.0f64..64.0,
                u in 0.0f64..1.0,
                v in -1.0f64..1.0,
            ) {
                let side = (20.0 * m * z.depth()).min(1.0);
                let depth = (side * u).max(side * 1e-9);
                let w = DiscPoint::from_depth(depth, z.arg() + v * PI * side).unwrap();
                prop_assume!(CarlesonBox::over(&z, 20.0 * m).contains(&w));
                let gap = (hyperbolic_distance(&z, &w) - (z.depth() / w.depth()).log2()).abs();
                prop_assert!(gap <= box_beta_constant(m), "gap {} > {}", gap, box_beta_constant(m));
            }
        }
    }
}

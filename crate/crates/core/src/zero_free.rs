//! Zero-free bounded analytic functions with prescribed moduli.
//!
//! With `t_n = ln(C/|w_n|)`, a positive harmonic `u` with `u(z_n) = t_n`
//! gives `f = C exp(-(u + i u~))`, which is analytic, never zero, bounded by
//! `C`, and has `|f(z_n)| = |w_n|`. The double-log condition on the moduli
//! is exactly the compatibility condition on the `t_n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DiscPoint;
use crate::interp::{log_compatibility, solve_direct, Certificate, InterpolationProblem, WorstPair};
use crate::measure::{BoundaryMeasure, GridSpec};
use crate::sequence::PointSequence;

#[derive(Clone, Debug, PartialEq)]
pub struct ModulusProblem {
    seq: PointSequence,
    moduli: Vec<f64>,
    cap_c: f64,
    epsilon: f64,
}

impl ModulusProblem {
    /// `cap_c` defaults to twice the largest modulus.
    pub fn new(seq: PointSequence, moduli: Vec<f64>, cap_c: Option<f64>, epsilon: f64) -> Result<Self> {
        if moduli.len() != seq.len() {
            return Err(Error::LengthMismatch {
                expected: seq.len(),
                found: moduli.len(),
            });
        }
        if let Some(i) = moduli.iter().position(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidParameter {
                name: "moduli",
                reason: format!("modulus {i} must be positive, got {}", moduli[i]),
            });
        }
        let cap_c = cap_c.unwrap_or_else(|| 2.0 * moduli.iter().fold(0.0f64, |a, &b| a.max(b)));
        if let Some(i) = moduli.iter().position(|&m| m >= cap_c) {
            return Err(Error::InvalidParameter {
                name: "cap_c",
                reason: format!("modulus {i} = {} is not below C = {cap_c}", moduli[i]),
            });
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("must lie in (0, 1], got {epsilon}"),
            });
        }
        Ok(Self {
            seq,
            moduli,
            cap_c,
            epsilon,
        })
    }

    pub fn seq(&self) -> &PointSequence {
        &self.seq
    }

    pub fn moduli(&self) -> &[f64] {
        &self.moduli
    }

    pub fn cap_c(&self) -> f64 {
        self.cap_c
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `t_n = ln(C / |w_n|) > 0`.
    pub fn targets(&self) -> Vec<f64> {
        self.moduli.iter().map(|m| (self.cap_c / m).ln()).collect()
    }
}

/// `|log2 t_n - log2 t_m| <= eps beta(z_n, z_m)` with `t = ln(C/|w|)`.
pub fn check_loglog_compat(p: &ModulusProblem) -> (bool, Option<WorstPair>) {
    let levels: Vec<f64> = p.targets().iter().map(|t| t.log2()).collect();
    log_compatibility(&p.seq, &levels, p.epsilon)
}

/// `sum mass * 2 r sin(theta - phi) / |e^{i phi} - z|^2`: the harmonic
/// conjugate of the Poisson integral, vanishing at the origin.
pub fn conjugate_at(mu: &BoundaryMeasure, z: &DiscPoint) -> f64 {
    if z.is_origin() {
        return 0.0;
    }
    let (s, r, theta) = (z.depth(), z.modulus(), z.arg());
    mu.atoms()
        .iter()
        .map(|&(phi, m)| {
            let d = theta - phi;
            let den = s * s + 4.0 * r * (0.5 * d).sin().powi(2);
            m * 2.0 * r * d.sin() / den
        })
        .sum()
}

/// `f = C exp(-(u + i u~))` for the Poisson integral `u` of `mu`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroFreeFunction {
    pub mu: BoundaryMeasure,
    pub cap_c: f64,
}

impl ZeroFreeFunction {
    pub fn modulus(&self, z: &DiscPoint) -> f64 {
        self.cap_c * (-self.mu.poisson_integral(z)).exp()
    }

    pub fn phase(&self, z: &DiscPoint) -> f64 {
        -conjugate_at(&self.mu, z)
    }

    pub fn value(&self, z: &DiscPoint) -> Complex64 {
        Complex64::from_polar(self.modulus(z), self.phase(z))
    }
}

/// Largest `|du/dx - dv/dy|`, `|du/dy + dv/dx|` by central differences at
/// step `h`, for `u + iv` the analytic completion of `mu`.
pub fn cauchy_riemann_defect(mu: &BoundaryMeasure, x: f64, y: f64, h: f64) -> Result<f64> {
    let at = |x: f64, y: f64| -> Result<(f64, f64)> {
        let z = DiscPoint::new(x, y)?;
        Ok((mu.poisson_integral(&z), conjugate_at(mu, &z)))
    };
    let (xp, xm, yp, ym) = (at(x + h, y)?, at(x - h, y)?, at(x, y + h)?, at(x, y - h)?);
    let (ux, vx) = ((xp.0 - xm.0) / (2.0 * h), (xp.1 - xm.1) / (2.0 * h));
    let (uy, vy) = ((yp.0 - ym.0) / (2.0 * h), (yp.1 - ym.1) / (2.0 * h));
    Ok((ux - vy).abs().max((uy + vx).abs()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusReport {
    pub targets: Vec<f64>,
    pub achieved: Vec<f64>,
    /// `|(|f(z_n)| - |w_n|)| / |w_n|`.
    pub relative_error: Vec<f64>,
    /// `Arg f(z_n)`; only moduli are prescribed.
    pub phases: Vec<f64>,
    pub function: ZeroFreeFunction,
}

impl ModulusReport {
    pub fn max_relative_error(&self) -> f64 {
        self.relative_error.iter().fold(0.0, |a, &b| a.max(b))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ModulusOutcome {
    Matched(Box<ModulusReport>),
    Infeasible { certificate: Option<Certificate>, slack: f64 },
}

pub fn construct_modulus_interpolant(
    p: &ModulusProblem,
    spec: &GridSpec,
    tolerance: f64,
) -> Result<ModulusOutcome> {
    let (ok, worst) = check_loglog_compat(p);
    if !ok {
        let w = worst.expect("a violating pair");
        return Err(Error::InvalidParameter {
            name: "moduli",
            reason: format!(
                "double-log condition fails on points {} and {} (ratio {:.6})",
                w.first, w.second, w.ratio
            ),
        });
    }
    let problem = InterpolationProblem::new(p.seq.clone(), p.targets(), p.epsilon, tolerance)?;
    let result = solve_direct(&problem, spec)?;
    let Some(mu) = result.measure else {
        return Ok(ModulusOutcome::Infeasible {
            certificate: result.certificate,
            slack: result.slack,
        });
    };
    let function = ZeroFreeFunction { mu, cap_c: p.cap_c };
    let achieved: Vec<f64> = p.seq.points().iter().map(|z| function.modulus(z)).collect();
    let relative_error = achieved
        .iter()
        .zip(&p.moduli)
        .map(|(a, m)| (a - m).abs() / m)
        .collect();
    let phases = p.seq.points().iter().map(|z| function.phase(z)).collect();
    Ok(ModulusOutcome::Matched(Box::new(ModulusReport {
        targets: p.moduli.clone(),
        achieved,
        relative_error,
        phases,
        function,
    })))
}

//! Dense bounded-variable two-phase simplex.
//!
//! Solves `min c^T x` subject to `A x = b`, `0 <= x <= u` (entries of `u` may
//! be infinite). The problems met in this crate have a handful of rows and a
//! few thousand columns, so a dense tableau is the simplest robust choice.
//! Once optimal, basic values and duals are recomputed from an LU
//! factorization of the final basis, which removes most pivoting drift.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, Zero};

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-11;
/// Degenerate pivots in a row before pricing switches to Bland's rule.
const STALL_LIMIT: usize = 64;

#[derive(Clone, Debug)]
pub struct LinearProgram {
    rows: usize,
    cols: usize,
    /// Row-major `rows x cols`.
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Multipliers `y` with `c - A^T y >= 0` on columns at their lower bound.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

impl LinearProgram {
    /// `a` is row-major with `b.len()` rows and `c.len()` columns.
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let (rows, cols) = (b.len(), c.len());
        if a.len() != rows * cols || upper.len() != cols {
            return Err(Error::Lp(format!(
                "shape mismatch: {} entries for {rows}x{cols}, {} bounds",
                a.len(),
                upper.len()
            )));
        }
        if a.iter().chain(&b).chain(&c).any(|v| !v.is_finite()) {
            return Err(Error::Lp("non-finite coefficient".into()));
        }
        if upper.iter().any(|&u| u.is_nan() || u < 0.0) {
            return Err(Error::Lp("upper bounds must be >= 0".into()));
        }
        Ok(Self {
            rows,
            cols,
            a,
            b,
            c,
            upper,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::new(self).run()
    }
}

struct Tableau<'a> {
    lp: &'a LinearProgram,
    m: usize,
    /// Original columns followed by one artificial per row.
    width: usize,
    t: Vec<f64>,
    sign: Vec<f64>,
    xb: Vec<f64>,
    basis: Vec<usize>,
    basic_row: Vec<Option<usize>>,
    at_upper: Vec<bool>,
    upper: Vec<f64>,
    d: Vec<f64>,
    iterations: usize,
}

enum Step {
    Optimal,
    Moved,
}

impl<'a> Tableau<'a> {
    fn new(lp: &'a LinearProgram) -> Self {
        let (m, n) = (lp.rows, lp.cols);
        let width = n + m;
        let mut t = vec![0.0; m * width];
        let mut sign = vec![1.0; m];
        let mut xb = vec![0.0; m];
        for i in 0..m {
            let s = if lp.b[i] < 0.0 { -1.0 } else { 1.0 };
            sign[i] = s;
            for j in 0..n {
                t[i * width + j] = s * lp.a[i * n + j];
            }
            t[i * width + n + i] = 1.0;
            xb[i] = s * lp.b[i];
        }
        let mut upper = lp.upper.clone();
        upper.extend(std::iter::repeat(f64::INFINITY).take(m));
        let mut basic_row = vec![None; width];
        for i in 0..m {
            basic_row[n + i] = Some(i);
        }
        Self {
            lp,
            m,
            width,
            t,
            sign,
            xb,
            basis: (n..n + m).collect(),
            basic_row,
            at_upper: vec![false; width],
            upper,
            d: vec![0.0; width],
            iterations: 0,
        }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.t[i * self.width..(i + 1) * self.width]
    }

    fn price(&mut self, cost: &[f64]) {
        let w = self.width;
        self.d.copy_from_slice(cost);
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * w..(i + 1) * w];
                for (dj, &tij) in self.d.iter_mut().zip(row) {
                    *dj -= cb * tij;
                }
            }
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        if self.at_upper[j] {
            self.upper[j]
        } else {
            0.0
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let p = self.t[r * w + q];
        for v in &mut self.t[r * w..(r + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.row(r).to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + q];
            if f != 0.0 {
                for (v, &pr) in self.t[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
                self.t[i * w + q] = 0.0;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (dj, &pr) in self.d.iter_mut().zip(&pivot_row) {
                *dj -= f * pr;
            }
            self.d[q] = 0.0;
        }
        let leaving = self.basis[r];
        self.basic_row[leaving] = None;
        self.basic_row[q] = Some(r);
        self.basis[r] = q;
    }

    fn step(&mut self, bland: bool) -> Result<(Step, f64)> {
        let w = self.width;
        let mut best: Option<(usize, f64)> = None;
        for j in 0..w {
            if self.basic_row[j].is_some() || self.upper[j] == 0.0 {
                continue;
            }
            let dj = self.d[j];
            let gain = if self.at_upper[j] { dj } else { -dj };
            if gain > OPT_TOL {
                match best {
                    None => best = Some((j, gain)),
                    Some((_, g)) if !bland && gain > g => best = Some((j, gain)),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
        }
        let Some((q, _)) = best else {
            return Ok((Step::Optimal, 0.0));
        };
        let dir = if self.at_upper[q] { -1.0 } else { 1.0 };

        let mut limit = self.upper[q];
        let mut leave: Option<(usize, bool, f64)> = None;
        for i in 0..self.m {
            let a = dir * self.t[i * w + q];
            let (lim, to_upper) = if a > PIVOT_TOL {
                (self.xb[i].max(0.0) / a, false)
            } else if a < -PIVOT_TOL && self.upper[self.basis[i]].is_finite() {
                ((self.upper[self.basis[i]] - self.xb[i]).max(0.0) / -a, true)
            } else {
                continue;
            };
            let take = match leave {
                None => lim <= limit,
                Some((r, _, _)) if lim == limit => {
                    if bland {
                        self.basis[i] < self.basis[r]
                    } else {
                        a.abs() > (dir * self.t[r * w + q]).abs()
                    }
                }
                Some(_) => lim < limit,
            };
            if take {
                limit = lim;
                leave = Some((i, to_upper, a));
            }
        }
        if !limit.is_finite() {
            return Err(Error::Lp("unbounded objective".into()));
        }
        let tstep = limit;
        for i in 0..self.m {
            self.xb[i] -= dir * tstep * self.t[i * w + q];
        }
        match leave {
            None => {
                self.at_upper[q] = !self.at_upper[q];
            }
            Some((r, to_upper, _)) => {
                let value = self.nonbasic_value(q) + dir * tstep;
                let leaving = self.basis[r];
                self.pivot(r, q);
                self.at_upper[leaving] = to_upper;
                self.at_upper[q] = false;
                self.xb[r] = value;
            }
        }
        self.iterations += 1;
        Ok((Step::Moved, tstep))
    }

    fn optimize(&mut self, cost: &[f64]) -> Result<()> {
        self.price(cost);
        let max_iter = 50 * (self.width + self.m) + 1000;
        let mut stalled = 0usize;
        loop {
            if self.iterations > max_iter {
                return Err(Error::Lp("iteration limit reached".into()));
            }
            let (state, tstep) = self.step(stalled >= STALL_LIMIT)?;
            match state {
                Step::Optimal => return Ok(()),
                Step::Moved => {
                    if tstep <= 1e-14 {
                        stalled += 1;
                    } else {
                        stalled = 0;
                    }
                }
            }
        }
    }

    fn run(mut self) -> Result<LpSolution> {
        let n = self.lp.cols;
        let scale = 1.0 + self.xb.iter().fold(0.0f64, |m, v| m.max(v.abs()));

        let mut phase1 = vec![0.0; self.width];
        for v in &mut phase1[n..] {
            *v = 1.0;
        }
        self.optimize(&phase1)?;
        let infeas: f64 = (0..self.m)
            .filter(|&i| self.basis[i] >= n)
            .map(|i| self.xb[i])
            .sum();
        if infeas > 1e-9 * scale {
            return Err(Error::Lp(format!("infeasible (phase one residual {infeas:.3e})")));
        }

        // drive zero-level artificials out of the basis where possible
        for r in 0..self.m {
            if self.basis[r] < n {
                continue;
            }
            let row = self.row(r);
            let q = (0..n)
                .filter(|&j| self.basic_row[j].is_none() && self.upper[j] > 0.0)
                .max_by(|&a, &b| row[a].abs().total_cmp(&row[b].abs()));
            if let Some(q) = q {
                if self.row(r)[q].abs() > PIVOT_TOL {
                    let value = self.nonbasic_value(q);
                    let leaving = self.basis[r];
                    self.pivot(r, q);
                    self.at_upper[leaving] = false;
                    self.at_upper[q] = false;
                    self.xb[r] = value;
                }
            }
        }
        for j in n..self.width {
            self.upper[j] = 0.0;
        }

        let mut cost = self.lp.c.clone();
        cost.extend(std::iter::repeat(0.0).take(self.m));
        self.optimize(&cost)?;
        Ok(self.extract(&cost))
    }

    fn extract(&self, cost: &[f64]) -> LpSolution {
        let (m, n) = (self.m, self.lp.cols);
        let mut x = vec![0.0; n];
        for (j, xj) in x.iter_mut().enumerate() {
            if self.basic_row[j].is_none() {
                *xj = self.nonbasic_value(j);
            }
        }
        let mut xb = self.xb.clone();
        // tableau duals: y' = c_B B^-1, read from the artificial columns
        let mut y: Vec<f64> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|k| cost[self.basis[k]] * self.t[k * self.width + n + i])
                    .sum::<f64>()
            })
            .collect();

        // refine with an LU solve of the final basis
        let basis_col = |k: usize, i: usize| -> f64 {
            let j = self.basis[k];
            if j < n {
                self.sign[i] * self.lp.a[i * n + j]
            } else if j - n == i {
                1.0
            } else {
                0.0
            }
        };
        let bmat = DMatrix::from_fn(m, m, |i, k| basis_col(k, i));
        let lu = bmat.clone().lu();
        let mut rhs = DVector::from_fn(m, |i, _| self.sign[i] * self.lp.b[i]);
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for i in 0..m {
                    rhs[i] -= self.sign[i] * self.lp.a[i * n + j] * xj;
                }
            }
        }
        if let Some(sol) = lu.solve(&rhs) {
            let ok = sol.iter().zip(&xb).all(|(s, o)| (s - o).abs() <= 1e-6 * (1.0 + o.abs()));
            if ok {
                for (k, v) in sol.iter().enumerate() {
                    let ub = self.upper[self.basis[k]];
                    xb[k] = v.clamp(0.0, if ub.is_finite() { ub } else { f64::INFINITY });
                }
            }
            let cb = DVector::from_fn(m, |k, _| cost[self.basis[k]]);
            if let Some(yy) = bmat.transpose().lu().solve(&cb) {
                let ok = yy.iter().zip(&y).all(|(s, o)| (s - o).abs() <= 1e-6 * (1.0 + o.abs()));
                if ok {
                    y = yy.iter().copied().collect();
                }
            }
        }
        for k in 0..m {
            if self.basis[k] < n {
                x[self.basis[k]] = xb[k];
            }
        }
        for i in 0..m {
            y[i] *= self.sign[i];
        }
        let objective = x.iter().zip(&self.lp.c).map(|(a, b)| a * b).sum();
        LpSolution {
            x,
            objective,
            duals: y,
            iterations: self.iterations,
        }
    }
}

/// Exact check, in rational arithmetic over the given `f64` data, that
/// `<x, w> > 0` and `<x, col> <= 0` for every column.
pub fn verify_farkas_exact<'c, I>(x: &[f64], w: &[f64], columns: I) -> bool
where
    I: IntoIterator<Item = &'c [f64]>,
{
    let to_q = |v: f64| BigRational::from_f64(v).expect("finite value");
    let xq: Vec<BigRational> = x.iter().map(|&v| to_q(v)).collect();
    let dot = |col: &[f64]| -> BigRational {
        xq.iter()
            .zip(col)
            .fold(BigRational::zero(), |acc, (a, &b)| acc + a * to_q(b))
    };
    if !dot(w).is_positive() {
        return false;
    }
    columns.into_iter().all(|col| !dot(col).is_positive())
}

/// Exact rational value of an `f64` dot product, for diagnostics.
pub fn exact_dot(x: &[f64], y: &[f64]) -> BigRational {
    let q = |v: f64| BigRational::from_f64(v).expect("finite value");
    x.iter()
        .zip(y)
        .fold(BigRational::zero(), |acc, (&a, &b)| acc + q(a) * q(b))
}

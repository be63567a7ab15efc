//! Interval arithmetic over hyper-rectangles, used to bound the Hessians of
//! the dynamics and produce the remainder bound vector eta.
//!
//! Plain floating arithmetic without directed rounding; the soundness tests
//! carry a small slack term instead.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{DoaError, Result};
use crate::linalg::Matrix;
use crate::system::SystemModel;

/// Closed real interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(DoaError::InvalidInterval(format!(
                "endpoints must be finite, got [{lo}, {hi}]"
            )));
        }
        if lo > hi {
            return Err(DoaError::InvalidInterval(format!(
                "lower endpoint {lo} exceeds upper endpoint {hi}"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        assert!(x.is_finite());
        Self { lo: x, hi: x }
    }

    /// The interval `[-r, r]`.
    pub fn symmetric(r: f64) -> Self {
        assert!(r.is_finite() && r >= 0.0);
        Self { lo: -r, hi: r }
    }

    pub fn zero() -> Self {
        Self { lo: 0.0, hi: 0.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Maximum absolute value over the interval.
    pub fn magnitude(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn scale(&self, k: f64) -> Interval {
        if k >= 0.0 {
            Interval {
                lo: self.lo * k,
                hi: self.hi * k,
            }
        } else {
            Interval {
                lo: self.hi * k,
                hi: self.lo * k,
            }
        }
    }

    /// Tight enclosure of `sin` over the interval: endpoint values, widened to
    /// +-1 whenever a critical point lies inside, clamped to [-1, 1].
    pub fn sin(&self) -> Interval {
        let lo_val = self.lo.sin();
        let hi_val = self.hi.sin();
        let mut lo = lo_val.min(hi_val);
        let mut hi = lo_val.max(hi_val);
        if contains_periodic_point(self, FRAC_PI_2) {
            hi = 1.0;
        }
        if contains_periodic_point(self, -FRAC_PI_2) {
            lo = -1.0;
        }
        Interval {
            lo: lo.clamp(-1.0, 1.0),
            hi: hi.clamp(-1.0, 1.0),
        }
    }

    /// Tight enclosure of `cos`, by the same endpoint/critical-point rule.
    pub fn cos(&self) -> Interval {
        let lo_val = self.lo.cos();
        let hi_val = self.hi.cos();
        let mut lo = lo_val.min(hi_val);
        let mut hi = lo_val.max(hi_val);
        if contains_periodic_point(self, 0.0) {
            hi = 1.0;
        }
        if contains_periodic_point(self, PI) {
            lo = -1.0;
        }
        Interval {
            lo: lo.clamp(-1.0, 1.0),
            hi: hi.clamp(-1.0, 1.0),
        }
    }
}

/// Whether some point `offset + 2*pi*k`, k integer, lies in the interval.
fn contains_periodic_point(iv: &Interval, offset: f64) -> bool {
    let k = ((iv.lo - offset) / TAU).ceil();
    offset + TAU * k <= iv.hi
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: self.lo + rhs.lo,
            hi: self.hi + rhs.hi,
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: self.lo - rhs.hi,
            hi: self.hi - rhs.lo,
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let products = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        Interval {
            lo: products.iter().copied().fold(f64::INFINITY, f64::min),
            hi: products.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Dense grid of intervals, used for per-component Hessian enclosures.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

impl IntervalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Interval::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Interval) {
        self.data[i * self.cols + j] = value;
    }

    /// Entrywise maximum absolute value, as a plain matrix.
    pub fn magnitude(&self) -> Matrix {
        Matrix::new(
            self.rows,
            self.cols,
            self.data.iter().map(Interval::magnitude).collect(),
        )
    }
}

/// Origin-centered hyper-rectangle `[-radius, radius]` componentwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct HyperRect {
    radius: Vec<f64>,
}

impl TryFrom<Vec<f64>> for HyperRect {
    type Error = DoaError;
    fn try_from(radius: Vec<f64>) -> Result<Self> {
        HyperRect::new(radius)
    }
}

impl From<HyperRect> for Vec<f64> {
    fn from(rect: HyperRect) -> Vec<f64> {
        rect.radius
    }
}

impl HyperRect {
    pub fn new(radius: Vec<f64>) -> Result<Self> {
        if radius.is_empty() {
            return Err(DoaError::InvalidHyperRect("radius vector is empty".into()));
        }
        if radius.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(DoaError::InvalidHyperRect(format!(
                "radius must be finite and nonnegative, got {radius:?}"
            )));
        }
        if radius.iter().all(|r| *r == 0.0) {
            return Err(DoaError::InvalidHyperRect(
                "at least one radius component must be positive".into(),
            ));
        }
        Ok(Self { radius })
    }

    /// Cube `[-r, r]^dim`.
    pub fn cube(dim: usize, r: f64) -> Result<Self> {
        Self::new(vec![r; dim])
    }

    pub fn dim(&self) -> usize {
        self.radius.len()
    }

    pub fn radius(&self) -> &[f64] {
        &self.radius
    }

    pub fn axis_interval(&self, i: usize) -> Interval {
        Interval::symmetric(self.radius[i])
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.radius.len()
            && x.iter()
                .zip(&self.radius)
                .all(|(xi, ri)| xi.abs() <= ri + tol)
    }

    /// All 2^dim vertices.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let n = self.radius.len();
        (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            self.radius[i]
                        } else {
                            -self.radius[i]
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Componentwise bound `eta` on the nonlinear remainder `h(x) = f(x) - A x`:
/// `|h_i(x)| <= (||x||^2 / 2) * eta_i` for all `x` in the region.
///
/// For each component the interval Hessian enclosure is reduced to its
/// magnitude matrix, whose infinity norm dominates the spectral norm of every
/// symmetric matrix inside the enclosure; the bound then follows from the
/// second-order Taylor remainder along the segment from the origin.
pub fn hessian_eta(sys: &dyn SystemModel, region: &HyperRect) -> Result<Vec<f64>> {
    let n = sys.dim();
    if region.dim() != n {
        return Err(DoaError::DimensionMismatch(format!(
            "region has dimension {}, system has {n}",
            region.dim()
        )));
    }
    (0..n)
        .map(|component| {
            let hessian = sys
                .interval_hessian(component, region)
                .ok_or(DoaError::MissingHessian { component })?;
            if hessian.rows() != n || hessian.cols() != n {
                return Err(DoaError::DimensionMismatch(format!(
                    "interval Hessian of component {component} is {}x{}, expected {n}x{n}",
                    hessian.rows(),
                    hessian.cols()
                )));
            }
            Ok(hessian.magnitude().inf_norm())
        })
        .collect()
}

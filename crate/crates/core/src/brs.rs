//! Implicit representation of the safe region-of-attraction iterates and
//! their pointwise evaluation.
//!
//! The k-th iterate is never materialized as an expression: a certificate
//! stores the safe-set function theta, the initial level function v, and the
//! depth k, and evaluates
//!
//! ```text
//! v_k(x) = max( theta(x), theta(f(x)), ..., theta(f^{k-1}(x)), v(f^k(x)) )
//! ```
//!
//! by walking the trajectory once: k applications of the map, k evaluations
//! of theta, one of v.

use std::io::{self, Write};

use crate::error::{DoaError, Result};
use crate::fmt::float17;
use crate::sets::LevelFunction;
use crate::system::SharedSystem;

/// Trajectory states with components beyond this magnitude are treated as
/// divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// How the initial level function of a certificate was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Constructed and certified by an initial-ROA report.
    Report,
    /// Supplied directly by the caller, taken on trust.
    Trusted,
}

/// Membership certificate for the k-th safe ROA iterate, stored implicitly as
/// `(theta, v, k)` plus the transition map.
#[derive(Clone)]
pub struct Certificate {
    theta: LevelFunction,
    v0: LevelFunction,
    depth: usize,
    sys: SharedSystem,
    provenance: Provenance,
}

impl Certificate {
    /// Certificate whose initial region comes from an initial-ROA report.
    pub fn from_report(
        theta: LevelFunction,
        report: crate::initroa::InitialRoaReport,
        sys: SharedSystem,
        depth: usize,
    ) -> Result<Self> {
        Self::assemble(
            theta,
            report.into_level_function(),
            sys,
            depth,
            Provenance::Report,
        )
    }

    /// Certificate with a caller-supplied initial region; the caller asserts
    /// it is a safe ROA.
    pub fn trusted(
        theta: LevelFunction,
        v0: LevelFunction,
        sys: SharedSystem,
        depth: usize,
    ) -> Result<Self> {
        Self::assemble(theta, v0, sys, depth, Provenance::Trusted)
    }

    fn assemble(
        theta: LevelFunction,
        v0: LevelFunction,
        sys: SharedSystem,
        depth: usize,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = sys.dim();
        if theta.dim() != n || v0.dim() != n {
            return Err(DoaError::DimensionMismatch(format!(
                "theta has dimension {}, v has {}, system has {n}",
                theta.dim(),
                v0.dim()
            )));
        }
        Ok(Self {
            theta,
            v0,
            depth,
            sys,
            provenance,
        })
    }

    /// Same certificate at a different depth; the representation is implicit,
    /// so this is free.
    pub fn with_depth(&self, depth: usize) -> Self {
        Self {
            depth,
            ..self.clone()
        }
    }

    pub fn theta(&self) -> &LevelFunction {
        &self.theta
    }

    pub fn v0(&self) -> &LevelFunction {
        &self.v0
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn system(&self) -> &SharedSystem {
        &self.sys
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Evaluate `v_k(x)` iteratively. A trajectory that blows up maps to
    /// `f64::INFINITY`, so such points are simply non-members.
    pub fn eval_vk(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.sys.dim() {
            return Err(DoaError::DimensionMismatch(format!(
                "point has dimension {}, system has {}",
                x.len(),
                self.sys.dim()
            )));
        }
        let mut best = f64::NEG_INFINITY;
        let mut state = x.to_vec();
        for _ in 0..self.depth {
            if diverged(&state) {
                return Ok(f64::INFINITY);
            }
            best = best.max(self.theta.eval_unchecked(&state));
            state = self.sys.step(&state);
        }
        if diverged(&state) {
            return Ok(f64::INFINITY);
        }
        Ok(best.max(self.v0.eval_unchecked(&state)))
    }

    /// Membership in the k-th iterate: `v_k(x) <= 1`.
    pub fn member_vk(&self, x: &[f64]) -> Result<bool> {
        Ok(self.eval_vk(x)? <= 1.0)
    }

    /// Smallest `k <= k_max` whose iterate contains `x`, or `None`.
    ///
    /// Single forward pass: `x` belongs to the k-th iterate iff every theta
    /// value along the first k states is at most 1 and `v` at the k-th state
    /// is at most 1. The running theta maximum never decreases, so the scan
    /// can stop as soon as it exceeds 1.
    pub fn certificate_depth(&self, x: &[f64], k_max: usize) -> Result<Option<usize>> {
        if x.len() != self.sys.dim() {
            return Err(DoaError::DimensionMismatch(format!(
                "point has dimension {}, system has {}",
                x.len(),
                self.sys.dim()
            )));
        }
        let mut state = x.to_vec();
        let mut theta_prefix = f64::NEG_INFINITY;
        for k in 0..=k_max {
            if diverged(&state) {
                return Ok(None);
            }
            if theta_prefix <= 1.0 && self.v0.eval_unchecked(&state) <= 1.0 {
                return Ok(Some(k));
            }
            theta_prefix = theta_prefix.max(self.theta.eval_unchecked(&state));
            if theta_prefix > 1.0 {
                return Ok(None);
            }
            state = self.sys.step(&state);
        }
        Ok(None)
    }
}

fn diverged(state: &[f64]) -> bool {
    state
        .iter()
        .any(|v| !v.is_finite() || v.abs() > DIVERGENCE_LIMIT)
}

/// A recorded forward trajectory.
#[derive(Clone, Debug)]
pub struct Trajectory {
    states: Vec<Vec<f64>>,
    diverged_at: Option<usize>,
}

impl Trajectory {
    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory is never empty")
    }

    /// Index of the first recorded divergent state, if the simulation was cut
    /// short.
    pub fn diverged_at(&self) -> Option<usize> {
        self.diverged_at
    }
}

/// Iterate the map for `steps` steps (recording `steps + 1` states), aborting
/// early with a divergence flag once any component exceeds
/// [`DIVERGENCE_LIMIT`] in magnitude.
pub fn simulate(
    sys: &dyn crate::system::SystemModel,
    x0: &[f64],
    steps: usize,
) -> Result<Trajectory> {
    if x0.len() != sys.dim() {
        return Err(DoaError::DimensionMismatch(format!(
            "initial state has dimension {}, system has {}",
            x0.len(),
            sys.dim()
        )));
    }
    let mut states = Vec::with_capacity(steps + 1);
    states.push(x0.to_vec());
    for k in 0..steps {
        if diverged(&states[k]) {
            return Ok(Trajectory {
                diverged_at: Some(k),
                states,
            });
        }
        let next = sys.step(&states[k]);
        states.push(next);
    }
    let diverged_at = diverged(states.last().expect("nonempty")).then_some(states.len() - 1);
    Ok(Trajectory {
        states,
        diverged_at,
    })
}

/// Safety/attraction verdict for a recorded trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SafeAttraction {
    /// Every state satisfies `theta <= 1 + 1e-12`.
    pub safe: bool,
    /// The final state lies within `conv_tol` of the origin.
    pub attracted: bool,
    /// Earliest index violating the safe set, if any.
    pub first_violation: Option<usize>,
}

pub fn check_safe_attraction(
    traj: &Trajectory,
    theta: &LevelFunction,
    conv_tol: f64,
) -> Result<SafeAttraction> {
    let mut first_violation = None;
    for (k, state) in traj.states().iter().enumerate() {
        let value = theta.eval(state)?;
        if value > 1.0 + 1e-12 {
            first_violation = Some(k);
            break;
        }
    }
    let last = traj.last();
    let last_norm = last.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(SafeAttraction {
        safe: first_violation.is_none(),
        attracted: traj.diverged_at().is_none() && last_norm < conv_tol,
        first_violation,
    })
}

/// Specification of a planar cross-section grid.
#[derive(Clone, Debug)]
pub struct GridSpec {
    /// The two varying state coordinates.
    pub axes: (usize, usize),
    /// Values of the remaining coordinates (entries at the varying axes are
    /// ignored).
    pub fixed: Vec<f64>,
    /// Inclusive coordinate ranges for the two axes.
    pub ranges: ((f64, f64), (f64, f64)),
    /// Grid points per axis (>= 2).
    pub resolution: (usize, usize),
}

impl GridSpec {
    fn validate(&self, dim: usize) -> Result<()> {
        let (i, j) = self.axes;
        if i == j || i >= dim || j >= dim {
            return Err(DoaError::InvalidArgument(format!(
                "axes ({i}, {j}) must be distinct and below {dim}"
            )));
        }
        if self.fixed.len() != dim {
            return Err(DoaError::DimensionMismatch(format!(
                "fixed vector has dimension {}, system has {dim}",
                self.fixed.len()
            )));
        }
        if self.resolution.0 < 2 || self.resolution.1 < 2 {
            return Err(DoaError::InvalidArgument(format!(
                "resolution {:?} must be at least 2 per axis",
                self.resolution
            )));
        }
        let ((lo_i, hi_i), (lo_j, hi_j)) = self.ranges;
        let finite = [lo_i, hi_i, lo_j, hi_j].iter().all(|v| v.is_finite());
        if !finite || lo_i >= hi_i || lo_j >= hi_j {
            return Err(DoaError::InvalidArgument(format!(
                "ranges {:?} must be nonempty",
                self.ranges
            )));
        }
        Ok(())
    }

    pub fn coord_i(&self, idx: usize) -> f64 {
        let (lo, hi) = self.ranges.0;
        lo + (hi - lo) * idx as f64 / (self.resolution.0 - 1) as f64
    }

    pub fn coord_j(&self, idx: usize) -> f64 {
        let (lo, hi) = self.ranges.1;
        lo + (hi - lo) * idx as f64 / (self.resolution.1 - 1) as f64
    }
}

/// Values and memberships of `v_k` over a cross-section grid, row-major in
/// the first axis.
#[derive(Clone, Debug)]
pub struct GridSection {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    pub members: Vec<bool>,
}

impl GridSection {
    pub fn member_count(&self) -> usize {
        self.members.iter().filter(|m| **m).count()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.resolution.1 + j]
    }

    pub fn is_member(&self, i: usize, j: usize) -> bool {
        self.members[i * self.spec.resolution.1 + j]
    }

    /// CSV export: header `i,j,x_i,x_j,value,member`, rows in row-major
    /// order, floats with 17 significant digits, member as 0/1, LF endings.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(b"i,j,x_i,x_j,value,member\n")?;
        let (ni, nj) = self.spec.resolution;
        for i in 0..ni {
            let xi = float17(self.spec.coord_i(i));
            for j in 0..nj {
                let idx = i * nj + j;
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    i,
                    j,
                    xi,
                    float17(self.spec.coord_j(j)),
                    float17(self.values[idx]),
                    u8::from(self.members[idx]),
                )?;
            }
        }
        Ok(())
    }
}

/// Evaluate `v_k` over a cross-section grid. Cells are independent; with the
/// `parallel` feature rows are evaluated concurrently, and the output is
/// identical either way.
pub fn grid_section(cert: &Certificate, spec: &GridSpec) -> Result<GridSection> {
    spec.validate(cert.system().dim())?;
    let (ni, nj) = spec.resolution;
    let (axis_i, axis_j) = spec.axes;

    let eval_row = |i: usize| -> Vec<f64> {
        let mut state = spec.fixed.clone();
        state[axis_i] = spec.coord_i(i);
        (0..nj)
            .map(|j| {
                state[axis_j] = spec.coord_j(j);
                cert.eval_vk(&state).expect("dimensions validated")
            })
            .collect()
    };

    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..ni).into_par_iter().map(eval_row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = (0..ni).map(eval_row).collect();

    let values: Vec<f64> = rows.into_iter().flatten().collect();
    let members = values.iter().map(|v| *v <= 1.0).collect();
    Ok(GridSection {
        spec: spec.clone(),
        values,
        members,
    })
}

//! Construction of the initial safe region of attraction from a quadratic
//! Lyapunov function, with every intermediate quantity kept for audit.
//!
//! Writing `f(x) = A x + h(x)` with `A` the Jacobian at the origin, the
//! remainder obeys `|h(x)| <= (||x||^2 / 2) eta` on an origin-centered box
//! (see [`crate::interval::hessian_eta`]). Solving `A^T P A - P = -Q` gives
//! the candidate Lyapunov function `nu(x) = x^T P x`; bounding the cross and
//! quadratic remainder terms yields a level `c1` below which `nu` strictly
//! decreases along trajectories, a level `c2` below which the sublevel set
//! stays inside the box, and the certified level `c = min(c1, c2)`. The
//! resulting region is the 1-sublevel set of `v(x) = nu(x) / c`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DoaError, Result};
use crate::interval::{hessian_eta, HyperRect};
use crate::linalg::{invert, norms, sqrt_spd, sym_eig, Matrix};
use crate::sets::LevelFunction;
use crate::system::SystemModel;

/// Which of the two level constraints determined the certified level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingConstraint {
    /// The Lyapunov-decrease constraint `c1`.
    Decrease,
    /// The box-containment constraint `c2`.
    Containment,
}

/// Every quantity produced while constructing the initial safe region of
/// attraction. `c1` is `f64::INFINITY` when the dynamics are linear inside
/// the box (no decrease constraint); `c2` always caps the level then.
#[derive(Clone, Debug)]
pub struct InitialRoaReport {
    /// Jacobian of the transition map at the origin.
    pub jacobian: Matrix,
    pub q: Matrix,
    pub p: Matrix,
    /// The box over which the remainder bound was computed.
    pub region: HyperRect,
    /// Componentwise remainder bound over the box.
    pub eta: Vec<f64>,
    pub epsilon: f64,
    /// `lambda_min(Q) - epsilon`.
    pub d: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
    pub c: f64,
    pub lambda_min_p: f64,
    pub lambda_max_p: f64,
    pub binding: BindingConstraint,
    level: LevelFunction,
}

impl InitialRoaReport {
    /// The certified level function `v(x) = x^T P x / c`.
    pub fn level_function(&self) -> &LevelFunction {
        &self.level
    }

    pub fn into_level_function(self) -> LevelFunction {
        self.level
    }

    /// The same report with the level overridden. The decrease and
    /// containment constraints are not re-derived, so the result is only
    /// certified when `c <= min(c1, c2)`; anything larger is for
    /// experimentation (and should fail [`verify_lyapunov_decrease`]).
    pub fn with_level(&self, c: f64) -> Result<InitialRoaReport> {
        let level = LevelFunction::quadratic(self.p.clone(), c)?;
        Ok(InitialRoaReport {
            c,
            level,
            ..self.clone()
        })
    }
}

/// Default `epsilon`: a small fixed fraction of `lambda_min(Q)`, so `d > 0`
/// holds for any positive-definite `Q`.
pub fn default_epsilon(q: &Matrix) -> Result<f64> {
    Ok(0.01 * sym_eig(q)?.eigenvalues[0])
}

/// Build the initial safe region of attraction report.
///
/// The caller is responsible for `region` being contained in the safe set;
/// [`check_box_in_safe_set`] performs that check for convex level functions.
pub fn build_initial_roa(
    sys: &dyn SystemModel,
    region: &HyperRect,
    q: &Matrix,
    epsilon: f64,
) -> Result<InitialRoaReport> {
    let n = sys.dim();
    if region.dim() != n {
        return Err(DoaError::DimensionMismatch(format!(
            "box has dimension {}, system has {n}",
            region.dim()
        )));
    }
    if q.rows() != n || q.cols() != n {
        return Err(DoaError::DimensionMismatch(format!(
            "Q is {}x{}, system has dimension {n}",
            q.rows(),
            q.cols()
        )));
    }
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(DoaError::InvalidArgument(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }

    let f0 = sys.step(&vec![0.0; n]);
    let f0_norm = f0.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !f0_norm.is_finite() || f0_norm >= 1e-12 {
        return Err(DoaError::NotEquilibrium { norm: f0_norm });
    }

    let jacobian = sys.jacobian_origin();
    if jacobian.rows() != n || jacobian.cols() != n {
        return Err(DoaError::DimensionMismatch(format!(
            "Jacobian is {}x{}, system has dimension {n}",
            jacobian.rows(),
            jacobian.cols()
        )));
    }

    let p = crate::linalg::solve_dlyap(&jacobian, q)?;
    let p_eig = sym_eig(&p)?;
    let lambda_min_p = p_eig.eigenvalues[0];
    let lambda_max_p = *p_eig.eigenvalues.last().expect("nonempty spectrum");

    let eta = hessian_eta(sys, region)?;
    let eta_norm = eta.iter().map(|v| v * v).sum::<f64>().sqrt();

    let lambda_min_q = sym_eig(q)?.eigenvalues[0];
    let d = lambda_min_q - epsilon;
    if d <= 0.0 {
        return Err(DoaError::EpsilonTooLarge {
            epsilon,
            lambda_min_q,
        });
    }

    // spectral norm of the SPD matrix P is its largest eigenvalue
    let alpha = lambda_max_p * eta_norm * eta_norm / (4.0 * lambda_min_p);

    let p_half = sqrt_spd(&p)?;
    let p_half_inv = invert(&p_half)?;
    let weighted_eta = p_half.abs().matvec(&eta);
    let weighted_eta_norm = weighted_eta.iter().map(|v| v * v).sum::<f64>().sqrt();
    let similarity = p_half.matmul(&jacobian).matmul(&p_half_inv);
    let beta = weighted_eta_norm * norms(&similarity).spectral;

    // largest level at which beta*sqrt(nu) + alpha*nu <= d holds throughout
    // the sublevel set; degenerate branches are the limits of the root formula
    let c1 = if alpha > 1e-14 {
        let root = (-beta + (beta * beta + 4.0 * alpha * d).sqrt()) / (2.0 * alpha);
        root * root
    } else if beta > 1e-14 {
        (d / beta) * (d / beta)
    } else {
        f64::INFINITY
    };

    let p_inv = invert(&p)?;
    let c2 = (0..n)
        .map(|i| {
            let r = region.radius()[i];
            r * r / p_inv[(i, i)]
        })
        .fold(f64::INFINITY, f64::min);

    let c = c1.min(c2);
    if !c.is_finite() || c <= 0.0 {
        return Err(DoaError::LevelCollapsed(format!(
            "c1 = {c1:e}, c2 = {c2:e}; the box has no room along some coordinate"
        )));
    }
    let binding = if c1 <= c2 {
        BindingConstraint::Decrease
    } else {
        BindingConstraint::Containment
    };

    let level = LevelFunction::quadratic(p.clone(), c)?;
    Ok(InitialRoaReport {
        jacobian,
        q: q.clone(),
        p,
        region: region.clone(),
        eta,
        epsilon,
        d,
        alpha,
        beta,
        c1,
        c2,
        c,
        lambda_min_p,
        lambda_max_p,
        binding,
        level,
    })
}

/// Outcome of the sampled Lyapunov-decrease check.
#[derive(Clone, Debug)]
pub struct DecreaseCheck {
    /// Number of accepted samples actually checked.
    pub samples: usize,
    pub violation: Option<DecreaseViolation>,
}

impl DecreaseCheck {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct DecreaseViolation {
    pub state: Vec<f64>,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug)]
pub enum ViolationKind {
    /// `nu(f(x)) >= nu(x)` at the sample.
    NotDecreasing { before: f64, after: f64 },
    /// The sample fell outside the box the remainder bound was computed on
    /// (would contradict `c <= c2`).
    OutsideRegion,
}

/// Sample the certified sublevel set and check the strict Lyapunov decrease
/// `nu(f(x)) < nu(x)` together with containment in the box.
///
/// Rejection sampling in the bounding box of the ellipsoid, rejecting points
/// closer than 1e-8 to the origin. Returns the first violation found, if any.
pub fn verify_lyapunov_decrease(
    report: &InitialRoaReport,
    sys: &dyn SystemModel,
    samples: usize,
    seed: u64,
) -> Result<DecreaseCheck> {
    let n = sys.dim();
    if report.p.rows() != n {
        return Err(DoaError::DimensionMismatch(format!(
            "report is {}-dimensional, system is {n}-dimensional",
            report.p.rows()
        )));
    }
    let p_inv = invert(&report.p)?;
    // per-axis extent of the ellipsoid nu(x) <= c
    let half_width: Vec<f64> = (0..n).map(|i| (report.c * p_inv[(i, i)]).sqrt()).collect();
    let nu = |x: &[f64]| -> f64 {
        let px = report.p.matvec(x);
        x.iter().zip(&px).map(|(a, b)| a * b).sum()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted = 0;
    let max_draws = samples.saturating_mul(10_000).max(1_000_000);
    for _ in 0..max_draws {
        if accepted == samples {
            break;
        }
        let x: Vec<f64> = half_width
            .iter()
            .map(|w| rng.gen_range(-1.0..=1.0) * w)
            .collect();
        let nu_x = nu(&x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nu_x > report.c || norm < 1e-8 {
            continue;
        }
        accepted += 1;
        if !report.region.contains(&x, 1e-12) {
            return Ok(DecreaseCheck {
                samples: accepted,
                violation: Some(DecreaseViolation {
                    state: x,
                    kind: ViolationKind::OutsideRegion,
                }),
            });
        }
        let nu_next = nu(&sys.step(&x));
        if nu_next >= nu_x {
            return Ok(DecreaseCheck {
                samples: accepted,
                violation: Some(DecreaseViolation {
                    state: x,
                    kind: ViolationKind::NotDecreasing {
                        before: nu_x,
                        after: nu_next,
                    },
                }),
            });
        }
    }
    if accepted < samples {
        return Err(DoaError::NonConvergence(format!(
            "rejection sampling accepted only {accepted} of {samples} requested samples"
        )));
    }
    Ok(DecreaseCheck {
        samples: accepted,
        violation: None,
    })
}

/// Result of checking that a box lies inside the 1-sublevel set of a level
/// function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoxCheck {
    /// All vertices verified; sufficient for convex level functions because
    /// the maximum over a box is attained at a vertex.
    VerifiedAtVertices,
    /// The level function is not convex, so the vertex argument does not
    /// apply; containment was not verified.
    Skipped,
}

/// Check `box subset of Psi(theta, 1)` by evaluating `theta` at all vertices.
///
/// For convex `theta` (all variants except compositions) the vertex maximum
/// equals the box maximum, so this is exact; for compositions the check is
/// skipped and the caller should warn.
pub fn check_box_in_safe_set(theta: &LevelFunction, region: &HyperRect) -> Result<BoxCheck> {
    if theta.dim() != region.dim() {
        return Err(DoaError::DimensionMismatch(format!(
            "level function has dimension {}, box has {}",
            theta.dim(),
            region.dim()
        )));
    }
    if !theta.is_convex() {
        return Ok(BoxCheck::Skipped);
    }
    for vertex in region.vertices() {
        let value = theta.eval(&vertex)?;
        if value > 1.0 {
            return Err(DoaError::UnsafeBox(format!(
                "vertex {vertex:?} evaluates to {value} > 1"
            )));
        }
    }
    Ok(BoxCheck::VerifiedAtVertices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::IntervalMatrix;
    use crate::linalg::solve_dlyap;

    /// Linear contraction f(x) = a x, zero Hessian everywhere.
    struct LinearContraction {
        dim: usize,
        a: f64,
    }

    impl SystemModel for LinearContraction {
        fn dim(&self) -> usize {
            self.dim
        }
        fn name(&self) -> &str {
            "linear_contraction"
        }
        fn step(&self, x: &[f64]) -> Vec<f64> {
            x.iter().map(|v| self.a * v).collect()
        }
        fn jacobian_origin(&self) -> Matrix {
            Matrix::identity(self.dim).scale(self.a)
        }
        fn interval_hessian(&self, _: usize, _: &HyperRect) -> Option<IntervalMatrix> {
            Some(IntervalMatrix::zeros(self.dim, self.dim))
        }
    }

    /// f(x) = 0.5 x + offset, not an equilibrium at the origin.
    struct Shifted;

    impl SystemModel for Shifted {
        fn dim(&self) -> usize {
            1
        }
        fn name(&self) -> &str {
            "shifted"
        }
        fn step(&self, x: &[f64]) -> Vec<f64> {
            vec![0.5 * x[0] + 0.1]
        }
        fn jacobian_origin(&self) -> Matrix {
            Matrix::diag(&[0.5])
        }
        fn interval_hessian(&self, _: usize, _: &HyperRect) -> Option<IntervalMatrix> {
            Some(IntervalMatrix::zeros(1, 1))
        }
    }

    #[test]
    fn linear_system_has_no_decrease_constraint() {
        let sys = LinearContraction { dim: 2, a: 0.5 };
        let b = HyperRect::cube(2, 1.0).unwrap();
        let report = build_initial_roa(&sys, &b, &Matrix::identity(2), 0.01).unwrap();
        assert_eq!(report.eta, vec![0.0, 0.0]);
        assert_eq!(report.alpha, 0.0);
        assert_eq!(report.beta, 0.0);
        assert!(report.c1.is_infinite());
        assert_eq!(report.c, report.c2);
        assert_eq!(report.binding, BindingConstraint::Containment);

        // P = q/(1-a^2) I = 4/3 I, so c2 = 1 / (3/4) = 4/3
        assert!((report.c2 - 4.0 / 3.0).abs() < 1e-12, "c2 = {}", report.c2);
    }

    #[test]
    fn unstable_system_reports_schur_instability() {
        let sys = LinearContraction { dim: 2, a: 1.1 };
        let b = HyperRect::cube(2, 1.0).unwrap();
        let err = build_initial_roa(&sys, &b, &Matrix::identity(2), 0.01).unwrap_err();
        assert!(matches!(err, DoaError::SchurInstability));
    }

    #[test]
    fn epsilon_must_stay_below_lambda_min_q() {
        let sys = LinearContraction { dim: 2, a: 0.5 };
        let b = HyperRect::cube(2, 1.0).unwrap();
        let err = build_initial_roa(&sys, &b, &Matrix::identity(2), 1.5).unwrap_err();
        assert!(matches!(err, DoaError::EpsilonTooLarge { .. }));
        assert!(build_initial_roa(&sys, &b, &Matrix::identity(2), -0.1).is_err());
    }

    #[test]
    fn non_equilibrium_is_rejected() {
        let b = HyperRect::cube(1, 1.0).unwrap();
        let err = build_initial_roa(&Shifted, &b, &Matrix::identity(1), 0.01).unwrap_err();
        assert!(matches!(err, DoaError::NotEquilibrium { .. }));
    }

    #[test]
    fn decrease_check_passes_for_linear_contraction() {
        let sys = LinearContraction { dim: 2, a: 0.5 };
        let b = HyperRect::cube(2, 1.0).unwrap();
        let report = build_initial_roa(&sys, &b, &Matrix::identity(2), 0.01).unwrap();
        let check = verify_lyapunov_decrease(&report, &sys, 2000, 42).unwrap();
        assert!(check.passed());
        assert_eq!(check.samples, 2000);
    }

    #[test]
    fn scaling_q_scales_p_linearly() {
        let sys = LinearContraction { dim: 2, a: 0.7 };
        let q = Matrix::identity(2);
        let p1 = solve_dlyap(&sys.jacobian_origin(), &q).unwrap();
        let p2 = solve_dlyap(&sys.jacobian_origin(), &q.scale(2.0)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = 2.0 * p1[(i, j)];
                assert!((p2[(i, j)] - expected).abs() <= 1e-10 * (1.0 + expected.abs()));
            }
        }
    }

    #[test]
    fn box_check_accepts_contained_and_rejects_escaping() {
        let theta = LevelFunction::weighted_inf_norm(Matrix::diag(&[1.0, 2.0])).unwrap();
        let inside = HyperRect::new(vec![1.0, 0.5]).unwrap();
        assert_eq!(
            check_box_in_safe_set(&theta, &inside).unwrap(),
            BoxCheck::VerifiedAtVertices
        );
        let outside = HyperRect::new(vec![1.0, 0.6]).unwrap();
        assert!(matches!(
            check_box_in_safe_set(&theta, &outside),
            Err(DoaError::UnsafeBox(_))
        ));
    }
}

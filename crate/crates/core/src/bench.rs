//! Built-in benchmark systems: a two-machine power system and an
//! LQR-stabilized cart-pole, both Euler-discretized with time step 0.1, with
//! hand-derived Jacobians and closed-form interval Hessian enclosures.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};
use std::sync::Arc;

use crate::error::{DoaError, Result};
use crate::interval::{HyperRect, Interval, IntervalMatrix};
use crate::linalg::{solve_dare, Matrix};
use crate::sets::LevelFunction;
use crate::system::{SharedSystem, SystemModel};

const DT: f64 = 0.1;

/// Feedback gain baked into the default cart-pole closed loop (applied as
/// `u = K x`).
pub const CART_POLE_GAIN: [f64; 4] = [1.6897, 6.2464, 11.3886, 11.4026];

/// Per-axis radii of the cart-pole state box (position, velocity, angle,
/// angular velocity).
pub const CART_POLE_STATE_RADIUS: [f64; 4] = [0.1, 0.1, FRAC_PI_4, 0.1];

/// A benchmark system bundled with its safe-set level function and the
/// default box for the initial-region construction.
#[derive(Clone)]
pub struct Benchmark {
    pub system: SharedSystem,
    pub safe_set: LevelFunction,
    pub region: HyperRect,
}

/// Look up a benchmark by its CLI-addressable name.
pub fn by_name(name: &str) -> Result<Benchmark> {
    match name {
        "two_machine" => Ok(two_machine()),
        "cart_pole" => cart_pole_closed_loop(None),
        other => Err(DoaError::UnknownSystem(other.to_string())),
    }
}

/// Two-machine power system (dimension 2):
///
/// ```text
/// x1' = x1 + dt x2
/// x2' = x2 - dt (x2/2 + sin(x1 + pi/3) - sin(pi/3))
/// ```
///
/// Safe set `||diag(1,2) x||_inf <= 1`, i.e. the box [-1,1] x [-0.5,0.5]; the
/// construction box equals the safe set.
pub fn two_machine() -> Benchmark {
    let system: SharedSystem = Arc::new(TwoMachine);
    let safe_set =
        LevelFunction::weighted_inf_norm(Matrix::diag(&[1.0, 2.0])).expect("valid weight matrix");
    let region = HyperRect::new(vec![1.0, 0.5]).expect("valid radii");
    Benchmark {
        system,
        safe_set,
        region,
    }
}

struct TwoMachine;

impl SystemModel for TwoMachine {
    fn dim(&self) -> usize {
        2
    }

    fn name(&self) -> &str {
        "two_machine"
    }

    fn step(&self, x: &[f64]) -> Vec<f64> {
        vec![
            x[0] + DT * x[1],
            x[1] - DT * (x[1] / 2.0 + (x[0] + FRAC_PI_3).sin() - FRAC_PI_3.sin()),
        ]
    }

    fn jacobian_origin(&self) -> Matrix {
        // d/dx1 of sin(x1 + pi/3) at 0 is cos(pi/3) = 1/2
        Matrix::from_rows(&[&[1.0, DT], &[-DT * 0.5, 1.0 - DT / 2.0]])
    }

    fn interval_hessian(&self, component: usize, region: &HyperRect) -> Option<IntervalMatrix> {
        let mut hessian = IntervalMatrix::zeros(2, 2);
        if component == 1 {
            // the only curvature: d2 f2 / dx1^2 = dt * sin(x1 + pi/3)
            let angle = region.axis_interval(0) + Interval::point(FRAC_PI_3);
            hessian.set(0, 0, angle.sin().scale(DT));
        }
        Some(hessian)
    }
}

/// Cart-pole (dimension 4) under the linear state feedback `u = K x`:
///
/// ```text
/// x1' = x1 + dt x2
/// x2' = x2 + dt u
/// x3' = x3 + dt x4
/// x4' = x4 + dt (sin(x3) - cos(x3) u)
/// ```
///
/// The safe-set function stacks the input constraint `|K x| <= 1` on top of
/// the state box `||E x||_inf <= 1` with `E = diag(1/radius)`. The default
/// construction box is the cube of radius `1 / ||[K; E]||_inf`, which the
/// stacked norm maps into the unit ball, so the box always sits inside the
/// safe set.
pub fn cart_pole_closed_loop(gain: Option<Matrix>) -> Result<Benchmark> {
    let gain = match gain {
        Some(k) => {
            if k.rows() != 1 || k.cols() != 4 {
                return Err(DoaError::DimensionMismatch(format!(
                    "cart-pole gain must be 1x4, got {}x{}",
                    k.rows(),
                    k.cols()
                )));
            }
            k
        }
        None => Matrix::row_vector(&CART_POLE_GAIN),
    };

    let weights = Matrix::diag(&CART_POLE_STATE_RADIUS.map(|r| 1.0 / r));
    let stacked = Matrix::vstack(&[&gain, &weights]);
    let safe_set = LevelFunction::stacked_inf_norm(vec![gain.clone(), weights])?;
    let region = HyperRect::cube(4, 1.0 / stacked.inf_norm())?;

    let mut k = [0.0; 4];
    k.copy_from_slice(gain.data());
    let system: SharedSystem = Arc::new(CartPoleClosedLoop { gain: k });
    Ok(Benchmark {
        system,
        safe_set,
        region,
    })
}

struct CartPoleClosedLoop {
    gain: [f64; 4],
}

impl CartPoleClosedLoop {
    fn control(&self, x: &[f64]) -> f64 {
        self.gain.iter().zip(x).map(|(k, v)| k * v).sum()
    }
}

impl SystemModel for CartPoleClosedLoop {
    fn dim(&self) -> usize {
        4
    }

    fn name(&self) -> &str {
        "cart_pole"
    }

    fn step(&self, x: &[f64]) -> Vec<f64> {
        let u = self.control(x);
        vec![
            x[0] + DT * x[1],
            x[1] + DT * u,
            x[2] + DT * x[3],
            x[3] + DT * (x[2].sin() - x[2].cos() * u),
        ]
    }

    fn jacobian_origin(&self) -> Matrix {
        let k = &self.gain;
        // rows 2 and 4 pick up the feedback through u = K x; linearizing
        // sin/cos at 0 leaves row 4 with dt (e3 - K)
        Matrix::from_rows(&[
            &[1.0, DT, 0.0, 0.0],
            &[DT * k[0], 1.0 + DT * k[1], DT * k[2], DT * k[3]],
            &[0.0, 0.0, 1.0, DT],
            &[-DT * k[0], -DT * k[1], DT * (1.0 - k[2]), 1.0 - DT * k[3]],
        ])
    }

    fn interval_hessian(&self, component: usize, region: &HyperRect) -> Option<IntervalMatrix> {
        let mut hessian = IntervalMatrix::zeros(4, 4);
        if component == 3 {
            // f4 = x4 + dt (sin x3 - cos x3 * Kx) is the only nonlinear
            // component; with s = sin x3, c = cos x3, w = Kx its Hessian is
            //   d2/dx3^2      = dt (-s + c w + 2 s K3)
            //   d2/dx3 dx_j   = dt s K_j            (j != 3)
            let s = region.axis_interval(2).sin();
            let c = region.axis_interval(2).cos();
            let w = self
                .gain
                .iter()
                .enumerate()
                .map(|(j, kj)| region.axis_interval(j).scale(*kj))
                .fold(Interval::zero(), |acc, term| acc + term);
            let own = (-s) + c * w + s.scale(2.0 * self.gain[2]);
            hessian.set(2, 2, own.scale(DT));
            for j in [0usize, 1, 3] {
                let cross = s.scale(DT * self.gain[j]);
                hessian.set(2, j, cross);
                hessian.set(j, 2, cross);
            }
        }
        Some(hessian)
    }
}

/// LQR gain for the cart-pole linearized at the origin with zero input.
///
/// Returns the standard Riccati gain `K`, stabilizing as `u = -K x` (the
/// closed loop `A - B K` is Schur stable). Note the sign convention differs
/// from the gain baked into [`cart_pole_closed_loop`], which is applied as
/// `u = +K x`.
pub fn cart_pole_lqr(q: &Matrix, r: &Matrix) -> Result<Matrix> {
    let (a, b) = cart_pole_linearization();
    Ok(solve_dare(&a, &b, q, r)?.gain)
}

/// Linearization of the open-loop cart-pole at the origin: `A = I + dt *`
/// shift structure (with the extra `dt` coupling angle into angular
/// velocity), `B = dt (0, 1, 0, -1)^T`.
pub fn cart_pole_linearization() -> (Matrix, Matrix) {
    let a = Matrix::from_rows(&[
        &[1.0, DT, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, DT],
        &[0.0, 0.0, DT, 1.0],
    ]);
    let b = Matrix::column_vector(&[0.0, DT, 0.0, -DT]);
    (a, b)
}

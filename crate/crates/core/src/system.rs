//! The discrete-time system abstraction shared by every other module.

use std::sync::Arc;

use crate::interval::{HyperRect, IntervalMatrix};
use crate::linalg::Matrix;

/// A discrete-time autonomous system `x_{k+1} = f(x_k)` with the origin as an
/// equilibrium, together with the analytic data the level construction needs:
/// the Jacobian at the origin and per-component interval Hessian enclosures
/// over origin-centered boxes.
pub trait SystemModel: Send + Sync {
    fn dim(&self) -> usize;

    fn name(&self) -> &str;

    /// One application of the transition map.
    fn step(&self, x: &[f64]) -> Vec<f64>;

    /// Jacobian of the transition map at the origin.
    fn jacobian_origin(&self) -> Matrix;

    /// Interval enclosure of the Hessian of component `component` over
    /// `region`, or `None` when the system does not provide one.
    fn interval_hessian(&self, component: usize, region: &HyperRect) -> Option<IntervalMatrix>;
}

pub type SharedSystem = Arc<dyn SystemModel>;

/// Central finite-difference estimate of the Jacobian at the origin, used to
/// cross-check hand-derived Jacobians.
pub fn finite_difference_jacobian(sys: &dyn SystemModel, step: f64) -> Matrix {
    let n = sys.dim();
    let mut jac = Matrix::zeros(n, n);
    for j in 0..n {
        let mut plus = vec![0.0; n];
        let mut minus = vec![0.0; n];
        plus[j] = step;
        minus[j] = -step;
        let fp = sys.step(&plus);
        let fm = sys.step(&minus);
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * step);
        }
    }
    jac
}

/// Central finite-difference estimate of the Hessian of one component at `x`,
/// used to spot-check the interval Hessian enclosures.
pub fn finite_difference_hessian(
    sys: &dyn SystemModel,
    component: usize,
    x: &[f64],
    step: f64,
) -> Matrix {
    let n = sys.dim();
    let f = |y: &[f64]| sys.step(y)[component];
    let mut hess = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut pp = x.to_vec();
            let mut pm = x.to_vec();
            let mut mp = x.to_vec();
            let mut mm = x.to_vec();
            pp[i] += step;
            pp[j] += step;
            pm[i] += step;
            pm[j] -= step;
            mp[i] -= step;
            mp[j] += step;
            mm[i] -= step;
            mm[j] -= step;
            hess[(i, j)] = (f(&pp) - f(&pm) - f(&mp) + f(&mm)) / (4.0 * step * step);
        }
    }
    hess
}

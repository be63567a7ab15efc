//! Certified underapproximations of safe (state-constrained) domains of
//! attraction for discrete-time autonomous nonlinear systems.
//!
//! The pipeline: solve a discrete Lyapunov equation at the origin, bound the
//! nonlinear remainder over a box with interval arithmetic, and certify an
//! ellipsoidal initial safe region of attraction ([`initroa`]). Deeper
//! regions are represented implicitly as backward-reachable iterates of that
//! region within the safe set and evaluated pointwise in O(k) map
//! applications ([`brs`]). Two ready-made benchmark systems live in
//! [`bench`].

pub mod bench;
pub mod brs;
pub mod error;
pub mod fmt;
pub mod initroa;
pub mod interval;
pub mod linalg;
pub mod sets;
pub mod system;

pub use error::{DoaError, ErrorClass, Result};

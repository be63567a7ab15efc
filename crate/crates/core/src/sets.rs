//! Level-function algebra: every set in this crate is the 1-sublevel set of an
//! evaluable scalar function, and preimage intersection composes level
//! functions through the transition map.

use serde::{Deserialize, Serialize};

use crate::error::{DoaError, Result};
use crate::linalg::{sym_eig, Matrix};
use crate::system::SharedSystem;

/// Tolerance for the construction-time check that the origin evaluates to
/// zero; composed variants go through the transition map, which is only
/// numerically zero at the origin.
const ORIGIN_TOL: f64 = 1e-9;

/// Scalar function whose 1-sublevel set is a safe set, a region of
/// attraction, or a composition of both.
///
/// Variants and their values at `x`:
/// - `Quadratic { p, c }`: `x^T P x / c`
/// - `WeightedInfNorm { e }`: `||E x||_inf`
/// - `StackedInfNorm { blocks }`: `||[M_1; ...; M_m] x||_inf`
/// - `MaxCompose { image: g, guard: h, map: f }`: `max(h(x), g(f(x)))`
#[derive(Clone)]
pub enum LevelFunction {
    Quadratic {
        p: Matrix,
        c: f64,
    },
    WeightedInfNorm {
        e: Matrix,
    },
    StackedInfNorm {
        blocks: Vec<Matrix>,
    },
    MaxCompose {
        image: Box<LevelFunction>,
        guard: Box<LevelFunction>,
        map: SharedSystem,
    },
}

impl std::fmt::Debug for LevelFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LevelFunction::Quadratic { p, c } => write!(f, "Quadratic(n={}, c={c})", p.rows()),
            LevelFunction::WeightedInfNorm { e } => {
                write!(f, "WeightedInfNorm({}x{})", e.rows(), e.cols())
            }
            LevelFunction::StackedInfNorm { blocks } => {
                write!(f, "StackedInfNorm({} blocks)", blocks.len())
            }
            LevelFunction::MaxCompose { image, guard, map } => write!(
                f,
                "MaxCompose(guard={guard:?}, image={image:?}, map={})",
                map.name()
            ),
        }
    }
}

impl LevelFunction {
    /// `x -> x^T P x / c` for symmetric positive-definite `P` and `c > 0`.
    pub fn quadratic(p: Matrix, c: f64) -> Result<Self> {
        if !p.is_square() {
            return Err(DoaError::DimensionMismatch(format!(
                "quadratic form needs a square matrix, got {}x{}",
                p.rows(),
                p.cols()
            )));
        }
        if !p.is_symmetric(1e-12) {
            return Err(DoaError::NotSymmetric(
                "quadratic form matrix must be symmetric".into(),
            ));
        }
        let min_eig = sym_eig(&p)?.eigenvalues[0];
        if min_eig <= 1e-12 {
            return Err(DoaError::NotPositiveDefinite(format!(
                "quadratic form matrix has eigenvalue {min_eig:e}"
            )));
        }
        if !c.is_finite() || c <= 0.0 {
            return Err(DoaError::InvalidLevelFunction(format!(
                "level {c} must be positive and finite"
            )));
        }
        Ok(LevelFunction::Quadratic { p, c })
    }

    /// `x -> ||E x||_inf`.
    pub fn weighted_inf_norm(e: Matrix) -> Result<Self> {
        if e.rows() == 0 || e.cols() == 0 {
            return Err(DoaError::InvalidLevelFunction(
                "weight matrix must be nonempty".into(),
            ));
        }
        Ok(LevelFunction::WeightedInfNorm { e })
    }

    /// `x -> ||[M_1; ...; M_m] x||_inf`, kept as separate blocks so state and
    /// input constraints stay readable.
    pub fn stacked_inf_norm(blocks: Vec<Matrix>) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return Err(DoaError::InvalidLevelFunction(
                "stacked norm needs at least one block".into(),
            ));
        };
        let cols = first.cols();
        if cols == 0 || blocks.iter().any(|b| b.cols() != cols || b.rows() == 0) {
            return Err(DoaError::InvalidLevelFunction(
                "stacked norm blocks must be nonempty with equal column counts".into(),
            ));
        }
        Ok(LevelFunction::StackedInfNorm { blocks })
    }

    /// State-space dimension the function evaluates on.
    pub fn dim(&self) -> usize {
        match self {
            LevelFunction::Quadratic { p, .. } => p.rows(),
            LevelFunction::WeightedInfNorm { e } => e.cols(),
            LevelFunction::StackedInfNorm { blocks } => blocks[0].cols(),
            LevelFunction::MaxCompose { map, .. } => map.dim(),
        }
    }

    /// Whether the function is convex (true for all variants except
    /// compositions through a nonlinear map).
    pub fn is_convex(&self) -> bool {
        !matches!(self, LevelFunction::MaxCompose { .. })
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(DoaError::DimensionMismatch(format!(
                "point has dimension {}, level function expects {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            LevelFunction::Quadratic { p, c } => {
                let px = p.matvec(x);
                x.iter().zip(&px).map(|(a, b)| a * b).sum::<f64>() / c
            }
            LevelFunction::WeightedInfNorm { e } => inf_norm_of(&e.matvec(x)),
            LevelFunction::StackedInfNorm { blocks } => blocks
                .iter()
                .map(|b| inf_norm_of(&b.matvec(x)))
                .fold(0.0, f64::max),
            LevelFunction::MaxCompose { image, guard, map } => {
                let guard_value = guard.eval_unchecked(x);
                let image_value = image.eval_unchecked(&map.step(x));
                guard_value.max(image_value)
            }
        }
    }

    /// Membership in the 1-sublevel set; the level is non-strict, so boundary
    /// points count as members.
    pub fn member(&self, x: &[f64]) -> Result<bool> {
        Ok(self.eval(x)? <= 1.0)
    }

    /// Serializable form, available for every variant except compositions
    /// (those are reconstructed from their parts instead).
    pub fn descriptor(&self) -> Option<LevelDescriptor> {
        match self {
            LevelFunction::Quadratic { p, c } => Some(LevelDescriptor::Quadratic {
                p: p.clone(),
                c: *c,
            }),
            LevelFunction::WeightedInfNorm { e } => {
                Some(LevelDescriptor::WeightedInfNorm { e: e.clone() })
            }
            LevelFunction::StackedInfNorm { blocks } => Some(LevelDescriptor::StackedInfNorm {
                blocks: blocks.clone(),
            }),
            LevelFunction::MaxCompose { .. } => None,
        }
    }

    pub fn from_descriptor(descriptor: LevelDescriptor) -> Result<Self> {
        match descriptor {
            LevelDescriptor::Quadratic { p, c } => LevelFunction::quadratic(p, c),
            LevelDescriptor::WeightedInfNorm { e } => LevelFunction::weighted_inf_norm(e),
            LevelDescriptor::StackedInfNorm { blocks } => LevelFunction::stacked_inf_norm(blocks),
        }
    }
}

fn inf_norm_of(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// The intersection `f^{-1}(Psi(g,1)) with Psi(h,1)` as a single level
/// function `x -> max(h(x), g(f(x)))`: membership in the result is equivalent
/// to `h(x) <= 1` and `g(f(x)) <= 1`.
///
/// Compositions chain rather than balance, so evaluation walks the chain
/// iteratively through the transition map.
pub fn preimage_intersect(
    image: LevelFunction,
    guard: LevelFunction,
    map: SharedSystem,
) -> Result<LevelFunction> {
    let n = map.dim();
    if image.dim() != n || guard.dim() != n {
        return Err(DoaError::DimensionMismatch(format!(
            "level functions of dimension {} and {} cannot compose through a map of dimension {n}",
            image.dim(),
            guard.dim()
        )));
    }
    let composed = LevelFunction::MaxCompose {
        image: Box::new(image),
        guard: Box::new(guard),
        map,
    };
    // Assumptions on the data require the origin strictly inside every set;
    // composed variants inherit value ~0 at the origin only when the map
    // actually fixes it.
    let at_origin = composed.eval_unchecked(&vec![0.0; n]);
    if at_origin.abs() > ORIGIN_TOL {
        return Err(DoaError::InvalidLevelFunction(format!(
            "composed function evaluates to {at_origin:e} at the origin"
        )));
    }
    Ok(composed)
}

/// Serializable level-function payload (all variants except compositions).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevelDescriptor {
    Quadratic { p: Matrix, c: f64 },
    WeightedInfNorm { e: Matrix },
    StackedInfNorm { blocks: Vec<Matrix> },
}

//! Dense linear algebra for small matrices (n <= 8): symmetric eigendecomposition,
//! SPD square root, norms, and the discrete Lyapunov / Riccati solvers.

use serde::{Deserialize, Serialize};

use crate::error::{DoaError, Result};

/// Row-major dense matrix of `f64`.
///
/// Entries are finite by construction; structural errors (shape mismatches) in
/// the arithmetic helpers are programmer errors and panic, while the fallible
/// constructors and solvers return [`DoaError`].
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TryFrom<RawMatrix> for Matrix {
    type Error = DoaError;
    fn try_from(raw: RawMatrix) -> Result<Self> {
        Matrix::try_new(raw.rows, raw.cols, raw.data)
    }
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:>14.8} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        Self::try_new(rows, cols, data).expect("invalid matrix data")
    }

    pub fn try_new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(DoaError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(DoaError::NonFinite(format!("matrix entry {bad}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows.iter().flat_map(|row| row.iter().copied()).collect();
        Self::new(r, c, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            assert!(v.is_finite(), "non-finite diagonal entry");
            m[(i, i)] = v;
        }
        m
    }

    pub fn column_vector(values: &[f64]) -> Self {
        Self::new(values.len(), 1, values.to_vec())
    }

    pub fn row_vector(values: &[f64]) -> Self {
        Self::new(1, values.len(), values.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, k: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * k).collect(),
        }
    }

    /// Entrywise absolute value.
    pub fn abs(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Induced infinity norm (maximum absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square() && self.max_symmetry_defect() <= tol
    }

    pub fn symmetrize(&self) -> Matrix {
        assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = 0.5 * (self[(i, j)] + self[(j, i)]);
            }
        }
        out
    }

    /// Vertical stack; all blocks must share the column count.
    pub fn vstack(blocks: &[&Matrix]) -> Matrix {
        assert!(!blocks.is_empty());
        let cols = blocks[0].cols;
        assert!(blocks.iter().all(|b| b.cols == cols), "column mismatch");
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            data.extend_from_slice(&b.data);
        }
        Matrix { rows, cols, data }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigendecomposition of a symmetric matrix: `M = V diag(lambda) V^T` with the
/// eigenvalues ascending and the corresponding eigenvectors as columns of `V`.
#[derive(Clone, Debug)]
pub struct SymEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

/// Required symmetry of inputs to the symmetric solvers (absolute).
const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues at or below this are treated as non-positive-definite.
const PD_EIGEN_FLOOR: f64 = 1e-12;

fn check_symmetric(m: &Matrix, what: &str) -> Result<()> {
    if !m.is_square() {
        return Err(DoaError::DimensionMismatch(format!(
            "{what} must be square, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.max_symmetry_defect();
    if defect > SYMMETRY_TOL {
        return Err(DoaError::NotSymmetric(format!(
            "{what} has symmetry defect {defect:e} (tolerance {SYMMETRY_TOL:e})"
        )));
    }
    Ok(())
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Row-major sweeps; converged when the off-diagonal Frobenius norm drops
/// below `1e-14 * ||M||_F`. Unconditionally convergent for symmetric input,
/// so the sweep cap only guards against broken preconditions.
pub fn sym_eig(m: &Matrix) -> Result<SymEig> {
    check_symmetric(m, "eigendecomposition input")?;
    let n = m.rows();
    let mut a = m.symmetrize();
    let mut v = Matrix::identity(n);
    let fro = m.frobenius();
    let tol = 1e-14 * fro;

    const MAX_SWEEPS: usize = 100;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_frobenius(&a);
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                // tan of the rotation angle from t^2 + 2*tau*t - 1 = 0,
                // taking the smaller root for stability
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A <- J^T A J with J the (p,q) plane rotation
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_diagonal_frobenius(&a) > tol {
        return Err(DoaError::NonConvergence(
            "Jacobi sweeps exhausted without reaching the off-diagonal tolerance".into(),
        ));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            eigenvectors[(k, new_col)] = v[(k, old_col)];
        }
    }
    Ok(SymEig {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_frobenius(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Unique symmetric positive-definite square root: `K` with `K K = M`.
pub fn sqrt_spd(m: &Matrix) -> Result<Matrix> {
    let eig = sym_eig(m)?;
    if let Some(bad) = eig.eigenvalues.iter().find(|&&l| l <= PD_EIGEN_FLOOR) {
        return Err(DoaError::NotPositiveDefinite(format!(
            "eigenvalue {bad:e} is not positive"
        )));
    }
    let sqrt_diag = Matrix::diag(&eig.eigenvalues.iter().map(|l| l.sqrt()).collect::<Vec<_>>());
    let v = &eig.eigenvectors;
    Ok(v.matmul(&sqrt_diag).matmul(&v.transpose()).symmetrize())
}

/// Matrix norms used throughout: spectral (Euclidean-induced), infinity
/// (max absolute row sum), and Frobenius.
#[derive(Clone, Copy, Debug)]
pub struct MatrixNorms {
    pub spectral: f64,
    pub inf: f64,
    pub frobenius: f64,
}

pub fn norms(m: &Matrix) -> MatrixNorms {
    // M^T M is symmetric by construction, so sym_eig cannot fail
    let gram = m.transpose().matmul(m);
    let eig = sym_eig(&gram).expect("Gram matrix is symmetric");
    let lambda_max = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    MatrixNorms {
        spectral: lambda_max.sqrt(),
        inf: m.inf_norm(),
        frobenius: m.frobenius(),
    }
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    if !a.is_square() || a.rows() != b.len() {
        return Err(DoaError::DimensionMismatch(format!(
            "linear solve needs square A matching b, got {}x{} and {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let n = a.rows();
    let pivot_floor = 1e-13 * a.inf_norm();
    let mut work = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, work[(r, col)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty column");
        if pivot_abs <= pivot_floor {
            return Err(DoaError::SingularSystem(format!(
                "pivot {pivot_abs:e} below threshold in column {col}"
            )));
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = work[(col, j)];
                work[(col, j)] = work[(pivot_row, j)];
                work[(pivot_row, j)] = tmp;
            }
            rhs.swap(col, pivot_row);
        }
        for r in (col + 1)..n {
            let factor = work[(r, col)] / work[(col, col)];
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                work[(r, j)] -= factor * work[(col, j)];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for j in (row + 1)..n {
            acc -= work[(row, j)] * x[j];
        }
        x[row] = acc / work[(row, row)];
    }
    Ok(x)
}

/// Matrix inverse by Gaussian elimination with partial pivoting.
pub fn invert(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(DoaError::DimensionMismatch(format!(
            "inverse needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let pivot_floor = 1e-13 * m.inf_norm();
    let mut work = m.clone();
    let mut inv = Matrix::identity(n);
    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, work[(r, col)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty column");
        if pivot_abs <= pivot_floor {
            return Err(DoaError::SingularSystem(format!(
                "pivot {pivot_abs:e} below threshold in column {col}"
            )));
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = work[(col, j)];
                work[(col, j)] = work[(pivot_row, j)];
                work[(pivot_row, j)] = tmp;
                let tmp = inv[(col, j)];
                inv[(col, j)] = inv[(pivot_row, j)];
                inv[(pivot_row, j)] = tmp;
            }
        }
        let pivot = work[(col, col)];
        for j in 0..n {
            work[(col, j)] /= pivot;
            inv[(col, j)] /= pivot;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = work[(r, col)];
            if factor == 0.0 {
                continue;
            }
            for j in 0..n {
                work[(r, j)] -= factor * work[(col, j)];
                inv[(r, j)] -= factor * inv[(col, j)];
            }
        }
    }
    Ok(inv)
}

fn check_spd(m: &Matrix, what: &str) -> Result<()> {
    check_symmetric(m, what)?;
    let eig = sym_eig(m)?;
    if let Some(bad) = eig.eigenvalues.iter().find(|&&l| l <= PD_EIGEN_FLOOR) {
        return Err(DoaError::NotPositiveDefinite(format!(
            "{what} has eigenvalue {bad:e}"
        )));
    }
    Ok(())
}

/// Solve the discrete Lyapunov equation `A^T P A - P = -Q` for symmetric
/// positive-definite `Q`.
///
/// Vectorized into the n^2 x n^2 Kronecker system
/// `(A^T (x) A^T - I) vec(P) = -vec(Q)` and solved directly, then symmetrized.
/// Positive definiteness of `P` doubles as the Schur-stability certificate for
/// `A`: a non-PD solution means some eigenvalue of `A` lies on or outside the
/// unit circle.
pub fn solve_dlyap(a: &Matrix, q: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(DoaError::DimensionMismatch(format!(
            "A must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if q.rows() != a.rows() || q.cols() != a.cols() {
        return Err(DoaError::DimensionMismatch(format!(
            "Q must match A ({}x{}), got {}x{}",
            a.rows(),
            a.cols(),
            q.rows(),
            q.cols()
        )));
    }
    check_spd(q, "Q")?;

    let n = a.rows();
    let at = a.transpose();
    let mut system = kronecker(&at, &at);
    for idx in 0..n * n {
        system[(idx, idx)] -= 1.0;
    }
    let rhs: Vec<f64> = q.data().iter().map(|v| -v).collect();
    let vec_p = solve_linear(&system, &rhs).map_err(|_| {
        DoaError::SingularSystem(
            "Kronecker system is singular: some eigenvalue product of A equals one".into(),
        )
    })?;
    let p = Matrix::new(n, n, vec_p).symmetrize();

    let residual = at.matmul(&p).matmul(a).sub(&p).add(q).frobenius();
    if residual >= 1e-9 * q.frobenius() {
        return Err(DoaError::SingularSystem(format!(
            "Lyapunov residual {residual:e} exceeds tolerance"
        )));
    }
    let eig = sym_eig(&p)?;
    if eig.eigenvalues[0] <= PD_EIGEN_FLOOR {
        return Err(DoaError::SchurInstability);
    }
    Ok(p)
}

/// Kronecker product, with the row-major vectorization convention used by
/// [`solve_dlyap`].
fn kronecker(x: &Matrix, y: &Matrix) -> Matrix {
    let (xr, xc) = (x.rows(), x.cols());
    let (yr, yc) = (y.rows(), y.cols());
    let mut out = Matrix::zeros(xr * yr, xc * yc);
    for i in 0..xr {
        for j in 0..xc {
            let v = x[(i, j)];
            if v == 0.0 {
                continue;
            }
            for k in 0..yr {
                for l in 0..yc {
                    out[(i * yr + k, j * yc + l)] = v * y[(k, l)];
                }
            }
        }
    }
    out
}

/// Solution of the discrete algebraic Riccati equation together with the
/// associated feedback gain `K = (R + B^T P B)^{-1} B^T P A`.
#[derive(Clone, Debug)]
pub struct DareSolution {
    pub p: Matrix,
    pub gain: Matrix,
}

const DARE_MAX_ITER: usize = 100_000;

/// Solve the discrete algebraic Riccati equation by fixed-point iteration
/// `P <- Q + A^T P A - A^T P B (R + B^T P B)^{-1} B^T P A` from `P0 = Q`.
pub fn solve_dare(a: &Matrix, b: &Matrix, q: &Matrix, r: &Matrix) -> Result<DareSolution> {
    let n = a.rows();
    if !a.is_square() {
        return Err(DoaError::DimensionMismatch(format!(
            "A must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if b.rows() != n {
        return Err(DoaError::DimensionMismatch(format!(
            "B must have {n} rows, got {}",
            b.rows()
        )));
    }
    let m = b.cols();
    if q.rows() != n || q.cols() != n || r.rows() != m || r.cols() != m {
        return Err(DoaError::DimensionMismatch(format!(
            "Q must be {n}x{n} and R {m}x{m}, got {}x{} and {}x{}",
            q.rows(),
            q.cols(),
            r.rows(),
            r.cols()
        )));
    }
    check_spd(q, "Q")?;
    check_spd(r, "R")?;

    let at = a.transpose();
    let bt = b.transpose();
    let riccati_rhs = |p: &Matrix| -> Result<Matrix> {
        let pb = p.matmul(b);
        let gram = r.add(&bt.matmul(&pb));
        let gram_inv = invert(&gram)?;
        let apb = at.matmul(&pb);
        Ok(q.add(&at.matmul(&p.matmul(a)))
            .sub(&apb.matmul(&gram_inv).matmul(&apb.transpose())))
    };

    let mut p = q.clone();
    let mut converged = false;
    for _ in 0..DARE_MAX_ITER {
        let next = riccati_rhs(&p)?.symmetrize();
        let delta = next.sub(&p).frobenius();
        let done = delta < 1e-12 * p.frobenius();
        p = next;
        if done {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(DoaError::NonConvergence(format!(
            "Riccati iteration did not settle within {DARE_MAX_ITER} steps \
             (the pair may not be stabilizable at this tolerance)"
        )));
    }

    let residual = riccati_rhs(&p)?.sub(&p).frobenius();
    if residual >= 1e-8 * p.frobenius() {
        return Err(DoaError::NonConvergence(format!(
            "Riccati residual {residual:e} exceeds tolerance"
        )));
    }

    let pb = p.matmul(b);
    let gain = invert(&r.add(&bt.matmul(&pb)))?.matmul(&bt.matmul(&p.matmul(a)));
    Ok(DareSolution { p, gain })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    /// Characteristic-polynomial eigenvalues of a symmetric 2x2 matrix,
    /// independent of the Jacobi path.
    fn eig2x2(m: &Matrix) -> (f64, f64) {
        let (a, b, d) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        (mid - rad, mid + rad)
    }

    fn two_machine_p() -> Matrix {
        Matrix::from_rows(&[&[21.9377, 10.8408], &[10.8408, 33.6321]])
    }

    #[test]
    fn sym_eig_identity() {
        let eig = sym_eig(&Matrix::identity(2)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0]);
        assert_eq!(eig.eigenvectors, Matrix::identity(2));
    }

    #[test]
    fn sym_eig_diagonal_sorted_ascending() {
        let eig = sym_eig(&Matrix::diag(&[3.0, 1.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 3.0]);
    }

    #[test]
    fn sym_eig_matches_characteristic_polynomial() {
        let p = two_machine_p();
        let (lo, hi) = eig2x2(&p);
        let eig = sym_eig(&p).unwrap();
        assert_close(eig.eigenvalues[0], lo, 1e-10);
        assert_close(eig.eigenvalues[1], hi, 1e-10);
        // frozen from the characteristic polynomial
        assert_close(lo, 15.467729, 1e-5);
        assert_close(hi, 40.102071, 1e-5);
    }

    #[test]
    fn sym_eig_rejects_asymmetric() {
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(sym_eig(&m), Err(DoaError::NotSymmetric(_))));
        let m = Matrix::zeros(2, 3);
        assert!(matches!(sym_eig(&m), Err(DoaError::DimensionMismatch(_))));
    }

    #[test]
    fn sym_eig_zero_matrix() {
        let eig = sym_eig(&Matrix::zeros(3, 3)).unwrap();
        assert_eq!(eig.eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn sqrt_spd_identity_and_diag() {
        assert_eq!(sqrt_spd(&Matrix::identity(3)).unwrap(), Matrix::identity(3));
        let k = sqrt_spd(&Matrix::diag(&[4.0, 9.0])).unwrap();
        assert_close(k[(0, 0)], 2.0, 1e-12);
        assert_close(k[(1, 1)], 3.0, 1e-12);
        assert_close(k[(0, 1)], 0.0, 1e-12);
    }

    #[test]
    fn sqrt_spd_squares_back() {
        let p = two_machine_p();
        let k = sqrt_spd(&p).unwrap();
        let kk = k.matmul(&k);
        for i in 0..2 {
            for j in 0..2 {
                assert_close(kk[(i, j)], p[(i, j)], 1e-6 * p[(i, j)].abs());
            }
        }
    }

    #[test]
    fn sqrt_spd_rejects_indefinite() {
        let m = Matrix::diag(&[1.0, -2.0]);
        assert!(matches!(
            sqrt_spd(&m),
            Err(DoaError::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn dlyap_zero_map() {
        let p = solve_dlyap(&Matrix::zeros(2, 2), &Matrix::identity(2)).unwrap();
        assert_eq!(p, Matrix::identity(2));
    }

    #[test]
    fn dlyap_two_machine_matches_published_solution() {
        let a = Matrix::from_rows(&[&[1.0, 0.1], &[-0.05, 0.95]]);
        let p = solve_dlyap(&a, &Matrix::identity(2)).unwrap();
        let expected = two_machine_p();
        for i in 0..2 {
            for j in 0..2 {
                assert_close(p[(i, j)], expected[(i, j)], 1e-3);
            }
        }
    }

    #[test]
    fn dlyap_flags_unstable_map() {
        // 1-D closed form p = q / (1 - a^2) is negative for a = 1.1
        let a = Matrix::diag(&[1.1, 0.5]);
        assert!(matches!(
            solve_dlyap(&a, &Matrix::identity(2)),
            Err(DoaError::SchurInstability)
        ));
    }

    #[test]
    fn dlyap_singular_when_eigenvalue_product_is_one() {
        // a = 1 gives lambda_i lambda_j = 1 exactly
        let a = Matrix::diag(&[1.0, 0.5]);
        assert!(matches!(
            solve_dlyap(&a, &Matrix::identity(2)),
            Err(DoaError::SingularSystem(_))
        ));
    }

    #[test]
    fn dare_scalar_matches_bisection_oracle() {
        // root of p = 1 + 0.25 p - 0.25 p^2 / (1 + p)
        let g = |p: f64| 1.0 + 0.25 * p - 0.25 * p * p / (1.0 + p) - p;
        let (mut lo, mut hi) = (0.0_f64, 10.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(lo) * g(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);

        let one = Matrix::identity(1);
        let sol = solve_dare(&Matrix::diag(&[0.5]), &one, &one, &one).unwrap();
        assert_close(sol.p[(0, 0)], oracle, 1e-10);
        assert_close(oracle, 1.1327822185373186, 1e-12);
    }

    #[test]
    fn dare_reports_non_stabilizable_pairs() {
        // B = 0 leaves the unstable mode untouched; the iteration blows up
        let a = Matrix::diag(&[2.0]);
        let b = Matrix::zeros(1, 1);
        let one = Matrix::identity(1);
        assert!(matches!(
            solve_dare(&a, &b, &one, &one),
            Err(DoaError::NonConvergence(_))
        ));
    }

    #[test]
    fn dare_deadbeat_zero_map() {
        let a = Matrix::zeros(2, 2);
        let b = Matrix::column_vector(&[1.0, 1.0]);
        let sol = solve_dare(&a, &b, &Matrix::identity(2), &Matrix::identity(1)).unwrap();
        assert_eq!(sol.p, Matrix::identity(2));
        assert_eq!(sol.gain, Matrix::zeros(1, 2));
    }

    #[test]
    fn norms_examples() {
        let id = norms(&Matrix::identity(2));
        assert_close(id.spectral, 1.0, 1e-12);
        assert_close(id.inf, 1.0, 1e-12);
        assert_close(id.frobenius, 2.0_f64.sqrt(), 1e-12);

        let m = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_close(norms(&m).inf, 7.0, 1e-12);

        let nilpotent = Matrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_close(norms(&nilpotent).spectral, 1.0, 1e-12);
    }

    #[test]
    fn invert_round_trip() {
        let m = Matrix::from_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let inv = invert(&m).unwrap();
        let prod = m.matmul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                assert_close(prod[(i, j)], if i == j { 1.0 } else { 0.0 }, 1e-12);
            }
        }
        assert!(matches!(
            invert(&Matrix::zeros(2, 2)),
            Err(DoaError::SingularSystem(_))
        ));
    }

    #[test]
    fn matrix_rejects_non_finite() {
        assert!(matches!(
            Matrix::try_new(1, 2, vec![1.0, f64::NAN]),
            Err(DoaError::NonFinite(_))
        ));
        assert!(matches!(
            Matrix::try_new(2, 2, vec![1.0]),
            Err(DoaError::DimensionMismatch(_))
        ));
    }

    mod properties {
        use super::*;
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};

        fn random_matrix(rng: &mut StdRng, n: usize) -> Matrix {
            Matrix::new(n, n, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        }

        #[test]
        fn reconstruction_of_random_symmetric() {
            let mut rng = StdRng::seed_from_u64(7);
            for _ in 0..200 {
                let n = rng.gen_range(2..=4);
                let m = random_matrix(&mut rng, n);
                let sym = m.add(&m.transpose()).scale(0.5);
                let eig = sym_eig(&sym).unwrap();
                let v = &eig.eigenvectors;
                let rebuilt = v
                    .matmul(&Matrix::diag(&eig.eigenvalues))
                    .matmul(&v.transpose());
                let err = rebuilt.sub(&sym).frobenius();
                assert!(err < 1e-10 * (1.0 + sym.frobenius()), "err {err}");
                let ortho = v
                    .transpose()
                    .matmul(v)
                    .sub(&Matrix::identity(n))
                    .frobenius();
                assert!(ortho < 1e-10, "ortho {ortho}");
            }
        }

        #[test]
        fn dlyap_on_random_schur_stable_maps() {
            let mut rng = StdRng::seed_from_u64(11);
            for _ in 0..100 {
                let n = rng.gen_range(2..=4);
                let raw = random_matrix(&mut rng, n);
                let spectral = norms(&raw).spectral;
                if spectral < 1e-6 {
                    continue;
                }
                let a = raw.scale(0.9 / spectral);
                let q = Matrix::identity(n);
                let p = solve_dlyap(&a, &q).unwrap();
                let residual = a
                    .transpose()
                    .matmul(&p)
                    .matmul(&a)
                    .sub(&p)
                    .add(&q)
                    .frobenius();
                assert!(residual < 1e-9 * q.frobenius());
                assert!(sym_eig(&p).unwrap().eigenvalues[0] > 0.0);
            }
        }

        #[test]
        fn sqrt_spd_on_random_spd() {
            let mut rng = StdRng::seed_from_u64(13);
            for _ in 0..100 {
                let n = rng.gen_range(2..=4);
                let g = random_matrix(&mut rng, n);
                let spd = g
                    .matmul(&g.transpose())
                    .add(&Matrix::identity(n).scale(1e-3));
                let k = sqrt_spd(&spd).unwrap();
                let kk = k.matmul(&k);
                for i in 0..n {
                    for j in 0..n {
                        let scale = spd[(i, j)].abs().max(1e-3);
                        assert!((kk[(i, j)] - spd[(i, j)]).abs() < 1e-9 * scale);
                    }
                }
            }
        }

        #[test]
        fn dare_solution_is_fixed_point_and_stabilizing() {
            let mut rng = StdRng::seed_from_u64(17);
            for _ in 0..50 {
                let n = rng.gen_range(2..=3);
                let a = random_matrix(&mut rng, n);
                let b = Matrix::new(n, 1, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
                let q = Matrix::identity(n);
                let r = Matrix::identity(1);
                let Ok(sol) = solve_dare(&a, &b, &q, &r) else {
                    continue; // non-stabilizable draw
                };
                let pb = sol.p.matmul(&b);
                let gram_inv = invert(&r.add(&b.transpose().matmul(&pb))).unwrap();
                let apb = a.transpose().matmul(&pb);
                let rhs = q
                    .add(&a.transpose().matmul(&sol.p.matmul(&a)))
                    .sub(&apb.matmul(&gram_inv).matmul(&apb.transpose()));
                assert!(rhs.sub(&sol.p).frobenius() < 1e-8 * sol.p.frobenius());
                // closed loop must be Schur stable, certified through dlyap
                let closed = a.sub(&b.matmul(&sol.gain));
                assert!(solve_dlyap(&closed, &Matrix::identity(n)).is_ok());
            }
        }
    }
}

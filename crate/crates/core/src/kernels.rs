//! Elementary in-place Givens rotation kernels.
//!
//! All arithmetic orders are fixed (multiply, multiply, subtract/add exactly
//! as written) so that results are bitwise reproducible and within-block
//! application order cannot matter. Trigonometric values are computed once
//! per (pair, step) and passed in as precomputed parameters.
//!
//! The `*_raw` variants run through [`SharedMat`] for block-parallel use:
//! callers must guarantee disjoint row pairs (row kernels) or column pairs
//! (column kernels) across concurrent invocations, and a barrier between
//! blocks.

use num_complex::Complex64;

use crate::error::{GivensError, Result};
use crate::matrix::{DenseMatrix, RealScalar, SharedMat};

/// Precomputed cosine/sine of one rotation angle.
#[derive(Clone, Copy, Debug)]
pub struct RotationParams<F> {
    pub cos: F,
    pub sin: F,
}

impl<F: RealScalar> RotationParams<F> {
    pub fn from_angle(theta: F) -> Self {
        let (sin, cos) = theta.sin_cos();
        Self { cos, sin }
    }

    /// `|cos^2 + sin^2 - 1|`; at most a few machine epsilons by construction.
    pub fn unit_residual(&self) -> F {
        (self.cos * self.cos + self.sin * self.sin - F::one()).abs()
    }
}

/// Precomputed parameters of a phased complex rotation: cosine, sine, and
/// the unit phase factor `e^{i phi}`.
#[derive(Clone, Copy, Debug)]
pub struct PhasedRotationParams {
    pub cos: f64,
    pub sin: f64,
    pub phase: Complex64,
}

impl PhasedRotationParams {
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (sin, cos) = theta.sin_cos();
        Self {
            cos,
            sin,
            phase: Complex64::from_polar(1.0, phi),
        }
    }

    /// `||phase| - 1|`; at most a few machine epsilons by construction.
    pub fn phase_residual(&self) -> f64 {
        (self.phase.norm() - 1.0).abs()
    }
}

#[inline]
fn check_pair<T>(m: &DenseMatrix<T>, i: usize, j: usize, bound: usize) -> Result<()> {
    if i == j {
        return Err(GivensError::DegeneratePair(i));
    }
    for (what, idx) in [("row/col", i), ("row/col", j)] {
        if idx >= bound {
            return Err(GivensError::IndexOutOfRange {
                what,
                index: idx,
                bound,
            });
        }
    }
    let _ = m;
    Ok(())
}

/// Left-multiply `mat` in place by the Givens rotation acting on rows
/// `(i, j)`: row i becomes `cos*row_i - sin*row_j`, row j becomes
/// `sin*row_i + cos*row_j`. No other row is touched.
pub fn rotate_rows<F: RealScalar>(
    mat: &mut DenseMatrix<F>,
    i: usize,
    j: usize,
    p: &RotationParams<F>,
) -> Result<()> {
    check_pair(mat, i, j, mat.n_rows())?;
    let shared = SharedMat::new(mat);
    unsafe { rotate_rows_raw(&shared, i, j, p.cos, p.sin) };
    Ok(())
}

/// Right-multiply `mat` in place by the transposed rotation, undoing a prior
/// `rotate_rows` with the same `(i, j, theta)` applied on the left: column i
/// becomes `cos*col_i - sin*col_j`, column j becomes `sin*col_i + cos*col_j`.
pub fn rotate_cols_inverse<F: RealScalar>(
    mat: &mut DenseMatrix<F>,
    i: usize,
    j: usize,
    p: &RotationParams<F>,
) -> Result<()> {
    check_pair(mat, i, j, mat.n_cols())?;
    let shared = SharedMat::new(mat);
    unsafe { rotate_cols_inverse_raw(&shared, i, j, p.cos, p.sin) };
    Ok(())
}

/// Left-multiply a complex matrix in place by the phased rotation: row i
/// becomes `e^{i phi} cos * row_i - sin * row_j`, row j becomes
/// `e^{i phi} sin * row_i + cos * row_j`.
pub fn rotate_rows_phased(
    mat: &mut DenseMatrix<Complex64>,
    i: usize,
    j: usize,
    p: &PhasedRotationParams,
) -> Result<()> {
    check_pair(mat, i, j, mat.n_rows())?;
    let shared = SharedMat::new(mat);
    unsafe { rotate_rows_phased_raw(&shared, i, j, p) };
    Ok(())
}

/// Right-multiply a complex matrix in place by the adjoint of the phased
/// rotation, undoing a prior `rotate_rows_phased` with the same parameters.
pub fn rotate_cols_adjoint(
    mat: &mut DenseMatrix<Complex64>,
    i: usize,
    j: usize,
    p: &PhasedRotationParams,
) -> Result<()> {
    check_pair(mat, i, j, mat.n_cols())?;
    let shared = SharedMat::new(mat);
    unsafe { rotate_cols_adjoint_raw(&shared, i, j, p) };
    Ok(())
}

#[inline]
pub(crate) fn rotate_span<F: RealScalar>(ri: &mut [F], rj: &mut [F], cos: F, sin: F) {
    debug_assert_eq!(ri.len(), rj.len());
    for l in 0..ri.len() {
        let a = ri[l];
        let b = rj[l];
        ri[l] = cos * a - sin * b;
        rj[l] = sin * a + cos * b;
    }
}

/// # Safety
/// `i != j`, both in range, and no concurrent access to rows `i`, `j`.
pub(crate) unsafe fn rotate_rows_raw<F: RealScalar>(
    m: &SharedMat<F>,
    i: usize,
    j: usize,
    cos: F,
    sin: F,
) {
    let ri = std::slice::from_raw_parts_mut(m.row_ptr(i), m.n_cols());
    let rj = std::slice::from_raw_parts_mut(m.row_ptr(j), m.n_cols());
    rotate_span(ri, rj, cos, sin);
}

/// # Safety
/// `i != j`, both in range, and no concurrent access to columns `i`, `j`.
pub(crate) unsafe fn rotate_cols_inverse_raw<F: RealScalar>(
    m: &SharedMat<F>,
    i: usize,
    j: usize,
    cos: F,
    sin: F,
) {
    for r in 0..m.n_rows() {
        let pi = m.ptr_at(r, i);
        let pj = m.ptr_at(r, j);
        let a = *pi;
        let b = *pj;
        *pi = cos * a - sin * b;
        *pj = sin * a + cos * b;
    }
}

/// # Safety
/// `i != j`, both in range, and no concurrent access to rows `i`, `j`.
pub(crate) unsafe fn rotate_rows_phased_raw(
    m: &SharedMat<Complex64>,
    i: usize,
    j: usize,
    p: &PhasedRotationParams,
) {
    let pc = p.phase * p.cos;
    let ps = p.phase * p.sin;
    let ri = std::slice::from_raw_parts_mut(m.row_ptr(i), m.n_cols());
    let rj = std::slice::from_raw_parts_mut(m.row_ptr(j), m.n_cols());
    for l in 0..ri.len() {
        let a = ri[l];
        let b = rj[l];
        ri[l] = pc * a - b * p.sin;
        rj[l] = ps * a + b * p.cos;
    }
}

/// # Safety
/// `i != j`, both in range, and no concurrent access to columns `i`, `j`.
pub(crate) unsafe fn rotate_cols_adjoint_raw(
    m: &SharedMat<Complex64>,
    i: usize,
    j: usize,
    p: &PhasedRotationParams,
) {
    let phase_conj = p.phase.conj();
    let pc = phase_conj * p.cos;
    let ps = phase_conj * p.sin;
    for r in 0..m.n_rows() {
        let pi = m.ptr_at(r, i);
        let pj = m.ptr_at(r, j);
        let a = *pi;
        let b = *pj;
        *pi = pc * a - b * p.sin;
        *pj = ps * a + b * p.cos;
    }
}

//! Slow, independent reference implementations used as ground truth in tests
//! and verification: sequential forward construction, explicit dense Givens
//! products, materialized Jacobian columns, central finite differences, and
//! classic dense routines (LU determinant, one-sided Jacobi singular values).
//!
//! Everything here is single-threaded and deliberately avoids the fast-path
//! kernels: products go through explicit dense matrices and naive cubic
//! multiplication, so a bug in the block-parallel code cannot validate
//! itself.

use num_complex::Complex64;

use crate::error::{GivensError, Result};
use crate::matrix::{DenseMatrix, RealScalar, Scalar};
use crate::schedule::{pair_index_map, CoordinatePair, PairIndexMap, RotationSchedule};

/// Active pairs flattened in schedule (block-major) order; the sequence the
/// sequential forward iterates in reverse.
pub fn flatten_active_pairs(s: &RotationSchedule) -> Vec<CoordinatePair> {
    let mut out = Vec::with_capacity(s.active_pair_count());
    for block in s.blocks() {
        for &e in block {
            if s.is_active(e) {
                out.push(e);
            }
        }
    }
    out
}

/// Sequential forward: in-place rotations over the reversed flat pair
/// sequence, one at a time, starting from the identity.
pub fn forward_sequential<F: RealScalar>(
    s: &RotationSchedule,
    theta: &[F],
) -> Result<DenseMatrix<F>> {
    if theta.len() != s.active_pair_count() {
        return Err(GivensError::LengthMismatch {
            expected: s.active_pair_count(),
            got: theta.len(),
        });
    }
    let n = s.n();
    let pairs = flatten_active_pairs(s);
    let mut u = DenseMatrix::<F>::identity(n);
    for (k, e) in pairs.iter().enumerate().rev() {
        let (sin, cos) = theta[k].sin_cos();
        let (ri, rj) = u.row_pair_mut(e.i, e.j);
        for l in 0..n {
            let a = ri[l];
            let b = rj[l];
            ri[l] = cos * a - sin * b;
            rj[l] = sin * a + cos * b;
        }
    }
    Ok(u)
}

/// Sequential complex forward with phase factors.
pub fn forward_sequential_unitary(
    s: &RotationSchedule,
    theta: &[f64],
    phi: &[f64],
) -> Result<DenseMatrix<Complex64>> {
    for len in [theta.len(), phi.len()] {
        if len != s.active_pair_count() {
            return Err(GivensError::LengthMismatch {
                expected: s.active_pair_count(),
                got: len,
            });
        }
    }
    let n = s.n();
    let pairs = flatten_active_pairs(s);
    let mut u = DenseMatrix::<Complex64>::identity(n);
    for (k, e) in pairs.iter().enumerate().rev() {
        let (sin, cos) = theta[k].sin_cos();
        let phase = Complex64::from_polar(1.0, phi[k]);
        let pc = phase * cos;
        let ps = phase * sin;
        let (ri, rj) = u.row_pair_mut(e.i, e.j);
        for l in 0..n {
            let a = ri[l];
            let b = rj[l];
            ri[l] = pc * a - b * sin;
            rj[l] = ps * a + b * cos;
        }
    }
    Ok(u)
}

/// Naive cubic matrix product, the reference multiplication.
pub fn dense_matmul<T: Scalar>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> DenseMatrix<T> {
    assert_eq!(a.n_cols(), b.n_rows());
    let mut out = DenseMatrix::<T>::zeros(a.n_rows(), b.n_cols());
    for r in 0..a.n_rows() {
        for c in 0..b.n_cols() {
            let mut acc = T::zero();
            for k in 0..a.n_cols() {
                acc = acc + a[(r, k)] * b[(k, c)];
            }
            out[(r, c)] = acc;
        }
    }
    out
}

/// Explicit dense Givens rotation matrix.
pub fn givens_dense<F: RealScalar>(n: usize, e: CoordinatePair, theta: F) -> DenseMatrix<F> {
    let (sin, cos) = theta.sin_cos();
    let mut g = DenseMatrix::<F>::identity(n);
    g[(e.i, e.i)] = cos;
    g[(e.j, e.j)] = cos;
    g[(e.i, e.j)] = -sin;
    g[(e.j, e.i)] = sin;
    g
}

/// Explicit dense derivative of the real Givens matrix in its angle.
pub fn givens_dtheta_dense(n: usize, e: CoordinatePair, theta: f64) -> DenseMatrix<f64> {
    let (sin, cos) = theta.sin_cos();
    let mut g = DenseMatrix::<f64>::zeros(n, n);
    g[(e.i, e.i)] = -sin;
    g[(e.j, e.j)] = -sin;
    g[(e.i, e.j)] = -cos;
    g[(e.j, e.i)] = cos;
    g
}

/// Explicit dense phased complex Givens rotation.
pub fn givens_dense_phased(
    n: usize,
    e: CoordinatePair,
    theta: f64,
    phi: f64,
) -> DenseMatrix<Complex64> {
    let (sin, cos) = theta.sin_cos();
    let phase = Complex64::from_polar(1.0, phi);
    let mut g = DenseMatrix::<Complex64>::identity(n);
    g[(e.i, e.i)] = phase * cos;
    g[(e.j, e.j)] = Complex64::new(cos, 0.0);
    g[(e.i, e.j)] = Complex64::new(-sin, 0.0);
    g[(e.j, e.i)] = phase * sin;
    g
}

/// Dense derivative of the phased rotation in the rotation angle.
pub fn givens_dtheta_dense_phased(
    n: usize,
    e: CoordinatePair,
    theta: f64,
    phi: f64,
) -> DenseMatrix<Complex64> {
    let (sin, cos) = theta.sin_cos();
    let phase = Complex64::from_polar(1.0, phi);
    let mut g = DenseMatrix::<Complex64>::zeros(n, n);
    g[(e.i, e.i)] = -phase * sin;
    g[(e.j, e.j)] = Complex64::new(-sin, 0.0);
    g[(e.i, e.j)] = Complex64::new(-cos, 0.0);
    g[(e.j, e.i)] = phase * cos;
    g
}

/// Dense derivative of the phased rotation in the phase angle.
pub fn givens_dphi_dense_phased(
    n: usize,
    e: CoordinatePair,
    theta: f64,
    phi: f64,
) -> DenseMatrix<Complex64> {
    let (sin, cos) = theta.sin_cos();
    let iphase = Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, phi);
    let mut g = DenseMatrix::<Complex64>::zeros(n, n);
    g[(e.i, e.i)] = iphase * cos;
    g[(e.j, e.i)] = iphase * sin;
    g
}

/// The two-entry skew pattern `dG/dtheta * G^T`: -1 at `(i, j)`, +1 at `(j, i)`.
pub fn q_pattern_dense<F: RealScalar>(n: usize, e: CoordinatePair) -> DenseMatrix<F> {
    let mut q = DenseMatrix::<F>::zeros(n, n);
    q[(e.i, e.j)] = -F::one();
    q[(e.j, e.i)] = F::one();
    q
}

/// Complex counterpart of [`q_pattern_dense`]; the pattern is unchanged by
/// the phases.
pub fn q_pattern_dense_complex(n: usize, e: CoordinatePair) -> DenseMatrix<Complex64> {
    let mut q = DenseMatrix::<Complex64>::zeros(n, n);
    q[(e.i, e.j)] = Complex64::new(-1.0, 0.0);
    q[(e.j, e.i)] = Complex64::new(1.0, 0.0);
    q
}

/// The four-entry purely imaginary pattern `dG/dphi * G^dagger`.
pub fn p_pattern_dense(n: usize, e: CoordinatePair, theta: f64) -> DenseMatrix<Complex64> {
    let (sin, cos) = theta.sin_cos();
    let i_unit = Complex64::new(0.0, 1.0);
    let mut p = DenseMatrix::<Complex64>::zeros(n, n);
    p[(e.i, e.i)] = i_unit * (cos * cos);
    p[(e.j, e.j)] = i_unit * (sin * sin);
    p[(e.i, e.j)] = i_unit * (sin * cos);
    p[(e.j, e.i)] = i_unit * (sin * cos);
    p
}

fn dense_block_product(
    s: &RotationSchedule,
    map: &PairIndexMap,
    theta: &[f64],
    block_range: std::ops::Range<usize>,
) -> DenseMatrix<f64> {
    let n = s.n();
    let mut acc = DenseMatrix::<f64>::identity(n);
    for b in block_range {
        for &e in s.block(b) {
            if let Some(flat) = map.flat_index(e) {
                acc = dense_matmul(&acc, &givens_dense(n, e, theta[flat]));
            }
        }
    }
    acc
}

fn dense_block_product_unitary(
    s: &RotationSchedule,
    map: &PairIndexMap,
    theta: &[f64],
    phi: &[f64],
    block_range: std::ops::Range<usize>,
) -> DenseMatrix<Complex64> {
    let n = s.n();
    let mut acc = DenseMatrix::<Complex64>::identity(n);
    for b in block_range {
        for &e in s.block(b) {
            if let Some(flat) = map.flat_index(e) {
                acc = dense_matmul(&acc, &givens_dense_phased(n, e, theta[flat], phi[flat]));
            }
        }
    }
    acc
}

/// One materialized Jacobian column `dU/dtheta_e`, built from explicit dense
/// prefix/suffix block products sandwiching the skew pattern.
#[derive(Clone, Debug)]
pub struct JacobianColumn {
    pub pair: CoordinatePair,
    pub matrix: DenseMatrix<f64>,
}

pub fn jacobian_column(
    s: &RotationSchedule,
    theta: &[f64],
    e: CoordinatePair,
) -> Result<JacobianColumn> {
    if theta.len() != s.active_pair_count() {
        return Err(GivensError::LengthMismatch {
            expected: s.active_pair_count(),
            got: theta.len(),
        });
    }
    let map = pair_index_map(s);
    let (k, _) = map
        .block_slot(e)
        .ok_or(GivensError::InactivePair { i: e.i, j: e.j })?;
    let prefix = dense_block_product(s, &map, theta, 0..k);
    let suffix = dense_block_product(s, &map, theta, k..s.num_blocks());
    let q = q_pattern_dense::<f64>(s.n(), e);
    let matrix = dense_matmul(&dense_matmul(&prefix, &q), &suffix);
    Ok(JacobianColumn { pair: e, matrix })
}

/// `dU/dtheta_e` for the phased complex construction.
pub fn jacobian_column_unitary_theta(
    s: &RotationSchedule,
    theta: &[f64],
    phi: &[f64],
    e: CoordinatePair,
) -> Result<DenseMatrix<Complex64>> {
    let map = pair_index_map(s);
    let (k, _) = map
        .block_slot(e)
        .ok_or(GivensError::InactivePair { i: e.i, j: e.j })?;
    let prefix = dense_block_product_unitary(s, &map, theta, phi, 0..k);
    let suffix = dense_block_product_unitary(s, &map, theta, phi, k..s.num_blocks());
    let q = q_pattern_dense_complex(s.n(), e);
    Ok(dense_matmul(&dense_matmul(&prefix, &q), &suffix))
}

/// `dU/dphi_e` for the phased complex construction.
pub fn jacobian_column_unitary_phi(
    s: &RotationSchedule,
    theta: &[f64],
    phi: &[f64],
    e: CoordinatePair,
) -> Result<DenseMatrix<Complex64>> {
    let map = pair_index_map(s);
    let (k, _) = map
        .block_slot(e)
        .ok_or(GivensError::InactivePair { i: e.i, j: e.j })?;
    let flat = map.flat_index(e).unwrap();
    let prefix = dense_block_product_unitary(s, &map, theta, phi, 0..k);
    let suffix = dense_block_product_unitary(s, &map, theta, phi, k..s.num_blocks());
    let p = p_pattern_dense(s.n(), e, theta[flat]);
    Ok(dense_matmul(&dense_matmul(&prefix, &p), &suffix))
}

/// Central finite differences of `loss(U(theta))` in every active angle.
///
/// With the default step `h = 1e-6` in 64-bit the truncation error is
/// `O(h^2) ~ 1e-12` and the roundoff error `~ 1e-10`, which supports
/// checking analytic gradients at 1e-6 relative tolerance.
pub fn finite_diff_gradient<L>(
    s: &RotationSchedule,
    theta: &[f64],
    loss: L,
    h: f64,
) -> Result<Vec<f64>>
where
    L: Fn(&DenseMatrix<f64>) -> f64,
{
    assert!(h > 0.0, "step must be positive");
    let mut grad = Vec::with_capacity(theta.len());
    let mut probe = theta.to_vec();
    for p in 0..theta.len() {
        probe[p] = theta[p] + h;
        let up = forward_sequential(s, &probe)?;
        probe[p] = theta[p] - h;
        let um = forward_sequential(s, &probe)?;
        probe[p] = theta[p];
        grad.push((loss(&up) - loss(&um)) / (2.0 * h));
    }
    Ok(grad)
}

/// Central finite differences of a real loss of the complex matrix, in both
/// the rotation and phase angles.
pub fn finite_diff_gradient_unitary<L>(
    s: &RotationSchedule,
    theta: &[f64],
    phi: &[f64],
    loss: L,
    h: f64,
) -> Result<(Vec<f64>, Vec<f64>)>
where
    L: Fn(&DenseMatrix<Complex64>) -> f64,
{
    assert!(h > 0.0, "step must be positive");
    let mut d_theta = Vec::with_capacity(theta.len());
    let mut d_phi = Vec::with_capacity(phi.len());
    let mut probe_t = theta.to_vec();
    let mut probe_p = phi.to_vec();
    for p in 0..theta.len() {
        probe_t[p] = theta[p] + h;
        let up = forward_sequential_unitary(s, &probe_t, phi)?;
        probe_t[p] = theta[p] - h;
        let um = forward_sequential_unitary(s, &probe_t, phi)?;
        probe_t[p] = theta[p];
        d_theta.push((loss(&up) - loss(&um)) / (2.0 * h));

        probe_p[p] = phi[p] + h;
        let up = forward_sequential_unitary(s, theta, &probe_p)?;
        probe_p[p] = phi[p] - h;
        let um = forward_sequential_unitary(s, theta, &probe_p)?;
        probe_p[p] = phi[p];
        d_phi.push((loss(&up) - loss(&um)) / (2.0 * h));
    }
    Ok((d_theta, d_phi))
}

/// The linear test loss `sum_kl gamma_kl * u_kl`.
pub fn linear_loss(gamma: &DenseMatrix<f64>, u: &DenseMatrix<f64>) -> f64 {
    gamma
        .as_slice()
        .iter()
        .zip(u.as_slice())
        .map(|(&g, &x)| g * x)
        .sum()
}

/// The real-valued linear loss of a complex matrix,
/// `sum_kl Re(conj(gamma_kl) * u_kl)`.
pub fn linear_loss_complex(gamma: &DenseMatrix<Complex64>, u: &DenseMatrix<Complex64>) -> f64 {
    gamma
        .as_slice()
        .iter()
        .zip(u.as_slice())
        .map(|(&g, &x)| (g.conj() * x).re)
        .sum()
}

/// Determinant by LU decomposition with partial pivoting.
pub fn det_lu(m: &DenseMatrix<f64>) -> f64 {
    assert!(m.is_square());
    let n = m.n_rows();
    let mut a = m.clone();
    let mut det = 1.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                a[(r1, col)]
                    .abs()
                    .partial_cmp(&a[(r2, col)].abs())
                    .unwrap()
            })
            .unwrap();
        let pivot = a[(pivot_row, col)];
        if pivot == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            let (lo, hi) = a.row_pair_mut(col, pivot_row);
            lo.swap_with_slice(hi);
            det = -det;
        }
        det *= pivot;
        for r in col + 1..n {
            let (prow, rrow) = a.row_pair_mut(col, r);
            let factor = rrow[col] / prow[col];
            for c in col..n {
                rrow[c] -= factor * prow[c];
            }
        }
    }
    det
}

/// Singular values by one-sided Jacobi (Hestenes) iteration, descending.
pub fn singular_values(m: &DenseMatrix<f64>) -> Vec<f64> {
    let mut a = m.clone();
    let (rows, cols) = (a.n_rows(), a.n_cols());
    let tol = 1e-14;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for r in 0..rows {
                    let x = a[(r, p)];
                    let y = a[(r, q)];
                    app += x * x;
                    aqq += y * y;
                    apq += x * y;
                }
                if apq.abs() <= tol * (app * aqq).sqrt() || apq == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..rows {
                    let x = a[(r, p)];
                    let y = a[(r, q)];
                    a[(r, p)] = c * x - s * y;
                    a[(r, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut svals: Vec<f64> = (0..cols)
        .map(|c| (0..rows).map(|r| a[(r, c)] * a[(r, c)]).sum::<f64>().sqrt())
        .collect();
    svals.sort_by(|x, y| y.partial_cmp(x).unwrap());
    svals
}

/// The `2n x 2n` real matrix `[[Re, -Im], [Im, Re]]`; each complex singular
/// value appears twice among its singular values, so complex numerical rank
/// is half the embedding's.
pub fn real_embedding(m: &DenseMatrix<Complex64>) -> DenseMatrix<f64> {
    let (rows, cols) = (m.n_rows(), m.n_cols());
    let mut out = DenseMatrix::<f64>::zeros(2 * rows, 2 * cols);
    for r in 0..rows {
        for c in 0..cols {
            let z = m[(r, c)];
            out[(r, c)] = z.re;
            out[(r, c + cols)] = -z.im;
            out[(r + rows, c)] = z.im;
            out[(r + rows, c + cols)] = z.re;
        }
    }
    out
}

/// Number of singular values above `rel_tol` times the largest.
pub fn numerical_rank(svals: &[f64], rel_tol: f64) -> usize {
    let smax = svals.first().copied().unwrap_or(0.0);
    if smax <= f64::MIN_POSITIVE {
        return 0;
    }
    svals.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Largest relative error `|got - want| / |want|` over the components whose
/// reference magnitude reaches `floor`; the standard gradient-check metric.
pub fn max_relative_error(got: &[f64], want: &[f64], floor: f64) -> f64 {
    assert_eq!(got.len(), want.len());
    got.iter()
        .zip(want)
        .filter(|(_, &w)| w.abs() >= floor)
        .map(|(&g, &w)| (g - w).abs() / w.abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::AngleSet;
    use crate::schedule::build_circle_schedule;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn sequential_forward_at_zero_is_identity() {
        let s = build_circle_schedule(6, None, 6).unwrap();
        let u = forward_sequential(&s, &[0.0; 15]).unwrap();
        assert!(u.bitwise_eq(&DenseMatrix::identity(6)));
    }

    #[test]
    fn sequential_forward_n2_quarter_turn() {
        let s = build_circle_schedule(2, None, 2).unwrap();
        let u = forward_sequential(&s, &[FRAC_PI_2]).unwrap();
        assert!((u[(0, 0)]).abs() <= 1e-16);
        assert!((u[(0, 1)] + 1.0).abs() <= 1e-15);
        assert!((u[(1, 0)] - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn sequential_forward_checks_length() {
        let s = build_circle_schedule(4, None, 4).unwrap();
        assert!(forward_sequential(&s, &[0.0; 5]).is_err());
    }

    #[test]
    fn jacobian_at_zero_is_the_skew_pattern() {
        let s = build_circle_schedule(4, None, 4).unwrap();
        let theta = vec![0.0; 6];
        for block in s.blocks() {
            for &e in block {
                let col = jacobian_column(&s, &theta, e).unwrap();
                let q = q_pattern_dense::<f64>(4, e);
                assert!(col.matrix.max_abs_diff(&q) <= 1e-15, "pair {e}");
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences_of_entries() {
        let s = build_circle_schedule(4, None, 4).unwrap();
        let theta = AngleSet::random_uniform(&s, 17);
        let h = 1e-6;
        let pairs = flatten_active_pairs(&s);
        for (flat, &e) in pairs.iter().enumerate() {
            let col = jacobian_column(&s, &theta, e).unwrap();
            let mut tp = theta.to_vec();
            tp[flat] += h;
            let up = forward_sequential(&s, &tp).unwrap();
            tp[flat] = theta[flat] - h;
            let um = forward_sequential(&s, &tp).unwrap();
            for r in 0..4 {
                for c in 0..4 {
                    let fd = (up[(r, c)] - um[(r, c)]) / (2.0 * h);
                    assert!(
                        (fd - col.matrix[(r, c)]).abs() <= 1e-7,
                        "pair {e} entry ({r},{c})"
                    );
                }
            }
        }
    }

    #[test]
    fn jacobian_columns_have_rank_at_most_two() {
        let s = build_circle_schedule(6, None, 6).unwrap();
        let theta = AngleSet::random_uniform(&s, 5);
        for &e in &flatten_active_pairs(&s) {
            let col = jacobian_column(&s, &theta, e).unwrap();
            let svals = singular_values(&col.matrix);
            assert!(numerical_rank(&svals, 1e-10) <= 2, "pair {e}: {svals:?}");
        }
    }

    #[test]
    fn jacobian_rejects_inactive_pair() {
        let s = build_circle_schedule(8, None, 4).unwrap();
        let theta = vec![0.0; 22];
        let e = CoordinatePair { i: 5, j: 6 };
        assert!(matches!(
            jacobian_column(&s, &theta, e),
            Err(GivensError::InactivePair { i: 5, j: 6 })
        ));
    }

    #[test]
    fn finite_diff_entry_losses_at_zero() {
        let s = build_circle_schedule(2, None, 2).unwrap();
        let g00 = finite_diff_gradient(&s, &[0.0], |u| u[(0, 0)], 1e-6).unwrap();
        assert!(g00[0].abs() <= 1e-9);
        let g10 = finite_diff_gradient(&s, &[0.0], |u| u[(1, 0)], 1e-6).unwrap();
        assert!((g10[0] - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn q_pattern_matches_dense_derivative_product() {
        let e = CoordinatePair { i: 1, j: 3 };
        let theta = 0.83;
        let g_t = givens_dense::<f64>(5, e, theta).transpose();
        let dg = givens_dtheta_dense(5, e, theta);
        let q = dense_matmul(&dg, &g_t);
        assert!(q.max_abs_diff(&q_pattern_dense::<f64>(5, e)) <= 1e-15);
    }

    #[test]
    fn qp_patterns_match_dense_products_phased() {
        let e = CoordinatePair { i: 0, j: 2 };
        let (theta, phi) = (0.83, -1.91);
        let g_h = givens_dense_phased(4, e, theta, phi).conj_transpose();
        let q = dense_matmul(&givens_dtheta_dense_phased(4, e, theta, phi), &g_h);
        assert!(q.max_abs_diff(&q_pattern_dense_complex(4, e)) <= 1e-15);
        let p = dense_matmul(&givens_dphi_dense_phased(4, e, theta, phi), &g_h);
        assert!(p.max_abs_diff(&p_pattern_dense(4, e, theta)) <= 1e-15);
    }

    #[test]
    fn det_lu_known_values() {
        assert_eq!(det_lu(&DenseMatrix::identity(4)), 1.0);
        let d = DenseMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 3.0]]).unwrap();
        assert!((det_lu(&d) - 6.0).abs() <= 1e-15);
        let swapped =
            DenseMatrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]])
                .unwrap();
        assert!((det_lu(&swapped) + 1.0).abs() <= 1e-15);
        let m = DenseMatrix::from_rows(&[vec![3.0, 1.0], vec![4.0, 2.0]]).unwrap();
        assert!((det_lu(&m) - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn singular_values_known_cases() {
        let d = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 3.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ])
        .unwrap();
        let svals = singular_values(&d);
        assert!((svals[0] - 3.0).abs() <= 1e-12);
        assert!((svals[1] - 2.0).abs() <= 1e-12);
        assert!((svals[2] - 1.0).abs() <= 1e-12);

        // rank-1 outer product
        let mut outer = DenseMatrix::<f64>::zeros(4, 4);
        let u = [1.0, -2.0, 0.5, 3.0];
        let v = [2.0, 1.0, -1.0, 0.25];
        for r in 0..4 {
            for c in 0..4 {
                outer[(r, c)] = u[r] * v[c];
            }
        }
        let svals = singular_values(&outer);
        assert_eq!(numerical_rank(&svals, 1e-10), 1, "{svals:?}");
    }

    #[test]
    fn complex_rank_via_embedding() {
        // rank-1 complex outer product -> embedding rank 2
        let mut m = DenseMatrix::<Complex64>::zeros(3, 3);
        let u = [
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.3, 2.0),
            Complex64::new(0.0, 1.0),
        ];
        let v = [
            Complex64::new(0.7, -0.2),
            Complex64::new(1.5, 0.0),
            Complex64::new(-0.4, 0.9),
        ];
        for r in 0..3 {
            for c in 0..3 {
                m[(r, c)] = u[r] * v[c].conj();
            }
        }
        let svals = singular_values(&real_embedding(&m));
        assert_eq!(numerical_rank(&svals, 1e-10), 2, "{svals:?}");
    }

    #[test]
    fn linear_losses() {
        let g = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let u = DenseMatrix::from_rows(&[vec![0.5, 0.0], vec![0.0, -1.0]]).unwrap();
        assert_eq!(linear_loss(&g, &u), 0.5 - 4.0);

        let gc = DenseMatrix::<Complex64>::from_real(&g);
        let uc = DenseMatrix::<Complex64>::from_real(&u);
        assert_eq!(linear_loss_complex(&gc, &uc), 0.5 - 4.0);
        // purely imaginary gamma against real u contributes nothing
        let gi = DenseMatrix::from_vec(
            2,
            2,
            vec![Complex64::new(0.0, 1.0); 4],
        )
        .unwrap();
        assert_eq!(linear_loss_complex(&gi, &uc), 0.0);
    }
}

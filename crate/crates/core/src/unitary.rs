//! Complex extension: phased Givens rotations tracing out the unitary group,
//! with block-parallel gradients in both the rotation and phase angles.
//!
//! Each pair carries a rotation angle theta and a phase angle phi; the
//! rotation's `i` column picks up the unit factor `e^{i phi}`. The forward
//! pass is the real block loop with phased kernels. The backward sweep keeps
//! the same two running products with the adjoint convention (`m_mat` seeded
//! with the conjugate transpose of the upstream gradient), and assembles two
//! real scratch rows per pair: the rank-2 rotation-angle term and the rank-1
//! phase term, reduced together in one doubled-height pass.
//!
//! Gradient convention for a real loss `L`: the upstream gradient packs
//! `dL/dRe(U)` and `dL/dIm(U)` as one complex matrix `gamma`, and every
//! parameter derivative is `sum_kl Re(conj(gamma_kl) * dU_kl/dparam)`. With
//! all phases zero this reduces exactly to the real pipeline. The convention
//! is validated against finite differences, never trusted on its own.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{GivensError, Result};
use crate::kernels::{rotate_cols_adjoint_raw, rotate_rows_phased_raw, PhasedRotationParams};
use crate::matrix::{DenseMatrix, SharedMat};
use crate::reduce::pairwise_sum;
use crate::schedule::RotationSchedule;

/// Loss gradient in the rotation and phase angles, flat block-major order.
/// Both components are real: the loss is real-valued.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexGradientResult {
    pub d_theta: Vec<f64>,
    pub d_phi: Vec<f64>,
}

fn check_param_lengths(s: &RotationSchedule, theta: &[f64], phi: &[f64]) -> Result<()> {
    for len in [theta.len(), phi.len()] {
        if len != s.active_pair_count() {
            return Err(GivensError::LengthMismatch {
                expected: s.active_pair_count(),
                got: len,
            });
        }
    }
    Ok(())
}

/// Build the unitary `U(theta, phi)`: the product of phased rotations in
/// reversed block order from the identity.
pub fn forward_unitary(
    s: &RotationSchedule,
    theta: &[f64],
    phi: &[f64],
) -> Result<DenseMatrix<Complex64>> {
    check_param_lengths(s, theta, phi)?;
    let mut u = DenseMatrix::<Complex64>::identity(s.n());
    let shared = SharedMat::new(&mut u);
    for k in (0..s.num_blocks()).rev() {
        s.active_in_block(k).par_iter().for_each(|ap| {
            let flat = ap.flat as usize;
            let p = PhasedRotationParams::from_angles(theta[flat], phi[flat]);
            unsafe { rotate_rows_phased_raw(&shared, ap.i as usize, ap.j as usize, &p) };
        });
    }
    Ok(u)
}

/// Gradient of a real loss in every rotation and phase angle, given the
/// forward output `u` and the packed upstream gradient `gamma`.
pub fn jvp_unitary(
    s: &RotationSchedule,
    theta: &[f64],
    phi: &[f64],
    u: &DenseMatrix<Complex64>,
    gamma: &DenseMatrix<Complex64>,
) -> Result<ComplexGradientResult> {
    let n = s.n();
    check_param_lengths(s, theta, phi)?;
    for (name, m) in [("u", u), ("gamma", gamma)] {
        if m.n_rows() != n || m.n_cols() != n {
            return Err(GivensError::DimensionMismatch(format!(
                "{name} is {}x{}, schedule dimension is {n}",
                m.n_rows(),
                m.n_cols()
            )));
        }
    }

    let half = s.n_effective() / 2;
    let mut u_fwd = u.clone();
    let mut m_mat = gamma.conj_transpose();
    // theta rows in the top half, phi rows in the bottom half; one reduction
    // pass of doubled height covers both
    let mut scratch = DenseMatrix::<f64>::zeros(2 * half, n);
    let mut d_theta = vec![0.0; theta.len()];
    let mut d_phi = vec![0.0; phi.len()];

    let params: Vec<PhasedRotationParams> = theta
        .par_iter()
        .zip(phi.par_iter())
        .map(|(&t, &p)| PhasedRotationParams::from_angles(t, p))
        .collect();

    for k in (0..s.num_blocks()).rev() {
        let items = s.active_in_block(k);
        if items.is_empty() {
            continue;
        }

        // phase 1: peel the block off the prefix product (adjoint column rotations)
        {
            let shared = SharedMat::new(&mut u_fwd);
            items.par_iter().for_each(|ap| {
                let p = &params[ap.flat as usize];
                unsafe { rotate_cols_adjoint_raw(&shared, ap.i as usize, ap.j as usize, p) };
            });
        }

        // phase 2: fold the block into the contracted suffix product
        {
            let shared = SharedMat::new(&mut m_mat);
            items.par_iter().for_each(|ap| {
                let p = &params[ap.flat as usize];
                unsafe { rotate_rows_phased_raw(&shared, ap.i as usize, ap.j as usize, p) };
            });
        }

        // phase 3: scratch rows. Rotation-angle term
        //   Re(M[i][l] u[l][j] - M[j][l] u[l][i]),
        // phase term from the rank-1 derivative
        //   -Im((c M[i][l] + s M[j][l]) (c u[l][i] + s u[l][j])).
        {
            let m_ref = &m_mat;
            let u_ref = &u_fwd;
            let sh = SharedMat::new(&mut scratch);
            items.par_iter().for_each(|ap| {
                let (i, j) = (ap.i as usize, ap.j as usize);
                let p = &params[ap.flat as usize];
                let row_t = unsafe {
                    std::slice::from_raw_parts_mut(sh.row_ptr(ap.slot as usize), n)
                };
                let row_p = unsafe {
                    std::slice::from_raw_parts_mut(sh.row_ptr(ap.slot as usize + half), n)
                };
                let mi = m_ref.row(i);
                let mj = m_ref.row(j);
                for l in 0..n {
                    let uli = u_ref[(l, i)];
                    let ulj = u_ref[(l, j)];
                    row_t[l] = (mi[l] * ulj - mj[l] * uli).re;
                    let w = (mi[l] * p.cos + mj[l] * p.sin) * (uli * p.cos + ulj * p.sin);
                    row_p[l] = -w.im;
                }
            });
        }

        // reduction over the doubled-height scratch, then scatter
        let sums: Vec<(f64, f64)> = items
            .par_iter()
            .map(|ap| {
                let slot = ap.slot as usize;
                (
                    pairwise_sum(scratch.row(slot)),
                    pairwise_sum(scratch.row(slot + half)),
                )
            })
            .collect();
        for (ap, &(dt, dp)) in items.iter().zip(&sums) {
            d_theta[ap.flat as usize] = dt;
            d_phi[ap.flat as usize] = dp;
        }
    }

    Ok(ComplexGradientResult { d_theta, d_phi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backward::jvp_parallel;
    use crate::forward::{forward_parallel, OrthogonalConfig};
    use crate::oracles::{
        finite_diff_gradient_unitary, forward_sequential_unitary, jacobian_column_unitary_phi,
        jacobian_column_unitary_theta, linear_loss_complex, max_relative_error, numerical_rank,
        real_embedding, singular_values,
    };
    use crate::params::{AngleSet, PhaseSet};
    use crate::schedule::{build_circle_schedule, pair_index_map};
    use std::f64::consts::PI;

    fn unitarity_residual(u: &DenseMatrix<Complex64>) -> f64 {
        let n = u.n_rows();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let mut dot = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    dot += u[(k, r)].conj() * u[(k, c)];
                }
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    #[test]
    fn zero_parameters_give_identity() {
        let s = build_circle_schedule(5, None, 5).unwrap();
        let u = forward_unitary(&s, &[0.0; 10], &[0.0; 10]).unwrap();
        assert!(u.bitwise_eq(&DenseMatrix::identity(5)));
    }

    #[test]
    fn n2_pure_phase() {
        let s = build_circle_schedule(2, None, 2).unwrap();
        let u = forward_unitary(&s, &[0.0], &[PI]).unwrap();
        assert!((u[(0, 0)] - Complex64::new(-1.0, 0.0)).norm() <= 1e-15);
        assert!((u[(1, 1)] - Complex64::new(1.0, 0.0)).norm() <= 1e-15);
        assert!(u[(0, 1)].norm() <= 1e-15);
        assert!(u[(1, 0)].norm() <= 1e-15);
    }

    #[test]
    fn random_draw_is_unitary_and_matches_sequential_oracle() {
        let s = build_circle_schedule(6, None, 6).unwrap();
        let theta = AngleSet::random_uniform(&s, 3);
        let phi = PhaseSet::random_uniform(&s, 4);
        let u = forward_unitary(&s, &theta, &phi).unwrap();
        assert!(unitarity_residual(&u) <= 1e-12);
        let seq = forward_sequential_unitary(&s, &theta, &phi).unwrap();
        assert!(u.bitwise_eq(&seq));
    }

    #[test]
    fn zero_phases_reduce_to_the_real_pipeline_exactly() {
        let s = build_circle_schedule(7, None, 7).unwrap();
        let theta = AngleSet::random_uniform(&s, 5);
        let phi = PhaseSet::zeros(&s);
        let complex = forward_unitary(&s, &theta, &phi).unwrap();
        let real = forward_parallel(&s, &theta, &OrthogonalConfig::rotation()).unwrap();
        // exact value equality (signed zeros in the untouched imaginary
        // parts keep this from being a bit comparison)
        assert!(complex.max_abs_diff(&DenseMatrix::from_real(&real)) == 0.0);

        let gamma_r = DenseMatrix::<f64>::random_uniform(7, 7, -1.0, 1.0, 6);
        let gamma_c = DenseMatrix::<Complex64>::from_real(&gamma_r);
        let grad_c = jvp_unitary(&s, &theta, &phi, &complex, &gamma_c).unwrap();
        let grad_r = jvp_parallel(&s, &theta, &real, &gamma_r).unwrap();
        for k in 0..theta.len() {
            assert!((grad_c.d_theta[k] - grad_r[k]).abs() <= 1e-12, "component {k}");
        }
    }

    #[test]
    fn zero_parameters_identity_gamma_gives_zero_gradients() {
        let s = build_circle_schedule(4, None, 4).unwrap();
        let theta = AngleSet::zeros(&s);
        let phi = PhaseSet::zeros(&s);
        let u = forward_unitary(&s, &theta, &phi).unwrap();
        let gamma = DenseMatrix::<Complex64>::identity(4);
        let grad = jvp_unitary(&s, &theta, &phi, &u, &gamma).unwrap();
        assert!(grad.d_theta.iter().all(|&g| g == 0.0));
        assert!(grad.d_phi.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn n2_imaginary_gamma_hits_the_phase_only() {
        let s = build_circle_schedule(2, None, 2).unwrap();
        let (theta, phi) = ([0.0], [0.0]);
        let u = forward_unitary(&s, &theta, &phi).unwrap();
        let mut gamma = DenseMatrix::<Complex64>::zeros(2, 2);
        gamma[(0, 0)] = Complex64::new(0.0, 1.0);
        let grad = jvp_unitary(&s, &theta, &phi, &u, &gamma).unwrap();
        assert!((grad.d_phi[0] - 1.0).abs() <= 1e-15, "{:?}", grad.d_phi);
        assert!(grad.d_theta[0].abs() <= 1e-15);

        // confirm the hand value against finite differences
        let (fd_t, fd_p) = finite_diff_gradient_unitary(
            &s,
            &theta,
            &phi,
            |m| linear_loss_complex(&gamma, m),
            1e-6,
        )
        .unwrap();
        assert!((fd_p[0] - 1.0).abs() <= 1e-9);
        assert!(fd_t[0].abs() <= 1e-9);
    }

    #[test]
    fn matches_finite_differences_on_both_angle_families() {
        let s = build_circle_schedule(6, None, 6).unwrap();
        let theta = AngleSet::random_uniform(&s, 11);
        let phi = PhaseSet::random_uniform(&s, 12);
        let gamma = DenseMatrix::<Complex64>::random_complex(6, 6, 13);
        let u = forward_unitary(&s, &theta, &phi).unwrap();
        let grad = jvp_unitary(&s, &theta, &phi, &u, &gamma).unwrap();
        let (fd_t, fd_p) = finite_diff_gradient_unitary(
            &s,
            &theta,
            &phi,
            |m| linear_loss_complex(&gamma, m),
            1e-6,
        )
        .unwrap();
        let rel_t = max_relative_error(&grad.d_theta, &fd_t, 1e-8);
        let rel_p = max_relative_error(&grad.d_phi, &fd_p, 1e-8);
        assert!(rel_t <= 1e-6, "theta max rel err {rel_t:.3e}");
        assert!(rel_p <= 1e-6, "phi max rel err {rel_p:.3e}");
    }

    #[test]
    fn restricted_unitary_gradient_matches_finite_differences() {
        let s = build_circle_schedule(8, None, 4).unwrap();
        let theta = AngleSet::random_uniform(&s, 21);
        let phi = PhaseSet::random_uniform(&s, 22);
        let gamma = DenseMatrix::<Complex64>::random_complex(8, 8, 23);
        let u = forward_unitary(&s, &theta, &phi).unwrap();
        assert!(unitarity_residual(&u) <= 1e-12);
        let grad = jvp_unitary(&s, &theta, &phi, &u, &gamma).unwrap();
        let (fd_t, fd_p) = finite_diff_gradient_unitary(
            &s,
            &theta,
            &phi,
            |m| linear_loss_complex(&gamma, m),
            1e-6,
        )
        .unwrap();
        assert!(max_relative_error(&grad.d_theta, &fd_t, 1e-8) <= 1e-6);
        assert!(max_relative_error(&grad.d_phi, &fd_p, 1e-8) <= 1e-6);
    }

    #[test]
    fn derivative_ranks_one_and_two() {
        let s = build_circle_schedule(5, None, 5).unwrap();
        let theta = AngleSet::random_uniform(&s, 31);
        let phi = PhaseSet::random_uniform(&s, 32);
        let map = pair_index_map(&s);
        for (_, e) in map.iter() {
            let dt = jacobian_column_unitary_theta(&s, &theta, &phi, e).unwrap();
            let svals = singular_values(&real_embedding(&dt));
            assert!(numerical_rank(&svals, 1e-10) <= 4, "theta pair {e}");
            let dp = jacobian_column_unitary_phi(&s, &theta, &phi, e).unwrap();
            let svals = singular_values(&real_embedding(&dp));
            assert_eq!(numerical_rank(&svals, 1e-10), 2, "phi pair {e}");
        }
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let s = build_circle_schedule(4, None, 4).unwrap();
        assert!(forward_unitary(&s, &[0.0; 5], &[0.0; 6]).is_err());
        assert!(forward_unitary(&s, &[0.0; 6], &[0.0; 5]).is_err());
        let u = DenseMatrix::<Complex64>::identity(4);
        let bad = DenseMatrix::<Complex64>::zeros(3, 3);
        assert!(jvp_unitary(&s, &[0.0; 6], &[0.0; 6], &u, &bad).is_err());
    }
}

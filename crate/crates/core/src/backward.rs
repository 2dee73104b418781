//! Block-parallel gradient of a scalar loss in the rotation angles.
//!
//! Given the upstream gradient `gamma = dL/dU`, the sweep walks the blocks in
//! reverse while maintaining two running products in place:
//!
//! * `u_fwd`, the prefix product of the blocks before the current one,
//!   updated by column rotations that peel the current block off `U`;
//! * `m_mat`, the suffix product pre-contracted with the upstream gradient
//!   (`U_suffix * gamma^T`), updated by the same row rotations as the
//!   forward pass but seeded with `gamma^T` instead of the identity.
//!
//! At each block the derivative of `U` in one angle is a rank-2 combination
//! of a fixed column pair of `u_fwd` and row pair of the suffix product, so
//! the loss derivative collapses to `M_i . u_j - M_j . u_i`. Those terms are
//! assembled elementwise into one scratch row per pair and summed with the
//! fixed-shape pairwise reduction, making the whole gradient bitwise
//! independent of worker count.
//!
//! Per block there are three internally parallel phases (`u_fwd` update,
//! `m_mat` update, scratch assignment), each followed by a barrier, then the
//! reduction and the gradient scatter.

use std::ops::Deref;

use rayon::prelude::*;

use crate::error::{GivensError, Result};
use crate::forward::OrthogonalConfig;
use crate::kernels::{rotate_cols_inverse_raw, rotate_rows_raw, RotationParams};
use crate::matrix::{DenseMatrix, RealScalar, Scalar, SharedMat};
use crate::reduce::pairwise_sum;
use crate::schedule::RotationSchedule;

/// Loss gradient in the angles, flat block-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientResult<F = f64> {
    d_theta: Vec<F>,
}

impl<F: RealScalar> GradientResult<F> {
    pub fn values(&self) -> &[F] {
        &self.d_theta
    }

    pub fn into_vec(self) -> Vec<F> {
        self.d_theta
    }
}

impl<F> Deref for GradientResult<F> {
    type Target = [F];

    fn deref(&self) -> &[F] {
        &self.d_theta
    }
}

/// Reusable buffers for the backward sweep. Allocate once and pass to
/// [`jvp_with_workspace`] when running in a loop; a workspace must not be
/// shared across concurrent calls.
#[derive(Clone, Debug)]
pub struct BackwardWorkspace<F = f64> {
    u_fwd: DenseMatrix<F>,
    m_mat: DenseMatrix<F>,
    a_rows: DenseMatrix<F>,
    d_vec: Vec<F>,
}

impl<F: RealScalar> BackwardWorkspace<F> {
    pub fn new(s: &RotationSchedule) -> Self {
        let n = s.n();
        let half = s.n_effective() / 2;
        Self {
            u_fwd: DenseMatrix::zeros(n, n),
            m_mat: DenseMatrix::zeros(n, n),
            a_rows: DenseMatrix::zeros(half, n),
            d_vec: vec![F::zero(); half],
        }
    }

    /// Prefix-product buffer; after a full sweep it has been unwound back to
    /// the identity (up to roundoff), which callers can use as a health check.
    pub fn u_fwd(&self) -> &DenseMatrix<F> {
        &self.u_fwd
    }

    fn fits(&self, s: &RotationSchedule) -> bool {
        self.u_fwd.n_rows() == s.n()
            && self.a_rows.n_rows() == s.n_effective() / 2
            && self.a_rows.n_cols() == s.n()
    }
}

/// Gradient of the loss in every active angle: contracts the upstream
/// gradient with the Jacobian without materializing either.
///
/// `u` must be the forward output for `(s, theta)` with `reflect = false`;
/// a sampled orthogonality probe logs a warning when it looks stale.
pub fn jvp_parallel<F: RealScalar>(
    s: &RotationSchedule,
    theta: &[F],
    u: &DenseMatrix<F>,
    gamma: &DenseMatrix<F>,
) -> Result<GradientResult<F>> {
    let mut ws = BackwardWorkspace::new(s);
    jvp_with_workspace(s, theta, u, gamma, &mut ws)
}

/// [`jvp_parallel`] with caller-provided buffers.
pub fn jvp_with_workspace<F: RealScalar>(
    s: &RotationSchedule,
    theta: &[F],
    u: &DenseMatrix<F>,
    gamma: &DenseMatrix<F>,
    ws: &mut BackwardWorkspace<F>,
) -> Result<GradientResult<F>> {
    let n = s.n();
    if theta.len() != s.active_pair_count() {
        return Err(GivensError::LengthMismatch {
            expected: s.active_pair_count(),
            got: theta.len(),
        });
    }
    for (name, m) in [("u", u), ("gamma", gamma)] {
        if m.n_rows() != n || m.n_cols() != n {
            return Err(GivensError::DimensionMismatch(format!(
                "{name} is {}x{}, schedule dimension is {n}",
                m.n_rows(),
                m.n_cols()
            )));
        }
    }
    if !ws.fits(s) {
        return Err(GivensError::DimensionMismatch(
            "workspace was allocated for a different schedule".to_string(),
        ));
    }
    warn_if_not_orthogonal(u);

    ws.u_fwd.copy_from(u);
    transpose_into(gamma, &mut ws.m_mat);
    let mut d_theta = vec![F::zero(); theta.len()];

    // one trig evaluation per pair, reused by both update phases
    let params: Vec<RotationParams<F>> = theta
        .par_iter()
        .map(|&t| RotationParams::from_angle(t))
        .collect();

    for k in (0..s.num_blocks()).rev() {
        let items = s.active_in_block(k);
        if items.is_empty() {
            continue;
        }

        // phase 1: peel the block off the prefix product (column rotations)
        {
            let shared = SharedMat::new(&mut ws.u_fwd);
            items.par_iter().for_each(|ap| {
                let p = &params[ap.flat as usize];
                unsafe {
                    rotate_cols_inverse_raw(&shared, ap.i as usize, ap.j as usize, p.cos, p.sin)
                };
            });
        }

        // phase 2: fold the block into the contracted suffix product (row rotations)
        {
            let shared = SharedMat::new(&mut ws.m_mat);
            items.par_iter().for_each(|ap| {
                let p = &params[ap.flat as usize];
                unsafe { rotate_rows_raw(&shared, ap.i as usize, ap.j as usize, p.cos, p.sin) };
            });
        }

        // phase 3: per-pair scratch rows A[m][l] = M[i][l] u[l][j] - M[j][l] u[l][i]
        {
            let m_mat = &ws.m_mat;
            let u_fwd = &ws.u_fwd;
            let scratch = SharedMat::new(&mut ws.a_rows);
            items.par_iter().for_each(|ap| {
                let (i, j) = (ap.i as usize, ap.j as usize);
                let row = unsafe {
                    std::slice::from_raw_parts_mut(scratch.row_ptr(ap.slot as usize), n)
                };
                let mi = m_mat.row(i);
                let mj = m_mat.row(j);
                for l in 0..n {
                    row[l] = mi[l] * u_fwd[(l, j)] - mj[l] * u_fwd[(l, i)];
                }
            });
        }

        // reduction: fixed-shape row sums, then scatter into the gradient
        let sums: Vec<F> = items
            .par_iter()
            .map(|ap| pairwise_sum(ws.a_rows.row(ap.slot as usize)))
            .collect();
        for (ap, &sum) in items.iter().zip(&sums) {
            ws.d_vec[ap.slot as usize] = sum;
            d_theta[ap.flat as usize] = sum;
        }
    }

    Ok(GradientResult { d_theta })
}

/// Gradient through the reflected forward: the reflection is a constant
/// linear map, so its pullback negates the reflected column of both the
/// matrix and the upstream gradient before the plain sweep.
pub fn jvp_with_reflection<F: RealScalar>(
    s: &RotationSchedule,
    theta: &[F],
    u_reflected: &DenseMatrix<F>,
    gamma: &DenseMatrix<F>,
    cfg: &OrthogonalConfig,
) -> Result<GradientResult<F>> {
    if !cfg.reflect {
        return jvp_parallel(s, theta, u_reflected, gamma);
    }
    if cfg.reflect_column >= s.n() {
        return Err(GivensError::IndexOutOfRange {
            what: "reflection column",
            index: cfg.reflect_column,
            bound: s.n(),
        });
    }
    let mut u = u_reflected.clone();
    u.negate_col(cfg.reflect_column);
    let mut g = gamma.clone();
    g.negate_col(cfg.reflect_column);
    jvp_parallel(s, theta, &u, &g)
}

fn transpose_into<F: Scalar>(src: &DenseMatrix<F>, dst: &mut DenseMatrix<F>) {
    let n = src.n_rows();
    for r in 0..n {
        for c in 0..n {
            dst[(c, r)] = src[(r, c)];
        }
    }
}

/// Sampled O(n) probe, not a full check: warns (never fails) when `u` does
/// not look orthogonal, which usually means a stale buffer was passed.
fn warn_if_not_orthogonal<F: RealScalar>(u: &DenseMatrix<F>) {
    let n = u.n_rows();
    let mut worst = 0.0f64;
    let step = (n / 4).max(1);
    let mut r = 0;
    while r < n {
        let row = u.row(r);
        let mut norm = F::zero();
        for &x in row {
            norm = norm + x * x;
        }
        worst = worst.max((norm - F::one()).magnitude());
        let next = u.row((r + 1) % n);
        if n > 1 {
            let mut dot = F::zero();
            for l in 0..n {
                dot = dot + row[l] * next[l];
            }
            if (r + 1) % n != r {
                worst = worst.max(dot.magnitude());
            }
        }
        r += step;
    }
    if worst > 1e-6 {
        log::warn!(
            "upstream matrix fails the orthogonality probe (sampled residual {worst:.2e}); \
             was it produced by the forward pass for these angles (without reflection)?"
        );
    }
}

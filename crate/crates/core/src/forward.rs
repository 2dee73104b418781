//! Block-parallel construction of `U(theta)`.
//!
//! Blocks run in reverse schedule order; within a block every rotation
//! touches a disjoint row pair, so the pair updates run on concurrent
//! workers with a barrier between blocks. Because disjoint row updates
//! cannot interact, the result is bitwise identical for any worker count,
//! and bitwise identical to the sequential reference.
//!
//! Worker count is controlled by the ambient rayon pool: wrap calls in
//! `rayon::ThreadPool::install` to pin it.

use rayon::prelude::*;

use crate::error::{GivensError, Result};
use crate::kernels::{rotate_rows_raw, RotationParams};
use crate::matrix::{DenseMatrix, RealScalar, SharedMat};
use crate::schedule::RotationSchedule;

/// Which connected component of the orthogonal group to land in.
///
/// With `reflect` set, one fixed column (default 0) is negated after the
/// rotation product, flipping the determinant to -1. The column choice is
/// part of the parametrization contract, so it is explicit here.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OrthogonalConfig {
    pub reflect: bool,
    pub reflect_column: usize,
}

impl OrthogonalConfig {
    /// Plain rotation, `det = +1`.
    pub fn rotation() -> Self {
        Self::default()
    }

    /// Reflection, `det = -1`, negating the given column.
    pub fn reflection(column: usize) -> Self {
        Self {
            reflect: true,
            reflect_column: column,
        }
    }
}

/// Build `U(theta)` from the schedule: the product of all active Givens
/// rotations applied in reversed block order to the identity, then the
/// optional column reflection.
pub fn forward_parallel<F: RealScalar>(
    s: &RotationSchedule,
    theta: &[F],
    cfg: &OrthogonalConfig,
) -> Result<DenseMatrix<F>> {
    if theta.len() != s.active_pair_count() {
        return Err(GivensError::LengthMismatch {
            expected: s.active_pair_count(),
            got: theta.len(),
        });
    }
    if cfg.reflect && cfg.reflect_column >= s.n() {
        return Err(GivensError::IndexOutOfRange {
            what: "reflection column",
            index: cfg.reflect_column,
            bound: s.n(),
        });
    }

    let mut u = DenseMatrix::<F>::identity(s.n());
    apply_blocks_reversed(s, theta, &mut u);
    if cfg.reflect {
        u.negate_col(cfg.reflect_column);
    }
    Ok(u)
}

/// Entry point for restricted schedules (`m_active < n`). Inactive pairs are
/// bypassed inside the block loop, so this is the same computation as
/// [`forward_parallel`]; it exists to make restricted call sites explicit.
pub fn forward_restricted<F: RealScalar>(
    s: &RotationSchedule,
    theta: &[F],
    cfg: &OrthogonalConfig,
) -> Result<DenseMatrix<F>> {
    forward_parallel(s, theta, cfg)
}

pub(crate) fn apply_blocks_reversed<F: RealScalar>(
    s: &RotationSchedule,
    theta: &[F],
    u: &mut DenseMatrix<F>,
) {
    let shared = SharedMat::new(u);
    for k in (0..s.num_blocks()).rev() {
        // rotations in one block touch disjoint row pairs: safe to run
        // concurrently, bitwise independent of the execution order
        s.active_in_block(k).par_iter().for_each(|ap| {
            let p = RotationParams::from_angle(theta[ap.flat as usize]);
            unsafe { rotate_rows_raw(&shared, ap.i as usize, ap.j as usize, p.cos, p.sin) };
        });
        // the par_iter ends with an implicit barrier before the next block
    }
}

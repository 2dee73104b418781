//! Deterministic summation.
//!
//! The backward pass's only reduction (row sums of the scratch matrix) uses
//! a fixed-shape pairwise tree: the split points depend only on the slice
//! length, never on worker count or scheduling, so gradients are bitwise
//! reproducible. Accuracy-wise pairwise summation also beats left-to-right
//! accumulation, carrying O(log n) rounding growth instead of O(n).

use crate::matrix::RealScalar;

const PAIRWISE_BASE: usize = 32;

/// Fixed-shape pairwise sum of a slice.
pub fn pairwise_sum<F: RealScalar>(xs: &[F]) -> F {
    if xs.len() <= PAIRWISE_BASE {
        let mut acc = F::zero();
        for &x in xs {
            acc = acc + x;
        }
        acc
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

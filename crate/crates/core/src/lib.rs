//! Block-parallel construction and differentiation of Givens-angle-parametrized
//! orthogonal and unitary matrices.
//!
//! An `n x n` rotation matrix can be written as a product of `n(n-1)/2`
//! elementary Givens rotations, one per coordinate pair `(i, j)`. Arranged in
//! an arbitrary order that product is inherently sequential, but when the
//! pairs are grouped round-robin style (the circle method used to schedule
//! all-against-all tournaments, equivalently an optimal edge coloring of the
//! complete graph), the rotations fall into `n - 1` blocks of `n/2` pairwise
//! disjoint rotations. Rotations within a block commute and can run
//! concurrently, so the matrix is built in `O(n)` parallel steps and the loss
//! gradient with respect to all angles in `O(n log n)` parallel steps.
//!
//! The main entry points:
//!
//! * [`schedule::build_circle_schedule`] — round-robin block schedules, with
//!   odd-dimension augmentation and the restricted (`i < m`) parametrization.
//! * [`forward::forward_parallel`] — build `U(theta)` from a schedule and an
//!   angle vector; optional column reflection for the `det = -1` component.
//! * [`backward::jvp_parallel`] — gradient of a scalar loss with respect to
//!   the angles, given the upstream matrix gradient.
//! * [`unitary`] — the complex extension with per-pair phase factors and
//!   gradients in both the rotation and phase angles.
//! * [`oracles`] — slow, independent reference implementations used as
//!   ground truth in tests and verification.
//!
//! Results are bitwise deterministic: worker count and scheduling never
//! change a single bit of any output. See the crate README for the contract.

pub mod backward;
pub mod error;
pub mod forward;
pub mod kernels;
pub mod matrix;
pub mod oracles;
pub mod params;
pub mod reduce;
pub mod schedule;
pub mod unitary;

pub use backward::{jvp_parallel, jvp_with_reflection, jvp_with_workspace, BackwardWorkspace, GradientResult};
pub use error::{GivensError, Result};
pub use forward::{forward_parallel, forward_restricted, OrthogonalConfig};
pub use matrix::{Complex64, DenseMatrix, RealScalar, Scalar};
pub use params::{AngleSet, PhaseSet};
pub use schedule::{
    build_circle_schedule, pair_index_map, validate_schedule, CoordinatePair, PairIndexMap,
    RotationSchedule, ValidationReport,
};
pub use unitary::{forward_unitary, jvp_unitary, ComplexGradientResult};

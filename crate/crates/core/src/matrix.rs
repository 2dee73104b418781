//! Row-major dense matrices over `f32`, `f64`, and `Complex64`.
//!
//! Kernels stream whole rows, so storage is row-major and row access returns
//! contiguous slices. Column-wise updates (the backward sweep's prefix-product
//! maintenance) go through strided element access instead.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub use num_complex::Complex64;
use num_traits::{Float, One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GivensError, Result};

/// Element types the matrix container supports.
pub trait Scalar:
    Copy
    + PartialEq
    + Send
    + Sync
    + std::fmt::Debug
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Complex conjugate; identity for real scalars.
    fn conj_scalar(self) -> Self;
    /// Absolute value / complex modulus as `f64`.
    fn magnitude(self) -> f64;
    /// Raw bit pattern, for bitwise-determinism assertions.
    fn bit_pattern(self) -> u128;
}

impl Scalar for f32 {
    fn conj_scalar(self) -> Self {
        self
    }
    fn magnitude(self) -> f64 {
        self.abs() as f64
    }
    fn bit_pattern(self) -> u128 {
        self.to_bits() as u128
    }
}

impl Scalar for f64 {
    fn conj_scalar(self) -> Self {
        self
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn bit_pattern(self) -> u128 {
        self.to_bits() as u128
    }
}

impl Scalar for Complex64 {
    fn conj_scalar(self) -> Self {
        self.conj()
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn bit_pattern(self) -> u128 {
        ((self.re.to_bits() as u128) << 64) | self.im.to_bits() as u128
    }
}

/// Real scalars (`f32`, `f64`) the orthogonal pipelines are generic over.
/// 64-bit is the default everywhere; 32-bit exists for benchmarking.
pub trait RealScalar: Scalar + Float {}

impl RealScalar for f32 {}
impl RealScalar for f64 {}

/// Row-major `n_rows x n_cols` dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![T::zero(); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.data[k * n + k] = T::one();
        }
        m
    }

    pub fn from_vec(n_rows: usize, n_cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(GivensError::DimensionMismatch(format!(
                "data length {} != {} x {}",
                data.len(),
                n_rows,
                n_cols
            )));
        }
        Ok(Self {
            n_rows,
            n_cols,
            data,
        })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(GivensError::DimensionMismatch(
                "ragged row lengths".to_string(),
            ));
        }
        Ok(Self {
            n_rows,
            n_cols,
            data: rows.concat(),
        })
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    #[inline]
    fn offset(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.n_rows && c < self.n_cols);
        r * self.n_cols + c
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.n_cols..(r + 1) * self.n_cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.n_cols..(r + 1) * self.n_cols]
    }

    /// Disjoint mutable views of rows `i` and `j` (`i != j`).
    pub fn row_pair_mut(&mut self, i: usize, j: usize) -> (&mut [T], &mut [T]) {
        assert!(i != j && i < self.n_rows && j < self.n_rows);
        let w = self.n_cols;
        let (lo, hi) = (i.min(j), i.max(j));
        let (head, tail) = self.data.split_at_mut(hi * w);
        let row_lo = &mut head[lo * w..lo * w + w];
        let row_hi = &mut tail[..w];
        if i < j {
            (row_lo, row_hi)
        } else {
            (row_hi, row_lo)
        }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.n_cols, self.n_rows);
        for r in 0..self.n_rows {
            for c in 0..self.n_cols {
                out.data[c * self.n_rows + r] = self.data[r * self.n_cols + c];
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> Self {
        let mut out = Self::zeros(self.n_cols, self.n_rows);
        for r in 0..self.n_rows {
            for c in 0..self.n_cols {
                out.data[c * self.n_rows + r] = self.data[r * self.n_cols + c].conj_scalar();
            }
        }
        out
    }

    /// Overwrite `self` with `other`. Shapes must match.
    pub fn copy_from(&mut self, other: &Self) {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        self.data.copy_from_slice(&other.data);
    }

    pub fn negate_col(&mut self, c: usize) {
        assert!(c < self.n_cols);
        for r in 0..self.n_rows {
            let k = r * self.n_cols + c;
            self.data[k] = -self.data[k];
        }
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).magnitude())
            .fold(0.0, f64::max)
    }

    /// Exact bit-pattern equality, element by element.
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        (self.n_rows, self.n_cols) == (other.n_rows, other.n_cols)
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(&a, &b)| a.bit_pattern() == b.bit_pattern())
    }
}

impl DenseMatrix<f64> {
    /// Entries drawn i.i.d. uniform from `(lo, hi)`, seeded.
    pub fn random_uniform(n_rows: usize, n_cols: usize, lo: f64, hi: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n_rows * n_cols)
            .map(|_| rng.random_range(lo..hi))
            .collect();
        Self {
            n_rows,
            n_cols,
            data,
        }
    }
}

impl DenseMatrix<f32> {
    pub fn random_uniform_f32(n_rows: usize, n_cols: usize, lo: f32, hi: f32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n_rows * n_cols)
            .map(|_| rng.random_range(lo..hi))
            .collect();
        Self {
            n_rows,
            n_cols,
            data,
        }
    }
}

impl DenseMatrix<Complex64> {
    /// Real and imaginary parts drawn i.i.d. uniform from `(-1, 1)`, seeded.
    pub fn random_complex(n_rows: usize, n_cols: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..n_rows * n_cols)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Self {
            n_rows,
            n_cols,
            data,
        }
    }

    /// Embed a real matrix into the complex field (zero imaginary parts).
    pub fn from_real(m: &DenseMatrix<f64>) -> Self {
        Self {
            n_rows: m.n_rows,
            n_cols: m.n_cols,
            data: m.data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }
}

impl<T: Scalar> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[self.offset(r, c)]
    }
}

impl<T: Scalar> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        let k = self.offset(r, c);
        &mut self.data[k]
    }
}

/// Raw shared view used by the block-parallel kernels.
///
/// Safety contract: concurrent users must touch disjoint row pairs (row
/// kernels) or disjoint column pairs (column kernels). The round-robin
/// schedule guarantees exactly this within a block; a barrier separates
/// blocks.
pub(crate) struct SharedMat<T> {
    ptr: *mut T,
    n_rows: usize,
    n_cols: usize,
}

unsafe impl<T: Send> Send for SharedMat<T> {}
unsafe impl<T: Send> Sync for SharedMat<T> {}

impl<T: Scalar> SharedMat<T> {
    pub(crate) fn new(m: &mut DenseMatrix<T>) -> Self {
        Self {
            ptr: m.data.as_mut_ptr(),
            n_rows: m.n_rows,
            n_cols: m.n_cols,
        }
    }

    #[inline]
    pub(crate) fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub(crate) fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Base pointer of row `r`; callers form slices inside their own unsafe
    /// blocks under the disjointness contract.
    ///
    /// # Safety
    /// `r < n_rows`.
    #[inline]
    pub(crate) unsafe fn row_ptr(&self, r: usize) -> *mut T {
        self.ptr.add(r * self.n_cols)
    }

    /// # Safety
    /// In bounds, and no concurrent access to element `(r, c)`.
    #[inline]
    pub(crate) unsafe fn ptr_at(&self, r: usize, c: usize) -> *mut T {
        self.ptr.add(r * self.n_cols + c)
    }
}

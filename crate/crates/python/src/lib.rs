//! Python bindings for the round-robin Givens library.
//!
//! Exposes the schedule type plus the forward/backward operations with numpy
//! arrays on both sides. Build with the `extension-module` feature and load
//! the resulting cdylib as the module `rrgivens` (see `python/smoke_test.py`).

use numpy::{PyArray1, PyArray2, PyReadonlyArray1, PyReadonlyArray2, PyUntypedArrayMethods};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use rrgivens::oracles::forward_sequential;
use rrgivens::{
    build_circle_schedule, forward_parallel, forward_unitary, jvp_parallel, jvp_unitary,
    jvp_with_reflection, validate_schedule, AngleSet, Complex64, CoordinatePair, DenseMatrix,
    GivensError, OrthogonalConfig, RotationSchedule,
};

type GradientPair<'py> = (Bound<'py, PyArray1<f64>>, Bound<'py, PyArray1<f64>>);

fn value_err(e: GivensError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn angles_from(theta: &PyReadonlyArray1<'_, f64>) -> PyResult<Vec<f64>> {
    Ok(theta
        .as_slice()
        .map_err(|_| PyValueError::new_err("angle array must be contiguous"))?
        .to_vec())
}

fn matrix_from<T: numpy::Element + Copy + rrgivens::Scalar>(
    arr: &PyReadonlyArray2<'_, T>,
    name: &str,
) -> PyResult<DenseMatrix<T>> {
    let shape = arr.shape();
    let data = arr
        .as_slice()
        .map_err(|_| PyValueError::new_err(format!("{name} must be C-contiguous")))?;
    DenseMatrix::from_vec(shape[0], shape[1], data.to_vec()).map_err(value_err)
}

fn matrix_to<'py, T: numpy::Element + Copy + rrgivens::Scalar>(
    py: Python<'py>,
    m: &DenseMatrix<T>,
) -> PyResult<Bound<'py, PyArray2<T>>> {
    let rows: Vec<Vec<T>> = (0..m.n_rows()).map(|r| m.row(r).to_vec()).collect();
    PyArray2::from_vec2(py, &rows).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Round-robin block schedule of coordinate pairs for dimension `n`.
#[pyclass(name = "Schedule", module = "rrgivens")]
struct Schedule {
    inner: RotationSchedule,
}

#[pymethods]
impl Schedule {
    /// Build the circle-method schedule.
    ///
    /// Args:
    ///     n: matrix dimension (>= 2, may be odd).
    ///     m: optional restriction bound; keeps only pairs with i < m.
    ///     permutation: optional seed permutation of 0..n_effective.
    #[new]
    #[pyo3(signature = (n, m=None, permutation=None))]
    fn new(n: usize, m: Option<usize>, permutation: Option<Vec<usize>>) -> PyResult<Self> {
        let inner =
            build_circle_schedule(n, permutation.as_deref(), m.unwrap_or(n)).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn n_effective(&self) -> usize {
        self.inner.n_effective()
    }

    #[getter]
    fn m_active(&self) -> usize {
        self.inner.m_active()
    }

    #[getter]
    fn num_blocks(&self) -> usize {
        self.inner.num_blocks()
    }

    /// Number of active pairs == length of the angle vectors.
    #[getter]
    fn active_pair_count(&self) -> usize {
        self.inner.active_pair_count()
    }

    /// All blocks as lists of (i, j) tuples, inactive pairs included.
    fn blocks(&self) -> Vec<Vec<(usize, usize)>> {
        self.inner
            .blocks()
            .iter()
            .map(|b| b.iter().map(|e| (e.i, e.j)).collect())
            .collect()
    }

    /// Line-oriented export: one block per line, pairs as "i-j", inactive
    /// pairs marked with '*'.
    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    /// Run the structural checks; returns (name, passed, detail) triples.
    fn validate(&self) -> Vec<(String, bool, String)> {
        validate_schedule(&self.inner)
            .checks
            .into_iter()
            .map(|c| (c.name.to_string(), c.passed, c.detail))
            .collect()
    }

    /// Flat parameter index of pair (i, j), or None if the pair is inactive.
    fn flat_index(&self, i: usize, j: usize) -> PyResult<Option<usize>> {
        let e = CoordinatePair::new(i, j).map_err(value_err)?;
        Ok(rrgivens::pair_index_map(&self.inner).flat_index(e))
    }

    /// Derive the pair at (block, slot) without reading the block lists.
    fn pair_at(&self, block: usize, slot: usize) -> PyResult<(usize, usize)> {
        if block >= self.inner.num_blocks() || slot >= self.inner.n_effective() / 2 {
            return Err(PyValueError::new_err("block or slot out of range"));
        }
        let e = self.inner.pair_at(block, slot);
        Ok((e.i, e.j))
    }

    fn __repr__(&self) -> String {
        format!(
            "Schedule(n={}, m_active={}, blocks={}, active_pairs={})",
            self.inner.n(),
            self.inner.m_active(),
            self.inner.num_blocks(),
            self.inner.active_pair_count()
        )
    }
}

/// Seeded uniform draws on (-pi, pi), one angle per active pair.
#[pyfunction]
fn random_angles<'py>(
    py: Python<'py>,
    schedule: &Schedule,
    seed: u64,
) -> Bound<'py, PyArray1<f64>> {
    PyArray1::from_vec(py, AngleSet::random_uniform(&schedule.inner, seed).into_vec())
}

/// Build the orthogonal matrix U(theta); optionally negate one column to
/// land in the det = -1 component.
#[pyfunction]
#[pyo3(signature = (schedule, theta, reflect=false, reflect_column=0))]
fn forward<'py>(
    py: Python<'py>,
    schedule: &Schedule,
    theta: PyReadonlyArray1<'py, f64>,
    reflect: bool,
    reflect_column: usize,
) -> PyResult<Bound<'py, PyArray2<f64>>> {
    let theta = angles_from(&theta)?;
    let cfg = OrthogonalConfig {
        reflect,
        reflect_column,
    };
    let u = forward_parallel(&schedule.inner, &theta, &cfg).map_err(value_err)?;
    matrix_to(py, &u)
}

/// Single-threaded reference construction (same bits as `forward`).
#[pyfunction]
fn forward_reference<'py>(
    py: Python<'py>,
    schedule: &Schedule,
    theta: PyReadonlyArray1<'py, f64>,
) -> PyResult<Bound<'py, PyArray2<f64>>> {
    let theta = angles_from(&theta)?;
    let u = forward_sequential(&schedule.inner, &theta).map_err(value_err)?;
    matrix_to(py, &u)
}

/// Gradient of a scalar loss in the angles given the upstream gradient
/// `gamma[k, l] = dL/dU[k, l]`; `u` must be the matching `forward` output.
#[pyfunction]
#[pyo3(signature = (schedule, theta, u, gamma, reflect=false, reflect_column=0))]
fn jvp<'py>(
    py: Python<'py>,
    schedule: &Schedule,
    theta: PyReadonlyArray1<'py, f64>,
    u: PyReadonlyArray2<'py, f64>,
    gamma: PyReadonlyArray2<'py, f64>,
    reflect: bool,
    reflect_column: usize,
) -> PyResult<Bound<'py, PyArray1<f64>>> {
    let theta = angles_from(&theta)?;
    let u = matrix_from(&u, "u")?;
    let gamma = matrix_from(&gamma, "gamma")?;
    let cfg = OrthogonalConfig {
        reflect,
        reflect_column,
    };
    let grad = if reflect {
        jvp_with_reflection(&schedule.inner, &theta, &u, &gamma, &cfg).map_err(value_err)?
    } else {
        jvp_parallel(&schedule.inner, &theta, &u, &gamma).map_err(value_err)?
    };
    Ok(PyArray1::from_vec(py, grad.into_vec()))
}

/// Build the unitary U(theta, phi) with per-pair phase factors.
#[pyfunction]
fn forward_complex<'py>(
    py: Python<'py>,
    schedule: &Schedule,
    theta: PyReadonlyArray1<'py, f64>,
    phi: PyReadonlyArray1<'py, f64>,
) -> PyResult<Bound<'py, PyArray2<Complex64>>> {
    let theta = angles_from(&theta)?;
    let phi = angles_from(&phi)?;
    let u = forward_unitary(&schedule.inner, &theta, &phi).map_err(value_err)?;
    matrix_to(py, &u)
}

/// Gradients of a real loss in both angle families. `gamma` packs
/// dL/dRe(U) + 1j * dL/dIm(U); returns (d_theta, d_phi).
#[pyfunction]
fn jvp_complex<'py>(
    py: Python<'py>,
    schedule: &Schedule,
    theta: PyReadonlyArray1<'py, f64>,
    phi: PyReadonlyArray1<'py, f64>,
    u: PyReadonlyArray2<'py, Complex64>,
    gamma: PyReadonlyArray2<'py, Complex64>,
) -> PyResult<GradientPair<'py>> {
    let theta = angles_from(&theta)?;
    let phi = angles_from(&phi)?;
    let u = matrix_from(&u, "u")?;
    let gamma = matrix_from(&gamma, "gamma")?;
    let grad = jvp_unitary(&schedule.inner, &theta, &phi, &u, &gamma).map_err(value_err)?;
    Ok((
        PyArray1::from_vec(py, grad.d_theta),
        PyArray1::from_vec(py, grad.d_phi),
    ))
}

#[pymodule(name = "rrgivens")]
fn pymodule(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Schedule>()?;
    m.add_function(wrap_pyfunction!(random_angles, m)?)?;
    m.add_function(wrap_pyfunction!(forward, m)?)?;
    m.add_function(wrap_pyfunction!(forward_reference, m)?)?;
    m.add_function(wrap_pyfunction!(jvp, m)?)?;
    m.add_function(wrap_pyfunction!(forward_complex, m)?)?;
    m.add_function(wrap_pyfunction!(jvp_complex, m)?)?;
    Ok(())
}

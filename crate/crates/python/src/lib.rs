//! Python bindings: `import wga`.

use num_complex::Complex64;
use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;

use wga_core::coherent as co;
use wga_core::lattice::{self as la, AmplitudeVector, TruncationWindow};
use wga_core::quadrature::QuadratureSpec;
use wga_core::resolution as res;
use wga_core::specfun::{self as sf, KernelOrder};
use wga_core::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::KernelOverflow { .. } | Error::Divergent(_) => PyOverflowError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn window(n: usize) -> PyResult<TruncationWindow> {
    TruncationWindow::new(n).map_err(err)
}

/// Coherent-state label `(r, theta)`.
#[pyclass(name = "CoherentLabel", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyLabel(co::CoherentLabel);

#[pymethods]
impl PyLabel {
    #[new]
    fn new(r: f64, theta: f64) -> PyResult<Self> {
        co::CoherentLabel::new(r, theta).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_xy(x: f64, y: f64) -> PyResult<Self> {
        co::CoherentLabel::from_xy(x, y).map(Self).map_err(err)
    }

    #[getter]
    fn r(&self) -> f64 {
        self.0.r()
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta()
    }

    /// Amplitudes `J_n(2r) e^{i n theta}` for `n = -N..=N`.
    #[pyo3(signature = (n_window=None))]
    fn coeffs(&self, n_window: Option<usize>) -> PyResult<Vec<Complex64>> {
        let w = match n_window {
            Some(n) => window(n)?,
            None => TruncationWindow::for_argument(2.0 * self.0.r()),
        };
        Ok(co::coherent_coeffs(self.0, w).map_err(err)?.into_coeffs())
    }

    fn __repr__(&self) -> String {
        format!("CoherentLabel(r={}, theta={})", self.0.r(), self.0.theta())
    }
}

/// Polar resolution kernel with coefficients `1/J_n(2 r0)^2`, `|n| <= nk`.
#[pyclass(name = "PolarKernel", frozen)]
struct PyPolarKernel(res::PolarKernel);

#[pymethods]
impl PyPolarKernel {
    #[new]
    fn new(r0: f64, nk: usize) -> PyResult<Self> {
        res::polar_kernel(r0, nk).map(Self).map_err(err)
    }

    #[getter]
    fn r0(&self) -> f64 {
        self.0.r0()
    }

    #[getter]
    fn cutoff(&self) -> usize {
        self.0.cutoff()
    }

    fn coefficient(&self, n: i64) -> PyResult<f64> {
        self.0.coefficient(n).map_err(err)
    }

    fn max_coefficient(&self) -> f64 {
        self.0.max_coefficient()
    }

    fn evaluate(&self, theta: f64) -> PyResult<f64> {
        self.0.evaluate(theta).map_err(err)
    }

    /// `<n|A|m>` by the Fourier path, or on an `nodes`-point grid in
    /// extended precision.
    #[pyo3(signature = (n, m, nodes=None))]
    fn element(&self, n: i64, m: i64, nodes: Option<usize>) -> PyResult<Complex64> {
        match nodes {
            Some(k) => res::polar_roi_element_grid(n, m, &self.0, k),
            None => res::polar_roi_element(n, m, &self.0),
        }
        .map_err(err)
    }

    /// `(value, target, deviation, tail, rounding)` for the overlap check.
    fn overlap(&self, theta: f64, theta_p: f64) -> PyResult<(Complex64, f64, f64, f64, f64)> {
        let o = res::polar_roi_overlap(theta, theta_p, &self.0).map_err(err)?;
        Ok((o.value, o.target, o.deviation, o.tail, o.rounding))
    }
}

#[pyfunction]
fn bessel_j(n: i32, x: f64) -> PyResult<f64> {
    sf::bessel_j(n, x).map_err(err)
}

#[pyfunction]
fn truncation_rule(x: f64) -> usize {
    sf::truncation_rule(x)
}

#[pyfunction]
fn max_admissible_cutoff(r0: f64) -> PyResult<usize> {
    res::max_admissible_cutoff(r0).map_err(err)
}

/// Propagate `amplitudes` (indexed `-N..=N`) to `z`. Returns the final
/// amplitudes and the edge-warning flag.
#[pyfunction]
#[pyo3(signature = (amplitudes, z, theta, engine="analytic", dz=1e-3))]
fn propagate(
    amplitudes: Vec<Complex64>,
    z: f64,
    theta: f64,
    engine: &str,
    dz: f64,
) -> PyResult<(Vec<Complex64>, bool)> {
    if amplitudes.len() % 2 == 0 {
        return Err(PyValueError::new_err("amplitude count must be odd (indices -N..=N)"));
    }
    let state = AmplitudeVector::new(window(amplitudes.len() / 2)?, amplitudes).map_err(err)?;
    let out = match engine {
        "analytic" => la::propagate_analytic(&state, z, theta),
        "ode" => la::propagate_ode(&state, z, theta, dz),
        other => return Err(PyValueError::new_err(format!("unknown engine '{other}'"))),
    }
    .map_err(err)?;
    Ok((out.state.into_coeffs(), out.edge_warning))
}

#[pyfunction]
fn overlap_closed(a: PyLabel, b: PyLabel) -> f64 {
    co::overlap_closed(a.0, b.0)
}

#[pyfunction]
#[pyo3(signature = (a, b, n_window=None))]
fn overlap_sum(a: PyLabel, b: PyLabel, n_window: Option<usize>) -> PyResult<Complex64> {
    let w = match n_window {
        Some(n) => window(n)?,
        None => TruncationWindow::for_argument(2.0 * a.0.r().max(b.0.r())),
    };
    co::overlap_sum(a.0, b.0, w).map_err(err)
}

#[pyfunction]
fn coherent_field(n: i32, x: f64, y: f64) -> Complex64 {
    co::coherent_field(n, x, y)
}

/// `(lhs, rhs, abs_diff)` of the kernel convolution identity for orders
/// `alpha, beta` in `{0, 1/2, 1, 3/2}`.
#[pyfunction]
#[pyo3(signature = (alpha, beta, x, xp, scale=1.0))]
fn convolution_check(alpha: f64, beta: f64, x: f64, xp: f64, scale: f64) -> PyResult<(f64, f64, f64)> {
    let pair = res::KernelPair::new(KernelOrder::new(alpha).map_err(err)?, KernelOrder::new(beta).map_err(err)?, scale)
        .map_err(err)?;
    let r = res::convolution_identity_check(&pair, x, xp).map_err(err)?;
    Ok((r.lhs, r.rhs, r.abs_diff))
}

/// Cartesian resolution element `<n|A|m>`; `weights` is `"reference"` or `"unit"`.
#[pyfunction]
#[pyo3(signature = (n, m, weights="reference", nodes=64))]
fn cartesian_element(n: i64, m: i64, weights: &str, nodes: usize) -> PyResult<Complex64> {
    let w = match weights {
        "reference" => res::CartesianWeights::reference(),
        "unit" => res::CartesianWeights::unit(),
        other => return Err(PyValueError::new_err(format!("unknown weights '{other}'"))),
    };
    let q = QuadratureSpec::gauss(nodes, 1);
    Ok(res::cartesian_roi_element(n, m, res::RoiMethod::Spectral, &q, &w).map_err(err)?.value)
}

#[pyfunction]
fn naive_diag(n: i64, lambda: f64) -> PyResult<f64> {
    res::naive_diag_closed(n, lambda).map_err(err)
}

#[pyfunction]
fn naive_diag_quadrature(n: i64, lambda: f64, half_width: f64) -> PyResult<f64> {
    res::naive_diag_quadrature(n, lambda, half_width).map_err(err)
}

#[pymodule]
fn wga(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLabel>()?;
    m.add_class::<PyPolarKernel>()?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(truncation_rule, m)?)?;
    m.add_function(wrap_pyfunction!(max_admissible_cutoff, m)?)?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(overlap_closed, m)?)?;
    m.add_function(wrap_pyfunction!(overlap_sum, m)?)?;
    m.add_function(wrap_pyfunction!(coherent_field, m)?)?;
    m.add_function(wrap_pyfunction!(convolution_check, m)?)?;
    m.add_function(wrap_pyfunction!(cartesian_element, m)?)?;
    m.add_function(wrap_pyfunction!(naive_diag, m)?)?;
    m.add_function(wrap_pyfunction!(naive_diag_quadrature, m)?)?;
    Ok(())
}

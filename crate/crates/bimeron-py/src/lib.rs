//! Python bindings: grids, ansatz fields, energies, degree, minimization,
//! and the closed-form evaluators.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use bimeron::ansatz::{cutoff_field_map, AnsatzParams};
use bimeron::energy::{energy_s2, lattice_degree, EnergyBreakdown, EnergyParams};
use bimeron::error::BimeronError;
use bimeron::experiments::core_radius;
use bimeron::grid::{make_grid, sample_field, DomainKind, SphereField};
use bimeron::io::{load_sphere_field, save_sphere_field};
use bimeron::minimize::{minimize_s2, SolveConfig};

fn to_py_err(e: BimeronError) -> PyErr {
    match e {
        BimeronError::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_kind(kind: &str) -> PyResult<DomainKind> {
    kind.parse().map_err(to_py_err)
}

/// A lattice domain (disk or torus).
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Grid {
    inner: std::sync::Arc<bimeron::grid::DomainGrid>,
}

#[pymethods]
impl Grid {
    #[new]
    fn new(kind: &str, n: usize) -> PyResult<Self> {
        let g = make_grid(parse_kind(kind)?, n).map_err(to_py_err)?;
        Ok(Grid { inner: g })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.h
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind.to_string()
    }

    fn active_count(&self) -> usize {
        self.inner.active_count()
    }

    fn __repr__(&self) -> String {
        format!("Grid(kind='{}', n={}, h={})", self.inner.kind, self.inner.n, self.inner.h)
    }
}

/// A unit 3-vector field on a grid.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
struct Field {
    inner: SphereField,
}

#[pymethods]
impl Field {
    #[getter]
    fn grid(&self) -> Grid {
        Grid {
            inner: self.inner.grid.clone(),
        }
    }

    /// Flat row-major values [m1, m2, m3] * n^2.
    fn values(&self) -> Vec<f64> {
        self.inner.values.iter().flatten().copied().collect()
    }

    fn value_at(&self, i: usize, j: usize) -> PyResult<(f64, f64, f64)> {
        let n = self.inner.grid.n;
        if i >= n || j >= n {
            return Err(PyValueError::new_err(format!("index ({i},{j}) out of range")));
        }
        let v = self.inner.values[j * n + i];
        Ok((v[0], v[1], v[2]))
    }

    fn save(&self, path: &str) -> PyResult<()> {
        save_sphere_field(std::path::Path::new(path), &self.inner).map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Field(kind='{}', n={})",
            self.inner.grid.kind, self.inner.grid.n
        )
    }
}

fn breakdown_dict<'py>(py: Python<'py>, b: &EnergyBreakdown) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("exchange", b.exchange)?;
    d.set_item("dmi", b.dmi)?;
    d.set_item("anisotropy", b.anisotropy)?;
    d.set_item("total", b.total)?;
    d.set_item("degree", b.degree)?;
    d.set_item("degree_real", b.degree_real)?;
    d.set_item("grad_sup", b.grad_sup)?;
    Ok(d)
}

/// Sample the cut-off bimeron ansatz on a grid.
#[pyfunction]
#[pyo3(signature = (grid, a, r_cut, c_phase=0.0, z0=None))]
fn sample_ansatz(
    grid: &Grid,
    a: f64,
    r_cut: f64,
    c_phase: f64,
    z0: Option<(f64, f64)>,
) -> PyResult<Field> {
    let center = z0.map(|(x, y)| [x, y]).unwrap_or(match grid.inner.kind {
        DomainKind::Disk => [0.0, 0.0],
        DomainKind::Torus => [0.5, 0.5],
    });
    let p = AnsatzParams::new(a, r_cut, c_phase, center).map_err(to_py_err)?;
    let phase = (grid.inner.kind == DomainKind::Disk).then_some(c_phase);
    let f = sample_field(grid.inner.clone(), |x, y| cutoff_field_map(x, y, &p), phase)
        .map_err(to_py_err)?;
    Ok(Field { inner: f })
}

/// Uniform in-plane field with the given phase.
#[pyfunction]
fn constant_field(grid: &Grid, phase: f64) -> Field {
    Field {
        inner: SphereField::constant(grid.inner.clone(), phase),
    }
}

#[pyfunction]
fn load_field(path: &str) -> PyResult<Field> {
    Ok(Field {
        inner: load_sphere_field(std::path::Path::new(path)).map_err(to_py_err)?,
    })
}

/// Energy breakdown of the chiral easy-plane functional.
#[pyfunction]
fn energy<'py>(py: Python<'py>, field: &Field, lambda: f64, eps: f64) -> PyResult<Bound<'py, PyDict>> {
    let p = EnergyParams::full_s2(lambda, eps).map_err(to_py_err)?;
    let b = energy_s2(&field.inner, &p).map_err(to_py_err)?;
    breakdown_dict(py, &b)
}

/// Lattice topological charge: (integer, pre-rounding value).
#[pyfunction]
fn degree(field: &Field) -> PyResult<(i64, f64)> {
    lattice_degree(&field.inner).map_err(to_py_err)
}

/// Projected-gradient minimization; returns (field, report dict).
#[pyfunction]
#[pyo3(signature = (field, lambda, eps, max_iters=20000, tol=1e-6, seed=0))]
fn minimize<'py>(
    py: Python<'py>,
    field: &Field,
    lambda: f64,
    eps: f64,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> PyResult<(Field, Bound<'py, PyDict>)> {
    let p = EnergyParams::full_s2(lambda, eps).map_err(to_py_err)?;
    let cfg = SolveConfig {
        max_iters,
        tol,
        seed,
        ..Default::default()
    };
    let (out, rep) = minimize_s2(&field.inner, &p, &cfg).map_err(to_py_err)?;
    let d = breakdown_dict(py, &rep.final_energy)?;
    d.set_item("iters", rep.iters)?;
    d.set_item("converged", rep.converged)?;
    d.set_item("sector_escape", rep.sector_escape)?;
    Ok((Field { inner: out }, d))
}

/// Core radius report as a dict.
#[pyfunction]
#[pyo3(signature = (field, eps, delta0=0.7))]
fn core_report<'py>(py: Python<'py>, field: &Field, eps: f64, delta0: f64) -> PyResult<Bound<'py, PyDict>> {
    let c = core_radius(&field.inner, eps, delta0).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("r_core", c.r_core)?;
    d.set_item("x_core", (c.x_core[0], c.x_core[1]))?;
    d.set_item("core_energy", c.core_energy)?;
    d.set_item("delta0", c.delta0)?;
    Ok(d)
}

#[pyfunction]
fn stereographic(y1: f64, y2: f64) -> (f64, f64, f64) {
    let m = bimeron::ansatz::stereographic([y1, y2]);
    (m[0], m[1], m[2])
}

#[pyfunction]
fn disk_energy_closed_form(r: f64, a: f64, lambda: f64, eps: f64) -> PyResult<f64> {
    bimeron::ansatz::disk_energy_closed_form(r, a, lambda, eps).map_err(to_py_err)
}

#[pyfunction]
fn offset_disk_energy(r: f64, z0_mag: f64, a: f64) -> PyResult<f64> {
    bimeron::ansatz::offset_disk_energy(r, z0_mag, a).map_err(to_py_err)
}

/// (a_over_eps, bound) of the almost-conformal trial parametrization.
#[pyfunction]
fn optimal_upper_bound(lambda: f64) -> PyResult<(f64, f64)> {
    bimeron::ansatz::optimal_upper_bound(lambda).map_err(to_py_err)
}

#[pymodule]
fn bimeron_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Grid>()?;
    m.add_class::<Field>()?;
    m.add_function(wrap_pyfunction!(sample_ansatz, m)?)?;
    m.add_function(wrap_pyfunction!(constant_field, m)?)?;
    m.add_function(wrap_pyfunction!(load_field, m)?)?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add_function(wrap_pyfunction!(degree, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(core_report, m)?)?;
    m.add_function(wrap_pyfunction!(stereographic, m)?)?;
    m.add_function(wrap_pyfunction!(disk_energy_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(offset_disk_energy, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_upper_bound, m)?)?;
    Ok(())
}

//! Python bindings for the level-width library.

use levelwidth_core::dipole::{self, DipoleMethod};
use levelwidth_core::dos::{self, ContourOptions, DampedOscillator};
use levelwidth_core::scaling::{self, PrefactorReport, DEFAULT_GRID, DEFAULT_LMAX};
use levelwidth_core::verify;
use levelwidth_core::widths::{self, BathKind, BathSpec};
use levelwidth_core::wkb::{self, Quantization};
use levelwidth_core::{classical, Error, PotentialSpec};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn method(name: Option<&str>, p: &PotentialSpec) -> PyResult<DipoleMethod> {
    match name {
        None if p.is_analytic() => Ok(DipoleMethod::Exact),
        None => Ok(DipoleMethod::Semiclassical),
        Some("exact") => Ok(DipoleMethod::Exact),
        Some("semiclassical") => Ok(DipoleMethod::Semiclassical),
        Some(other) => Err(PyValueError::new_err(format!("unknown method '{other}'"))),
    }
}

/// A confining potential, e.g. `Potential("powerlaw:A=1,alpha=4")`.
#[pyclass(name = "Potential", frozen, from_py_object)]
#[derive(Clone)]
struct PyPotential(PotentialSpec);

#[pymethods]
impl PyPotential {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        spec.parse().map(PyPotential).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Potential('{}')", self.0)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    #[getter]
    fn maslov_offset(&self) -> f64 {
        wkb::maslov_offset(&self.0)
    }

    fn turning_points(&self, energy: f64) -> PyResult<(f64, f64)> {
        self.0.turning_points(energy).map_err(py_err)
    }

    fn period(&self, energy: f64) -> PyResult<f64> {
        classical::period(&self.0, energy).map_err(py_err)
    }

    fn action(&self, energy: f64) -> PyResult<f64> {
        classical::action(&self.0, energy).map_err(py_err)
    }

    /// E_0..=E_levels; `method` is "exact", "semiclassical" or None for the natural choice.
    #[pyo3(signature = (levels, method=None))]
    fn energies(&self, levels: usize, method: Option<&str>) -> PyResult<Vec<f64>> {
        let how = match method {
            None => Quantization::Auto,
            Some("exact") => Quantization::Exact,
            Some("semiclassical") => Quantization::Wkb,
            Some(other) => return Err(PyValueError::new_err(format!("unknown method '{other}'"))),
        };
        let s = wkb::quantize(&self.0, levels, how).map_err(py_err)?;
        Ok(s.levels.into_iter().map(|l| l.1).collect())
    }

    /// [(l, d_{n,n-l})] for l = 1..=l_max (default n).
    #[pyo3(signature = (n, l_max=None, method=None))]
    fn dipoles(&self, n: usize, l_max: Option<usize>, method: Option<&str>) -> PyResult<Vec<(usize, f64)>> {
        let m = self::method(method, &self.0)?;
        Ok(dipole::dipole_table(&self.0, n, l_max.unwrap_or(n), m).map_err(py_err)?.entries)
    }

    /// Γ_1..=Γ_levels for an ohmic bath of strength gamma.
    ///
    /// `bath` is "ohmic", "drude:<wc>" or "power:<s>" (J = Mγω^s).
    #[pyo3(signature = (gamma, levels, method=None, bath="ohmic", l_max=None))]
    fn widths(&self, gamma: f64, levels: usize, method: Option<&str>, bath: &str, l_max: Option<usize>) -> PyResult<Vec<f64>> {
        let m = self::method(method, &self.0)?;
        let mass = self.0.mass();
        let num = |v: &str| v.parse::<f64>().map_err(|e| PyValueError::new_err(format!("bad bath parameter '{v}': {e}")));
        let kind = match bath.split_once(':') {
            None if bath == "ohmic" => BathKind::Ohmic,
            Some(("drude", v)) => BathKind::OhmicDrude { omega_c: num(v)? },
            Some(("power", v)) => BathKind::Power { s: num(v)?, prefactor: mass * gamma },
            _ => return Err(PyValueError::new_err(format!("unknown bath '{bath}'"))),
        };
        let b = BathSpec::new(kind, gamma, mass).map_err(py_err)?;
        let (_, reports) = widths::width_series(&self.0, &b, levels, m, l_max).map_err(py_err)?;
        Ok(reports.into_iter().map(|r| r.gamma_n).collect())
    }
}

fn report_dict<'py>(py: Python<'py>, r: &PrefactorReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("alpha", r.alpha)?;
    d.set_item("wall", r.wall)?;
    d.set_item("c", r.c)?;
    d.set_item("c_err", r.c_err)?;
    d.set_item("c_raw", r.c_raw)?;
    d.set_item("l_max", r.l_max)?;
    d.set_item("tail_exponent", r.tail.map(|t| t.exponent()))?;
    Ok(d)
}

/// Universal prefactor c(α) of Γ_n ≈ c γ n.
#[pyfunction]
#[pyo3(signature = (alpha, wall=false, l_max=DEFAULT_LMAX))]
fn width_prefactor(py: Python<'_>, alpha: f64, wall: bool, l_max: usize) -> PyResult<Bound<'_, PyDict>> {
    let r = py.detach(|| scaling::width_prefactor(alpha, wall || alpha < 0.0, l_max)).map_err(py_err)?;
    report_dict(py, &r)
}

#[pyfunction]
#[pyo3(signature = (grid=None, wall=false, l_max=DEFAULT_LMAX))]
fn scan_alpha(py: Python<'_>, grid: Option<Vec<f64>>, wall: bool, l_max: usize) -> PyResult<Vec<Bound<'_, PyDict>>> {
    let grid = grid.unwrap_or_else(|| DEFAULT_GRID.to_vec());
    let rs = py.detach(|| scaling::scan_alpha(&grid, wall, l_max));
    rs.into_iter().map(|r| report_dict(py, &r.map_err(py_err)?)).collect()
}

/// Z(β) of the damped oscillator (ħ = 1).
#[pyfunction]
#[pyo3(signature = (beta, gamma=0.2, omega_c=dos::DEFAULT_CUTOFF, omega0=1.0))]
fn partition_function(beta: f64, gamma: f64, omega_c: f64, omega0: f64) -> PyResult<f64> {
    let osc = DampedOscillator::new(omega0, gamma, omega_c).map_err(py_err)?;
    dos::partition_function(&osc, beta, None).map_err(py_err)
}

/// (rho, error) on energies measured from the ground state.
#[pyfunction]
#[pyo3(signature = (energies, gamma=0.2, omega_c=dos::DEFAULT_CUTOFF, omega0=1.0))]
fn density_of_states(
    py: Python<'_>,
    energies: Vec<f64>,
    gamma: f64,
    omega_c: f64,
    omega0: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let osc = DampedOscillator::new(omega0, gamma, omega_c).map_err(py_err)?;
    let c = py.detach(|| dos::inverse_laplace_dos(&osc, &energies, ContourOptions::default())).map_err(py_err)?;
    Ok((c.rho, c.error))
}

/// [(id, title, passed)] for the reference checks (slow: about a minute).
#[pyfunction]
fn run_checks(py: Python<'_>) -> Vec<(u8, String, bool)> {
    py.detach(verify::run_numeric).into_iter().map(|o| (o.id, o.title.clone(), o.passed())).collect()
}

#[pymodule]
fn levelwidth(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPotential>()?;
    m.add_function(wrap_pyfunction!(width_prefactor, m)?)?;
    m.add_function(wrap_pyfunction!(scan_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(partition_function, m)?)?;
    m.add_function(wrap_pyfunction!(density_of_states, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}

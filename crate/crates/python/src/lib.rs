//! Python bindings: `import vortex_wigner`.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict};

use vortex_wigner::config::Config;
use vortex_wigner::io::{export_grid, GridSpec};
use vortex_wigner::observables::{moment_report, MomentSource};
use vortex_wigner::oracle::{wigner_oracle_fermion, wigner_oracle_scalar, Conjugation, OracleSettings, OracleValue};
use vortex_wigner::spinors::Spin;
use vortex_wigner::verify::{self, Suite};
use vortex_wigner::wavepacket::{amp_momentum, amp_position, radial_zero_count};
use vortex_wigner::wigner::{wigner_closed, wigner_closed_with};
use vortex_wigner::{Boost, Exponent, PhasePoint, Vec3, WignerForm};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_form(form: &str) -> PyResult<WignerForm> {
    form.parse().map_err(value_error)
}

fn parse_exponent(exponent: &str) -> PyResult<Exponent> {
    match exponent {
        "paraxial" => Ok(Exponent::Paraxial),
        "covariant" => Ok(Exponent::Covariant),
        "local_velocity" => Ok(Exponent::LocalVelocity),
        other => Err(value_error(format!("unknown exponent `{other}`"))),
    }
}

fn oracle_dict<'py>(py: Python<'py>, v: &OracleValue) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("value", v.value)?;
    d.set_item("imag", v.imag)?;
    d.set_item("error_estimate", v.error_estimate)?;
    d.set_item("order", v.order)?;
    d.set_item("converged", v.converged)?;
    Ok(d)
}

/// Phase-space point (rho, phi_r, z, p_perp, phi_p, p_z, t) in units of 1/m and m.
type Point = (f64, f64, f64, f64, f64, f64, f64);

fn point(p: Point) -> PhasePoint {
    PhasePoint::new(p.0, p.1, p.2, p.3, p.4, p.5, p.6)
}

fn unpoint(p: &PhasePoint) -> Point {
    (p.rho, p.phi_r, p.z, p.p_perp, p.phi_p, p.p_z, p.t)
}

/// A Laguerre-Gaussian packet (ℓ, n_r) of width σ and mean momentum p̄ along z.
#[pyclass(name = "PacketSpec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPacketSpec {
    inner: vortex_wigner::PacketSpec,
}

#[pymethods]
impl PyPacketSpec {
    #[new]
    #[pyo3(signature = (sigma_over_m, pbar_over_m=1.0, ell=0, n_r=0, mass=1.0))]
    fn new(sigma_over_m: f64, pbar_over_m: f64, ell: i32, n_r: u32, mass: f64) -> PyResult<Self> {
        let inner = vortex_wigner::PacketSpec::new(mass, sigma_over_m * mass, pbar_over_m * mass, ell, n_r)
            .map_err(value_error)?;
        Ok(Self { inner })
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.inner.mass()
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma()
    }

    #[getter]
    fn pbar(&self) -> f64 {
        self.inner.pbar()
    }

    #[getter]
    fn ell(&self) -> i32 {
        self.inner.ell()
    }

    #[getter]
    fn n_r(&self) -> u32 {
        self.inner.n_r()
    }

    #[getter]
    fn eps_bar(&self) -> f64 {
        self.inner.eps_bar()
    }

    #[getter]
    fn u_bar(&self) -> f64 {
        self.inner.u_bar()
    }

    /// Diffraction time ε̄/σ².
    #[getter]
    fn t_d(&self) -> f64 {
        self.inner.t_d()
    }

    fn with_mode(&self, ell: i32, n_r: u32) -> Self {
        Self { inner: self.inner.with_mode(ell, n_r) }
    }

    fn amp_momentum<'py>(&self, python: Python<'py>, px: f64, py: f64, pz: f64) -> Bound<'py, PyComplex> {
        let v = amp_momentum(&self.inner, Vec3::new(px, py, pz)).value;
        PyComplex::from_doubles(python, v.re, v.im)
    }

    fn amp_position<'py>(&self, py: Python<'py>, x: f64, y: f64, z: f64, t: f64) -> Bound<'py, PyComplex> {
        let v = amp_position(&self.inner, Vec3::new(x, y, z), t).value;
        PyComplex::from_doubles(py, v.re, v.im)
    }

    /// Closed-form Wigner function at a point.
    #[pyo3(signature = (pt, form="momentum", exponent="paraxial"))]
    fn wigner(&self, pt: Point, form: &str, exponent: &str) -> PyResult<f64> {
        let (form, exponent) = (parse_form(form)?, parse_exponent(exponent)?);
        Ok(wigner_closed_with(&self.inner, &point(pt), form, exponent))
    }

    /// Brute-force scalar Wigner integral, or the fermionic one when `spin` is "up" or "down".
    #[pyo3(signature = (pt, order=48, spin=None, conjugation="dirac"))]
    fn oracle<'py>(
        &self,
        py: Python<'py>,
        pt: Point,
        order: usize,
        spin: Option<&str>,
        conjugation: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let settings = OracleSettings { order, max_order: order.max(OracleSettings::default().max_order), ..Default::default() };
        let pt = point(pt);
        let value = match spin {
            None => wigner_oracle_scalar(&self.inner, &pt, &settings),
            Some(s) => {
                let spin = match s {
                    "up" => Spin::Up,
                    "down" => Spin::Down,
                    other => return Err(value_error(format!("unknown spin `{other}`"))),
                };
                let conj = match conjugation {
                    "dirac" => Conjugation::DiracConjugate,
                    "hermitian" => Conjugation::HermitianConjugate,
                    other => return Err(value_error(format!("unknown conjugation `{other}`"))),
                };
                wigner_oracle_fermion(&self.inner, &pt, spin, conj, &settings)
            }
        }
        .map_err(value_error)?;
        oracle_dict(py, &value)
    }

    /// Boosts packet and point along z by `rapidity`.
    fn boost(&self, rapidity: f64, pt: Point) -> PyResult<(Self, Point)> {
        let (spec, moved) = Boost::new(rapidity).apply(&self.inner, &point(pt)).map_err(value_error)?;
        Ok((Self { inner: spec }, unpoint(&moved)))
    }

    /// ⟨ρ⟩, ⟨p⊥⟩, their product and rms values.
    #[pyo3(signature = (source="densities"))]
    fn moments<'py>(&self, py: Python<'py>, source: &str) -> PyResult<Bound<'py, PyDict>> {
        let source = match source {
            "densities" => MomentSource::Densities,
            form => MomentSource::Wigner(parse_form(form)?),
        };
        let r = moment_report(&self.inner, source).map_err(value_error)?;
        let d = PyDict::new(py);
        d.set_item("mean_rho", r.mean_rho)?;
        d.set_item("mean_pperp", r.mean_pperp)?;
        d.set_item("product", r.product)?;
        d.set_item("rms_rho", r.rms_rho)?;
        d.set_item("rms_pperp", r.rms_pperp)?;
        Ok(d)
    }

    fn radial_zero_count(&self) -> usize {
        radial_zero_count(&self.inner)
    }

    fn __repr__(&self) -> String {
        let s = &self.inner;
        format!(
            "PacketSpec(sigma_over_m={}, pbar_over_m={}, ell={}, n_r={}, mass={})",
            s.sigma_over_m(),
            s.pbar() / s.mass(),
            s.ell(),
            s.n_r(),
            s.mass()
        )
    }
}

/// Closed-form values at many points; `points` is a sequence of 7-tuples.
#[pyfunction]
#[pyo3(signature = (spec, points, form="momentum"))]
fn wigner_many(spec: &PyPacketSpec, points: Vec<Point>, form: &str) -> PyResult<Vec<f64>> {
    let form = parse_form(form)?;
    Ok(points.into_iter().map(|p| wigner_closed(&spec.inner, &point(p), form)).collect())
}

fn config_from(text: Option<&str>) -> PyResult<Config> {
    text.map_or_else(|| Ok(Config::default()), |t| Config::parse(t).map_err(value_error))
}

/// Runs a verification suite and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (suite="all", config=None))]
fn verify_suite<'py>(py: Python<'py>, suite: &str, config: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    let suite: Suite = suite.parse().map_err(value_error)?;
    let cfg = config_from(config)?;
    let report = py.detach(|| verify::run(&cfg, suite));
    let text = serde_json::to_string(&report).map_err(value_error)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Writes the CSV grid and JSON sidecar; returns the row count.
#[pyfunction]
#[pyo3(signature = (grid, out, form="momentum", config=None, threads=None))]
fn eval_grid(grid: &str, out: PathBuf, form: &str, config: Option<&str>, threads: Option<usize>) -> PyResult<usize> {
    let grid: GridSpec = grid.parse().map_err(value_error)?;
    let cfg = config_from(config)?;
    let meta = export_grid(&cfg, &grid, parse_form(form)?, &out, threads).map_err(value_error)?;
    Ok(meta.rows)
}

/// Parses config text and returns its canonical `key = value` form.
#[pyfunction]
fn parse_config(text: &str) -> PyResult<String> {
    Ok(config_from(Some(text))?.to_text())
}

#[pymodule(name = "vortex_wigner")]
fn python_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPacketSpec>()?;
    m.add_function(wrap_pyfunction!(wigner_many, m)?)?;
    m.add_function(wrap_pyfunction!(verify_suite, m)?)?;
    m.add_function(wrap_pyfunction!(eval_grid, m)?)?;
    m.add_function(wrap_pyfunction!(parse_config, m)?)?;
    m.add("__version__", vortex_wigner::VERSION)?;
    m.add("SUITES", Suite::EACH.iter().map(|s| s.name()).collect::<Vec<_>>())?;
    Ok(())
}

//! Python bindings: equations, series tables, the integrator and tronquee
//! patches. Structured results come back as plain dicts and lists.

// the pymethods expansion converts PyErr into itself
#![allow(clippy::useless_conversion)]

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use tronquee::dynamics::{jacobian_limit, rhs};
use tronquee::experiments::{build_tronquee, Anchor, ExpOptions, GridSpec, Seeder};
use tronquee::integrate::{integrate_with, make_arc, make_ray, Options};
use tronquee::model::SectorKind;
use tronquee::series::{residual_order, table_for, Backend, ResidualOrder};
use tronquee::{branch, make_equation, sector, EquationSpec, Family, Param, RawParams};

fn err(e: tronquee::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A parameter given as an exact string ("1/3", "1/2+2i") or a number.
#[derive(FromPyObject)]
enum ParamArg {
    Text(String),
    Number(Complex64),
}

impl ParamArg {
    fn param(self) -> PyResult<Param> {
        match self {
            ParamArg::Text(s) => Param::parse(&s).map_err(err),
            ParamArg::Number(z) => Ok(Param::Float(z)),
        }
    }
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<PyObject> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import_bound("json")?.call_method1("loads", (text,))?.unbind())
}

fn kind(s: &str) -> PyResult<SectorKind> {
    match s {
        "existence" | "S" => Ok(SectorKind::Existence),
        "uniqueness" | "Omega" => Ok(SectorKind::Uniqueness),
        _ => Err(PyValueError::new_err(format!("unknown sector kind {s:?}"))),
    }
}

fn param_str(p: &Param) -> String {
    match p {
        Param::Exact(e) => e.to_string(),
        Param::Float(z) => z.to_string(),
    }
}

/// One equation of the family P3 (case i or ii) or P4.
#[pyclass(module = "tronquee_py", frozen)]
struct Equation {
    spec: EquationSpec,
}

#[pymethods]
impl Equation {
    /// P3 with gamma = 1, delta = -1.
    #[staticmethod]
    fn p3i(alpha: ParamArg, beta: ParamArg) -> PyResult<Self> {
        let raw = RawParams::p3(alpha.param()?, beta.param()?);
        Ok(Equation { spec: make_equation(Family::P3i, raw).map_err(err)? })
    }

    /// P3 with alpha = 1, gamma = 0, delta = -1.
    #[staticmethod]
    fn p3ii(beta: ParamArg) -> PyResult<Self> {
        let raw = RawParams::p3(Param::int(1), beta.param()?);
        Ok(Equation { spec: make_equation(Family::P3ii, raw).map_err(err)? })
    }

    #[staticmethod]
    fn p4(kappa0: ParamArg, kappa_inf: ParamArg) -> PyResult<Self> {
        let raw = RawParams::p4(kappa0.param()?, kappa_inf.param()?);
        Ok(Equation { spec: make_equation(Family::P4, raw).map_err(err)? })
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.spec.family().name()
    }

    #[getter]
    fn alpha(&self) -> String {
        param_str(&self.spec.alpha())
    }

    #[getter]
    fn beta(&self) -> String {
        param_str(&self.spec.beta())
    }

    fn __repr__(&self) -> String {
        let ps: Vec<String> = self.spec.free_params().iter().map(|(k, v)| format!("{k}={}", param_str(v))).collect();
        format!("Equation({}, {})", self.family(), ps.join(", "))
    }

    /// Leading data of the formal solution `m` (P4: case 1-4).
    fn branch(&self, py: Python<'_>, m: u32) -> PyResult<PyObject> {
        let b = branch(&self.spec, m).map_err(err)?;
        let d = pyo3::types::PyDict::new_bound(py);
        d.set_item("label", b.label())?;
        d.set_item("a0", param_str(&b.a0))?;
        d.set_item("A0", param_str(&b.big_a0))?;
        d.set_item("step", b.step_f64())?;
        d.set_item("trivial", b.trivial)?;
        Ok(d.into_any().unbind())
    }

    /// `(theta_lo, theta_hi)` of the sector S or Omega.
    #[pyo3(signature = (m, k, kind = "existence"))]
    fn sector(&self, m: u32, k: i32, kind: &str) -> PyResult<(f64, f64)> {
        let s = sector(&self.spec, m, k, self::kind(kind)?, 0.0).map_err(err)?;
        Ok((s.theta_lo(), s.theta_hi()))
    }

    /// Coefficients `a_0..a_N` and `A_0..A_N` as complex numbers.
    #[pyo3(signature = (m, n, backend = "exact"))]
    fn coefficients(&self, m: u32, n: usize, backend: &str) -> PyResult<(Vec<Complex64>, Vec<Complex64>)> {
        let backend: Backend = backend.parse().map_err(err)?;
        let t = table_for(&self.spec, m, n, backend).map_err(err)?;
        Ok((t.a_c64(), t.big_a_c64()))
    }

    /// Exact coefficients as strings; needs exact parameters.
    fn exact_coefficients(&self, m: u32, n: usize) -> PyResult<(Vec<String>, Vec<String>)> {
        let t = table_for(&self.spec, m, n, Backend::Exact).map_err(err)?;
        let (a, b) = t.exact().expect("exact backend");
        Ok((a.iter().map(|c| c.to_string()).collect(), b.iter().map(|c| c.to_string()).collect()))
    }

    /// Order of the first nonvanishing residual coefficient of the
    /// truncated pair, `None` when the truncation is an exact solution.
    fn residual_order(&self, m: u32, n: usize) -> PyResult<Option<i64>> {
        let b = branch(&self.spec, m).map_err(err)?;
        Ok(match residual_order(&self.spec, &b, n).map_err(err)? {
            ResidualOrder::Finite(r) => Some(r),
            ResidualOrder::Infinite => None,
        })
    }

    /// Limit Jacobian, its eigenvalues and the closed forms.
    fn jacobian(&self, py: Python<'_>, m: u32) -> PyResult<PyObject> {
        let b = branch(&self.spec, m).map_err(err)?;
        to_py(py, &jacobian_limit(&self.spec, &b).map_err(err)?)
    }

    /// `(u', U')` of the first-order system.
    fn rhs(&self, x: Complex64, u: Complex64, big_u: Complex64) -> PyResult<(Complex64, Complex64)> {
        rhs(&self.spec, &x, &u, &big_u).map_err(err)
    }

    /// Integrate from `(u0, U0)` along the ray `theta` from `r0` to `r1`, or
    /// along `|x| = r0` to `arc_to` when given.
    #[pyo3(signature = (u0, big_u0, theta, r0, r1 = None, arc_to = None, tol = 1e-12, method = "dopri"))]
    #[allow(clippy::too_many_arguments)]
    fn integrate(
        &self,
        py: Python<'_>,
        u0: Complex64,
        big_u0: Complex64,
        theta: f64,
        r0: f64,
        r1: Option<f64>,
        arc_to: Option<f64>,
        tol: f64,
        method: &str,
    ) -> PyResult<PyObject> {
        let path = match (r1, arc_to) {
            (Some(r1), None) => make_ray(theta, r0, r1),
            (None, Some(t1)) => make_arc(r0, theta, t1),
            _ => return Err(PyValueError::new_err("give exactly one of r1 and arc_to")),
        }
        .map_err(err)?;
        let opts = match method {
            "dopri" => Options::dopri(tol),
            "taylor" => Options::taylor(tol, 20),
            _ => return Err(PyValueError::new_err(format!("unknown method {method:?}"))),
        };
        let spec = self.spec.clone();
        let traj = py.allow_threads(|| integrate_with::<f64>(&spec, &path, [u0, big_u0], &opts)).map_err(err)?;
        to_py(py, &traj)
    }

    /// Tronquee patch on the sector `(m, k)` anchored at radius `r0`, on
    /// `rays` rays and `radii` radii from `r_inner` out to `r0`.
    #[pyo3(signature = (m, k = 0, r0 = 25.0, n = 60, rays = 5, r_inner = None, radii = 8))]
    #[allow(clippy::too_many_arguments)]
    fn tronquee(
        &self,
        py: Python<'_>,
        m: u32,
        k: i32,
        r0: f64,
        n: usize,
        rays: usize,
        r_inner: Option<f64>,
        radii: usize,
    ) -> PyResult<PyObject> {
        let spec = self.spec.clone();
        let patch = py
            .allow_threads(move || {
                let o = ExpOptions::default();
                let seeder = Seeder::new(&spec, m, o.table_order)?;
                let s = sector(&spec, m, k, SectorKind::Existence, 0.0)?;
                let inner = r_inner.unwrap_or(0.5 * r0);
                build_tronquee(&seeder, &s, r0, n.min(o.table_order), &GridSpec::inward(rays, inner, r0, radii), &Anchor::default(), &o)
            })
            .map_err(err)?;
        to_py(py, &patch)
    }
}

/// Run the command-line interface with `args` (without the program name)
/// and return its exit code.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> i32 {
    let argv: Vec<String> = std::iter::once("tronquee".to_string()).chain(args).collect();
    py.allow_threads(|| tronquee::cli::run(argv))
}

#[pymodule]
fn tronquee_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Equation>()?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

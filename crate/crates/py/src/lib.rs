//! Python module `cdpolya`.
//!
//! Urn states cross the boundary as `(white, blue)` tuples, trajectories as
//! lists of `(epoch_time, color, white, blue)` and suite reports as JSON text.
//! Library errors surface as `ValueError`.

use polya_core::analytics as an;
use polya_core::simulate::{self, RandomSource};
use polya_core::verify::{self, SuiteConfig};
use polya_core::UrnState;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: polya_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "ModelParams", frozen, module = "cdpolya")]
struct ModelParams(polya_core::ModelParams);

#[pymethods]
impl ModelParams {
    #[new]
    fn new(a: u64, delta: u64, w0: u64) -> PyResult<Self> {
        polya_core::ModelParams::new(a, delta, w0).map(Self).map_err(err)
    }

    #[getter]
    fn a(&self) -> u64 {
        self.0.a()
    }

    #[getter]
    fn delta(&self) -> u64 {
        self.0.delta()
    }

    #[getter]
    fn w0(&self) -> u64 {
        self.0.w0()
    }

    #[getter]
    fn b0(&self) -> u64 {
        self.0.b0()
    }

    fn __repr__(&self) -> String {
        format!("ModelParams(a={}, delta={}, w0={})", self.0.a(), self.0.delta(), self.0.w0())
    }
}

#[pyclass(name = "GammaLaw", frozen, module = "cdpolya")]
struct GammaLaw(an::GammaLaw);

#[pymethods]
impl GammaLaw {
    #[new]
    fn new(shape: f64, scale: f64) -> PyResult<Self> {
        an::GammaLaw::new(shape, scale).map(Self).map_err(err)
    }

    #[getter]
    fn shape(&self) -> f64 {
        self.0.shape
    }

    #[getter]
    fn scale(&self) -> f64 {
        self.0.scale
    }

    fn mean(&self) -> f64 {
        self.0.mean()
    }

    fn variance(&self) -> f64 {
        self.0.variance()
    }

    fn cdf(&self, x: f64) -> f64 {
        self.0.cdf(x)
    }

    fn mgf(&self, x: f64) -> PyResult<f64> {
        self.0.mgf(x).map_err(err)
    }

    fn quantile(&self, p: f64) -> PyResult<f64> {
        self.0.quantile(p).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("GammaLaw(shape={}, scale={})", self.0.shape, self.0.scale)
    }
}

type Params<'py> = PyRef<'py, ModelParams>;

#[pyfunction]
#[pyo3(signature = (params, t_end, seed, stream_id = 0))]
fn simulate_until(params: Params<'_>, t_end: f64, seed: u64, stream_id: u64) -> PyResult<Vec<(f64, String, u64, u64)>> {
    let traj = simulate::simulate_until(&params.0, t_end, RandomSource::new(seed, stream_id)).map_err(err)?;
    Ok(traj
        .events
        .iter()
        .map(|e| (e.epoch_time, e.color.as_str().to_string(), e.state_after.white, e.state_after.blue))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (params, times, seed, stream_id = 0))]
fn snapshots(params: Params<'_>, times: Vec<f64>, seed: u64, stream_id: u64) -> PyResult<Vec<(u64, u64)>> {
    let states = simulate::snapshots(&params.0, &times, RandomSource::new(seed, stream_id)).map_err(err)?;
    Ok(states.iter().map(|s| (s.white, s.blue)).collect())
}

/// `(white, blue)` at time `t` for streams `0..trials` of `seed`.
#[pyfunction]
fn collect_samples(py: Python<'_>, params: Params<'_>, t: f64, trials: usize, seed: u64) -> PyResult<Vec<(u64, u64)>> {
    let p = params.0;
    let set = py.detach(|| verify::collect_samples(&p, t, trials, seed)).map_err(err)?;
    Ok(set.records)
}

#[pyfunction]
fn mgf_w(params: Params<'_>, t: f64, u: f64) -> PyResult<f64> {
    an::mgf_w(&params.0, t, u).map_err(err)
}

#[pyfunction]
fn ln_mgf_w(params: Params<'_>, t: f64, u: f64) -> PyResult<f64> {
    an::ln_mgf_w(&params.0, t, u).map_err(err)
}

#[pyfunction]
fn joint_mgf(params: Params<'_>, t: f64, u: f64, v: f64) -> PyResult<f64> {
    an::joint_mgf(&params.0, t, u, v).map_err(err)
}

#[pyfunction]
fn mgf_domain_bound(params: Params<'_>, t: f64) -> f64 {
    an::mgf_domain_bound(&params.0, t)
}

#[pyfunction]
fn characteristic_curve(params: Params<'_>, t: f64, u: f64, s: f64) -> PyResult<f64> {
    an::characteristic_curve(&params.0, t, u, s).map_err(err)
}

#[pyfunction]
fn characteristic_drift(a: u64, c: f64) -> f64 {
    an::characteristic_drift(a, c)
}

#[pyfunction]
#[pyo3(signature = (params, t, u, steps = 10_000))]
fn integrate_characteristic_ode(params: Params<'_>, t: f64, u: f64, steps: usize) -> PyResult<f64> {
    an::integrate_characteristic_ode(&params.0, t, u, steps).map_err(err)
}

#[pyfunction]
fn pde_residual(params: Params<'_>, t: f64, u: f64, h: f64) -> PyResult<f64> {
    an::pde_residual(&params.0, t, u, h).map_err(err)
}

#[pyfunction]
fn mean_w(params: Params<'_>, t: f64) -> f64 {
    an::mean_w(&params.0, t)
}

#[pyfunction]
fn var_w(params: Params<'_>, t: f64) -> f64 {
    an::var_w(&params.0, t)
}

#[pyfunction]
fn second_moment_w(params: Params<'_>, t: f64) -> f64 {
    an::second_moment_w(&params.0, t)
}

#[pyfunction]
fn mean_vector(params: Params<'_>, t: f64) -> (f64, f64) {
    an::mean_vector(&params.0, t)
}

#[pyfunction]
fn l1_bound(params: Params<'_>, t: f64) -> f64 {
    an::l1_bound(&params.0, t)
}

#[pyfunction]
fn limit_law(params: Params<'_>) -> GammaLaw {
    GammaLaw(an::limit_law(&params.0))
}

#[pyfunction]
fn martingale_transform(params: Params<'_>, t: f64, white: u64, blue: u64) -> (f64, f64) {
    an::martingale_transform(&params.0, t, &UrnState::new(white, blue, t))
}

/// Default suite configuration as JSON, a starting point for [`run_suite`].
#[pyfunction]
fn default_suite_config() -> String {
    serde_json::to_string_pretty(&SuiteConfig::default()).expect("config serializes")
}

/// Runs the verification suite and returns the report as JSON text.
#[pyfunction]
#[pyo3(signature = (config_json = None))]
fn run_suite(py: Python<'_>, config_json: Option<&str>) -> PyResult<String> {
    let cfg = match config_json {
        Some(text) => serde_json::from_str(text).map_err(|e| PyValueError::new_err(format!("bad suite config: {e}")))?,
        None => SuiteConfig::default(),
    };
    let report = py.detach(|| verify::run_suite(&cfg)).map_err(err)?;
    Ok(report.to_json())
}

#[pymodule]
fn cdpolya(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", polya_core::VERSION)?;
    m.add_class::<ModelParams>()?;
    m.add_class::<GammaLaw>()?;
    m.add_function(wrap_pyfunction!(simulate_until, m)?)?;
    m.add_function(wrap_pyfunction!(snapshots, m)?)?;
    m.add_function(wrap_pyfunction!(collect_samples, m)?)?;
    m.add_function(wrap_pyfunction!(mgf_w, m)?)?;
    m.add_function(wrap_pyfunction!(ln_mgf_w, m)?)?;
    m.add_function(wrap_pyfunction!(joint_mgf, m)?)?;
    m.add_function(wrap_pyfunction!(mgf_domain_bound, m)?)?;
    m.add_function(wrap_pyfunction!(characteristic_curve, m)?)?;
    m.add_function(wrap_pyfunction!(characteristic_drift, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_characteristic_ode, m)?)?;
    m.add_function(wrap_pyfunction!(pde_residual, m)?)?;
    m.add_function(wrap_pyfunction!(mean_w, m)?)?;
    m.add_function(wrap_pyfunction!(var_w, m)?)?;
    m.add_function(wrap_pyfunction!(second_moment_w, m)?)?;
    m.add_function(wrap_pyfunction!(mean_vector, m)?)?;
    m.add_function(wrap_pyfunction!(l1_bound, m)?)?;
    m.add_function(wrap_pyfunction!(limit_law, m)?)?;
    m.add_function(wrap_pyfunction!(martingale_transform, m)?)?;
    m.add_function(wrap_pyfunction!(default_suite_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}

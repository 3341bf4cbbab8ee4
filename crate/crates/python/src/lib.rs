//! Python module `cspin`.
//!
//! ```python
//! import cspin
//! c = cspin.CouplingSet.from_hz([850.0, -410.5, 120.0])
//! spec = c.hamming_intensities(2e-4)
//! print(spec.renyi_s2(), c.fid(2e-4))
//!
//! summary = cspin.run_ensemble(n_realizations=100, master_seed=1)
//! print(summary.s2_mean[-1])
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use cspin_core::dynamics;
use cspin_core::ensemble::{self, EnsembleConfig, TimeGrid};
use cspin_core::entropy;
use cspin_core::error::Error;
use cspin_core::geometry::{self, calibrate_coupling_scale, Orientation};
use cspin_core::oracle;
use cspin_core::output;
use cspin_core::scaling::{self, ScalingOptions};

fn to_py(e: Error) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyOSError::new_err(e.to_string())
    }
}

/// Coupling constants ω_j in rad/s of one bath configuration.
#[pyclass(name = "CouplingSet", module = "cspin", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCouplingSet {
    inner: geometry::CouplingSet,
}

#[pymethods]
impl PyCouplingSet {
    #[new]
    fn new(omegas: Vec<f64>) -> PyResult<Self> {
        geometry::CouplingSet::new(omegas)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    /// From ω/2π values in Hz.
    #[staticmethod]
    fn from_hz(hz: Vec<f64>) -> PyResult<Self> {
        geometry::CouplingSet::from_hz(&hz)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[getter]
    fn omegas(&self) -> Vec<f64> {
        self.inner.omegas().to_vec()
    }

    #[getter]
    fn n_spins(&self) -> usize {
        self.inner.n_spins()
    }

    fn fid(&self, t: f64) -> f64 {
        dynamics::fid(&self.inner, t)
    }

    /// Cluster-size weights p_m for m = 0..N.
    fn cluster_weights(&self, t: f64) -> Vec<f64> {
        dynamics::cluster_weights(&self.inner, t).weights
    }

    fn hamming_intensities(&self, t: f64) -> PyIntensitySpectrum {
        PyIntensitySpectrum {
            inner: dynamics::hamming_intensities(&self.inner, t),
        }
    }

    fn encoded_signal(&self, t: f64, phi: f64) -> f64 {
        dynamics::encoded_signal(&self.inner, t, phi)
    }

    /// Intensities from the dense density-matrix protocol.
    #[pyo3(signature = (t, n_phases=None))]
    fn run_protocol(&self, t: f64, n_phases: Option<usize>) -> PyResult<PyIntensitySpectrum> {
        let k = n_phases.unwrap_or_else(|| cspin_core::fourier::default_n_phases(self.inner.n_spins()));
        oracle::run_protocol(&self.inner, t, k)
            .map(|run| PyIntensitySpectrum { inner: run.spectrum })
            .map_err(to_py)
    }

    fn pi_pulse_equivalence_check(&self, t: f64) -> PyResult<bool> {
        oracle::pi_pulse_equivalence_check(&self.inner, t).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.n_spins()
    }

    fn __repr__(&self) -> String {
        format!("CouplingSet(n_spins={})", self.inner.n_spins())
    }
}

#[pyclass(name = "IntensitySpectrum", module = "cspin", frozen)]
struct PyIntensitySpectrum {
    inner: dynamics::IntensitySpectrum,
}

#[pymethods]
impl PyIntensitySpectrum {
    /// I_n for n = -N..=N.
    #[getter]
    fn intensities(&self) -> Vec<f64> {
        self.inner.intensities.clone()
    }

    #[getter]
    fn time(&self) -> f64 {
        self.inner.time
    }

    #[getter]
    fn n_spins(&self) -> usize {
        self.inner.n_spins()
    }

    fn order(&self, n: i64) -> f64 {
        self.inner.order(n)
    }

    fn total(&self) -> f64 {
        self.inner.total()
    }

    fn renyi_s1(&self) -> PyResult<f64> {
        entropy::renyi_s1(&self.inner).map_err(to_py)
    }

    fn renyi_s2(&self) -> PyResult<f64> {
        entropy::renyi_s2(&self.inner).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "IntensitySpectrum(n_spins={}, time={:e})",
            self.inner.n_spins(),
            self.inner.time
        )
    }
}

/// Concentric-ring bath geometry. Set either `first_ring_median_hz` or
/// `coupling_scale` (rad/s); the default calibration applies otherwise.
#[pyclass(name = "GeometryConfig", module = "cspin", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGeometryConfig {
    inner: geometry::GeometryConfig,
}

#[pymethods]
impl PyGeometryConfig {
    #[new]
    #[pyo3(signature = (
        spins_per_ring=5,
        n_rings=3,
        base_radius_nm=0.3,
        radius_growth_factor=geometry::DEFAULT_RADIUS_GROWTH,
        first_ring_median_hz=None,
        coupling_scale=None,
    ))]
    fn new(
        spins_per_ring: usize,
        n_rings: usize,
        base_radius_nm: f64,
        radius_growth_factor: f64,
        first_ring_median_hz: Option<f64>,
        coupling_scale: Option<f64>,
    ) -> PyResult<Self> {
        let coupling_scale = match (first_ring_median_hz, coupling_scale) {
            (Some(_), Some(_)) => {
                return Err(PyValueError::new_err(
                    "set first_ring_median_hz or coupling_scale, not both",
                ))
            }
            (Some(hz), None) => calibrate_coupling_scale(hz),
            (None, Some(scale)) => scale,
            (None, None) => calibrate_coupling_scale(geometry::DEFAULT_FIRST_RING_MEDIAN_HZ),
        };
        let inner = geometry::GeometryConfig {
            spins_per_ring,
            n_rings,
            base_radius_nm,
            radius_growth_factor,
            coupling_scale,
        };
        inner.validate().map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n_spins(&self) -> usize {
        self.inner.n_spins()
    }

    #[getter]
    fn coupling_scale(&self) -> f64 {
        self.inner.coupling_scale
    }

    /// Spin positions in nm.
    fn positions(&self) -> Vec<(f64, f64, f64)> {
        self.inner
            .positions()
            .into_iter()
            .map(|[x, y, z]| (x, y, z))
            .collect()
    }

    /// Couplings for a field along `direction`.
    fn build_bath(&self, direction: (f64, f64, f64)) -> PyResult<PyCouplingSet> {
        let orient = Orientation::new([direction.0, direction.1, direction.2]).map_err(to_py)?;
        geometry::build_bath(&self.inner, &orient)
            .map(|inner| PyCouplingSet { inner })
            .map_err(to_py)
    }
}

/// Ensemble means and population standard deviations on the time grid.
#[pyclass(name = "EnsembleSummary", module = "cspin", frozen)]
struct PyEnsembleSummary {
    inner: ensemble::EnsembleSummary,
}

#[pymethods]
impl PyEnsembleSummary {
    #[getter]
    fn times_us(&self) -> Vec<f64> {
        self.inner.times.iter().map(|t| t * 1e6).collect()
    }

    #[getter]
    fn n_spins(&self) -> usize {
        self.inner.n_spins
    }

    #[getter]
    fn realizations(&self) -> usize {
        self.inner.realizations
    }

    #[getter]
    fn fid_mean(&self) -> Vec<f64> {
        self.inner.fid.mean.clone()
    }

    #[getter]
    fn fid_std(&self) -> Vec<f64> {
        self.inner.fid.std.clone()
    }

    #[getter]
    fn s_ent_mean(&self) -> Vec<f64> {
        self.inner.s_ent.mean.clone()
    }

    #[getter]
    fn s_ent_std(&self) -> Vec<f64> {
        self.inner.s_ent.std.clone()
    }

    #[getter]
    fn s1_mean(&self) -> Vec<f64> {
        self.inner.s1.mean.clone()
    }

    #[getter]
    fn s1_std(&self) -> Vec<f64> {
        self.inner.s1.std.clone()
    }

    #[getter]
    fn s2_mean(&self) -> Vec<f64> {
        self.inner.s2.mean.clone()
    }

    #[getter]
    fn s2_std(&self) -> Vec<f64> {
        self.inner.s2.std.clone()
    }

    /// Mean intensity of order `n` at every grid time.
    fn order_series(&self, n: i64) -> PyResult<Vec<f64>> {
        if n.unsigned_abs() as usize > self.inner.n_spins {
            return Err(PyValueError::new_err(format!(
                "order {n} outside ±{}",
                self.inner.n_spins
            )));
        }
        Ok(self.inner.order_series(n))
    }

    fn traces_csv(&self) -> String {
        output::traces_csv(&self.inner)
    }

    fn intensities_csv(&self) -> String {
        output::intensities_csv(&self.inner)
    }

    /// Writes traces.csv and intensities.csv; returns the paths.
    fn write(&self, dir: PathBuf) -> PyResult<Vec<PathBuf>> {
        output::emit_traces(&self.inner, &dir).map_err(to_py)
    }
}

fn ensemble_config(
    n_realizations: usize,
    master_seed: u64,
    t_max_us: f64,
    n_steps: usize,
    geometry: Option<&PyGeometryConfig>,
) -> PyResult<EnsembleConfig> {
    let cfg = EnsembleConfig {
        n_realizations,
        master_seed,
        grid: TimeGrid {
            t_max: t_max_us * 1e-6,
            n_steps,
        },
        geometry: geometry.map(|g| g.inner).unwrap_or_default(),
    };
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

#[pyfunction]
#[pyo3(signature = (n_realizations=300, master_seed=0, t_max_us=8000.0, n_steps=801, geometry=None, threads=None))]
fn run_ensemble(
    py: Python<'_>,
    n_realizations: usize,
    master_seed: u64,
    t_max_us: f64,
    n_steps: usize,
    geometry: Option<PyRef<'_, PyGeometryConfig>>,
    threads: Option<usize>,
) -> PyResult<PyEnsembleSummary> {
    let cfg = ensemble_config(n_realizations, master_seed, t_max_us, n_steps, geometry.as_deref())?;
    let summary = py
        .detach(|| ensemble::with_threads(threads, || ensemble::run_ensemble(&cfg)))
        .map_err(to_py)?
        .map_err(to_py)?;
    Ok(PyEnsembleSummary { inner: summary })
}

#[pyfunction]
#[pyo3(signature = (couplings, t_max_us=8000.0, n_steps=801))]
fn summarize_couplings(
    couplings: &PyCouplingSet,
    t_max_us: f64,
    n_steps: usize,
) -> PyResult<PyEnsembleSummary> {
    let grid = TimeGrid {
        t_max: t_max_us * 1e-6,
        n_steps,
    };
    ensemble::summarize_couplings(&couplings.inner, &grid)
        .map(|inner| PyEnsembleSummary { inner })
        .map_err(to_py)
}

#[pyfunction]
fn entanglement_entropy(fid: f64) -> PyResult<f64> {
    entropy::entanglement_entropy(fid).map_err(to_py)
}

fn spectrum(intensities: Vec<f64>) -> PyResult<dynamics::IntensitySpectrum> {
    if intensities.len().is_multiple_of(2) {
        return Err(PyValueError::new_err(
            "intensities must have odd length 2N + 1",
        ));
    }
    Ok(dynamics::IntensitySpectrum::new(intensities, 0.0))
}

#[pyfunction]
fn renyi_s1(intensities: Vec<f64>) -> PyResult<f64> {
    entropy::renyi_s1(&spectrum(intensities)?).map_err(to_py)
}

#[pyfunction]
fn renyi_s2(intensities: Vec<f64>) -> PyResult<f64> {
    entropy::renyi_s2(&spectrum(intensities)?).map_err(to_py)
}

#[pyclass(name = "FitResult", module = "cspin", frozen, get_all)]
struct PyFitResult {
    intercept: f64,
    slope: f64,
    r_squared: f64,
    rms_residual: f64,
    n_samples: usize,
}

impl From<scaling::FitResult> for PyFitResult {
    fn from(f: scaling::FitResult) -> Self {
        Self {
            intercept: f.intercept,
            slope: f.slope,
            r_squared: f.r_squared,
            rms_residual: f.rms_residual,
            n_samples: f.n_samples,
        }
    }
}

#[pymethods]
impl PyFitResult {
    fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    fn __repr__(&self) -> String {
        format!(
            "FitResult({:.4} + {:.4} x, R²={:.4})",
            self.intercept, self.slope, self.r_squared
        )
    }
}

/// values ≈ α + β·log₂(t / 1 μs) over the closed window in μs; `times` in seconds.
#[pyfunction]
#[pyo3(signature = (times, values, window_us=(50.0, 300.0)))]
fn fit_log_time(times: Vec<f64>, values: Vec<f64>, window_us: (f64, f64)) -> PyResult<PyFitResult> {
    if times.len() != values.len() {
        return Err(PyValueError::new_err("times and values differ in length"));
    }
    scaling::fit_log_time(&times, &values, window_us)
        .map(Into::into)
        .map_err(to_py)
}

/// value ≈ a + b·ln N from a {N: value} mapping.
#[pyfunction]
fn fit_ln_n(points: BTreeMap<usize, f64>) -> PyResult<PyFitResult> {
    scaling::fit_ln_n(&points).map(Into::into).map_err(to_py)
}

#[pyclass(name = "ScalingReport", module = "cspin", frozen)]
struct PyScalingReport {
    inner: scaling::ScalingReport,
}

#[pymethods]
impl PyScalingReport {
    #[getter]
    fn sizes(&self) -> Vec<usize> {
        self.inner.sizes.iter().map(|s| s.n_spins).collect()
    }

    #[getter]
    fn beta(&self) -> Vec<f64> {
        self.inner.sizes.iter().map(|s| s.growth.slope).collect()
    }

    #[getter]
    fn s2_saturation(&self) -> Vec<f64> {
        self.inner.sizes.iter().map(|s| s.saturation.mean).collect()
    }

    #[getter]
    fn t_eq_us(&self) -> Vec<Option<f64>> {
        self.inner
            .sizes
            .iter()
            .map(|s| s.equilibration_time.map(|t| t * 1e6))
            .collect()
    }

    #[getter]
    fn beta_fit(&self) -> PyFitResult {
        self.inner.beta_fit.into()
    }

    #[getter]
    fn saturation_fit(&self) -> PyFitResult {
        self.inner.saturation_fit.into()
    }

    #[getter]
    fn t_eq_mean_us(&self) -> Option<f64> {
        self.inner.t_eq_mean.map(|t| t * 1e6)
    }

    #[getter]
    fn t_eq_std_us(&self) -> Option<f64> {
        self.inner.t_eq_std.map(|t| t * 1e6)
    }

    fn report(&self) -> String {
        output::format_report(&self.inner)
    }
}

/// Size sweep with the β and saturation ln N fits.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (sizes, n_realizations=300, master_seed=0, t_max_us=8000.0, n_steps=801, geometry=None, threads=None))]
fn scaling_sweep(
    py: Python<'_>,
    sizes: Vec<usize>,
    n_realizations: usize,
    master_seed: u64,
    t_max_us: f64,
    n_steps: usize,
    geometry: Option<PyRef<'_, PyGeometryConfig>>,
    threads: Option<usize>,
) -> PyResult<PyScalingReport> {
    let cfg = ensemble_config(n_realizations, master_seed, t_max_us, n_steps, geometry.as_deref())?;
    let report = py.detach(|| -> Result<_, Error> {
        let by_size = ensemble::with_threads(threads, || {
            ensemble::entropy_vs_size(&sizes, &cfg, |_| n_realizations)
        })??;
        scaling::analyze_sizes(&by_size, &ScalingOptions::default())
    });
    report
        .map(|inner| PyScalingReport { inner })
        .map_err(to_py)
}

#[pymodule]
pub fn cspin(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCouplingSet>()?;
    m.add_class::<PyIntensitySpectrum>()?;
    m.add_class::<PyGeometryConfig>()?;
    m.add_class::<PyEnsembleSummary>()?;
    m.add_class::<PyFitResult>()?;
    m.add_class::<PyScalingReport>()?;
    m.add_function(wrap_pyfunction!(run_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(summarize_couplings, m)?)?;
    m.add_function(wrap_pyfunction!(entanglement_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(renyi_s1, m)?)?;
    m.add_function(wrap_pyfunction!(renyi_s2, m)?)?;
    m.add_function(wrap_pyfunction!(fit_log_time, m)?)?;
    m.add_function(wrap_pyfunction!(fit_ln_n, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_sweep, m)?)?;
    Ok(())
}

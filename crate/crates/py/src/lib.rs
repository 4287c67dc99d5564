//! Python bindings: `import mrsim`.
//!
//! Arrays cross the boundary by copy. Scanner configurations are plain dicts
//! whose keys mirror the core `ScannerConfig` fields; they are validated by
//! the core validator. Core errors surface as `ValueError` with the core
//! message.

use numpy::ndarray::Array2;
use numpy::{IntoPyArray, PyArray1, PyArray2, PyReadonlyArrayDyn, PyUntypedArrayMethods};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mrsim::engine::{corrupt_slice as core_corrupt_slice, SimulationConfig};
use mrsim::motion::{MotionModel, SeverityStats, TrajectoryGenerator};
use mrsim::sampler::{make_plan as core_make_plan, ScannerConfig, Scheme, SpokeOrder};
use mrsim::ImageSlice;

fn core_err(e: mrsim::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_image(array: &PyReadonlyArrayDyn<'_, f64>, pixel_spacing_mm: f64) -> PyResult<ImageSlice> {
    let shape = array.shape();
    if shape.len() != 2 {
        return Err(PyValueError::new_err(format!("expected a 2-D image array, got {}-D", shape.len())));
    }
    let pixels: Vec<f64> = array.as_array().iter().copied().collect();
    ImageSlice::new(shape[1], shape[0], pixel_spacing_mm, pixels).map_err(core_err)
}

fn to_array2<'py, T: numpy::Element>(py: Python<'py>, rows: usize, cols: usize, data: Vec<T>) -> Bound<'py, PyArray2<T>> {
    Array2::from_shape_vec((rows, cols), data).expect("shape matches data").into_pyarray(py)
}

fn scanner_from_dict(config: &Bound<'_, PyDict>, width: Option<usize>, height: Option<usize>) -> PyResult<ScannerConfig> {
    let scheme: String = config
        .get_item("scheme")?
        .ok_or_else(|| PyKeyError::new_err("config needs a 'scheme'"))?
        .extract()?;
    let scheme: Scheme = scheme.parse().map_err(core_err)?;
    let matrix: Option<usize> = match config.get_item("matrix")? {
        Some(v) => Some(v.extract()?),
        None => None,
    };
    let mut cfg = ScannerConfig::new(scheme, matrix.or(height).unwrap_or(256));
    if let Some(w) = matrix.or(width) {
        cfg.matrix_fe = w;
    }
    for (key, value) in config.iter() {
        let key: String = key.extract()?;
        match key.as_str() {
            "scheme" | "matrix" => {}
            "tr_ms" => cfg.tr_ms = value.extract()?,
            "nex" => cfg.nex = value.extract()?,
            "matrix_pe" => cfg.matrix_pe = value.extract()?,
            "matrix_fe" => cfg.matrix_fe = value.extract()?,
            "fov_mm" => cfg.fov_mm = value.extract()?,
            "radial_spokes" => cfg.radial_spokes = value.extract()?,
            "spiral_interleaves" => cfg.spiral_interleaves = value.extract()?,
            "spiral_turns" => cfg.spiral_turns = value.extract()?,
            "spoke_order" => {
                let order: String = value.extract()?;
                cfg.spoke_order = match order.as_str() {
                    "sequential" => SpokeOrder::Sequential,
                    "golden-angle" | "golden_angle" => SpokeOrder::GoldenAngle,
                    other => return Err(PyValueError::new_err(format!("unknown spoke_order {other:?}"))),
                };
            }
            other => return Err(PyKeyError::new_err(format!("unknown config key {other:?}"))),
        }
    }
    cfg.validate().map_err(core_err)?;
    Ok(cfg)
}

fn trajectory_array<'py>(py: Python<'py>, traj: &mrsim::motion::MotionTrajectory) -> Bound<'py, PyArray2<f64>> {
    let data: Vec<f64> = traj.poses().iter().flat_map(|p| p.to_array()).collect();
    to_array2(py, traj.len(), 6, data)
}

/// Corrupts `image` with a random trajectory of RMS `severity`
/// (displacement mm, rotation deg). The config dict defaults its matrix to
/// the image shape.
#[pyfunction]
#[pyo3(signature = (image, config, severity, seed, pixel_spacing_mm = 1.0))]
fn corrupt_slice<'py>(
    py: Python<'py>,
    image: PyReadonlyArrayDyn<'py, f64>,
    config: &Bound<'py, PyDict>,
    severity: (f64, f64),
    seed: u64,
    pixel_spacing_mm: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let image = to_image(&image, pixel_spacing_mm)?;
    let cfg = scanner_from_dict(config, Some(image.width()), Some(image.height()))?;
    let target = SeverityStats::new(severity.0, severity.1);
    let record = py
        .allow_threads(|| core_corrupt_slice(&image, &cfg, target, seed, &SimulationConfig::default()))
        .map_err(core_err)?;

    let (w, h) = (record.clean.width(), record.clean.height());
    let out = PyDict::new(py);
    out.set_item("id", &record.id)?;
    out.set_item("clean", to_array2(py, h, w, record.clean.pixels().to_vec()))?;
    out.set_item("corrupted", to_array2(py, h, w, record.corrupted.pixels().to_vec()))?;
    out.set_item("error_map", to_array2(py, h, w, record.error_map.values.clone()))?;
    out.set_item("trajectory", trajectory_array(py, &record.trajectory))?;
    let metrics = PyDict::new(py);
    metrics.set_item("rmse", record.metrics.rmse)?;
    metrics.set_item("nrmse", record.metrics.nrmse)?;
    metrics.set_item("highfreq_energy_ratio", record.metrics.highfreq_energy_ratio)?;
    metrics.set_item("artifact_score", record.metrics.artifact_score)?;
    metrics.set_item("rms_disp_mm", record.severity.rms_displacement_mm)?;
    metrics.set_item("rms_rot_deg", record.severity.rms_rotation_deg)?;
    out.set_item("metrics", metrics)?;
    Ok(out)
}

/// Sampling plan of a config dict: `coords` (n x 2 array of kx, ky in
/// cycles/pixel), `shot` and `time_index` per sample.
#[pyfunction]
fn make_plan<'py>(py: Python<'py>, config: &Bound<'py, PyDict>) -> PyResult<Bound<'py, PyDict>> {
    let cfg = scanner_from_dict(config, None, None)?;
    let plan = core_make_plan(&cfg).map_err(core_err)?;
    let (mut coords, mut shot, mut time) = (Vec::new(), Vec::new(), Vec::new());
    for s in &plan.shots {
        for k in &s.samples {
            coords.extend_from_slice(k);
            shot.push(s.index as u64);
            time.push(s.time_index_tr as u64);
        }
    }
    let out = PyDict::new(py);
    out.set_item("coords", to_array2(py, shot.len(), 2, coords))?;
    out.set_item("shot", PyArray1::from_vec(py, shot))?;
    out.set_item("time_index", PyArray1::from_vec(py, time))?;
    Ok(out)
}

/// Random rigid trajectory as an (n_shots x 6) array of
/// tx, ty, tz [mm], rx, ry, rz [deg].
#[pyfunction]
#[pyo3(signature = (n_shots, tr_ms, severity, seed, model = "full6dof"))]
fn make_trajectory<'py>(
    py: Python<'py>,
    n_shots: usize,
    tr_ms: f64,
    severity: (f64, f64),
    seed: u64,
    model: &str,
) -> PyResult<Bound<'py, PyArray2<f64>>> {
    let model = match model {
        "full6dof" => MotionModel::Full6Dof,
        "in-plane" | "in_plane" => MotionModel::InPlane,
        other => return Err(PyValueError::new_err(format!("unknown model {other:?} (full6dof or in-plane)"))),
    };
    let generator = TrajectoryGenerator {
        model,
        ..TrajectoryGenerator::default()
    };
    let traj = generator
        .generate(n_shots, tr_ms, SeverityStats::new(severity.0, severity.1), seed)
        .map_err(core_err)?;
    Ok(trajectory_array(py, &traj))
}

/// Fraction of spectral energy in each of the 8 radial frequency bands.
#[pyfunction]
fn probe_features<'py>(py: Python<'py>, image: PyReadonlyArrayDyn<'py, f64>) -> PyResult<Bound<'py, PyArray1<f64>>> {
    let image = to_image(&image, 1.0)?;
    let features = py.allow_threads(|| mrsim::metrics::probe_features(&image)).map_err(core_err)?;
    Ok(PyArray1::from_vec(py, features.to_vec()))
}

#[pymodule]
#[pyo3(name = "mrsim")]
fn mrsim_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", mrsim::VERSION)?;
    m.add_function(wrap_pyfunction!(corrupt_slice, m)?)?;
    m.add_function(wrap_pyfunction!(make_plan, m)?)?;
    m.add_function(wrap_pyfunction!(make_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(probe_features, m)?)?;
    Ok(())
}

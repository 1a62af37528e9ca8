//! Python bindings for the `wavefuse` crate.
//!
//! Images cross the boundary as flat lists of `float` in planar
//! row-major order; no array library is required on the Python side.

use pyo3::create_exception;
use pyo3::exceptions::{PyFileNotFoundError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use wavefuse::optimizer::TerminationReason;
use wavefuse::wavelet::forward_transform;
use wavefuse::{synthetic, BandKind, FusionMethod, GaConfig, TransformKind, WeightPair};

create_exception!(pywavefuse, WavefuseError, PyValueError);

fn to_py(e: wavefuse::Error) -> PyErr {
    match e {
        wavefuse::Error::FileNotFound(p) => PyFileNotFoundError::new_err(p.display().to_string()),
        other => WavefuseError::new_err(other.to_string()),
    }
}

/// A 1- or 3-channel image with `float` samples.
#[pyclass(name = "Image", module = "pywavefuse", frozen, from_py_object)]
#[derive(Clone)]
struct PyImage(wavefuse::ImageBuffer);

#[pymethods]
impl PyImage {
    /// Builds an image from planar samples. Values outside [0, 255] are
    /// allowed, as they are for intermediate fusion results.
    #[new]
    fn new(width: usize, height: usize, channels: usize, samples: Vec<f64>) -> PyResult<Self> {
        wavefuse::ImageBuffer::unclamped(width, height, channels, samples)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        wavefuse::load_image(path).map(Self).map_err(to_py)
    }

    /// A deterministic textured test image.
    #[staticmethod]
    #[pyo3(signature = (width, height, seed=0))]
    fn textured(width: usize, height: usize, seed: u64) -> Self {
        Self(synthetic::textured(width, height, seed))
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        wavefuse::save_image(&self.0, path).map_err(to_py)
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.0.height()
    }

    #[getter]
    fn channels(&self) -> usize {
        self.0.channels()
    }

    #[getter]
    fn shape(&self) -> (usize, usize, usize) {
        self.0.shape()
    }

    fn samples(&self) -> Vec<f64> {
        self.0.samples().to_vec()
    }

    fn plane(&self, channel: usize) -> PyResult<Vec<f64>> {
        if channel >= self.0.channels() {
            return Err(WavefuseError::new_err(format!("no channel {channel}")));
        }
        Ok(self.0.plane(channel).to_vec())
    }

    fn get(&self, channel: usize, row: usize, col: usize) -> PyResult<f64> {
        let (w, h, c) = self.0.shape();
        if channel >= c || row >= h || col >= w {
            return Err(WavefuseError::new_err("index out of range"));
        }
        Ok(self.0.get(channel, row, col))
    }

    fn clamped(&self) -> Self {
        Self(self.0.clone().clamped())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        let (w, h, c) = self.0.shape();
        format!("Image(width={w}, height={h}, channels={c})")
    }
}

/// A two-level Haar decomposition of a grayscale image.
#[pyclass(name = "Decomposition", module = "pywavefuse", frozen, from_py_object)]
#[derive(Clone)]
struct PyDecomposition(wavefuse::Decomposition);

fn parse_band(kind: &str) -> PyResult<BandKind> {
    match kind.to_ascii_uppercase().as_str() {
        "LL" => Ok(BandKind::LL),
        "LH" => Ok(BandKind::LH),
        "HL" => Ok(BandKind::HL),
        "HH" => Ok(BandKind::HH),
        _ => Err(WavefuseError::new_err(format!("unknown band {kind:?}"))),
    }
}

#[pymethods]
impl PyDecomposition {
    /// `"dwt"` or `"udwt"`.
    #[getter]
    fn transform(&self) -> &'static str {
        match self.0.transform() {
            TransformKind::Decimated => "dwt",
            TransformKind::Undecimated => "udwt",
        }
    }

    /// Band names in storage order, e.g. `("LL", 2)`.
    fn band_names(&self) -> Vec<(String, usize)> {
        self.0
            .bands()
            .iter()
            .map(|b| (format!("{:?}", b.kind), b.level))
            .collect()
    }

    /// Returns `(width, height, coefficients)` for one band.
    fn band(&self, kind: &str, level: usize) -> PyResult<(usize, usize, Vec<f64>)> {
        let kind = parse_band(kind)?;
        let b = self
            .0
            .band(kind, level)
            .ok_or_else(|| WavefuseError::new_err(format!("no band {kind:?}{level}")))?;
        Ok((b.width, b.height, b.coeffs.clone()))
    }

    fn energy(&self) -> f64 {
        self.0.energy()
    }

    fn inverse(&self) -> PyResult<PyImage> {
        wavefuse::wavelet::inverse_transform(&self.0)
            .map(PyImage)
            .map_err(to_py)
    }

    fn features(&self) -> PyResult<Vec<f64>> {
        extract_features(self)
    }

    fn __repr__(&self) -> String {
        format!(
            "Decomposition(transform={}, width={}, height={})",
            self.0.transform(),
            self.0.source_width(),
            self.0.source_height()
        )
    }
}

fn parse_transform(name: &str) -> PyResult<TransformKind> {
    match name {
        "dwt" => Ok(TransformKind::Decimated),
        "udwt" => Ok(TransformKind::Undecimated),
        _ => Err(WavefuseError::new_err(format!(
            "unknown transform {name:?} (expected dwt or udwt)"
        ))),
    }
}

fn ga_config(
    initial_diff: f64,
    trials_per_generation: usize,
    max_generations: usize,
    termination_epsilon: f64,
) -> PyResult<GaConfig> {
    let cfg = GaConfig {
        initial_diff,
        trials_per_generation,
        max_generations,
        termination_epsilon,
    };
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

#[pyfunction]
#[pyo3(signature = (image, transform="dwt"))]
fn decompose(image: &PyImage, transform: &str) -> PyResult<PyDecomposition> {
    forward_transform(&image.0, parse_transform(transform)?)
        .map(PyDecomposition)
        .map_err(to_py)
}

#[pyfunction]
fn register_pair(a: &PyImage, b: &PyImage) -> PyResult<(PyImage, PyImage)> {
    let (a, b) = wavefuse::register_pair(&a.0, &b.0).map_err(to_py)?;
    Ok((PyImage(a), PyImage(b)))
}

#[pyfunction]
fn extract_features(d: &PyDecomposition) -> PyResult<Vec<f64>> {
    wavefuse::extract_features(&d.0)
        .map(|f| f.as_slice().to_vec())
        .map_err(to_py)
}

#[pyfunction]
fn fitness_mse(f1: Vec<f64>, f2: Vec<f64>, wv: f64, wt: f64) -> PyResult<f64> {
    let w = WeightPair::new(wv, wt).map_err(to_py)?;
    wavefuse::fitness_mse(&f1, &f2, w).map_err(to_py)
}

/// Returns `(wv, wt, generations_run, termination_reason)`.
#[pyfunction]
#[pyo3(signature = (
    f1, f2, *, initial_diff=0.1, trials_per_generation=10,
    max_generations=100, termination_epsilon=1e-4
))]
fn optimize_weights(
    f1: Vec<f64>,
    f2: Vec<f64>,
    initial_diff: f64,
    trials_per_generation: usize,
    max_generations: usize,
    termination_epsilon: f64,
) -> PyResult<(f64, f64, usize, String)> {
    let cfg = ga_config(
        initial_diff,
        trials_per_generation,
        max_generations,
        termination_epsilon,
    )?;
    let (w, trace) = wavefuse::optimize_weights(&f1, &f2, &cfg).map_err(to_py)?;
    let reason = match trace.termination_reason {
        TerminationReason::Epsilon => "epsilon",
        TerminationReason::MaxGenerations => "max_generations",
    };
    Ok((w.wv, w.wt, trace.generations_run, reason.to_owned()))
}

/// Fuses two registered images. Returns the fused image and, for the GA
/// methods, the channel-mean `(wv, wt)`.
#[pyfunction]
#[pyo3(signature = (
    a, b, method, *, initial_diff=0.1, trials_per_generation=10,
    max_generations=100, termination_epsilon=1e-4
))]
fn fuse(
    a: &PyImage,
    b: &PyImage,
    method: &str,
    initial_diff: f64,
    trials_per_generation: usize,
    max_generations: usize,
    termination_epsilon: f64,
) -> PyResult<(PyImage, Option<(f64, f64)>)> {
    let method: FusionMethod = method
        .parse()
        .map_err(WavefuseError::new_err)?;
    let cfg = ga_config(
        initial_diff,
        trials_per_generation,
        max_generations,
        termination_epsilon,
    )?;
    let result = wavefuse::fuse(&a.0, &b.0, method, &cfg).map_err(to_py)?;
    let weights = result.weights.map(|w| (w.mean.wv, w.mean.wt));
    Ok((PyImage(result.fused), weights))
}

/// The six objective metrics as a dict. A degenerate quality index is
/// reported as `None`, a zero-error PSNR as `inf`.
#[pyfunction]
fn metrics<'py>(
    py: Python<'py>,
    src1: &PyImage,
    src2: &PyImage,
    fused: &PyImage,
) -> PyResult<Bound<'py, PyDict>> {
    let r = wavefuse::full_report(&src1.0, &src2.0, &fused.0).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("ie", r.ie)?;
    d.set_item("mi", r.mi)?;
    d.set_item("rmse", r.rmse)?;
    d.set_item("psnr", r.psnr)?;
    d.set_item("qi", r.qi)?;
    d.set_item("sf", r.sf)?;
    Ok(d)
}

#[pymodule]
fn pywavefuse(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("WavefuseError", m.py().get_type::<WavefuseError>())?;
    m.add_class::<PyImage>()?;
    m.add_class::<PyDecomposition>()?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(register_pair, m)?)?;
    m.add_function(wrap_pyfunction!(extract_features, m)?)?;
    m.add_function(wrap_pyfunction!(fitness_mse, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_weights, m)?)?;
    m.add_function(wrap_pyfunction!(fuse, m)?)?;
    m.add_function(wrap_pyfunction!(metrics, m)?)?;
    m.add("METHODS", FusionMethod::ALL.map(FusionMethod::name).to_vec())?;
    Ok(())
}

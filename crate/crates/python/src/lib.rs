//! Python bindings: models, prequential evaluation, metrics, weight solving
//! and the rank statistics.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use gooweml::ensembles::{self, SolveMethod, SquareMatrix};
use gooweml::evaluation::{self, Metrics};
use gooweml::model::{self, ModelConfig, ModelKind};
use gooweml::stats::{self, Direction, RankMatrix, TieMethod};
use gooweml::synth::{self, SyntheticStreamConfig};
use gooweml::{
    arff, FeatureKind, FeatureSchema, Instance, LabelVector, MultiLabelLearner, RelevanceVector, Value,
};

fn py_err(e: gooweml::Error) -> PyErr {
    match e {
        gooweml::Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// `"numeric"` or a nominal category count per feature.
fn schema_from(kinds: &[Option<usize>]) -> FeatureSchema {
    FeatureSchema::new(
        kinds.iter()
            .map(|s| match s {
                None => FeatureKind::Numeric,
                Some(c) => FeatureKind::Nominal { categories: *c },
            })
            .collect(),
    )
}

/// `None` is missing; nominal features take the category index.
fn values_from(schema: &FeatureSchema, raw: &[Option<f64>]) -> Result<Vec<Value>, String> {
    if raw.len() != schema.len() {
        return Err(format!("expected {} features, got {}", schema.len(), raw.len()));
    }
    raw.iter()
        .zip(schema.kinds())
        .map(|(v, kind)| match (v, kind) {
            (None, _) => Ok(Value::Missing),
            (Some(x), FeatureKind::Numeric) => Ok(Value::Numeric(*x)),
            (Some(x), FeatureKind::Nominal { .. }) if *x >= 0.0 && x.fract() == 0.0 => Ok(Value::Nominal(*x as u32)),
            (Some(x), FeatureKind::Nominal { .. }) => Err(format!("nominal value {x} is not a category index")),
        })
        .collect()
}

fn values_to(values: &[Value]) -> Vec<Option<f64>> {
    values
        .iter()
        .map(|v| match v {
            Value::Numeric(x) => Some(*x),
            Value::Nominal(i) => Some(f64::from(*i)),
            Value::Missing => None,
        })
        .collect()
}

fn labels_from(bits: &[u8]) -> PyResult<LabelVector> {
    LabelVector::from_binary(bits).map_err(py_err)
}

fn labels_to(y: &LabelVector) -> Vec<u8> {
    y.bits().iter().map(|&b| u8::from(b)).collect()
}

fn metrics_dict(m: &Metrics) -> HashMap<String, f64> {
    Metrics::NAMES.iter().zip(m.values()).map(|(k, v)| (k.to_string(), v)).collect()
}

/// A named ensemble (`goowe-br`, `ebr`, `eaps`, ...) over a feature schema.
#[pyclass(name = "Model", module = "gooweml")]
struct PyModel {
    inner: model::Model,
    schema: FeatureSchema,
    kind: ModelKind,
}

#[pymethods]
impl PyModel {
    /// `features` is either a count of numeric features or a list with
    /// `None` (numeric) or a category count per feature.
    #[new]
    #[pyo3(signature = (model_id, features, labels, ensemble_size=10, chunk_size=500, seed=1))]
    fn new(
        model_id: &str,
        features: &Bound<'_, PyAny>,
        labels: usize,
        ensemble_size: usize,
        chunk_size: usize,
        seed: u64,
    ) -> PyResult<Self> {
        let schema = if let Ok(n) = features.extract::<usize>() {
            FeatureSchema::numeric(n)
        } else {
            schema_from(&features.extract::<Vec<Option<usize>>>()?)
        };
        let kind: ModelKind = model_id.parse().map_err(py_err)?;
        let config = ModelConfig {
            ensemble_size,
            chunk_size,
            seed,
        };
        let inner = model::Model::build(kind, schema.clone(), labels, config).map_err(py_err)?;
        Ok(PyModel { inner, schema, kind })
    }

    #[getter]
    fn model_id(&self) -> String {
        self.kind.id()
    }

    #[getter]
    fn label_count(&self) -> usize {
        self.inner.label_count()
    }

    fn is_ready(&self) -> bool {
        self.inner.is_ready()
    }

    fn size_estimate(&self) -> usize {
        self.inner.size_estimate()
    }

    fn train(&mut self, features: Vec<Option<f64>>, labels: Vec<u8>) -> PyResult<()> {
        let x = values_from(&self.schema, &features).map_err(PyValueError::new_err)?;
        let y = labels_from(&labels)?;
        self.inner.train_instance(&Instance::labeled(x, y)).map_err(py_err)
    }

    /// Raw ensemble relevance scores.
    fn predict_scores(&self, features: Vec<Option<f64>>) -> PyResult<Vec<f64>> {
        let x = values_from(&self.schema, &features).map_err(PyValueError::new_err)?;
        Ok(self.inner.predict_raw(&x).into_scores())
    }

    fn predict(&self, features: Vec<Option<f64>>) -> PyResult<Vec<u8>> {
        let x = values_from(&self.schema, &features).map_err(PyValueError::new_err)?;
        Ok(labels_to(&self.inner.predict(&x)))
    }

    fn save(&self, path: &str) -> PyResult<()> {
        let file = File::create(path).map_err(|e| PyIOError::new_err(e.to_string()))?;
        model::save_checkpoint(BufWriter::new(file), &self.inner).map_err(py_err)
    }

    /// Restores a checkpoint; `features` must describe the same schema.
    #[staticmethod]
    #[pyo3(signature = (path, model_id, features))]
    fn load(path: &str, model_id: &str, features: &Bound<'_, PyAny>) -> PyResult<Self> {
        let schema = if let Ok(n) = features.extract::<usize>() {
            FeatureSchema::numeric(n)
        } else {
            schema_from(&features.extract::<Vec<Option<usize>>>()?)
        };
        let kind: ModelKind = model_id.parse().map_err(py_err)?;
        let file = File::open(path).map_err(|e| PyIOError::new_err(e.to_string()))?;
        let inner = model::load_checkpoint(BufReader::new(file)).map_err(py_err)?;
        Ok(PyModel { inner, schema, kind })
    }

    fn __repr__(&self) -> String {
        format!("Model('{}', features={}, labels={})", self.kind, self.schema.len(), self.inner.label_count())
    }
}

/// Scores normalized to sum 1; an all-zero vector becomes uniform.
#[pyfunction]
fn normalize(scores: Vec<f64>) -> PyResult<Vec<f64>> {
    gooweml::normalize_relevance(&RelevanceVector::raw(scores)).map(RelevanceVector::into_scores).map_err(py_err)
}

/// Clip, normalize and keep labels scoring above `1/L`.
#[pyfunction]
fn predict_labels(scores: Vec<f64>) -> Vec<u8> {
    labels_to(&gooweml::predict_labels(&scores))
}

#[pyfunction]
fn instance_metrics(truth: Vec<u8>, predicted: Vec<u8>) -> PyResult<HashMap<String, f64>> {
    let m = evaluation::instance_metrics(&labels_from(&truth)?, &labels_from(&predicted)?).map_err(py_err)?;
    Ok(HashMap::from([
        ("exact_match".to_string(), m.exact_match),
        ("hamming".to_string(), m.hamming),
        ("accuracy".to_string(), m.accuracy),
        ("precision".to_string(), m.precision),
        ("recall".to_string(), m.recall),
        ("f1".to_string(), m.f1),
    ]))
}

#[pyfunction]
fn label_density(labels: Vec<Vec<u8>>) -> PyResult<f64> {
    let ys = labels.iter().map(|y| labels_from(y)).collect::<PyResult<Vec<_>>>()?;
    gooweml::label_density(ys.iter()).map_err(py_err)
}

/// Solves `A w = d`; returns the weights and how they were obtained.
#[pyfunction]
fn solve_weights(a: Vec<Vec<f64>>, d: Vec<f64>) -> PyResult<(Vec<f64>, String)> {
    let m = SquareMatrix::from_rows(&a).map_err(py_err)?;
    let sol = ensembles::solve_weights(&m, &d).map_err(py_err)?;
    let method = match sol.method {
        SolveMethod::Direct => "direct",
        SolveMethod::Regularized => "regularized",
        SolveMethod::Uniform => "uniform",
    };
    Ok((sol.weights, method.to_string()))
}

fn rank_matrix(scores: Vec<Vec<f64>>, maximize: bool, ties: &str) -> PyResult<RankMatrix> {
    let m = scores.first().map_or(0, Vec::len);
    let ties = match ties {
        "average" => TieMethod::Average,
        "min" => TieMethod::Min,
        other => return Err(PyValueError::new_err(format!("unknown tie method '{other}'"))),
    };
    let direction = if maximize { Direction::Maximize } else { Direction::Minimize };
    let models = (0..m).map(|j| format!("m{j}")).collect();
    let datasets = (0..scores.len()).map(|d| format!("d{d}")).collect();
    Ok(RankMatrix::new(models, datasets, scores, direction).map_err(py_err)?.with_ties(ties))
}

/// Mean rank per model; `scores` has one row per dataset.
#[pyfunction]
#[pyo3(signature = (scores, maximize=true, ties="average"))]
fn average_ranks(scores: Vec<Vec<f64>>, maximize: bool, ties: &str) -> PyResult<Vec<f64>> {
    Ok(stats::average_ranks(&rank_matrix(scores, maximize, ties)?))
}

/// `(statistic, degrees of freedom, p-value)`.
#[pyfunction]
#[pyo3(signature = (scores, maximize=true))]
fn friedman(scores: Vec<Vec<f64>>, maximize: bool) -> PyResult<(f64, usize, f64)> {
    let r = stats::friedman_statistic(&rank_matrix(scores, maximize, "average")?);
    Ok((r.statistic, r.degrees_of_freedom, r.p_value))
}

#[pyfunction]
#[pyo3(signature = (models, datasets, alpha=0.05))]
fn nemenyi_cd(models: usize, datasets: usize, alpha: f64) -> PyResult<f64> {
    stats::nemenyi_cd(models, datasets, alpha).map_err(py_err)
}

/// Reads an ARFF file into `(label_names, rows)` with rows of `(features, labels)`.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn read_arff(path: &str) -> PyResult<(Vec<String>, Vec<(Vec<Option<f64>>, Vec<u8>)>)> {
    let reader = arff::open(path).map_err(py_err)?;
    let names = reader.header().label_names();
    let mut rows = Vec::new();
    for inst in reader {
        let inst = inst.map_err(py_err)?;
        let y = inst.labels.as_ref().map(labels_to).unwrap_or_default();
        rows.push((values_to(&inst.features), y));
    }
    Ok((names, rows))
}

#[pyfunction]
#[pyo3(signature = (path, labels=5, features=10, instances=1000, seed=1, drift_point=None))]
fn write_synthetic(
    path: &str,
    labels: usize,
    features: usize,
    instances: usize,
    seed: u64,
    drift_point: Option<usize>,
) -> PyResult<()> {
    let config = SyntheticStreamConfig {
        labels,
        features,
        instances,
        seed,
        drift_point,
        flip_labels: drift_point.is_some(),
        ..Default::default()
    };
    config.validate().map_err(py_err)?;
    let file = File::create(path).map_err(|e| PyIOError::new_err(e.to_string()))?;
    synth::write_arff(&mut BufWriter::new(file), &config).map_err(py_err)
}

/// Prequential run of `model_id` over an ARFF file; returns the cumulative metrics.
#[pyfunction]
#[pyo3(signature = (model_id, path, ensemble_size=10, chunk_size=500, window=None, seed=1))]
fn evaluate(
    model_id: &str,
    path: &str,
    ensemble_size: usize,
    chunk_size: usize,
    window: Option<usize>,
    seed: u64,
) -> PyResult<HashMap<String, f64>> {
    let kind: ModelKind = model_id.parse().map_err(py_err)?;
    let reader = arff::open(path).map_err(py_err)?;
    let header = reader.header().clone();
    let config = ModelConfig {
        ensemble_size,
        chunk_size,
        seed,
    };
    let mut model = model::Model::build(kind, header.schema(), header.label_count, config).map_err(py_err)?;
    let out = evaluation::prequential_run(&mut model, reader, window.unwrap_or(chunk_size)).map_err(py_err)?;
    let mut result = metrics_dict(&out.cumulative.metrics);
    result.insert("instances".into(), out.cumulative.instances as f64);
    result.insert("warmup".into(), out.warmup as f64);
    result.insert("model_bytes".into(), out.cumulative.model_bytes as f64);
    Ok(result)
}

#[pymodule]
#[pyo3(name = "gooweml")]
fn gooweml_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add("MODEL_IDS", ModelKind::ALL.to_vec())?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(predict_labels, m)?)?;
    m.add_function(wrap_pyfunction!(instance_metrics, m)?)?;
    m.add_function(wrap_pyfunction!(label_density, m)?)?;
    m.add_function(wrap_pyfunction!(solve_weights, m)?)?;
    m.add_function(wrap_pyfunction!(average_ranks, m)?)?;
    m.add_function(wrap_pyfunction!(friedman, m)?)?;
    m.add_function(wrap_pyfunction!(nemenyi_cd, m)?)?;
    m.add_function(wrap_pyfunction!(read_arff, m)?)?;
    m.add_function(wrap_pyfunction!(write_synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    Ok(())
}

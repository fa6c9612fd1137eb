//! Multi-label stream classification with least-squares weighted ensembles.

pub mod arff;
pub mod cli;
pub mod domain;
pub mod ensembles;
pub mod error;
pub mod evaluation;
pub mod learners;
pub mod model;
pub mod relevance;
pub mod stats;
pub mod synth;
pub mod transforms;

pub use domain::{DataChunk, FeatureKind, FeatureSchema, Instance, LabelVector, RelevanceVector, ScoreKind, Value};
pub use error::{Error, Result};
pub use relevance::{label_cardinality, label_density, normalize_relevance, predict_labels, threshold_relevance};
pub use transforms::MultiLabelLearner;

//! Incremental single-target classifiers used as transformation bases.

mod gaussian;
pub mod hoeffding;
pub mod naive_bayes;

pub use gaussian::GaussianEstimator;
pub use hoeffding::{hoeffding_bound, HoeffdingTree, HoeffdingTreeConfig};
pub use naive_bayes::NaiveBayes;

use serde::{Deserialize, Serialize};

use crate::domain::{FeatureSchema, Value};

/// Footprint constants behind the deterministic model-size estimates.
pub mod footprint {
    /// Fixed overhead of any model object.
    pub const MODEL_BASE: usize = 64;
    /// One count or accumulator cell.
    pub const CELL: usize = 8;
    /// One tree node header (kind, children vector, split test).
    pub const NODE: usize = 48;
}

/// Which single-target learner a transformation instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseKind {
    HoeffdingTree,
    NaiveBayes,
}

/// A class-probability estimator over a fixed schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum BaseLearner {
    Tree(HoeffdingTree),
    Bayes(NaiveBayes),
}

impl BaseLearner {
    pub fn new(kind: BaseKind, schema: FeatureSchema, classes: usize) -> Self {
        match kind {
            BaseKind::HoeffdingTree => {
                BaseLearner::Tree(HoeffdingTree::new(schema, classes, HoeffdingTreeConfig::default()))
            }
            BaseKind::NaiveBayes => BaseLearner::Bayes(NaiveBayes::new(schema, classes)),
        }
    }

    pub fn update(&mut self, features: &[Value], class: usize) {
        match self {
            BaseLearner::Tree(t) => t.update(features, class),
            BaseLearner::Bayes(nb) => nb.update(features, class),
        }
    }

    pub fn predict_proba(&self, features: &[Value]) -> Vec<f64> {
        match self {
            BaseLearner::Tree(t) => t.predict_proba(features),
            BaseLearner::Bayes(nb) => nb.predict_proba(features),
        }
    }

    pub fn size_estimate(&self) -> usize {
        match self {
            BaseLearner::Tree(t) => t.size_estimate(),
            BaseLearner::Bayes(nb) => nb.size_estimate(),
        }
    }

    pub fn observed(&self) -> f64 {
        match self {
            BaseLearner::Tree(t) => t.observed(),
            BaseLearner::Bayes(nb) => nb.observed(),
        }
    }
}

//! Problem transformations and the learner contract shared with the ensembles.

mod binary_relevance;
mod classifier_chain;
mod pruned_sets;

pub use binary_relevance::BinaryRelevance;
pub use classifier_chain::ClassifierChain;
pub use pruned_sets::{build_vocabulary, decompose, LabelsetVocabulary, PrunedSets, PrunedSetsConfig};

use serde::{Deserialize, Serialize};

use crate::domain::{DataChunk, FeatureSchema, Instance, LabelVector, RelevanceVector, Value};
use crate::error::{Error, Result};
use crate::relevance::predict_labels;

/// Anything that learns from labeled instances and scores all `L` labels.
pub trait MultiLabelLearner {
    fn label_count(&self) -> usize;

    fn train(&mut self, features: &[Value], labels: &LabelVector);

    /// Per-label scores; always of length `L`, trained or not.
    fn predict_raw(&self, features: &[Value]) -> RelevanceVector;

    /// Deterministic estimate of the model footprint in bytes.
    fn size_estimate(&self) -> usize;

    fn train_instance(&mut self, instance: &Instance) -> Result<()> {
        let labels = instance.labels.as_ref().ok_or(Error::Unlabeled(0))?;
        if labels.len() != self.label_count() {
            return Err(Error::DimensionMismatch {
                expected: self.label_count(),
                found: labels.len(),
            });
        }
        self.train(&instance.features, labels);
        Ok(())
    }

    fn train_chunk(&mut self, chunk: &DataChunk) {
        for (x, y) in chunk.labeled() {
            self.train(x, y);
        }
    }

    /// Normalize-then-threshold decision on the raw scores.
    fn predict(&self, features: &[Value]) -> LabelVector {
        predict_labels(self.predict_raw(features).scores())
    }

    /// False while the learner has nothing to predict with (e.g. an
    /// ensemble before its first component exists).
    fn is_ready(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TransformKind {
    BinaryRelevance,
    ClassifierChain,
    PrunedSets,
}

impl TransformKind {
    pub fn short_name(&self) -> &'static str {
        match self {
            TransformKind::BinaryRelevance => "br",
            TransformKind::ClassifierChain => "cc",
            TransformKind::PrunedSets => "ps",
        }
    }
}

/// Recipe for building fresh transformation models over one stream.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformFactory {
    pub kind: TransformKind,
    pub schema: FeatureSchema,
    pub labels: usize,
    pub pruned_sets: PrunedSetsConfig,
}

impl TransformFactory {
    pub fn new(kind: TransformKind, schema: FeatureSchema, labels: usize) -> Self {
        TransformFactory {
            kind,
            schema,
            labels,
            pruned_sets: PrunedSetsConfig::default(),
        }
    }

    /// A fresh untrained model; `seed` drives any randomized structure
    /// (the chain order of a classifier chain).
    pub fn build(&self, seed: u64) -> Transform {
        match self.kind {
            TransformKind::BinaryRelevance => Transform::Br(BinaryRelevance::new(self.schema.clone(), self.labels)),
            TransformKind::ClassifierChain => {
                Transform::Cc(ClassifierChain::with_seed(self.schema.clone(), self.labels, seed))
            }
            TransformKind::PrunedSets => {
                Transform::Ps(PrunedSets::new(self.schema.clone(), self.labels, self.pruned_sets))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Transform {
    Br(BinaryRelevance),
    Cc(ClassifierChain),
    Ps(PrunedSets),
}

impl Transform {
    fn inner(&self) -> &dyn MultiLabelLearner {
        match self {
            Transform::Br(m) => m,
            Transform::Cc(m) => m,
            Transform::Ps(m) => m,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn MultiLabelLearner {
        match self {
            Transform::Br(m) => m,
            Transform::Cc(m) => m,
            Transform::Ps(m) => m,
        }
    }
}

impl MultiLabelLearner for Transform {
    fn label_count(&self) -> usize {
        self.inner().label_count()
    }

    fn train(&mut self, features: &[Value], labels: &LabelVector) {
        self.inner_mut().train(features, labels)
    }

    fn train_chunk(&mut self, chunk: &DataChunk) {
        self.inner_mut().train_chunk(chunk)
    }

    fn predict_raw(&self, features: &[Value]) -> RelevanceVector {
        self.inner().predict_raw(features)
    }

    fn size_estimate(&self) -> usize {
        self.inner().size_estimate()
    }
}

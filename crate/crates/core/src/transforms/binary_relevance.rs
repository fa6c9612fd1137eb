use serde::{Deserialize, Serialize};

use super::MultiLabelLearner;
use crate::domain::{FeatureSchema, LabelVector, RelevanceVector, Value};
use crate::learners::{footprint, BaseKind, BaseLearner};

/// One independent binary learner per label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinaryRelevance {
    learners: Vec<BaseLearner>,
}

impl BinaryRelevance {
    pub fn new(schema: FeatureSchema, labels: usize) -> Self {
        Self::with_base(schema, labels, BaseKind::HoeffdingTree)
    }

    pub fn with_base(schema: FeatureSchema, labels: usize, base: BaseKind) -> Self {
        BinaryRelevance {
            learners: (0..labels).map(|_| BaseLearner::new(base, schema.clone(), 2)).collect(),
        }
    }

    pub fn learners(&self) -> &[BaseLearner] {
        &self.learners
    }
}

impl MultiLabelLearner for BinaryRelevance {
    fn label_count(&self) -> usize {
        self.learners.len()
    }

    fn train(&mut self, features: &[Value], labels: &LabelVector) {
        for (j, learner) in self.learners.iter_mut().enumerate() {
            learner.update(features, usize::from(labels.get(j)));
        }
    }

    fn predict_raw(&self, features: &[Value]) -> RelevanceVector {
        RelevanceVector::raw(self.learners.iter().map(|l| l.predict_proba(features)[1]).collect())
    }

    fn size_estimate(&self) -> usize {
        footprint::MODEL_BASE + self.learners.iter().map(BaseLearner::size_estimate).sum::<usize>()
    }
}

use serde::{Deserialize, Serialize};

use super::adwin::{Adwin, AdwinConfig};
use super::oza::OzaBag;
use super::ComponentFactory;
use crate::domain::{LabelVector, RelevanceVector, Value};
use crate::error::Result;
use crate::learners::footprint;
use crate::transforms::{MultiLabelLearner, TransformFactory};

/// Online bagging with one change detector per member. Each detector reads
/// its member's per-instance accuracy (one minus Hamming loss, measured
/// before training). When any detector fires, the member with the lowest
/// windowed accuracy is replaced by a fresh one.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(
    serialize = "F: Serialize, F::Model: Serialize",
    deserialize = "F: Deserialize<'de>, F::Model: Deserialize<'de>"
))]
pub struct AdwinBag<F: ComponentFactory = TransformFactory> {
    bag: OzaBag<F>,
    detectors: Vec<Adwin>,
    seen: u64,
    /// Instance indices at which a member was replaced.
    resets: Vec<u64>,
}

impl<F: ComponentFactory> AdwinBag<F> {
    pub fn new(factory: F, size: usize, seed: u64) -> Result<Self> {
        Self::with_detector(factory, size, seed, AdwinConfig::default())
    }

    pub fn with_detector(factory: F, size: usize, seed: u64, detector: AdwinConfig) -> Result<Self> {
        let bag = OzaBag::new(factory, size, seed)?;
        Ok(AdwinBag {
            detectors: vec![Adwin::new(detector); size],
            bag,
            seen: 0,
            resets: Vec::new(),
        })
    }

    pub fn members(&self) -> &[F::Model] {
        self.bag.members()
    }

    pub fn detectors(&self) -> &[Adwin] {
        &self.detectors
    }

    pub fn resets(&self) -> &[u64] {
        &self.resets
    }
}

fn accuracy(prediction: &LabelVector, truth: &LabelVector) -> f64 {
    let wrong = prediction.bits().iter().zip(truth.bits()).filter(|(a, b)| a != b).count();
    1.0 - wrong as f64 / truth.len().max(1) as f64
}

impl<F: ComponentFactory> MultiLabelLearner for AdwinBag<F> {
    fn label_count(&self) -> usize {
        self.bag.label_count()
    }

    fn train(&mut self, features: &[Value], labels: &LabelVector) {
        let accuracies: Vec<f64> = self
            .bag
            .members()
            .iter()
            .map(|m| accuracy(&m.predict(features), labels))
            .collect();
        self.bag.train(features, labels);
        let mut changed = false;
        for (detector, acc) in self.detectors.iter_mut().zip(accuracies) {
            changed |= detector.add(acc.clamp(0.0, 1.0)).expect("accuracy lies in [0, 1]");
        }
        if changed {
            let worst = (1..self.detectors.len()).fold(0, |best, i| {
                if self.detectors[i].mean() < self.detectors[best].mean() {
                    i
                } else {
                    best
                }
            });
            self.bag.replace(worst);
            self.detectors[worst].reset();
            self.resets.push(self.seen);
        }
        self.seen += 1;
    }

    fn predict_raw(&self, features: &[Value]) -> RelevanceVector {
        self.bag.predict_raw(features)
    }

    fn size_estimate(&self) -> usize {
        let detector_cells: usize = self.detectors.iter().map(|d| 3 * d.bucket_count() + 4).sum();
        self.bag.size_estimate() + footprint::CELL * detector_cells
    }
}

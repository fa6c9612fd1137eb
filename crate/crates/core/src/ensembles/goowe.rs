use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::solver::{weighted_vote, SolveMethod, WeightAccumulator};
use super::ComponentFactory;
use crate::domain::{DataChunk, Instance, LabelVector, RelevanceVector, Value};
use crate::error::{Error, Result};
use crate::learners::footprint;
use crate::relevance::normalize_scores;
use crate::transforms::{MultiLabelLearner, TransformFactory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GooweConfig {
    /// Ensemble capacity `K`.
    pub max_components: usize,
    /// Chunk size `h`.
    pub chunk_size: usize,
}

impl Default for GooweConfig {
    fn default() -> Self {
        GooweConfig {
            max_components: 10,
            chunk_size: 500,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Member<M> {
    model: M,
    weight: f64,
}

/// Chunk-based ensemble whose vote weights minimize the squared distance
/// between the weighted component scores and the true label vectors of the
/// latest chunk.
///
/// Every instance is scored by the current members, folded into the normal
/// equations of the open chunk and buffered. When the chunk fills, a new
/// member is built on it, the weights are re-solved from that chunk alone,
/// the lowest-weighted member is dropped if the ensemble is full (ties drop
/// the oldest), the survivors are trained on the chunk and the newcomer
/// joins with weight 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(
    serialize = "F: Serialize, F::Model: Serialize",
    deserialize = "F: Deserialize<'de>, F::Model: Deserialize<'de>"
))]
pub struct Goowe<F: ComponentFactory = TransformFactory> {
    config: GooweConfig,
    factory: F,
    /// Oldest first.
    members: Vec<Member<F::Model>>,
    chunk: DataChunk,
    accumulator: WeightAccumulator,
    rng: ChaCha8Rng,
    last_solve: Option<SolveMethod>,
    chunks_closed: usize,
    evictions: usize,
}

impl<F: ComponentFactory> Goowe<F> {
    pub fn new(factory: F, config: GooweConfig, seed: u64) -> Result<Self> {
        if config.max_components == 0 {
            return Err(Error::contract("ensemble capacity must be positive"));
        }
        Ok(Goowe {
            chunk: DataChunk::new(config.chunk_size)?,
            config,
            factory,
            members: Vec::new(),
            accumulator: WeightAccumulator::new(0),
            rng: ChaCha8Rng::seed_from_u64(seed),
            last_solve: None,
            chunks_closed: 0,
            evictions: 0,
        })
    }

    pub fn config(&self) -> &GooweConfig {
        &self.config
    }

    pub fn component_count(&self) -> usize {
        self.members.len()
    }

    pub fn components(&self) -> impl Iterator<Item = &F::Model> {
        self.members.iter().map(|m| &m.model)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.weight).collect()
    }

    pub fn accumulator(&self) -> &WeightAccumulator {
        &self.accumulator
    }

    pub fn buffered(&self) -> usize {
        self.chunk.len()
    }

    pub fn last_solve(&self) -> Option<SolveMethod> {
        self.last_solve
    }

    pub fn chunks_closed(&self) -> usize {
        self.chunks_closed
    }

    pub fn evictions(&self) -> usize {
        self.evictions
    }

    /// Normalized scores of every member, oldest first.
    pub fn component_scores(&self, features: &[Value]) -> Vec<Vec<f64>> {
        self.members
            .iter()
            .map(|m| {
                let raw: Vec<f64> = m.model.predict_raw(features).scores().iter().map(|v| v.max(0.0)).collect();
                normalize_scores(&raw).expect("clipped scores are nonnegative")
            })
            .collect()
    }

    /// Test-then-train on one labeled instance.
    pub fn process(&mut self, instance: &Instance) -> Result<(LabelVector, RelevanceVector)> {
        let raw = self.predict_raw(&instance.features);
        let prediction = crate::relevance::predict_labels(raw.scores());
        self.train_instance(instance)?;
        Ok((prediction, raw))
    }

    fn close_chunk(&mut self) {
        let mut incoming = self.factory.build(self.rng.next_u64());
        incoming.train_chunk(&self.chunk);

        if !self.members.is_empty() {
            let solution = self.accumulator.solve().expect("accumulator sized to the ensemble");
            for (member, w) in self.members.iter_mut().zip(solution.weights) {
                member.weight = w;
            }
            self.last_solve = Some(solution.method);
        }
        if self.members.len() >= self.config.max_components {
            self.members.remove(weakest(&self.weights()));
            self.evictions += 1;
        }
        for member in &mut self.members {
            member.model.train_chunk(&self.chunk);
        }
        self.members.push(Member {
            model: incoming,
            weight: 1.0,
        });

        self.chunk.clear();
        self.accumulator = WeightAccumulator::new(self.members.len());
        self.chunks_closed += 1;
    }
}

/// Index of the minimum weight; the earliest index wins ties.
fn weakest(weights: &[f64]) -> usize {
    (1..weights.len()).fold(0, |best, i| if weights[i] < weights[best] { i } else { best })
}

impl<F: ComponentFactory> MultiLabelLearner for Goowe<F> {
    fn label_count(&self) -> usize {
        self.factory.label_count()
    }

    fn train(&mut self, features: &[Value], labels: &LabelVector) {
        if !self.members.is_empty() {
            let scores = self.component_scores(features);
            self.accumulator
                .accumulate(&scores, labels)
                .expect("member scores match the label count");
        }
        self.chunk
            .push(Instance::labeled(features.to_vec(), labels.clone()))
            .expect("chunk is closed as soon as it fills");
        if self.chunk.is_full() {
            self.close_chunk();
        }
    }

    fn predict_raw(&self, features: &[Value]) -> RelevanceVector {
        if self.members.is_empty() {
            return RelevanceVector::zeros(self.label_count());
        }
        let weights = self.weights();
        RelevanceVector::raw(weighted_vote(&self.component_scores(features), &weights, self.label_count()))
    }

    fn size_estimate(&self) -> usize {
        let k = self.members.len();
        let buffered: usize = self
            .chunk
            .instances()
            .iter()
            .map(|i| (i.features.len() + self.label_count()) * footprint::CELL)
            .sum();
        footprint::MODEL_BASE
            + self.members.iter().map(|m| m.model.size_estimate()).sum::<usize>()
            + footprint::CELL * (k * k + 2 * k)
            + buffered
    }

    fn is_ready(&self) -> bool {
        !self.members.is_empty()
    }
}

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::ComponentFactory;
use crate::domain::{LabelVector, RelevanceVector, Value};
use crate::error::{Error, Result};
use crate::learners::footprint;
use crate::transforms::{MultiLabelLearner, TransformFactory};

/// One draw from Poisson(1).
pub fn poisson_one<R: Rng + ?Sized>(rng: &mut R) -> u32 {
    let poisson = Poisson::new(1.0).expect("unit rate is valid");
    let k: f64 = poisson.sample(rng);
    k as u32
}

/// Online bagging: each member sees every instance `k ~ Poisson(1)` times
/// and the ensemble scores are the plain mean of the members' raw scores.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(
    serialize = "F: Serialize, F::Model: Serialize",
    deserialize = "F: Deserialize<'de>, F::Model: Deserialize<'de>"
))]
pub struct OzaBag<F: ComponentFactory = TransformFactory> {
    factory: F,
    members: Vec<F::Model>,
    rng: ChaCha8Rng,
}

impl<F: ComponentFactory> OzaBag<F> {
    pub fn new(factory: F, size: usize, seed: u64) -> Result<Self> {
        if size == 0 {
            return Err(Error::contract("ensemble size must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members = (0..size).map(|_| factory.build(rng.next_u64())).collect();
        Ok(OzaBag { factory, members, rng })
    }

    pub fn members(&self) -> &[F::Model] {
        &self.members
    }

    /// Swaps member `i` for a fresh untrained one.
    pub fn replace(&mut self, i: usize) {
        self.members[i] = self.factory.build(self.rng.next_u64());
    }
}

impl<F: ComponentFactory> MultiLabelLearner for OzaBag<F> {
    fn label_count(&self) -> usize {
        self.factory.label_count()
    }

    fn train(&mut self, features: &[Value], labels: &LabelVector) {
        for member in &mut self.members {
            for _ in 0..poisson_one(&mut self.rng) {
                member.train(features, labels);
            }
        }
    }

    fn predict_raw(&self, features: &[Value]) -> RelevanceVector {
        let mut mean = vec![0.0; self.label_count()];
        for member in &self.members {
            for (m, s) in mean.iter_mut().zip(member.predict_raw(features).scores()) {
                *m += s;
            }
        }
        let k = self.members.len() as f64;
        mean.iter_mut().for_each(|m| *m /= k);
        RelevanceVector::raw(mean)
    }

    fn size_estimate(&self) -> usize {
        footprint::MODEL_BASE + self.members.iter().map(MultiLabelLearner::size_estimate).sum::<usize>()
    }
}

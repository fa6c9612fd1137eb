use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::MultiLabelLearner;
use crate::domain::{FeatureSchema, LabelVector, RelevanceVector, Value};
use crate::learners::{footprint, BaseKind, BaseLearner};

/// Binary learners linked in a chain: the learner at chain position `j`
/// sees the input features followed by the decisions for the `j` labels
/// before it. Training feeds true predecessor labels; prediction feeds the
/// chain's own hard decisions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifierChain {
    order: Vec<usize>,
    learners: Vec<BaseLearner>,
}

impl ClassifierChain {
    pub fn new(schema: FeatureSchema, order: Vec<usize>) -> Self {
        Self::with_base(schema, order, BaseKind::HoeffdingTree)
    }

    /// Chain over a seeded random permutation of the labels.
    pub fn with_seed(schema: FeatureSchema, labels: usize, seed: u64) -> Self {
        let mut order: Vec<usize> = (0..labels).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self::new(schema, order)
    }

    pub fn with_base(schema: FeatureSchema, order: Vec<usize>, base: BaseKind) -> Self {
        let mut seen = vec![false; order.len()];
        for &j in &order {
            assert!(j < order.len() && !std::mem::replace(&mut seen[j], true), "chain order must be a permutation");
        }
        let learners = (0..order.len())
            .map(|pos| BaseLearner::new(base, schema.with_binary_features(pos), 2))
            .collect();
        ClassifierChain { order, learners }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn learners(&self) -> &[BaseLearner] {
        &self.learners
    }
}

impl MultiLabelLearner for ClassifierChain {
    fn label_count(&self) -> usize {
        self.order.len()
    }

    fn train(&mut self, features: &[Value], labels: &LabelVector) {
        let mut extended = Vec::with_capacity(features.len() + self.order.len());
        extended.extend_from_slice(features);
        for (learner, &label) in self.learners.iter_mut().zip(&self.order) {
            let y = labels.get(label);
            learner.update(&extended, usize::from(y));
            extended.push(Value::Nominal(u32::from(y)));
        }
    }

    fn predict_raw(&self, features: &[Value]) -> RelevanceVector {
        let mut scores = vec![0.0; self.order.len()];
        let mut extended = Vec::with_capacity(features.len() + self.order.len());
        extended.extend_from_slice(features);
        for (learner, &label) in self.learners.iter().zip(&self.order) {
            let p = learner.predict_proba(&extended)[1];
            scores[label] = p;
            extended.push(Value::Nominal(u32::from(p > 0.5)));
        }
        RelevanceVector::raw(scores)
    }

    fn size_estimate(&self) -> usize {
        footprint::MODEL_BASE
            + footprint::CELL * self.order.len()
            + self.learners.iter().map(BaseLearner::size_estimate).sum::<usize>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::FeatureKind;
    use crate::transforms::BinaryRelevance;
    use rand::Rng;

    fn schema(m: usize) -> FeatureSchema {
        FeatureSchema::new(vec![FeatureKind::Nominal { categories: 2 }; m])
    }

    #[test]
    fn learner_arity_grows_along_the_chain() {
        let cc = ClassifierChain::new(schema(3), vec![2, 0, 1]);
        for (pos, l) in cc.learners().iter().enumerate() {
            let BaseLearner::Tree(t) = l else { unreachable!() };
            let _ = t;
            assert_eq!(cc.order()[pos], [2, 0, 1][pos]);
        }
        assert_eq!(cc.label_count(), 3);
    }

    #[test]
    fn seeded_orders_are_permutations() {
        let a = ClassifierChain::with_seed(schema(1), 6, 1);
        let b = ClassifierChain::with_seed(schema(1), 6, 2);
        let mut sorted = a.order().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..6).collect::<Vec<_>>());
        assert_ne!(a.order(), b.order());
        assert_eq!(a.order(), ClassifierChain::with_seed(schema(1), 6, 1).order());
    }

    #[test]
    #[should_panic(expected = "permutation")]
    fn rejects_non_permutation() {
        ClassifierChain::new(schema(1), vec![0, 0]);
    }

    #[test]
    fn single_label_chain_equals_binary_relevance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut cc = ClassifierChain::new(schema(3), vec![0]);
        let mut br = BinaryRelevance::new(schema(3), 1);
        for _ in 0..3000 {
            let x: Vec<Value> = (0..3).map(|_| Value::Nominal(rng.gen_range(0..2))).collect();
            let noisy = rng.gen_bool(0.1);
            let y = LabelVector::new(vec![(x[0] == Value::Nominal(1)) ^ noisy]);
            assert_eq!(cc.predict_raw(&x), br.predict_raw(&x));
            cc.train(&x, &y);
            br.train(&x, &y);
        }
    }

    #[test]
    fn constant_context_reproduces_binary_relevance() {
        // every label before the last chain position is always 0, so the
        // chain context is constant and can never be split on
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut cc = ClassifierChain::new(schema(2), vec![0, 1, 2]);
        let mut br = BinaryRelevance::new(schema(2), 3);
        for _ in 0..2000 {
            let x: Vec<Value> = (0..2).map(|_| Value::Nominal(rng.gen_range(0..2))).collect();
            let y = LabelVector::new(vec![false, false, x[1] == Value::Nominal(1)]);
            cc.train(&x, &y);
            br.train(&x, &y);
            assert_eq!(cc.predict_raw(&x), br.predict_raw(&x));
        }
    }

    #[test]
    fn output_stays_in_label_order() {
        let mut cc = ClassifierChain::new(schema(1), vec![2, 0, 1]);
        let y = LabelVector::from_binary(&[1, 0, 0]).unwrap();
        let x = [Value::Nominal(0)];
        for _ in 0..500 {
            cc.train(&x, &y);
        }
        let raw = cc.predict_raw(&x).into_scores();
        assert!(raw[0] > 0.9 && raw[1] < 0.1 && raw[2] < 0.1, "{raw:?}");
    }

    #[test]
    fn chain_exploits_copied_label() {
        // label 1 copies label 0; label 0 is a noisy function of x
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut cc = ClassifierChain::new(schema(2), vec![0, 1]);
        let mut br = BinaryRelevance::new(schema(2), 2);
        for _ in 0..6000 {
            let x: Vec<Value> = (0..2).map(|_| Value::Nominal(rng.gen_range(0..2))).collect();
            let y0 = (x[0] == Value::Nominal(1)) ^ rng.gen_bool(0.2);
            let y = LabelVector::new(vec![y0, y0]);
            cc.train(&x, &y);
            br.train(&x, &y);
        }
        let x = [Value::Nominal(1), Value::Nominal(0)];
        let cc_score = cc.predict_raw(&x).scores()[1];
        let br_score = br.predict_raw(&x).scores()[1];
        // conditioned on the predicted label 0 the copy becomes near certain
        assert!(cc.predict_raw(&x).scores()[0] > 0.5);
        assert!(cc_score > br_score, "cc {cc_score} vs br {br_score}");
        assert!(cc_score > 0.95);
    }
}

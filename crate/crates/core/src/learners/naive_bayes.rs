//! Incremental Naive Bayes over mixed numeric / nominal features.

use serde::{Deserialize, Serialize};

use super::footprint;
use super::gaussian::GaussianEstimator;
use crate::domain::{FeatureSchema, Value};

#[derive(Debug, Clone, Serialize, Deserialize)]
enum FeatureStats {
    /// `counts[class][slot]`
    Nominal(Vec<Vec<f64>>),
    /// One estimator per class.
    Numeric(Vec<GaussianEstimator>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NaiveBayes {
    schema: FeatureSchema,
    class_counts: Vec<f64>,
    features: Vec<FeatureStats>,
    alpha: f64,
}

impl NaiveBayes {
    pub const DEFAULT_ALPHA: f64 = 1.0;

    pub fn new(schema: FeatureSchema, classes: usize) -> Self {
        Self::with_alpha(schema, classes, Self::DEFAULT_ALPHA)
    }

    pub fn with_alpha(schema: FeatureSchema, classes: usize, alpha: f64) -> Self {
        let features = schema
            .kinds()
            .iter()
            .map(|kind| match kind.nominal_slots() {
                Some(slots) => FeatureStats::Nominal(vec![vec![0.0; slots]; classes]),
                None => FeatureStats::Numeric(vec![GaussianEstimator::default(); classes]),
            })
            .collect();
        NaiveBayes {
            schema,
            class_counts: vec![0.0; classes],
            features,
            alpha,
        }
    }

    pub fn class_count(&self) -> usize {
        self.class_counts.len()
    }

    pub fn class_counts(&self) -> &[f64] {
        &self.class_counts
    }

    pub fn observed(&self) -> f64 {
        self.class_counts.iter().sum()
    }

    /// Mean of numeric feature `m` within `class`, if observed.
    pub fn feature_mean(&self, m: usize, class: usize) -> Option<f64> {
        match &self.features[m] {
            FeatureStats::Numeric(est) if est[class].count() > 0.0 => Some(est[class].mean()),
            _ => None,
        }
    }

    pub fn update(&mut self, features: &[Value], class: usize) {
        debug_assert!(class < self.class_counts.len());
        debug_assert_eq!(features.len(), self.features.len());
        self.class_counts[class] += 1.0;
        for (stats, value) in self.features.iter_mut().zip(features) {
            match (stats, value) {
                (FeatureStats::Nominal(counts), Value::Nominal(c)) => {
                    let row = &mut counts[class];
                    let slot = (*c as usize).min(row.len() - 1);
                    row[slot] += 1.0;
                }
                (FeatureStats::Numeric(est), Value::Numeric(v)) => est[class].add(*v),
                // missing or mismatched values contribute nothing
                _ => {}
            }
        }
    }

    /// Posterior over classes; uniform before any training.
    pub fn predict_proba(&self, features: &[Value]) -> Vec<f64> {
        let classes = self.class_counts.len();
        let total = self.observed();
        if total == 0.0 {
            return vec![1.0 / classes as f64; classes];
        }
        let mut log_post: Vec<f64> = self
            .class_counts
            .iter()
            .map(|&n| ((n + self.alpha) / (total + self.alpha * classes as f64)).ln())
            .collect();
        for (stats, value) in self.features.iter().zip(features) {
            match (stats, value) {
                (FeatureStats::Nominal(counts), Value::Nominal(c)) => {
                    for (k, lp) in log_post.iter_mut().enumerate() {
                        let row = &counts[k];
                        let slot = (*c as usize).min(row.len() - 1);
                        let denom = self.class_counts[k] + self.alpha * row.len() as f64;
                        *lp += ((row[slot] + self.alpha) / denom).ln();
                    }
                }
                (FeatureStats::Numeric(est), Value::Numeric(v)) => {
                    for (k, lp) in log_post.iter_mut().enumerate() {
                        // classes without numeric evidence stay neutral
                        if est[k].count() > 0.0 {
                            *lp += est[k].log_density(*v);
                        }
                    }
                }
                _ => {}
            }
        }
        softmax(&log_post)
    }

    pub fn size_estimate(&self) -> usize {
        let cells: usize = self
            .features
            .iter()
            .map(|f| match f {
                FeatureStats::Nominal(counts) => counts.iter().map(Vec::len).sum(),
                FeatureStats::Numeric(est) => est.len() * 3,
            })
            .sum();
        footprint::MODEL_BASE + footprint::CELL * (cells + self.class_counts.len())
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }
}

/// Normalized exponentials with every entry kept strictly positive.
pub(crate) fn softmax(logs: &[f64]) -> Vec<f64> {
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = logs
        .iter()
        .map(|&l| ((l - max).exp()).max(f64::MIN_POSITIVE))
        .collect();
    let sum: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= sum);
    p
}

//! Value types shared by parsers, learners, ensembles and the evaluation harness.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ground-truth (or predicted) relevance of each of the `L` labels.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabelVector {
    bits: Vec<bool>,
}

impl LabelVector {
    pub fn new(bits: Vec<bool>) -> Self {
        LabelVector { bits }
    }

    pub fn zeros(len: usize) -> Self {
        LabelVector {
            bits: vec![false; len],
        }
    }

    /// Builds a vector from 0/1 integers, rejecting anything else.
    pub fn from_binary(values: &[u8]) -> Result<Self> {
        values
            .iter()
            .map(|&v| match v {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(Error::contract(format!("label value {other} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(LabelVector::new)
    }

    pub fn from_indices(len: usize, relevant: &[usize]) -> Self {
        let mut bits = vec![false; len];
        for &j in relevant {
            bits[j] = true;
        }
        LabelVector { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, j: usize) -> bool {
        self.bits[j]
    }

    pub fn set(&mut self, j: usize, value: bool) {
        self.bits[j] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of relevant labels, `|y|`.
    pub fn cardinality(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn relevant(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(j, &b)| b.then_some(j))
    }

    /// True when every relevant label of `self` is also relevant in `other`.
    pub fn is_subset_of(&self, other: &LabelVector) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn as_f64(&self) -> impl Iterator<Item = f64> + '_ {
        self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 })
    }
}

impl fmt::Debug for LabelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (j, &b) in self.bits.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(">")
    }
}

/// Per-label scores. Component outputs are `Raw`; only `Normalized`
/// vectors are guaranteed to lie in `[0,1]` and sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScoreKind {
    Raw,
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevanceVector {
    scores: Vec<f64>,
    kind: ScoreKind,
}

impl RelevanceVector {
    pub fn raw(scores: Vec<f64>) -> Self {
        RelevanceVector {
            scores,
            kind: ScoreKind::Raw,
        }
    }

    pub(crate) fn normalized(scores: Vec<f64>) -> Self {
        RelevanceVector {
            scores,
            kind: ScoreKind::Normalized,
        }
    }

    pub fn zeros(len: usize) -> Self {
        RelevanceVector::raw(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn kind(&self) -> ScoreKind {
        self.kind
    }

    pub fn is_normalized(&self) -> bool {
        self.kind == ScoreKind::Normalized
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn into_scores(self) -> Vec<f64> {
        self.scores
    }

    pub fn sum(&self) -> f64 {
        self.scores.iter().sum()
    }
}

/// Declared type of one input feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureKind {
    Numeric,
    /// Category indices `0..categories`; index `categories` is reserved for
    /// values outside the declared vocabulary.
    Nominal { categories: usize },
}

impl FeatureKind {
    /// Slots a count table needs for this feature, including the unknown slot.
    pub fn nominal_slots(&self) -> Option<usize> {
        match *self {
            FeatureKind::Nominal { categories } => Some(categories + 1),
            FeatureKind::Numeric => None,
        }
    }
}

/// One feature value of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Numeric(f64),
    Nominal(u32),
    Missing,
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }
}

/// Feature layout of a stream, shared by every learner built for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    kinds: Vec<FeatureKind>,
}

impl FeatureSchema {
    pub fn new(kinds: Vec<FeatureKind>) -> Self {
        FeatureSchema { kinds }
    }

    pub fn numeric(count: usize) -> Self {
        FeatureSchema::new(vec![FeatureKind::Numeric; count])
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn kinds(&self) -> &[FeatureKind] {
        &self.kinds
    }

    pub fn kind(&self, m: usize) -> FeatureKind {
        self.kinds[m]
    }

    /// Schema extended with `extra` binary nominal features (chain context).
    pub fn with_binary_features(&self, extra: usize) -> Self {
        let mut kinds = self.kinds.clone();
        kinds.extend(std::iter::repeat(FeatureKind::Nominal { categories: 2 }).take(extra));
        FeatureSchema { kinds }
    }

    /// Checks arity and nominal index ranges of a feature row.
    pub fn validate(&self, features: &[Value]) -> Result<()> {
        if features.len() != self.kinds.len() {
            return Err(Error::DimensionMismatch {
                expected: self.kinds.len(),
                found: features.len(),
            });
        }
        for (m, (value, kind)) in features.iter().zip(&self.kinds).enumerate() {
            match (value, kind) {
                (Value::Nominal(c), FeatureKind::Nominal { categories }) if (*c as usize) > *categories => {
                    return Err(Error::contract(format!(
                        "feature {m}: category {c} outside 0..={categories}"
                    )));
                }
                (Value::Nominal(_), FeatureKind::Numeric) | (Value::Numeric(_), FeatureKind::Nominal { .. }) => {
                    return Err(Error::contract(format!("feature {m}: value kind does not match schema")));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub features: Vec<Value>,
    pub labels: Option<LabelVector>,
}

impl Instance {
    pub fn labeled(features: Vec<Value>, labels: LabelVector) -> Self {
        Instance {
            features,
            labels: Some(labels),
        }
    }

    pub fn unlabeled(features: Vec<Value>) -> Self {
        Instance {
            features,
            labels: None,
        }
    }
}

/// Fixed-capacity buffer of the most recent labeled instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataChunk {
    instances: Vec<Instance>,
    capacity: usize,
}

impl DataChunk {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::contract("chunk capacity must be positive"));
        }
        Ok(DataChunk {
            instances: Vec::with_capacity(capacity),
            capacity,
        })
    }

    pub fn from_instances(instances: Vec<Instance>) -> Result<Self> {
        let mut chunk = DataChunk::new(instances.len().max(1))?;
        chunk.instances = instances;
        Ok(chunk)
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.instances.len() == self.capacity
    }

    pub fn push(&mut self, instance: Instance) -> Result<()> {
        if self.is_full() {
            return Err(Error::contract("data chunk is full"));
        }
        self.instances.push(instance);
        Ok(())
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn clear(&mut self) {
        self.instances.clear();
    }

    /// Labeled pairs of the chunk; unlabeled instances are skipped.
    pub fn labeled(&self) -> impl Iterator<Item = (&[Value], &LabelVector)> + Clone {
        self.instances
            .iter()
            .filter_map(|i| i.labels.as_ref().map(|y| (i.features.as_slice(), y)))
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MultiLabelLearner;
use crate::domain::{DataChunk, FeatureSchema, LabelVector, RelevanceVector, Value};
use crate::learners::{footprint, NaiveBayes};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrunedSetsConfig {
    /// Labelsets seen at most this often are pruned.
    pub prune_threshold: usize,
    /// Frequent subsets reintroduced per pruned instance.
    pub max_subsets: usize,
    /// Instances buffered before an incrementally trained model fixes its
    /// vocabulary.
    pub buffer_size: usize,
}

impl Default for PrunedSetsConfig {
    fn default() -> Self {
        PrunedSetsConfig {
            prune_threshold: 1,
            max_subsets: 2,
            buffer_size: 500,
        }
    }
}

/// Frequent labelsets, each one a class of the underlying multi-class learner.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LabelsetVocabulary {
    entries: Vec<LabelVector>,
    counts: Vec<usize>,
}

impl LabelsetVocabulary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[LabelVector] {
        &self.entries
    }

    pub fn count(&self, class: usize) -> usize {
        self.counts[class]
    }

    pub fn class_of(&self, labels: &LabelVector) -> Option<usize> {
        self.entries.iter().position(|e| e == labels)
    }
}

/// Keeps every labelset observed more than `prune_threshold` times.
/// Classes are ordered by count (descending), then by labelset.
pub fn build_vocabulary<'a, I>(labelsets: I, prune_threshold: usize) -> LabelsetVocabulary
where
    I: IntoIterator<Item = &'a LabelVector>,
{
    let mut counts: BTreeMap<&LabelVector, usize> = BTreeMap::new();
    for y in labelsets {
        *counts.entry(y).or_default() += 1;
    }
    let mut kept: Vec<(&LabelVector, usize)> = counts.into_iter().filter(|&(_, n)| n > prune_threshold).collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    LabelsetVocabulary {
        entries: kept.iter().map(|(y, _)| (*y).clone()).collect(),
        counts: kept.iter().map(|&(_, n)| n).collect(),
    }
}

/// Classes an instance with labelset `y` trains as: its own class when
/// frequent, otherwise up to `max_subsets` maximal frequent subsets of `y`,
/// largest first, then most frequent. May be empty.
pub fn decompose(vocabulary: &LabelsetVocabulary, y: &LabelVector, max_subsets: usize) -> Vec<usize> {
    if let Some(class) = vocabulary.class_of(y) {
        return vec![class];
    }
    let subsets: Vec<usize> = (0..vocabulary.len())
        .filter(|&c| vocabulary.entries[c].is_subset_of(y))
        .collect();
    let mut maximal: Vec<usize> = subsets
        .iter()
        .copied()
        .filter(|&c| {
            !subsets
                .iter()
                .any(|&o| o != c && vocabulary.entries[c].is_subset_of(&vocabulary.entries[o]))
        })
        .collect();
    maximal.sort_by(|&a, &b| {
        let (ea, eb) = (&vocabulary.entries[a], &vocabulary.entries[b]);
        eb.cardinality()
            .cmp(&ea.cardinality())
            .then(vocabulary.counts[b].cmp(&vocabulary.counts[a]))
            .then(a.cmp(&b))
    });
    maximal.truncate(max_subsets);
    maximal
}

/// Multi-class Naive Bayes over frequent labelsets.
///
/// Trained on a whole chunk, the vocabulary comes from that chunk. Trained
/// instance by instance, the first `buffer_size` instances are held back,
/// then fix the vocabulary and are replayed; later instances with unknown
/// labelsets train as their frequent subsets. Until a vocabulary exists,
/// and whenever it is empty, raw scores are all zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrunedSets {
    schema: FeatureSchema,
    labels: usize,
    config: PrunedSetsConfig,
    vocabulary: Option<LabelsetVocabulary>,
    learner: Option<NaiveBayes>,
    buffer: Vec<(Vec<Value>, LabelVector)>,
}

impl PrunedSets {
    pub fn new(schema: FeatureSchema, labels: usize, config: PrunedSetsConfig) -> Self {
        PrunedSets {
            schema,
            labels,
            config,
            vocabulary: None,
            learner: None,
            buffer: Vec::new(),
        }
    }

    pub fn vocabulary(&self) -> Option<&LabelsetVocabulary> {
        self.vocabulary.as_ref()
    }

    pub fn config(&self) -> PrunedSetsConfig {
        self.config
    }

    /// Class distribution of the base learner, if one exists.
    pub fn class_probabilities(&self, features: &[Value]) -> Option<Vec<f64>> {
        self.learner.as_ref().map(|nb| nb.predict_proba(features))
    }

    fn fix_vocabulary<'a>(&mut self, rows: impl Iterator<Item = (&'a [Value], &'a LabelVector)> + Clone) {
        let vocabulary = build_vocabulary(rows.clone().map(|(_, y)| y), self.config.prune_threshold);
        self.learner = (!vocabulary.is_empty()).then(|| NaiveBayes::new(self.schema.clone(), vocabulary.len()));
        self.vocabulary = Some(vocabulary);
        for (x, y) in rows {
            self.learn(x, y);
        }
    }

    fn learn(&mut self, features: &[Value], labels: &LabelVector) {
        let (Some(vocabulary), Some(nb)) = (&self.vocabulary, &mut self.learner) else {
            return;
        };
        for class in decompose(vocabulary, labels, self.config.max_subsets) {
            nb.update(features, class);
        }
    }
}

impl MultiLabelLearner for PrunedSets {
    fn label_count(&self) -> usize {
        self.labels
    }

    fn train(&mut self, features: &[Value], labels: &LabelVector) {
        if self.vocabulary.is_some() {
            self.learn(features, labels);
            return;
        }
        self.buffer.push((features.to_vec(), labels.clone()));
        if self.buffer.len() >= self.config.buffer_size.max(1) {
            let buffer = std::mem::take(&mut self.buffer);
            self.fix_vocabulary(buffer.iter().map(|(x, y)| (x.as_slice(), y)));
        }
    }

    fn train_chunk(&mut self, chunk: &DataChunk) {
        if self.vocabulary.is_none() && self.buffer.is_empty() {
            self.fix_vocabulary(chunk.labeled());
        } else {
            for (x, y) in chunk.labeled() {
                self.train(x, y);
            }
        }
    }

    fn predict_raw(&self, features: &[Value]) -> RelevanceVector {
        let mut scores = vec![0.0; self.labels];
        if let (Some(vocabulary), Some(nb)) = (&self.vocabulary, &self.learner) {
            marginalize(vocabulary, &nb.predict_proba(features), &mut scores);
        }
        RelevanceVector::raw(scores)
    }

    fn size_estimate(&self) -> usize {
        let vocab = self
            .vocabulary
            .as_ref()
            .map_or(0, |v| v.len() * (self.labels.div_ceil(8) + footprint::CELL));
        let buffered = self.buffer.len() * (self.schema.len() + self.labels) * footprint::CELL;
        footprint::MODEL_BASE + vocab + buffered + self.learner.as_ref().map_or(0, NaiveBayes::size_estimate)
    }
}

/// Score of label `j` = total probability of the labelsets containing `j`.
fn marginalize(vocabulary: &LabelsetVocabulary, probabilities: &[f64], scores: &mut [f64]) {
    for (entry, &p) in vocabulary.entries.iter().zip(probabilities) {
        for j in entry.relevant() {
            scores[j] += p;
        }
    }
}

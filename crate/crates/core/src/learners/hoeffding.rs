//! Hoeffding tree (VFDT) with information-gain splits.
//!
//! Nominal features split multiway (one child per declared category plus
//! the unknown slot). Numeric features are summarised per class by a
//! Gaussian estimator and split in two at the best of a fixed grid of
//! candidate thresholds between the observed minimum and maximum.
//! Missing values go to the unknown child of a nominal split and to the
//! lower child of a numeric split.

use serde::{Deserialize, Serialize};

use super::footprint;
use super::gaussian::GaussianEstimator;
use crate::domain::{FeatureSchema, Value};

/// `sqrt(R^2 ln(1/delta) / (2n))`.
pub fn hoeffding_bound(range: f64, confidence: f64, n: f64) -> f64 {
    (range * range * (1.0 / confidence).ln() / (2.0 * n)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoeffdingTreeConfig {
    pub grace_period: f64,
    pub split_confidence: f64,
    pub tie_threshold: f64,
    /// Laplace smoothing of leaf class distributions.
    pub alpha: f64,
    pub numeric_candidates: usize,
}

impl Default for HoeffdingTreeConfig {
    fn default() -> Self {
        HoeffdingTreeConfig {
            grace_period: 200.0,
            split_confidence: 1e-7,
            tie_threshold: 0.05,
            alpha: 1.0,
            numeric_candidates: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
enum Observer {
    /// `counts[slot][class]`
    Nominal(Vec<Vec<f64>>),
    Numeric {
        per_class: Vec<GaussianEstimator>,
        /// Observed `(min, max)`, once any value was seen.
        range: Option<(f64, f64)>,
    },
}

impl Observer {
    fn cells(&self) -> usize {
        match self {
            Observer::Nominal(counts) => counts.iter().map(Vec::len).sum(),
            Observer::Numeric { per_class, .. } => per_class.len() * 3 + 2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Leaf {
    class_counts: Vec<f64>,
    weight_at_last_eval: f64,
    observers: Vec<Observer>,
}

impl Leaf {
    fn new(schema: &FeatureSchema, classes: usize) -> Self {
        let observers = schema
            .kinds()
            .iter()
            .map(|kind| match kind.nominal_slots() {
                Some(slots) => Observer::Nominal(vec![vec![0.0; classes]; slots]),
                None => Observer::Numeric {
                    per_class: vec![GaussianEstimator::default(); classes],
                    range: None,
                },
            })
            .collect();
        Leaf {
            class_counts: vec![0.0; classes],
            weight_at_last_eval: 0.0,
            observers,
        }
    }

    fn weight(&self) -> f64 {
        self.class_counts.iter().sum()
    }

    fn observe(&mut self, features: &[Value], class: usize) {
        self.class_counts[class] += 1.0;
        for (obs, value) in self.observers.iter_mut().zip(features) {
            match (obs, value) {
                (Observer::Nominal(counts), Value::Nominal(c)) => {
                    let slot = (*c as usize).min(counts.len() - 1);
                    counts[slot][class] += 1.0;
                }
                (Observer::Numeric { per_class, range }, Value::Numeric(v)) => {
                    per_class[class].add(*v);
                    let (lo, hi) = range.unwrap_or((*v, *v));
                    *range = Some((lo.min(*v), hi.max(*v)));
                }
                _ => {}
            }
        }
    }

    fn cells(&self) -> usize {
        self.class_counts.len() + 1 + self.observers.iter().map(Observer::cells).sum::<usize>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
enum SplitTest {
    Nominal,
    Numeric { threshold: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
enum Node {
    Leaf(Leaf),
    Split {
        feature: usize,
        test: SplitTest,
        children: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
struct Candidate {
    feature: usize,
    test: SplitTest,
    gain: f64,
    branches: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HoeffdingTree {
    schema: FeatureSchema,
    classes: usize,
    config: HoeffdingTreeConfig,
    nodes: Vec<Node>,
    seen: f64,
}

impl HoeffdingTree {
    pub fn new(schema: FeatureSchema, classes: usize, config: HoeffdingTreeConfig) -> Self {
        let root = Node::Leaf(Leaf::new(&schema, classes));
        HoeffdingTree {
            schema,
            classes,
            config,
            nodes: vec![root],
            seen: 0.0,
        }
    }

    pub fn config(&self) -> &HoeffdingTreeConfig {
        &self.config
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf(_) => 1,
                Node::Split { children, .. } => 1 + children.iter().map(|&c| walk(nodes, c)).max().unwrap_or(0),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Feature tested at the root, if the root has split.
    pub fn root_split_feature(&self) -> Option<usize> {
        match &self.nodes[0] {
            Node::Split { feature, .. } => Some(*feature),
            Node::Leaf(_) => None,
        }
    }

    /// Total training weight seen, summed over leaves.
    /// Total training weight, including what leaves saw before splitting.
    pub fn observed(&self) -> f64 {
        self.seen
    }

    fn route(&self, features: &[Value]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf(_) => return i,
                Node::Split { feature, test, children } => {
                    let value = features.get(*feature).copied().unwrap_or(Value::Missing);
                    let branch = match (test, value) {
                        (SplitTest::Nominal, Value::Nominal(c)) => (c as usize).min(children.len() - 1),
                        (SplitTest::Nominal, _) => children.len() - 1,
                        (SplitTest::Numeric { threshold }, Value::Numeric(v)) => usize::from(v > *threshold),
                        (SplitTest::Numeric { .. }, _) => 0,
                    };
                    i = children[branch];
                }
            }
        }
    }

    pub fn update(&mut self, features: &[Value], class: usize) {
        self.seen += 1.0;
        debug_assert!(class < self.classes);
        let leaf_index = self.route(features);
        let ready = match &mut self.nodes[leaf_index] {
            Node::Leaf(leaf) => {
                leaf.observe(features, class);
                leaf.weight() - leaf.weight_at_last_eval >= self.config.grace_period
            }
            Node::Split { .. } => unreachable!("route ends at a leaf"),
        };
        if ready {
            self.attempt_split(leaf_index);
        }
    }

    fn attempt_split(&mut self, leaf_index: usize) {
        if let Node::Leaf(leaf) = &mut self.nodes[leaf_index] {
            leaf.weight_at_last_eval = leaf.weight();
        }
        let Node::Leaf(leaf) = &self.nodes[leaf_index] else {
            return;
        };
        let n = leaf.weight();
        let mut candidates = self.candidates(leaf);
        if candidates.is_empty() {
            return;
        }
        candidates.sort_by(|a, b| b.gain.total_cmp(&a.gain));
        let best = &candidates[0];
        // the null split (no split at all) always competes with gain 0
        let second = candidates.get(1).map_or(0.0, |c| c.gain).max(0.0);
        let range = (self.classes.max(2) as f64).log2();
        let eps = hoeffding_bound(range, self.config.split_confidence, n);
        if best.gain > 0.0 && (best.gain - second > eps || eps < self.config.tie_threshold) {
            let best = best.clone();
            self.split(leaf_index, best);
        }
    }

    fn candidates(&self, leaf: &Leaf) -> Vec<Candidate> {
        let parent = entropy(&leaf.class_counts);
        let mut out = Vec::new();
        for (feature, obs) in leaf.observers.iter().enumerate() {
            match obs {
                Observer::Nominal(counts) => {
                    let branches = counts.iter().filter(|row| row.iter().sum::<f64>() > 0.0).count();
                    if branches < 2 {
                        continue;
                    }
                    out.push(Candidate {
                        feature,
                        test: SplitTest::Nominal,
                        gain: parent - weighted_entropy(counts),
                        branches: counts.len(),
                    });
                }
                Observer::Numeric { per_class, range } => {
                    let Some((min, max)) = *range else {
                        continue;
                    };
                    if !(max > min) {
                        continue;
                    }
                    let k = self.config.numeric_candidates;
                    let mut best: Option<Candidate> = None;
                    for i in 1..=k {
                        let threshold = min + (max - min) * i as f64 / (k + 1) as f64;
                        let left: Vec<f64> = per_class.iter().map(|g| g.weight_at_or_below(threshold)).collect();
                        let right: Vec<f64> = per_class.iter().zip(&left).map(|(g, l)| (g.count() - l).max(0.0)).collect();
                        if left.iter().sum::<f64>() <= 0.0 || right.iter().sum::<f64>() <= 0.0 {
                            continue;
                        }
                        let gain = parent - weighted_entropy(&[left, right]);
                        if best.as_ref().map_or(true, |b| gain > b.gain) {
                            best = Some(Candidate {
                                feature,
                                test: SplitTest::Numeric { threshold },
                                gain,
                                branches: 2,
                            });
                        }
                    }
                    out.extend(best);
                }
            }
        }
        out
    }

    fn split(&mut self, leaf_index: usize, candidate: Candidate) {
        let first_child = self.nodes.len();
        for _ in 0..candidate.branches {
            self.nodes.push(Node::Leaf(Leaf::new(&self.schema, self.classes)));
        }
        self.nodes[leaf_index] = Node::Split {
            feature: candidate.feature,
            test: candidate.test,
            children: (first_child..first_child + candidate.branches).collect(),
        };
    }

    /// Laplace-smoothed class distribution at the leaf reached by `features`.
    pub fn predict_proba(&self, features: &[Value]) -> Vec<f64> {
        let Node::Leaf(leaf) = &self.nodes[self.route(features)] else {
            unreachable!("route ends at a leaf")
        };
        let alpha = self.config.alpha;
        let denom = leaf.weight() + alpha * self.classes as f64;
        leaf.class_counts.iter().map(|c| (c + alpha) / denom).collect()
    }

    pub fn size_estimate(&self) -> usize {
        let cells: usize = self
            .nodes
            .iter()
            .map(|n| match n {
                Node::Leaf(l) => l.cells(),
                Node::Split { children, .. } => children.len(),
            })
            .sum();
        footprint::MODEL_BASE + footprint::NODE * self.nodes.len() + footprint::CELL * cells
    }
}

fn entropy(counts: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / total;
            -p * p.log2()
        })
        .sum()
}

/// Entropy of the post-split distributions weighted by branch mass.
fn weighted_entropy<R: AsRef<[f64]>>(branches: &[R]) -> f64 {
    let totals: Vec<f64> = branches.iter().map(|b| b.as_ref().iter().sum()).collect();
    let total: f64 = totals.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    branches
        .iter()
        .zip(&totals)
        .map(|(b, t)| t / total * entropy(b.as_ref()))
        .sum()
}

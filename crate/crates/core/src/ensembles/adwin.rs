//! ADWIN change detector over values in `[0, 1]`.
//!
//! The window is kept as an exponential histogram: row `i` holds buckets
//! summarizing `2^i` consecutive values, at most `M` per row before the two
//! oldest are merged upward. After each insertion every bucket boundary is
//! tested as a cut between an older and a newer sub-window; while some cut
//! separates means by more than the bound, the oldest bucket is dropped.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdwinConfig {
    pub delta: f64,
    /// Buckets per row before compression.
    pub max_buckets: usize,
    /// Cuts are only tested once the window is longer than this.
    pub min_window: usize,
    /// Each side of a cut must hold more than this many values.
    pub min_sub_window: usize,
    /// Run the cut test every `clock` insertions.
    pub clock: usize,
    pub bound: CutBound,
}

/// Confidence split used by the cut threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CutBound {
    /// `delta / n` per cut, as in the original analysis: `ln(2n / delta)`.
    #[default]
    UnionBound,
    /// The cheaper `ln(2 ln n / delta)` common in streaming libraries.
    LogLog,
}

impl Default for AdwinConfig {
    fn default() -> Self {
        AdwinConfig {
            delta: 0.002,
            max_buckets: 5,
            min_window: 10,
            min_sub_window: 5,
            clock: 1,
            bound: CutBound::UnionBound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Bucket {
    count: usize,
    sum: f64,
    /// Sum of squared deviations from the bucket mean.
    ssd: f64,
}

impl Bucket {
    fn merge(a: Bucket, b: Bucket) -> Bucket {
        let count = a.count + b.count;
        let delta = a.mean() - b.mean();
        Bucket {
            count,
            sum: a.sum + b.sum,
            ssd: a.ssd + b.ssd + (a.count * b.count) as f64 / count as f64 * delta * delta,
        }
    }

    fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Adwin {
    config: AdwinConfig,
    /// Row `i`, oldest bucket first.
    rows: Vec<VecDeque<Bucket>>,
    width: usize,
    total: f64,
    ssd: f64,
    ticks: usize,
    detections: usize,
}

impl Default for Adwin {
    fn default() -> Self {
        Self::new(AdwinConfig::default())
    }
}

impl Adwin {
    pub fn new(config: AdwinConfig) -> Self {
        Adwin {
            config,
            rows: Vec::new(),
            width: 0,
            total: 0.0,
            ssd: 0.0,
            ticks: 0,
            detections: 0,
        }
    }

    pub fn config(&self) -> &AdwinConfig {
        &self.config
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn mean(&self) -> f64 {
        if self.width == 0 {
            0.0
        } else {
            self.total / self.width as f64
        }
    }

    /// Population variance of the window.
    pub fn variance(&self) -> f64 {
        if self.width == 0 {
            0.0
        } else {
            self.ssd / self.width as f64
        }
    }

    pub fn detections(&self) -> usize {
        self.detections
    }

    pub fn bucket_count(&self) -> usize {
        self.rows.iter().map(VecDeque::len).sum()
    }

    /// `(count, sum)` of every bucket, oldest first.
    pub fn buckets(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.rows
            .iter()
            .rev()
            .flat_map(|row| row.iter().map(|b| (b.count, b.sum)))
    }

    pub fn reset(&mut self) {
        *self = Adwin::new(self.config);
    }

    /// Adds one value; true when the window was cut.
    pub fn add(&mut self, value: f64) -> Result<bool> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::contract(format!("detector input {value} outside [0, 1]")));
        }
        self.insert(value);
        self.ticks += 1;
        let changed = self.ticks % self.config.clock.max(1) == 0 && self.detect();
        if changed {
            self.detections += 1;
        }
        Ok(changed)
    }

    fn insert(&mut self, value: f64) {
        if self.width > 0 {
            let delta = value - self.mean();
            self.ssd += self.width as f64 / (self.width + 1) as f64 * delta * delta;
        }
        self.width += 1;
        self.total += value;
        if self.rows.is_empty() {
            self.rows.push(VecDeque::new());
        }
        self.rows[0].push_back(Bucket {
            count: 1,
            sum: value,
            ssd: 0.0,
        });
        self.compress();
    }

    fn compress(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.rows[i].len() <= self.config.max_buckets {
                break;
            }
            let a = self.rows[i].pop_front().expect("row over capacity");
            let b = self.rows[i].pop_front().expect("row over capacity");
            if i + 1 == self.rows.len() {
                self.rows.push(VecDeque::new());
            }
            self.rows[i + 1].push_back(Bucket::merge(a, b));
            i += 1;
        }
    }

    fn drop_oldest(&mut self) {
        let Some(row) = self.rows.iter_mut().rev().find(|r| !r.is_empty()) else {
            return;
        };
        let bucket = row.pop_front().expect("nonempty row");
        self.width -= bucket.count;
        self.total -= bucket.sum;
        if self.width == 0 {
            self.total = 0.0;
            self.ssd = 0.0;
        } else {
            let delta = bucket.mean() - self.mean();
            let w = self.width as f64;
            let n = bucket.count as f64;
            self.ssd = (self.ssd - bucket.ssd - n * w / (n + w) * delta * delta).max(0.0);
        }
        while self.rows.last().is_some_and(VecDeque::is_empty) {
            self.rows.pop();
        }
    }

    fn detect(&mut self) -> bool {
        let mut changed = false;
        while self.width > self.config.min_window && self.find_cut() {
            self.drop_oldest();
            changed = true;
        }
        changed
    }

    fn find_cut(&self) -> bool {
        let n = self.width as f64;
        let dd = match self.config.bound {
            CutBound::UnionBound => (2.0 * n / self.config.delta).ln(),
            CutBound::LogLog => (2.0 * n.ln() / self.config.delta).ln(),
        };
        let variance = self.variance();
        let floor = self.config.min_sub_window;
        let mut n0 = 0usize;
        let mut s0 = 0.0;
        let buckets = self.bucket_count();
        // every boundary between consecutive buckets, oldest first
        for (seen, (count, sum)) in self.buckets().enumerate() {
            if seen + 1 == buckets {
                break;
            }
            n0 += count;
            s0 += sum;
            let n1 = self.width - n0;
            if n0 <= floor || n1 <= floor {
                continue;
            }
            let diff = s0 / n0 as f64 - (self.total - s0) / n1 as f64;
            let m = 1.0 / (n0 - floor + 1) as f64 + 1.0 / (n1 - floor + 1) as f64;
            let eps = (2.0 * m * variance * dd).sqrt() + 2.0 / 3.0 * dd * m;
            if diff.abs() > eps {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_stream_never_fires() {
        let mut a = Adwin::default();
        for _ in 0..10_000 {
            assert!(!a.add(0.5).unwrap());
        }
        assert_eq!(a.width(), 10_000);
        assert!((a.mean() - 0.5).abs() < 1e-12);
        assert!(a.bucket_count() < 100);
    }

    #[test]
    fn loglog_bound_reacts_no_later() {
        let run = |bound| {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let mut a = Adwin::new(AdwinConfig { bound, ..Default::default() });
            (0..1000)
                .position(|i| {
                    let p = if i < 500 { 0.2 } else { 0.8 };
                    a.add(f64::from(u8::from(rng.gen_bool(p)))).unwrap() && i >= 500
                })
                .expect("shift missed")
        };
        assert!(run(CutBound::LogLog) <= run(CutBound::UnionBound));
    }

    #[test]
    fn abrupt_shift_is_detected_quickly() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut a = Adwin::default();
        for _ in 0..500 {
            a.add(f64::from(u8::from(rng.gen_bool(0.2)))).unwrap();
        }
        let before = a.width();
        let mut detected_at = None;
        for t in 0..500 {
            if a.add(f64::from(u8::from(rng.gen_bool(0.8)))).unwrap() && detected_at.is_none() {
                detected_at = Some(t);
            }
        }
        let t = detected_at.expect("shift missed");
        assert!(t < 100, "detected after {t}");
        assert!(a.width() < before + 500);
    }

    #[test]
    fn rejects_out_of_range() {
        let mut a = Adwin::default();
        assert!(a.add(1.5).is_err());
        assert!(a.add(-0.1).is_err());
        assert!(a.add(f64::NAN).is_err());
        assert_eq!(a.width(), 0);
    }

    #[test]
    fn reset_clears_window() {
        let mut a = Adwin::default();
        for _ in 0..50 {
            a.add(1.0).unwrap();
        }
        a.reset();
        assert_eq!(a.width(), 0);
        assert_eq!(a.bucket_count(), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn window_statistics_match_retained_values(
            values in prop::collection::vec(0.0f64..=1.0, 1..600),
            shift in 0usize..600,
        ) {
            let mut a = Adwin::default();
            let mut kept: VecDeque<f64> = VecDeque::new();
            for (i, v) in values.iter().enumerate() {
                // force some cuts with a late jump
                let v = if i >= shift { 1.0 - v * 0.05 } else { v * 0.05 };
                a.add(v).unwrap();
                kept.push_back(v);
                while kept.len() > a.width() {
                    kept.pop_front();
                }
            }
            let n = kept.len() as f64;
            let mean = kept.iter().sum::<f64>() / n;
            let var = kept.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            prop_assert!((a.mean() - mean).abs() < 1e-9);
            prop_assert!((a.variance() - var).abs() < 1e-9);
            let (count, sum) = a.buckets().fold((0, 0.0), |(c, s), (bc, bs)| (c + bc, s + bs));
            prop_assert_eq!(count, a.width());
            prop_assert!((sum - a.total()).abs() < 1e-9);
            // dropped buckets were the oldest: the retained sums line up
            let mut rest = kept.iter();
            for (bc, bs) in a.buckets() {
                let chunk: f64 = rest.by_ref().take(bc).sum();
                prop_assert!((chunk - bs).abs() < 1e-9);
            }
        }
    }
}

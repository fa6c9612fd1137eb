//! Prequential (test-then-train) evaluation and the multi-label metric suite.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::domain::{Instance, LabelVector};
use crate::error::{Error, Result};
use crate::transforms::MultiLabelLearner;

/// Example-based scores of one prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceMetrics {
    pub exact_match: f64,
    pub hamming: f64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Scores `predicted` against `truth`.
///
/// Empty sets: precision is 1 when both sets are empty and 0 when only the
/// prediction is empty; recall mirrors this; F1 is 0 when precision and
/// recall are both 0; accuracy of two empty sets is 1.
pub fn instance_metrics(truth: &LabelVector, predicted: &LabelVector) -> Result<InstanceMetrics> {
    if truth.len() != predicted.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: predicted.len(),
        });
    }
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (&y, &p) in truth.bits().iter().zip(predicted.bits()) {
        match (y, p) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            _ => {}
        }
    }
    let l = truth.len();
    let n_pred = tp + fp;
    let n_true = tp + fn_;
    let union = tp + fp + fn_;
    let ratio = |num: usize, den: usize, both_empty: bool| {
        if den > 0 {
            num as f64 / den as f64
        } else if both_empty {
            1.0
        } else {
            0.0
        }
    };
    let precision = ratio(tp, n_pred, n_true == 0);
    let recall = ratio(tp, n_true, n_pred == 0);
    // harmonic mean of precision and recall, from integer counts
    let f1 = ratio(2 * tp, n_true + n_pred, true);
    Ok(InstanceMetrics {
        exact_match: if fp + fn_ == 0 { 1.0 } else { 0.0 },
        hamming: if l == 0 { 1.0 } else { (l - fp - fn_) as f64 / l as f64 },
        accuracy: ratio(tp, union, true),
        precision,
        recall,
        f1,
    })
}

/// Per-label confusion tallies plus running sums of the example-based scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: Vec<u64>,
    pub fp: Vec<u64>,
    pub fn_: Vec<u64>,
    pub tn: Vec<u64>,
    sums: [f64; 6],
    instances: u64,
}

impl ConfusionCounts {
    pub fn new(labels: usize) -> Self {
        ConfusionCounts {
            tp: vec![0; labels],
            fp: vec![0; labels],
            fn_: vec![0; labels],
            tn: vec![0; labels],
            sums: [0.0; 6],
            instances: 0,
        }
    }

    pub fn label_count(&self) -> usize {
        self.tp.len()
    }

    pub fn instances(&self) -> u64 {
        self.instances
    }

    pub fn record(&mut self, truth: &LabelVector, predicted: &LabelVector) -> Result<InstanceMetrics> {
        if truth.len() != self.label_count() {
            return Err(Error::DimensionMismatch {
                expected: self.label_count(),
                found: truth.len(),
            });
        }
        let m = instance_metrics(truth, predicted)?;
        for (j, (&y, &p)) in truth.bits().iter().zip(predicted.bits()).enumerate() {
            let cell = match (y, p) {
                (true, true) => &mut self.tp[j],
                (false, true) => &mut self.fp[j],
                (true, false) => &mut self.fn_[j],
                (false, false) => &mut self.tn[j],
            };
            *cell += 1;
        }
        let values = [m.exact_match, m.hamming, m.accuracy, m.precision, m.recall, m.f1];
        for (s, v) in self.sums.iter_mut().zip(values) {
            *s += v;
        }
        self.instances += 1;
        Ok(m)
    }

    /// Means of the example-based scores; zeros before any record.
    pub fn example_based(&self) -> InstanceMetrics {
        let n = self.instances.max(1) as f64;
        let [e, h, a, p, r, f] = self.sums.map(|s| s / n);
        InstanceMetrics {
            exact_match: e,
            hamming: h,
            accuracy: a,
            precision: p,
            recall: r,
            f1: f,
        }
    }

    pub fn metrics(&self) -> Metrics {
        let ex = self.example_based();
        let lb = micro_macro(self);
        Metrics {
            exact_match: ex.exact_match,
            hamming_score: ex.hamming,
            acc_ex: ex.accuracy,
            prec_ex: ex.precision,
            rec_ex: ex.recall,
            f1_ex: ex.f1,
            micro_precision: lb.micro_precision,
            micro_recall: lb.micro_recall,
            micro_f1: lb.micro_f1,
            macro_precision: lb.macro_precision,
            macro_recall: lb.macro_recall,
            macro_f1: lb.macro_f1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelBased {
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
}

fn prf(tp: u64, fp: u64, fn_: u64) -> (f64, f64, f64) {
    let div = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let p = div(tp, tp + fp);
    let r = div(tp, tp + fn_);
    let f = div(2 * tp, 2 * tp + fp + fn_);
    (p, r, f)
}

/// Micro averages pool the tallies over labels; macro averages are the
/// uniform mean over all `L` labels with `0/0 = 0`.
pub fn micro_macro(counts: &ConfusionCounts) -> LabelBased {
    let sum = |v: &[u64]| v.iter().sum::<u64>();
    let (micro_precision, micro_recall, micro_f1) = prf(sum(&counts.tp), sum(&counts.fp), sum(&counts.fn_));
    let l = counts.label_count();
    let mut macro_ = [0.0; 3];
    for j in 0..l {
        let (p, r, f) = prf(counts.tp[j], counts.fp[j], counts.fn_[j]);
        macro_[0] += p;
        macro_[1] += r;
        macro_[2] += f;
    }
    let l = l.max(1) as f64;
    LabelBased {
        micro_precision,
        micro_recall,
        micro_f1,
        macro_precision: macro_[0] / l,
        macro_recall: macro_[1] / l,
        macro_f1: macro_[2] / l,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub exact_match: f64,
    pub hamming_score: f64,
    pub acc_ex: f64,
    pub prec_ex: f64,
    pub rec_ex: f64,
    pub f1_ex: f64,
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
}

impl Metrics {
    pub const NAMES: [&'static str; 12] = [
        "exact_match",
        "hamming_score",
        "acc_ex",
        "prec_ex",
        "rec_ex",
        "f1_ex",
        "micro_precision",
        "micro_recall",
        "micro_f1",
        "macro_precision",
        "macro_recall",
        "macro_f1",
    ];

    pub fn values(&self) -> [f64; 12] {
        [
            self.exact_match,
            self.hamming_score,
            self.acc_ex,
            self.prec_ex,
            self.rec_ex,
            self.f1_ex,
            self.micro_precision,
            self.micro_recall,
            self.micro_f1,
            self.macro_precision,
            self.macro_recall,
            self.macro_f1,
        ]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Self::NAMES.iter().position(|n| *n == name).map(|i| self.values()[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// Instances scored.
    pub instances: u64,
    #[serde(flatten)]
    pub metrics: Metrics,
    pub elapsed_seconds: f64,
    pub model_bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub window_index: usize,
    /// Stream position (instances consumed) when the window closed.
    pub instances_seen: u64,
    pub report: MetricReport,
}

/// Tumbling windows of `size` scored instances.
#[derive(Debug, Clone)]
pub struct EvaluationWindow {
    size: usize,
    current: ConfusionCounts,
    reports: Vec<WindowReport>,
}

impl EvaluationWindow {
    pub fn new(size: usize, labels: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::contract("window size must be positive"));
        }
        Ok(EvaluationWindow {
            size,
            current: ConfusionCounts::new(labels),
            reports: Vec::new(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn pending(&self) -> u64 {
        self.current.instances()
    }

    /// Adds one record; returns the report of a window it completes.
    /// `model_bytes` is only evaluated when a window closes.
    pub fn record(
        &mut self,
        truth: &LabelVector,
        predicted: &LabelVector,
        instances_seen: u64,
        elapsed_seconds: f64,
        model_bytes: impl FnOnce() -> usize,
    ) -> Result<Option<&WindowReport>> {
        self.current.record(truth, predicted)?;
        if self.current.instances() < self.size as u64 {
            return Ok(None);
        }
        let report = MetricReport {
            instances: self.current.instances(),
            metrics: self.current.metrics(),
            elapsed_seconds,
            model_bytes: model_bytes(),
        };
        self.reports.push(WindowReport {
            window_index: self.reports.len(),
            instances_seen,
            report,
        });
        self.current = ConfusionCounts::new(self.current.label_count());
        Ok(self.reports.last())
    }

    pub fn reports(&self) -> &[WindowReport] {
        &self.reports
    }

    pub fn into_reports(self) -> Vec<WindowReport> {
        self.reports
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// Cumulative report over every scored instance.
    pub cumulative: MetricReport,
    pub windows: Vec<WindowReport>,
    pub counts: ConfusionCounts,
    pub instances_seen: u64,
    /// Instances trained on before the learner could predict.
    pub warmup: u64,
}

/// Interleaved test-then-train: each instance is first scored (once the
/// learner is ready) and then used for training.
pub fn prequential_run<M, I>(learner: &mut M, stream: I, window: usize) -> Result<RunOutcome>
where
    M: MultiLabelLearner + ?Sized,
    I: IntoIterator<Item = Result<Instance>>,
{
    let labels = learner.label_count();
    let mut windows = EvaluationWindow::new(window, labels)?;
    let mut counts = ConfusionCounts::new(labels);
    let start = Instant::now();
    let mut seen = 0u64;
    let mut warmup = 0u64;
    for item in stream {
        let instance = item?;
        let truth = instance.labels.as_ref().ok_or(Error::Unlabeled(seen as usize))?;
        if learner.is_ready() {
            let predicted = learner.predict(&instance.features);
            counts.record(truth, &predicted)?;
            windows.record(
                truth,
                &predicted,
                seen + 1,
                start.elapsed().as_secs_f64(),
                || learner.size_estimate(),
            )?;
        } else {
            warmup += 1;
        }
        learner.train_instance(&instance)?;
        seen += 1;
    }
    Ok(RunOutcome {
        cumulative: MetricReport {
            instances: counts.instances(),
            metrics: counts.metrics(),
            elapsed_seconds: start.elapsed().as_secs_f64(),
            model_bytes: learner.size_estimate(),
        },
        windows: windows.into_reports(),
        counts,
        instances_seen: seen,
        warmup,
    })
}

/// One CSV row per window.
pub fn write_windows_csv<W: Write>(out: &mut W, windows: &[WindowReport]) -> Result<()> {
    write!(out, "window_index,instances_seen,instances")?;
    for name in Metrics::NAMES {
        write!(out, ",{name}")?;
    }
    writeln!(out, ",elapsed_seconds,model_bytes")?;
    for w in windows {
        write!(out, "{},{},{}", w.window_index, w.instances_seen, w.report.instances)?;
        for v in w.report.metrics.values() {
            write!(out, ",{v}")?;
        }
        writeln!(out, ",{},{}", w.report.elapsed_seconds, w.report.model_bytes)?;
    }
    Ok(())
}

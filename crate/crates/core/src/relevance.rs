//! Score normalization, prior-relevance thresholding and dataset label statistics.

use crate::domain::{LabelVector, RelevanceVector};
use crate::error::{Error, Result};

/// Rescales nonnegative scores so they sum to one.
///
/// A zero-sum vector carries no preference between labels and maps to the
/// uniform vector `1/L`.
pub fn normalize_relevance(raw: &RelevanceVector) -> Result<RelevanceVector> {
    normalize_scores(raw.scores()).map(RelevanceVector::normalized)
}

pub(crate) fn normalize_scores(raw: &[f64]) -> Result<Vec<f64>> {
    if let Some((j, v)) = raw.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::contract(format!("relevance score {j} is {v}; expected >= 0")));
    }
    let total: f64 = raw.iter().sum();
    if raw.is_empty() {
        return Ok(Vec::new());
    }
    if total <= 0.0 || !total.is_finite() {
        let uniform = 1.0 / raw.len() as f64;
        return Ok(vec![uniform; raw.len()]);
    }
    Ok(raw.iter().map(|v| v / total).collect())
}

/// Marks label `j` relevant iff its normalized score strictly exceeds `1/L`.
///
/// A perfectly uniform vector therefore predicts the empty labelset.
pub fn threshold_relevance(normalized: &RelevanceVector) -> LabelVector {
    threshold_scores(normalized.scores())
}

pub(crate) fn threshold_scores(normalized: &[f64]) -> LabelVector {
    let cutoff = 1.0 / normalized.len().max(1) as f64;
    LabelVector::new(normalized.iter().map(|&s| s > cutoff).collect())
}

/// Normalize then threshold; negative combined scores count as zero relevance.
pub fn predict_labels(raw: &[f64]) -> LabelVector {
    let clipped: Vec<f64> = raw.iter().map(|&v| if v > 0.0 { v } else { 0.0 }).collect();
    // clipped scores are nonnegative, so normalization cannot fail
    let normalized = normalize_scores(&clipped).unwrap_or_else(|_| vec![0.0; raw.len()]);
    threshold_scores(&normalized)
}

/// Mean number of relevant labels per instance, `LC`.
pub fn label_cardinality<'a, I>(labels: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a LabelVector>,
{
    Ok(label_stats(labels)?.0)
}

/// `LC / L`.
pub fn label_density<'a, I>(labels: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a LabelVector>,
{
    let (lc, l) = label_stats(labels)?;
    Ok(if l == 0 { 0.0 } else { lc / l as f64 })
}

fn label_stats<'a, I>(labels: I) -> Result<(f64, usize)>
where
    I: IntoIterator<Item = &'a LabelVector>,
{
    let mut count = 0usize;
    let mut relevant = 0usize;
    let mut width = None;
    for y in labels {
        match width {
            None => width = Some(y.len()),
            Some(l) if l != y.len() => {
                return Err(Error::DimensionMismatch {
                    expected: l,
                    found: y.len(),
                })
            }
            _ => {}
        }
        count += 1;
        relevant += y.cardinality();
    }
    if count == 0 {
        return Err(Error::EmptyDataset);
    }
    Ok((relevant as f64 / count as f64, width.unwrap_or(0)))
}

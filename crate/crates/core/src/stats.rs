//! Friedman test, Nemenyi critical distance and critical-distance diagrams.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Maximize,
    Minimize,
}

/// How tied scores within a dataset share rank positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TieMethod {
    /// Mean of the tied positions; rows sum to `m(m+1)/2`.
    #[default]
    Average,
    /// Lowest tied position ("competition" ranking).
    Min,
}

/// Scores of `m` models on `D` datasets, one row per dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankMatrix {
    pub models: Vec<String>,
    pub datasets: Vec<String>,
    scores: Vec<Vec<f64>>,
    pub direction: Direction,
    pub ties: TieMethod,
}

impl RankMatrix {
    pub fn new(
        models: Vec<String>,
        datasets: Vec<String>,
        scores: Vec<Vec<f64>>,
        direction: Direction,
    ) -> Result<Self> {
        if models.len() < 2 {
            return Err(Error::Stats("at least two models are required".into()));
        }
        if datasets.len() < 2 {
            return Err(Error::Stats("at least two datasets are required".into()));
        }
        if scores.len() != datasets.len() {
            return Err(Error::Stats(format!(
                "{} score rows for {} datasets",
                scores.len(),
                datasets.len()
            )));
        }
        for (row, name) in scores.iter().zip(&datasets) {
            if row.len() != models.len() {
                return Err(Error::Stats(format!("dataset {name}: {} cells for {} models", row.len(), models.len())));
            }
            if let Some(i) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Stats(format!("dataset {name}: missing score for {}", models[i])));
            }
        }
        Ok(RankMatrix {
            models,
            datasets,
            scores,
            direction,
            ties: TieMethod::Average,
        })
    }

    pub fn with_ties(mut self, ties: TieMethod) -> Self {
        self.ties = ties;
        self
    }

    pub fn model_count(&self) -> usize {
        self.models.len()
    }

    pub fn dataset_count(&self) -> usize {
        self.datasets.len()
    }

    pub fn scores(&self) -> &[Vec<f64>] {
        &self.scores
    }

    /// Rank table, 1 = best.
    pub fn ranks(&self) -> Vec<Vec<f64>> {
        self.scores.iter().map(|row| rank_row(row, self.direction, self.ties)).collect()
    }
}

fn rank_row(row: &[f64], direction: Direction, ties: TieMethod) -> Vec<f64> {
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| match direction {
        Direction::Maximize => row[b].total_cmp(&row[a]),
        Direction::Minimize => row[a].total_cmp(&row[b]),
    });
    let mut ranks = vec![0.0; row.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && row[order[end]] == row[order[start]] {
            end += 1;
        }
        let rank = match ties {
            TieMethod::Average => (start + 1 + end) as f64 / 2.0,
            TieMethod::Min => (start + 1) as f64,
        };
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Column means of the rank table.
pub fn average_ranks(matrix: &RankMatrix) -> Vec<f64> {
    let ranks = matrix.ranks();
    let d = ranks.len() as f64;
    (0..matrix.model_count())
        .map(|j| ranks.iter().map(|r| r[j]).sum::<f64>() / d)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

impl FriedmanResult {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// `chi2 = 12D / (m(m+1)) * sum_j R_j^2 - 3D(m+1)` with `m - 1` degrees of
/// freedom.
pub fn friedman_statistic(matrix: &RankMatrix) -> FriedmanResult {
    let m = matrix.model_count() as f64;
    let d = matrix.dataset_count() as f64;
    let sum_sq: f64 = average_ranks(matrix).iter().map(|r| r * r).sum();
    let statistic = 12.0 * d / (m * (m + 1.0)) * sum_sq - 3.0 * d * (m + 1.0);
    // rounding can leave full ties a hair below zero
    let statistic = if statistic.abs() < 1e-9 { 0.0 } else { statistic };
    let dof = matrix.model_count() - 1;
    let chi = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    FriedmanResult {
        statistic,
        degrees_of_freedom: dof,
        p_value: chi.sf(statistic.max(0.0)),
    }
}

/// Two-tailed Nemenyi critical values `q_alpha` for `m = 2..=20`.
const Q_05: [f64; 19] = [
    1.960, 2.344, 2.569, 2.728, 2.850, 2.948, 3.031, 3.102, 3.164, 3.219, 3.268, 3.313, 3.354, 3.391, 3.426, 3.458,
    3.489, 3.517, 3.544,
];
const Q_10: [f64; 19] = [
    1.645, 2.052, 2.291, 2.460, 2.589, 2.693, 2.780, 2.855, 2.920, 2.978, 3.030, 3.077, 3.120, 3.159, 3.196, 3.230,
    3.261, 3.291, 3.319,
];

pub fn nemenyi_q(m: usize, alpha: f64) -> Result<f64> {
    let table = if (alpha - 0.05).abs() < 1e-12 {
        &Q_05
    } else if (alpha - 0.10).abs() < 1e-12 {
        &Q_10
    } else {
        return Err(Error::Stats(format!("no Nemenyi table for alpha = {alpha}; use 0.05 or 0.10")));
    };
    if !(2..=20).contains(&m) {
        return Err(Error::Stats(format!("Nemenyi table covers 2..=20 models, got {m}")));
    }
    Ok(table[m - 2])
}

/// `CD = q_alpha * sqrt(m(m+1) / (6D))`.
pub fn nemenyi_cd(m: usize, datasets: usize, alpha: f64) -> Result<f64> {
    if datasets == 0 {
        return Err(Error::Stats("at least one dataset is required".into()));
    }
    let q = nemenyi_q(m, alpha)?;
    let m = m as f64;
    Ok(q * (m * (m + 1.0) / (6.0 * datasets as f64)).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedModel {
    pub name: String,
    pub rank: f64,
}

/// A run of models on the sorted rank line whose extreme ranks differ by at
/// most the critical distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSegment {
    /// Positions in `CdDiagram::models`, inclusive.
    pub first: usize,
    pub last: usize,
    pub from_rank: f64,
    pub to_rank: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdDiagram {
    pub critical_distance: f64,
    /// Ascending by rank.
    pub models: Vec<RankedModel>,
    pub links: Vec<LinkSegment>,
}

impl CdDiagram {
    /// Whether two models (by name) share a link segment.
    pub fn linked(&self, a: &str, b: &str) -> bool {
        let pos = |n: &str| self.models.iter().position(|m| m.name == n);
        let (Some(a), Some(b)) = (pos(a), pos(b)) else {
            return false;
        };
        let (lo, hi) = (a.min(b), a.max(b));
        self.links.iter().any(|s| s.first <= lo && hi <= s.last)
    }

    /// Plain-text rendering: the rank line followed by one bar per link.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "critical distance: {:.3}", self.critical_distance);
        let width = self.models.iter().map(|m| m.name.len()).max().unwrap_or(0);
        for (i, m) in self.models.iter().enumerate() {
            let bars: String = self
                .links
                .iter()
                .map(|s| if s.first <= i && i <= s.last { '|' } else { ' ' })
                .collect();
            let _ = writeln!(out, "{:>6.2}  {:<width$}  {}", m.rank, m.name, bars.trim_end());
        }
        out
    }
}

/// Sorts models by rank and links every maximal contiguous run whose rank
/// spread is within `critical_distance`. Non-positive distances link nothing.
pub fn cd_diagram_data(names: &[String], ranks: &[f64], critical_distance: f64) -> CdDiagram {
    let mut models: Vec<RankedModel> = names
        .iter()
        .zip(ranks)
        .map(|(n, &r)| RankedModel {
            name: n.clone(),
            rank: r,
        })
        .collect();
    models.sort_by(|a, b| a.rank.total_cmp(&b.rank).then_with(|| a.name.cmp(&b.name)));
    let mut links = Vec::new();
    if critical_distance > 0.0 {
        let mut prev_last = None;
        for first in 0..models.len() {
            let mut last = first;
            while last + 1 < models.len() && models[last + 1].rank - models[first].rank <= critical_distance {
                last += 1;
            }
            // keep only runs not contained in the previous one
            if last > first && prev_last.map_or(true, |p| last > p) {
                links.push(LinkSegment {
                    first,
                    last,
                    from_rank: models[first].rank,
                    to_rank: models[last].rank,
                });
                prev_last = Some(last);
            }
        }
    }
    CdDiagram {
        critical_distance,
        models,
        links,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("m{i}")).collect()
    }

    fn matrix(scores: Vec<Vec<f64>>) -> RankMatrix {
        let m = scores[0].len();
        let d = scores.len();
        RankMatrix::new(names(m), names(d), scores, Direction::Maximize).unwrap()
    }

    #[test]
    fn rank_examples() {
        let full_ties = matrix(vec![vec![0.5; 4]; 3]);
        assert_eq!(average_ranks(&full_ties), vec![2.5; 4]);
        let dominant = matrix(vec![vec![0.9, 0.1, 0.5], vec![0.8, 0.7, 0.2]]);
        assert_eq!(average_ranks(&dominant)[0], 1.0);
        let min = matrix(vec![vec![0.5, 0.5, 0.1], vec![0.5, 0.5, 0.1]]).with_ties(TieMethod::Min);
        assert_eq!(average_ranks(&min), vec![1.0, 1.0, 3.0]);
        let minimize = RankMatrix::new(names(2), names(2), vec![vec![1.0, 2.0]; 2], Direction::Minimize).unwrap();
        assert_eq!(average_ranks(&minimize), vec![1.0, 2.0]);
    }

    #[test]
    fn matrix_validation() {
        assert!(RankMatrix::new(names(2), names(1), vec![vec![1.0, 2.0]], Direction::Maximize).is_err());
        assert!(RankMatrix::new(names(2), names(2), vec![vec![1.0, 2.0], vec![1.0]], Direction::Maximize).is_err());
        assert!(RankMatrix::new(names(2), names(2), vec![vec![1.0, f64::NAN]; 2], Direction::Maximize).is_err());
    }

    #[test]
    fn friedman_examples() {
        let strict = matrix(vec![vec![3.0, 2.0, 1.0]; 4]);
        let f = friedman_statistic(&strict);
        assert!((f.statistic - 8.0).abs() < 1e-12);
        assert_eq!(f.degrees_of_freedom, 2);
        assert!(f.rejects(0.05));
        assert!((ChiSquared::new(2.0).unwrap().inverse_cdf(0.95) - 5.991).abs() < 1e-3);

        let ties = friedman_statistic(&matrix(vec![vec![1.0; 3]; 4]));
        assert_eq!(ties.statistic, 0.0);
        assert!(!ties.rejects(0.05));

        let two = friedman_statistic(&matrix(vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]));
        assert!(two.statistic.is_finite() && two.p_value > 0.0);
    }

    #[test]
    fn nemenyi_examples() {
        assert!((nemenyi_cd(11, 7, 0.05).unwrap() - 5.707).abs() < 1e-3);
        let a = nemenyi_cd(5, 3, 0.05).unwrap();
        let b = nemenyi_cd(5, 12, 0.05).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
        assert!((nemenyi_cd(2, 9, 0.05).unwrap() - 1.960 / 3.0).abs() < 1e-12);
        assert!(nemenyi_cd(21, 5, 0.05).is_err());
        assert!(nemenyi_cd(1, 5, 0.05).is_err());
        assert!(nemenyi_cd(5, 5, 0.01).is_err());
        assert!(nemenyi_cd(5, 5, 0.10).unwrap() < nemenyi_cd(5, 5, 0.05).unwrap());
    }

    #[test]
    fn cd_monotonicity() {
        for m in 2..20 {
            assert!(nemenyi_cd(m + 1, 6, 0.05).unwrap() > nemenyi_cd(m, 6, 0.05).unwrap());
            assert!(nemenyi_cd(m, 7, 0.05).unwrap() < nemenyi_cd(m, 6, 0.05).unwrap());
        }
    }

    #[test]
    fn diagram_examples() {
        let n = names(4);
        let ranks = [1.0, 2.0, 3.5, 4.0];
        let all = cd_diagram_data(&n, &ranks, 10.0);
        assert_eq!(all.links.len(), 1);
        assert_eq!((all.links[0].first, all.links[0].last), (0, 3));
        assert!(cd_diagram_data(&n, &ranks, 0.0).links.is_empty());

        let mid = cd_diagram_data(&n, &ranks, 1.5);
        let spans: Vec<(usize, usize)> = mid.links.iter().map(|s| (s.first, s.last)).collect();
        assert_eq!(spans, vec![(0, 1), (1, 2), (2, 3)]);
        assert!(mid.linked("m0", "m1") && mid.linked("m3", "m2") && !mid.linked("m1", "m3"));
        assert!(mid.render().contains("m3"));
    }

    proptest! {
        #[test]
        fn rank_rows_sum_to_triangular_number(
            rows in prop::collection::vec(prop::collection::vec(0u8..4, 5), 2..6)
        ) {
            let scores: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| f64::from(v)).collect()).collect();
            let m = matrix(scores);
            for row in m.ranks() {
                prop_assert!((row.iter().sum::<f64>() - 15.0).abs() < 1e-12);
            }
        }

        #[test]
        fn friedman_is_invariant_under_monotone_maps(
            rows in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 4), 2..6)
        ) {
            let base = friedman_statistic(&matrix(rows.clone()));
            let mapped: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| v.exp() * 3.0 + 1.0).collect()).collect();
            let other = friedman_statistic(&matrix(mapped));
            prop_assert!((base.statistic - other.statistic).abs() < 1e-9);
        }

        #[test]
        fn links_are_contiguous_and_within_cd(
            ranks in prop::collection::vec(1.0f64..10.0, 2..12),
            cd in 0.1f64..4.0,
        ) {
            let n = names(ranks.len());
            let diagram = cd_diagram_data(&n, &ranks, cd);
            for s in &diagram.links {
                prop_assert!(s.first < s.last);
                prop_assert!(s.to_rank - s.from_rank <= cd);
            }
            // every pair within cd is covered by some segment
            for i in 0..diagram.models.len() {
                for j in i + 1..diagram.models.len() {
                    let within = diagram.models[j].rank - diagram.models[i].rank <= cd;
                    prop_assert_eq!(within, diagram.linked(&diagram.models[i].name, &diagram.models[j].name));
                }
            }
        }
    }
}

//! Least-squares component weighting: the normal equations `A w = d`.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::domain::LabelVector;
use crate::error::{Error, Result};

/// Dense row-major `n x n` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Ok(SquareMatrix {
            n,
            data: rows.concat(),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n + c]
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.n + c] += v;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.rows().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    fn shifted(&self, lambda: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m.data[i * self.n + i] += lambda;
        }
        m
    }
}

/// How a weight vector was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMethod {
    Direct,
    Regularized,
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSolution {
    pub weights: Vec<f64>,
    pub method: SolveMethod,
}

const PIVOT_TOLERANCE: f64 = 1e-12;
const RIDGE_SCALE: f64 = 1e-8;

/// Gaussian elimination with partial pivoting. A pivot below
/// `1e-12 * max|A|` counts as singular; the system is then retried with a
/// small ridge `1e-8 * trace(A) / K` and, failing that, uniform weights.
pub fn solve_weights(a: &SquareMatrix, d: &[f64]) -> Result<WeightSolution> {
    let k = a.size();
    if d.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: d.len(),
        });
    }
    if k == 0 {
        return Ok(WeightSolution {
            weights: Vec::new(),
            method: SolveMethod::Direct,
        });
    }
    if let Some(weights) = gaussian_elimination(a, d) {
        return Ok(WeightSolution {
            weights,
            method: SolveMethod::Direct,
        });
    }
    let lambda = RIDGE_SCALE * a.trace() / k as f64;
    if lambda > 0.0 {
        if let Some(weights) = gaussian_elimination(&a.shifted(lambda), d) {
            return Ok(WeightSolution {
                weights,
                method: SolveMethod::Regularized,
            });
        }
    }
    warn!("weight system singular for K={k}; falling back to uniform weights");
    Ok(WeightSolution {
        weights: vec![1.0 / k as f64; k],
        method: SolveMethod::Uniform,
    })
}

fn gaussian_elimination(a: &SquareMatrix, d: &[f64]) -> Option<Vec<f64>> {
    let n = a.size();
    let tol = PIVOT_TOLERANCE * a.max_abs();
    if tol == 0.0 || !tol.is_finite() {
        return None;
    }
    let mut m = a.data.clone();
    let mut rhs = d.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| m[r1 * n + col].abs().total_cmp(&m[r2 * n + col].abs()))
            .unwrap_or(col);
        if m[pivot_row * n + col].abs() < tol {
            return None;
        }
        if pivot_row != col {
            for c in 0..n {
                m.swap(col * n + c, pivot_row * n + c);
            }
            rhs.swap(col, pivot_row);
        }
        let pivot = m[col * n + col];
        for r in col + 1..n {
            let factor = m[r * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                m[r * n + c] -= factor * m[col * n + c];
            }
            rhs[r] -= factor * rhs[col];
        }
    }
    let mut w = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|c| m[r * n + c] * w[c]).sum();
        w[r] = (rhs[r] - tail) / m[r * n + r];
    }
    w.iter().all(|v| v.is_finite()).then_some(w)
}

/// `y_j = sum_k w_k S_kj` over component score rows.
pub fn weighted_vote(scores: &[Vec<f64>], weights: &[f64], labels: usize) -> Vec<f64> {
    debug_assert_eq!(scores.len(), weights.len());
    let mut out = vec![0.0; labels];
    for (row, &w) in scores.iter().zip(weights) {
        for (o, s) in out.iter_mut().zip(row) {
            *o += w * s;
        }
    }
    out
}

/// Running normal equations over one chunk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightAccumulator {
    a: SquareMatrix,
    d: Vec<f64>,
    instances: usize,
}

impl WeightAccumulator {
    pub fn new(components: usize) -> Self {
        WeightAccumulator {
            a: SquareMatrix::zeros(components),
            d: vec![0.0; components],
            instances: 0,
        }
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.a
    }

    pub fn remainder(&self) -> &[f64] {
        &self.d
    }

    pub fn instances(&self) -> usize {
        self.instances
    }

    /// `a_qk += sum_j S_qj S_kj` and `d_q += sum_j y_j S_qj` for one instance.
    pub fn accumulate(&mut self, scores: &[Vec<f64>], truth: &LabelVector) -> Result<()> {
        let k = self.d.len();
        if scores.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: scores.len(),
            });
        }
        if let Some(bad) = scores.iter().find(|s| s.len() != truth.len()) {
            return Err(Error::DimensionMismatch {
                expected: truth.len(),
                found: bad.len(),
            });
        }
        for q in 0..k {
            for c in q..k {
                let dot: f64 = scores[q].iter().zip(&scores[c]).map(|(a, b)| a * b).sum();
                self.a.add_to(q, c, dot);
                if c != q {
                    self.a.add_to(c, q, dot);
                }
            }
            self.d[q] += truth.relevant().map(|j| scores[q][j]).sum::<f64>();
        }
        self.instances += 1;
        Ok(())
    }

    pub fn solve(&self) -> Result<WeightSolution> {
        solve_weights(&self.a, &self.d)
    }
}

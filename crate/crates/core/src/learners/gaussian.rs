use serde::{Deserialize, Serialize};

/// Floor applied to every variance before it is used in a density.
pub const VARIANCE_FLOOR: f64 = 1e-6;

/// One-pass (Welford) mean and variance accumulator.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GaussianEstimator {
    count: f64,
    mean: f64,
    m2: f64,
}

impl GaussianEstimator {
    pub fn add(&mut self, value: f64) {
        self.count += 1.0;
        let delta = value - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (value - self.mean);
    }

    pub fn count(&self) -> f64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero below two observations.
    pub fn variance(&self) -> f64 {
        if self.count > 1.0 {
            (self.m2 / (self.count - 1.0)).max(0.0)
        } else {
            0.0
        }
    }

    pub fn floored_variance(&self) -> f64 {
        self.variance().max(VARIANCE_FLOOR)
    }

    pub fn log_density(&self, x: f64) -> f64 {
        let var = self.floored_variance();
        let d = x - self.mean;
        -0.5 * (2.0 * std::f64::consts::PI * var).ln() - d * d / (2.0 * var)
    }

    /// Share of this class's mass expected at or below `threshold`.
    pub fn weight_at_or_below(&self, threshold: f64) -> f64 {
        if self.count == 0.0 {
            return 0.0;
        }
        let sd = self.floored_variance().sqrt();
        let z = (threshold - self.mean) / (sd * std::f64::consts::SQRT_2);
        self.count * 0.5 * (1.0 + statrs::function::erf::erf(z))
    }
}

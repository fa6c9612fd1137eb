//! Seeded synthetic multi-label streams with an optional abrupt drift.
//!
//! Each instance draws a labelset first (independent Bernoulli labels with a
//! shared density, plus an optional copy dependency between neighbouring
//! labels), then every numeric feature is Gaussian with a mean that is a
//! fixed linear function of the labelset. After `drift_point` all feature
//! means move by `shift`, and with `flip_labels` the emitted labelset is
//! complemented so that the feature-to-label concept inverts.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::arff::{self, Attribute, AttributeKind, StreamHeader};
use crate::domain::{Instance, LabelVector, Value};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticStreamConfig {
    pub labels: usize,
    pub features: usize,
    pub instances: usize,
    pub seed: u64,
    pub drift_point: Option<usize>,
    /// Added to every feature mean from `drift_point` on.
    pub shift: f64,
    /// Complement the labelset after the drift point.
    pub flip_labels: bool,
    /// Marginal probability of each label being relevant.
    pub label_density: f64,
    /// Probability that label `j` copies label `j-1` instead of being drawn.
    pub label_correlation: f64,
    /// Scale of the label-to-feature coefficients; larger is easier.
    pub signal: f64,
    pub noise: f64,
    /// Emit features as binary nominals (sign of the numeric value).
    pub binary_features: bool,
}

impl Default for SyntheticStreamConfig {
    fn default() -> Self {
        SyntheticStreamConfig {
            labels: 5,
            features: 10,
            instances: 1000,
            seed: 1,
            drift_point: None,
            shift: 0.0,
            flip_labels: false,
            label_density: 0.3,
            label_correlation: 0.0,
            signal: 1.0,
            noise: 1.0,
            binary_features: false,
        }
    }
}

impl SyntheticStreamConfig {
    pub fn validate(&self) -> Result<()> {
        if self.labels == 0 || self.features == 0 {
            return Err(Error::contract("synthetic stream needs at least one label and one feature"));
        }
        if let Some(p) = self.drift_point {
            if p >= self.instances {
                return Err(Error::contract(format!(
                    "drift point {p} must precede the stream end {}",
                    self.instances
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.label_density) || !(0.0..=1.0).contains(&self.label_correlation) {
            return Err(Error::contract("label density and correlation must lie in [0,1]"));
        }
        if !(self.noise > 0.0) {
            return Err(Error::contract("noise must be positive"));
        }
        Ok(())
    }

    pub fn header(&self) -> StreamHeader {
        let mut attributes: Vec<Attribute> = (0..self.labels)
            .map(|j| Attribute {
                name: format!("label{j}"),
                kind: AttributeKind::Nominal(vec!["0".into(), "1".into()]),
            })
            .collect();
        attributes.extend((0..self.features).map(|m| Attribute {
            name: format!("x{m}"),
            kind: if self.binary_features {
                AttributeKind::Nominal(vec!["0".into(), "1".into()])
            } else {
                AttributeKind::Numeric
            },
        }));
        StreamHeader {
            relation_name: format!("synthetic: -C {}", self.labels),
            label_count: self.labels,
            labels_at_front: true,
            attributes,
        }
    }

    pub fn generate(&self) -> Result<SyntheticStream> {
        SyntheticStream::new(self.clone())
    }
}

/// Iterator over the generated instances; deterministic for a fixed seed.
pub struct SyntheticStream {
    config: SyntheticStreamConfig,
    rng: ChaCha8Rng,
    coefficients: Vec<Vec<f64>>,
    noise: Normal<f64>,
    emitted: usize,
}

impl SyntheticStream {
    fn new(config: SyntheticStreamConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let coef = Normal::new(0.0, config.signal.abs().max(f64::MIN_POSITIVE)).expect("finite scale");
        let coefficients = (0..config.features)
            .map(|_| (0..config.labels).map(|_| coef.sample(&mut rng)).collect())
            .collect();
        let noise = Normal::new(0.0, config.noise).expect("positive noise");
        Ok(SyntheticStream {
            config,
            rng,
            coefficients,
            noise,
            emitted: 0,
        })
    }

    pub fn config(&self) -> &SyntheticStreamConfig {
        &self.config
    }

    fn drifted(&self) -> bool {
        self.config.drift_point.is_some_and(|p| self.emitted >= p)
    }
}

impl Iterator for SyntheticStream {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        if self.emitted >= self.config.instances {
            return None;
        }
        let cfg = &self.config;
        let mut latent = Vec::with_capacity(cfg.labels);
        for j in 0..cfg.labels {
            let bit = if j > 0 && self.rng.gen_bool(cfg.label_correlation) {
                latent[j - 1]
            } else {
                self.rng.gen_bool(cfg.label_density)
            };
            latent.push(bit);
        }
        let drifted = self.drifted();
        let shift = if drifted { cfg.shift } else { 0.0 };
        let features = self
            .coefficients
            .iter()
            .map(|row| {
                let mean: f64 = row
                    .iter()
                    .zip(&latent)
                    .map(|(c, &y)| if y { *c } else { -*c })
                    .sum::<f64>()
                    + shift;
                let v = mean + self.noise.sample(&mut self.rng);
                if cfg.binary_features {
                    Value::Nominal(u32::from(v > 0.0))
                } else {
                    Value::Numeric(v)
                }
            })
            .collect();
        let labels = if drifted && cfg.flip_labels {
            latent.iter().map(|b| !b).collect()
        } else {
            latent
        };
        self.emitted += 1;
        Some(Instance::labeled(features, LabelVector::new(labels)))
    }
}

/// Writes the whole stream as a MEKA-style ARFF file.
pub fn write_arff<W: Write>(out: &mut W, config: &SyntheticStreamConfig) -> Result<()> {
    let header = config.header();
    writeln!(out, "% synthetic multi-label stream")?;
    writeln!(out, "% seed: {}", config.seed)?;
    if let Some(p) = config.drift_point {
        writeln!(out, "% drift_point: {p}")?;
        writeln!(out, "% drift_shift: {}", config.shift)?;
        writeln!(out, "% drift_flip_labels: {}", config.flip_labels)?;
    }
    arff::write_header(out, &header)?;
    for instance in config.generate()? {
        writeln!(out, "{}", arff::format_instance(&header, &instance)?)?;
    }
    Ok(())
}

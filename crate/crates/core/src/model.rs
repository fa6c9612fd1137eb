//! Named model configurations and versioned checkpoints.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{FeatureSchema, LabelVector, RelevanceVector, Value};
use crate::ensembles::{AdwinBag, Goowe, GooweConfig, OzaBag};
use crate::error::{Error, Result};
use crate::transforms::{MultiLabelLearner, TransformFactory, TransformKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EnsembleKind {
    Goowe,
    OzaBag,
    AdwinBag,
}

/// The closed set of runnable models: an ensemble over a transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModelKind {
    pub ensemble: EnsembleKind,
    pub transform: TransformKind,
}

impl ModelKind {
    pub const ALL: [&'static str; 9] = ["goowe-br", "goowe-cc", "goowe-ps", "ebr", "ecc", "eps", "eabr", "eacc", "eaps"];

    pub fn id(&self) -> String {
        let t = self.transform.short_name();
        match self.ensemble {
            EnsembleKind::Goowe => format!("goowe-{t}"),
            EnsembleKind::OzaBag => format!("e{t}"),
            EnsembleKind::AdwinBag => format!("ea{t}"),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        let (ensemble, rest) = if let Some(r) = lower.strip_prefix("goowe-") {
            (EnsembleKind::Goowe, r)
        } else if let Some(r) = lower.strip_prefix("ea") {
            (EnsembleKind::AdwinBag, r)
        } else if let Some(r) = lower.strip_prefix('e') {
            (EnsembleKind::OzaBag, r)
        } else {
            return Err(unknown_model(s));
        };
        let transform = match rest {
            "br" => TransformKind::BinaryRelevance,
            "cc" => TransformKind::ClassifierChain,
            "ps" => TransformKind::PrunedSets,
            _ => return Err(unknown_model(s)),
        };
        Ok(ModelKind { ensemble, transform })
    }
}

fn unknown_model(s: &str) -> Error {
    Error::contract(format!("unknown model '{s}'; expected one of {}", ModelKind::ALL.join(", ")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Ensemble size `K`.
    pub ensemble_size: usize,
    /// Chunk size `h`; also the vocabulary buffer of incremental pruned sets.
    pub chunk_size: usize,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            ensemble_size: 10,
            chunk_size: 500,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Model {
    Goowe(Goowe),
    OzaBag(OzaBag),
    AdwinBag(AdwinBag),
}

impl Model {
    pub fn build(kind: ModelKind, schema: FeatureSchema, labels: usize, config: ModelConfig) -> Result<Self> {
        if labels == 0 {
            return Err(Error::contract("at least one label is required"));
        }
        let mut factory = TransformFactory::new(kind.transform, schema, labels);
        factory.pruned_sets.buffer_size = config.chunk_size;
        Ok(match kind.ensemble {
            EnsembleKind::Goowe => Model::Goowe(Goowe::new(
                factory,
                GooweConfig {
                    max_components: config.ensemble_size,
                    chunk_size: config.chunk_size,
                },
                config.seed,
            )?),
            EnsembleKind::OzaBag => Model::OzaBag(OzaBag::new(factory, config.ensemble_size, config.seed)?),
            EnsembleKind::AdwinBag => Model::AdwinBag(AdwinBag::new(factory, config.ensemble_size, config.seed)?),
        })
    }

    fn inner(&self) -> &dyn MultiLabelLearner {
        match self {
            Model::Goowe(m) => m,
            Model::OzaBag(m) => m,
            Model::AdwinBag(m) => m,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn MultiLabelLearner {
        match self {
            Model::Goowe(m) => m,
            Model::OzaBag(m) => m,
            Model::AdwinBag(m) => m,
        }
    }
}

impl MultiLabelLearner for Model {
    fn label_count(&self) -> usize {
        self.inner().label_count()
    }

    fn train(&mut self, features: &[Value], labels: &LabelVector) {
        self.inner_mut().train(features, labels)
    }

    fn predict_raw(&self, features: &[Value]) -> RelevanceVector {
        self.inner().predict_raw(features)
    }

    fn size_estimate(&self) -> usize {
        self.inner().size_estimate()
    }

    fn is_ready(&self) -> bool {
        self.inner().is_ready()
    }
}

const CHECKPOINT_FORMAT: &str = "gooweml-checkpoint";
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Checkpoint<M> {
    format: String,
    version: u32,
    model: M,
}

/// Writes a self-describing JSON checkpoint.
pub fn save_checkpoint<W: Write>(out: W, model: &Model) -> Result<()> {
    let checkpoint = Checkpoint {
        format: CHECKPOINT_FORMAT.to_string(),
        version: CHECKPOINT_VERSION,
        model,
    };
    serde_json::to_writer(out, &checkpoint)?;
    Ok(())
}

pub fn load_checkpoint<R: Read>(input: R) -> Result<Model> {
    let raw: Checkpoint<serde_json::Value> = serde_json::from_reader(input)?;
    if raw.format != CHECKPOINT_FORMAT {
        return Err(Error::Checkpoint(format!("not a checkpoint (format '{}')", raw.format)));
    }
    if raw.version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported checkpoint version {} (expected {CHECKPOINT_VERSION})",
            raw.version
        )));
    }
    Ok(serde_json::from_value(raw.model)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::SyntheticStreamConfig;

    #[test]
    fn ids_round_trip() {
        for id in ModelKind::ALL {
            let kind: ModelKind = id.parse().unwrap();
            assert_eq!(kind.id(), id);
        }
        assert!("goowe-rt".parse::<ModelKind>().is_err());
        assert!("ebrt".parse::<ModelKind>().is_err());
        assert!("xyz".parse::<ModelKind>().is_err());
        assert_eq!("GOOWE-CC".parse::<ModelKind>().unwrap().id(), "goowe-cc");
    }

    #[test]
    fn checkpoint_resumes_identically() {
        let cfg = SyntheticStreamConfig {
            labels: 3,
            features: 4,
            instances: 600,
            ..Default::default()
        };
        let header = cfg.header();
        let config = ModelConfig {
            ensemble_size: 3,
            chunk_size: 100,
            seed: 9,
        };
        for id in ModelKind::ALL {
            let kind: ModelKind = id.parse().unwrap();
            let mut a = Model::build(kind, header.schema(), 3, config).unwrap();
            let stream: Vec<_> = cfg.generate().unwrap().collect();
            for inst in &stream[..350] {
                a.train_instance(inst).unwrap();
            }
            let mut buf = Vec::new();
            save_checkpoint(&mut buf, &a).unwrap();
            let mut b = load_checkpoint(buf.as_slice()).unwrap();
            for inst in &stream[350..] {
                assert_eq!(a.predict_raw(&inst.features), b.predict_raw(&inst.features), "{id}");
                a.train_instance(inst).unwrap();
                b.train_instance(inst).unwrap();
            }
            assert_eq!(a.size_estimate(), b.size_estimate());
        }
    }

    #[test]
    fn rejects_foreign_checkpoints() {
        let bad = br#"{"format":"other","version":1,"model":null}"#;
        assert!(matches!(load_checkpoint(&bad[..]), Err(Error::Checkpoint(_))));
        let future = br#"{"format":"gooweml-checkpoint","version":2,"model":null}"#;
        assert!(matches!(load_checkpoint(&future[..]), Err(Error::Checkpoint(_))));
    }
}

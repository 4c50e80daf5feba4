//! Policy and value regression: training data, the in-tree linear learner,
//! model files and the bridge to external learners.

mod bridge;
mod data;
mod guidance;
mod model;
mod train;

use serde::{Deserialize, Serialize};

use crate::features::FeatureVector;

pub use bridge::{BoostedSettings, ExternalLearner};
pub use data::{append_examples, export_examples, import_examples, origin_path, read_examples, write_examples};
pub use guidance::{logit, policy_priors, sigmoid, softmax, value_estimate, Guidance};
pub use model::Model;
pub use train::{rmse, train, TrainConfig};

/// Lower clamp for value targets before taking the logit.
pub const VALUE_CLAMP_MIN: f64 = 0.01;
/// Upper clamp for value targets before taking the logit.
pub const VALUE_CLAMP_MAX: f64 = 0.99;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Policy,
    Value,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Policy => "policy",
            ModelKind::Value => "value",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "policy" => Some(ModelKind::Policy),
            "value" => Some(ModelKind::Value),
            _ => None,
        }
    }
}

/// Which search produced an example.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Origin {
    pub problem: String,
    pub iteration: u32,
    pub bigstep: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingExample {
    pub kind: ModelKind,
    pub features: FeatureVector,
    /// `ln r_a` for policy examples, `logit(clamp(v_b))` for value examples.
    pub target: f64,
    pub origin: Option<Origin>,
}

/// Value regression target for a bigstep value in `[0, 1]`.
pub fn value_target(v: f64) -> f64 {
    logit(v.clamp(VALUE_CLAMP_MIN, VALUE_CLAMP_MAX))
}

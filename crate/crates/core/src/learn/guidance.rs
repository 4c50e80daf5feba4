use std::sync::Arc;

use crate::features::{action_features, state_features, FeatureMode};
use crate::syntax::Problem;
use crate::tableau::{Action, TableauState};

use super::Model;

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Softmax of `preds / tau`, shifted by the maximum before exponentiation.
pub fn softmax(preds: &[f64], tau: f64) -> Vec<f64> {
    let max = preds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = preds.iter().map(|y| ((y - max) / tau).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Priors for `actions` in `state`. Without a model every prior is 1.
pub fn policy_priors(
    model: Option<&Model>,
    state: &TableauState,
    actions: &[Action],
    problem: &Problem,
    tau: f64,
) -> Vec<f64> {
    let Some(model) = model else {
        return vec![1.0; actions.len()];
    };
    if actions.is_empty() {
        return Vec::new();
    }
    // The state part adds the same amount to every prediction and softmax is
    // shift-invariant, so only the action part is evaluated.
    let preds: Vec<f64> = actions
        .iter()
        .map(|&a| model.dot(&action_features(a, state, problem)))
        .collect();
    softmax(&preds, tau)
}

/// Estimated probability that `state` leads to a proof.
pub fn value_estimate(model: &Model, state: &TableauState, problem: &Problem) -> f64 {
    let y = model.bias + model.dot(&state_features(state, problem, FeatureMode::Value));
    sigmoid(y)
}

/// Models consulted during search.
#[derive(Clone, Debug, Default)]
pub struct Guidance {
    pub policy: Option<Arc<Model>>,
    pub value: Option<Arc<Model>>,
}

impl Guidance {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn priors(&self, state: &TableauState, actions: &[Action], problem: &Problem, tau: f64) -> Vec<f64> {
        policy_priors(self.policy.as_deref(), state, actions, problem, tau)
    }

    pub fn value(&self, state: &TableauState, problem: &Problem) -> Option<f64> {
        self.value.as_deref().map(|m| value_estimate(m, state, problem))
    }
}

use crate::features::{action_features, state_features, FeatureMode};
use crate::learn::{value_target, ModelKind, Origin, TrainingExample};
use crate::syntax::Problem;
use crate::tableau::{Action, TableauState};

use super::ProofResult;

/// Statistics of the root at the moment a bigstep was taken.
#[derive(Clone, Debug, PartialEq)]
pub struct BigstepRecord {
    /// Number of bigstep actions committed before this one.
    pub trail_len: usize,
    /// Visited children of the root with their visit counts, in child order.
    pub children: Vec<(Action, u32)>,
    pub chosen: Action,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchHistory {
    pub trail: Vec<Action>,
    pub records: Vec<BigstepRecord>,
}

/// Policy and value examples from every bigstep node of a finished search.
///
/// Policy targets are `ln(n_a / mean n)` over visited children. Value targets
/// are `logit(clamp(discount^d))` with `d` the number of proof actions after
/// the node when the run was proved, and `logit(clamp(0))` otherwise.
pub fn collect_examples(
    problem: &Problem,
    history: &SearchHistory,
    result: &ProofResult,
    discount: f64,
    origin: Option<(&str, u32)>,
) -> (Vec<TrainingExample>, Vec<TrainingExample>) {
    let mut policy = Vec::new();
    let mut value = Vec::new();
    let mut state = TableauState::new();
    let mut applied = 0usize;
    for (b, rec) in history.records.iter().enumerate() {
        while applied < rec.trail_len {
            state
                .apply_action(problem, history.trail[applied])
                .expect("bigstep trail replays");
            applied += 1;
        }
        let tag = origin.map(|(p, it)| Origin {
            problem: p.to_string(),
            iteration: it,
            bigstep: b as u32,
        });
        let v = if result.proved() {
            discount.powi((result.actions.len() - rec.trail_len) as i32)
        } else {
            0.0
        };
        value.push(TrainingExample {
            kind: ModelKind::Value,
            features: state_features(&state, problem, FeatureMode::Value),
            target: value_target(v),
            origin: tag.clone(),
        });
        if rec.children.is_empty() {
            continue;
        }
        let mean = rec.children.iter().map(|&(_, n)| f64::from(n)).sum::<f64>() / rec.children.len() as f64;
        let base = state_features(&state, problem, FeatureMode::Policy);
        for &(a, n) in &rec.children {
            policy.push(TrainingExample {
                kind: ModelKind::Policy,
                features: base.add(&action_features(a, &state, problem)),
                target: (f64::from(n) / mean).ln(),
                origin: tag.clone(),
            });
        }
    }
    (policy, value)
}

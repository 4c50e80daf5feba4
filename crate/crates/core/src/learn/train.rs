use serde::{Deserialize, Serialize};

use crate::error::LearnError;
use crate::features::FEATURE_DIM;

use super::{Model, TrainingExample};

/// Settings of the in-tree coordinate-descent learner.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lambda: f64,
    pub max_epochs: usize,
    pub tolerance: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda: 1.5,
            max_epochs: 200,
            tolerance: 1e-8,
        }
    }
}

/// Fits `y ≈ b + w·x` minimising `½ Σ r² + ½ λ ‖w‖²` by cyclic coordinate
/// descent over the active features in ascending index order. The bias is
/// not regularised and is refitted after every sweep.
/// Feature index, its nonzero `(row, value)` cells and their squared norm.
type Column = (u32, Vec<(u32, f64)>, f64);

pub fn train(examples: &[TrainingExample], config: &TrainConfig) -> Result<Model, LearnError> {
    let first = examples.first().ok_or(LearnError::NoExamples)?;
    let kind = first.kind;
    if examples.iter().any(|e| e.kind != kind) {
        return Err(LearnError::MixedKinds);
    }
    for e in examples {
        if let Some(&(i, _)) = e.features.entries().iter().find(|(i, _)| *i >= FEATURE_DIM) {
            return Err(LearnError::IndexOutOfRange(i));
        }
    }

    // Column-major copy of the design matrix restricted to active features.
    let mut cells: Vec<(u32, u32, f64)> = Vec::new();
    for (row, e) in examples.iter().enumerate() {
        for &(i, x) in e.features.entries() {
            cells.push((i, row as u32, x));
        }
    }
    cells.sort_by_key(|&(i, row, _)| (i, row));
    let mut columns: Vec<Column> = Vec::new();
    for (i, row, x) in cells {
        match columns.last_mut() {
            Some((j, col, _)) if *j == i => col.push((row, x)),
            _ => columns.push((i, vec![(row, x)], 0.0)),
        }
    }
    for (_, col, sq) in &mut columns {
        *sq = col.iter().map(|(_, x)| x * x).sum();
    }

    let n = examples.len() as f64;
    let mut bias = examples.iter().map(|e| e.target).sum::<f64>() / n;
    let mut residual: Vec<f64> = examples.iter().map(|e| e.target - bias).collect();
    let mut weights = vec![0.0; columns.len()];

    for _ in 0..config.max_epochs {
        let mut max_delta: f64 = 0.0;
        for (k, (_, col, sq)) in columns.iter().enumerate() {
            let denom = sq + config.lambda;
            if denom <= 0.0 {
                continue;
            }
            let w = weights[k];
            let rho: f64 = col.iter().map(|&(r, x)| x * residual[r as usize]).sum::<f64>() + w * sq;
            let updated = rho / denom;
            let delta = updated - w;
            if delta != 0.0 {
                for &(r, x) in col {
                    residual[r as usize] -= delta * x;
                }
                weights[k] = updated;
            }
            max_delta = max_delta.max(delta.abs());
        }
        let shift = residual.iter().sum::<f64>() / n;
        if shift != 0.0 {
            bias += shift;
            for r in &mut residual {
                *r -= shift;
            }
        }
        max_delta = max_delta.max(shift.abs());
        if max_delta < config.tolerance {
            break;
        }
    }

    let mut model = Model::constant(kind, bias);
    for ((i, _, _), w) in columns.iter().zip(weights) {
        model.weights[*i as usize] = w;
    }
    model.lambda = config.lambda;
    model.example_count = examples.len();
    Ok(model)
}

/// Root-mean-square error of `model` on `examples`.
pub fn rmse(model: &Model, examples: &[TrainingExample]) -> f64 {
    if examples.is_empty() {
        return 0.0;
    }
    let sse: f64 = examples
        .iter()
        .map(|e| {
            let d = model.bias + model.dot(&e.features) - e.target;
            d * d
        })
        .sum();
    (sse / examples.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::features::FeatureVector;
    use crate::learn::ModelKind;

    fn ex(pairs: Vec<(u32, f64)>, target: f64) -> TrainingExample {
        TrainingExample {
            kind: ModelKind::Value,
            features: FeatureVector::from_pairs(pairs),
            target,
            origin: None,
        }
    }

    fn exact(lambda: f64) -> TrainConfig {
        TrainConfig {
            lambda,
            max_epochs: 2000,
            tolerance: 1e-12,
        }
    }

    pub(crate) fn linear_data(rows: usize, dims: u32, seed: u64) -> Vec<TrainingExample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let truth: Vec<f64> = (0..dims).map(|_| rng.random_range(-2.0..2.0)).collect();
        (0..rows)
            .map(|_| {
                let pairs: Vec<(u32, f64)> = (0..dims).map(|j| (j * 7, rng.random_range(-1.0..1.0))).collect();
                let y = 0.3 + pairs.iter().zip(&truth).map(|((_, x), w)| x * w).sum::<f64>();
                ex(pairs, y)
            })
            .collect()
    }

    #[test]
    fn rejects_empty_and_mixed() {
        assert!(matches!(
            train(&[], &TrainConfig::default()),
            Err(LearnError::NoExamples)
        ));
        let mut b = ex(vec![(1, 1.0)], 0.0);
        b.kind = ModelKind::Policy;
        let data = [ex(vec![(1, 1.0)], 0.0), b];
        assert!(matches!(
            train(&data, &TrainConfig::default()),
            Err(LearnError::MixedKinds)
        ));
    }

    #[test]
    fn realizable_target_is_fitted() {
        let data = linear_data(200, 50, 3);
        let m = train(
            &data,
            &TrainConfig {
                lambda: 0.0,
                ..TrainConfig::default()
            },
        )
        .unwrap();
        assert!(rmse(&m, &data) < 1e-6, "rmse {}", rmse(&m, &data));
    }

    #[test]
    fn single_example_is_reproduced_without_regularisation() {
        let data = [ex(vec![(4, 2.0), (9, 1.0)], 1.7)];
        let m = train(&data, &exact(0.0)).unwrap();
        assert!((m.predict(&data[0].features).unwrap() - 1.7).abs() < 1e-12);
        let shrunk = train(&data, &TrainConfig::default()).unwrap();
        assert!((shrunk.predict(&data[0].features).unwrap() - 1.7).abs() < 1e-9);
    }

    #[test]
    fn scaled_line_is_learned() {
        let data: Vec<_> = (1..=10).map(|k| ex(vec![(5, k as f64)], 2.0 * k as f64)).collect();
        let m = train(&data, &exact(0.0)).unwrap();
        let p = m.predict(&FeatureVector::from_pairs(vec![(5, 3.0)])).unwrap();
        assert!((p - 6.0).abs() < 1e-6, "{}", p);
    }

    #[test]
    fn duplicated_dataset_gives_the_same_model() {
        let data = linear_data(40, 6, 11);
        let doubled: Vec<_> = data.iter().chain(data.iter()).cloned().collect();
        let a = train(&data, &exact(0.0)).unwrap();
        let b = train(&doubled, &exact(0.0)).unwrap();
        assert!((a.bias - b.bias).abs() < 1e-9);
        for (x, y) in a.weights.iter().zip(&b.weights) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn training_is_deterministic() {
        let data = linear_data(60, 12, 5);
        let a = train(&data, &TrainConfig::default()).unwrap();
        let b = train(&data, &TrainConfig::default()).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }
}

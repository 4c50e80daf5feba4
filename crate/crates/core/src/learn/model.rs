use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::LearnError;
use crate::features::{
    ContextTag, FeatureVector, ABSTRACT_SLOTS, FEATURE_DIM, SYMBOL_VALUE_MODULUS, VAR_MARKER, WALK_DIM, WALK_PRIME,
};
use crate::tableau::{ACTION_STRIDE, MAX_LITERALS};

use super::ModelKind;

const MAGIC: &str = "conmcts-model 1";

/// A linear predictor over the full feature space.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub kind: ModelKind,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub lambda: f64,
    pub example_count: usize,
}

impl Model {
    /// A model predicting `bias` everywhere.
    pub fn constant(kind: ModelKind, bias: f64) -> Self {
        Model {
            kind,
            weights: vec![0.0; FEATURE_DIM as usize],
            bias,
            lambda: 0.0,
            example_count: 0,
        }
    }

    /// Dot product plus bias.
    pub fn predict(&self, v: &FeatureVector) -> Result<f64, LearnError> {
        let mut s = self.bias;
        for &(i, x) in v.entries() {
            let w = self.weights.get(i as usize).ok_or(LearnError::IndexOutOfRange(i))?;
            s += w * x;
        }
        Ok(s)
    }

    /// Dot product without the bias; indices are assumed in range.
    pub(crate) fn dot(&self, v: &FeatureVector) -> f64 {
        v.entries()
            .iter()
            .map(|&(i, x)| self.weights.get(i as usize).copied().unwrap_or(0.0) * x)
            .sum()
    }

    pub fn nonzero_weights(&self) -> usize {
        self.weights.iter().filter(|w| **w != 0.0).count()
    }

    fn constants() -> Vec<(String, String)> {
        let mut out = vec![
            ("walk_dim".to_string(), WALK_DIM.to_string()),
            ("abstract_slots".to_string(), ABSTRACT_SLOTS.to_string()),
            ("walk_prime".to_string(), WALK_PRIME.to_string()),
            ("var_marker".to_string(), format!("{:#018x}", VAR_MARKER)),
            ("symbol_modulus".to_string(), SYMBOL_VALUE_MODULUS.to_string()),
            ("action_stride".to_string(), ACTION_STRIDE.to_string()),
            ("max_literals".to_string(), MAX_LITERALS.to_string()),
        ];
        for t in ContextTag::ALL {
            out.push((format!("salt_{}", t.name()), format!("{:#018x}", t.salt())));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", MAGIC).unwrap();
        writeln!(s, "kind {}", self.kind.name()).unwrap();
        for (k, v) in Self::constants() {
            writeln!(s, "{} {}", k, v).unwrap();
        }
        writeln!(s, "lambda {}", self.lambda).unwrap();
        writeln!(s, "examples {}", self.example_count).unwrap();
        writeln!(s, "bias {}", self.bias).unwrap();
        writeln!(s, "weights {}", self.nonzero_weights()).unwrap();
        for (i, w) in self.weights.iter().enumerate() {
            if *w != 0.0 {
                writeln!(s, "{} {}", i, w).unwrap();
            }
        }
        s
    }

    pub fn from_text(text: &str, source: &str) -> Result<Self, LearnError> {
        let malformed = |line: usize, message: String| LearnError::Malformed {
            path: source.to_string(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, l)) if l.trim() == MAGIC => {}
            _ => return Err(malformed(1, format!("expected header {:?}", MAGIC))),
        }
        let mut field = |key: &str| -> Result<(usize, String), LearnError> {
            match lines.next() {
                Some((n, l)) => {
                    let (k, v) = l
                        .split_once(' ')
                        .ok_or_else(|| malformed(n, "expected `key value`".into()))?;
                    if k != key {
                        return Err(malformed(n, format!("expected {}, found {}", key, k)));
                    }
                    Ok((n, v.trim().to_string()))
                }
                None => Err(malformed(0, format!("missing {}", key))),
            }
        };
        let (n, kind) = field("kind")?;
        let kind = ModelKind::parse(&kind).ok_or_else(|| malformed(n, format!("unknown kind {}", kind)))?;
        for (k, expected) in Self::constants() {
            let (_, v) = field(&k)?;
            if v != expected {
                return Err(LearnError::ConstantMismatch(format!(
                    "{} is {}, expected {}",
                    k, v, expected
                )));
            }
        }
        let num = |(n, v): (usize, String)| -> Result<f64, LearnError> {
            v.parse::<f64>().map_err(|e| malformed(n, e.to_string()))
        };
        let lambda = num(field("lambda")?)?;
        let (n, ex) = field("examples")?;
        let example_count = ex.parse().map_err(|_| malformed(n, "bad example count".into()))?;
        let bias = num(field("bias")?)?;
        let (n, count) = field("weights")?;
        let count: usize = count.parse().map_err(|_| malformed(n, "bad weight count".into()))?;
        let mut weights = vec![0.0; FEATURE_DIM as usize];
        let mut seen = 0;
        for (n, l) in lines {
            if l.trim().is_empty() {
                continue;
            }
            let (i, w) = l
                .split_once(' ')
                .ok_or_else(|| malformed(n, "expected `index weight`".into()))?;
            let i: usize = i.parse().map_err(|_| malformed(n, "bad index".into()))?;
            if i >= weights.len() {
                return Err(malformed(n, format!("index {} out of range", i)));
            }
            weights[i] = w.trim().parse().map_err(|_| malformed(n, "bad weight".into()))?;
            seen += 1;
        }
        if seen != count {
            return Err(malformed(0, format!("expected {} weights, found {}", count, seen)));
        }
        Ok(Model {
            kind,
            weights,
            bias,
            lambda,
            example_count,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), LearnError> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, LearnError> {
        let text = fs::read_to_string(path)?;
        Self::from_text(&text, &path.display().to_string())
    }
}

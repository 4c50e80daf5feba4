//! Hand-off to an external learner.
//!
//! The command is run through `sh -c` after substituting `{examples}`,
//! `{kind}` and `{model}`. It must leave a model in the native format at
//! `{model}`; a boosted learner can satisfy this by emitting a linear
//! surrogate (for instance per-feature scores fitted to its predictions).

use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;

use serde::{Deserialize, Serialize};

use crate::error::LearnError;

use super::{Model, ModelKind};

/// Settings for a gradient-boosted external learner, written out as a
/// template next to the example files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostedSettings {
    pub max_iterations: u32,
    pub max_depth: u32,
    pub eta: f64,
    pub early_stopping: u32,
    pub lambda: f64,
}

impl Default for BoostedSettings {
    fn default() -> Self {
        BoostedSettings {
            max_iterations: 400,
            max_depth: 9,
            eta: 0.3,
            early_stopping: 200,
            lambda: 1.5,
        }
    }
}

impl BoostedSettings {
    pub fn to_template(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# settings for an external boosted learner").unwrap();
        writeln!(s, "num_round = {}", self.max_iterations).unwrap();
        writeln!(s, "max_depth = {}", self.max_depth).unwrap();
        writeln!(s, "eta = {}", self.eta).unwrap();
        writeln!(s, "early_stopping_rounds = {}", self.early_stopping).unwrap();
        writeln!(s, "lambda = {}", self.lambda).unwrap();
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExternalLearner {
    pub command: String,
}

impl ExternalLearner {
    pub fn new(command: impl Into<String>) -> Self {
        ExternalLearner {
            command: command.into(),
        }
    }

    pub fn command_line(&self, examples: &Path, kind: ModelKind, model: &Path) -> String {
        self.command
            .replace("{examples}", &examples.display().to_string())
            .replace("{kind}", kind.name())
            .replace("{model}", &model.display().to_string())
    }

    /// Runs the learner and loads the model it produced.
    pub fn train(&self, examples: &Path, kind: ModelKind, model: &Path) -> Result<Model, LearnError> {
        let line = self.command_line(examples, kind, model);
        let out = Command::new("sh").arg("-c").arg(&line).output()?;
        if !out.status.success() {
            return Err(LearnError::External(format!(
                "`{}` exited with {}: {}",
                line,
                out.status,
                String::from_utf8_lossy(&out.stderr).trim()
            )));
        }
        let m = Model::load(model)?;
        if m.kind != kind {
            return Err(LearnError::External(format!(
                "learner produced a {} model, expected {}",
                m.kind.name(),
                kind.name()
            )));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_records_settings() {
        let t = BoostedSettings::default().to_template();
        for needle in [
            "num_round = 400",
            "max_depth = 9",
            "eta = 0.3",
            "early_stopping_rounds = 200",
            "lambda = 1.5",
        ] {
            assert!(t.contains(needle), "{}", needle);
        }
    }

    #[test]
    fn external_command_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let src = dir.path().join("prepared.model");
        Model::constant(ModelKind::Value, 0.75).save(&src).unwrap();
        let ex = dir.path().join("ex.txt");
        std::fs::write(&ex, "").unwrap();
        let learner = ExternalLearner::new(format!("test {{kind}} = value && cp {} {{model}}", src.display()));
        let out = dir.path().join("out.model");
        let m = learner.train(&ex, ModelKind::Value, &out).unwrap();
        assert_eq!(m.bias, 0.75);
        assert!(learner.train(&ex, ModelKind::Policy, &out).is_err());
    }
}

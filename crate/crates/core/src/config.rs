//! Run configuration, read from `key = value` files and overridden by flags.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::RunError;
use crate::learn::TrainConfig;
use crate::search::{Mode, PlayoutLength, SearchConfig};
use crate::syntax::fnv1a64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub budget: u64,
    pub playouts: u64,
    pub exploration: f64,
    pub tau: f64,
    pub heuristic_base: f64,
    /// Constant leaf value used instead of the goal heuristic.
    pub constant_leaf: Option<f64>,
    pub discount: f64,
    pub lambda: f64,
    pub seed: u64,
    /// 0 lets the thread pool pick.
    pub workers: usize,
    pub puct: bool,
    pub retain_tree: bool,
    /// Fixed playout length; unset means "until a new node".
    pub playout_len: Option<usize>,
    pub unbounded_playouts: bool,
    pub max_nodes: Option<usize>,
    pub test_fraction: Option<f64>,
    /// Number of most recent iterations whose examples are used; unset means all.
    pub window: Option<usize>,
    /// Shell command for an external learner (`{examples}`, `{kind}`, `{model}`).
    pub external_learner: Option<String>,
    /// Include wall-clock time in result records.
    pub timing: bool,
    pub epochs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SearchConfig::default();
        let t = TrainConfig::default();
        RunConfig {
            mode: s.mode,
            budget: s.budget,
            playouts: s.playouts_per_bigstep,
            exploration: s.exploration,
            tau: s.tau,
            heuristic_base: s.heuristic_base,
            constant_leaf: None,
            discount: s.discount,
            lambda: t.lambda,
            seed: 0,
            workers: 0,
            puct: false,
            retain_tree: true,
            playout_len: None,
            unbounded_playouts: false,
            max_nodes: None,
            test_fraction: None,
            window: None,
            external_learner: None,
            timing: true,
            epochs: t.max_epochs,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Applies one `key=value` override using the config-file syntax.
    pub fn set(&mut self, assignment: &str) -> Result<(), RunError> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| RunError::Config(format!("expected key=value, got {:?}", assignment)))?;
        let (k, v) = (k.trim(), v.trim());
        let toml::Value::Table(mut table) =
            toml::Value::try_from(&*self).map_err(|e| RunError::Config(e.to_string()))?
        else {
            unreachable!("a struct serialises to a table")
        };
        let parsed: toml::Value = match format!("x = {}", v).parse::<toml::Table>() {
            Ok(mut t) => t.remove("x").expect("key present"),
            Err(_) => toml::Value::String(v.to_string()),
        };
        table.insert(k.to_string(), parsed);
        *self = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| RunError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: &str| Err(RunError::Config(m.to_string()));
        if self.tau <= 0.0 {
            return bad("tau must be positive");
        }
        if let Some(f) = self.test_fraction {
            if !(f > 0.0 && f < 1.0) {
                return bad("test_fraction must lie strictly between 0 and 1");
            }
        }
        if self.playouts == 0 {
            return bad("playouts must be at least 1");
        }
        if self.window == Some(0) {
            return bad("window must be at least 1");
        }
        Ok(())
    }

    pub fn search(&self, mode: Mode, seed: u64) -> SearchConfig {
        SearchConfig {
            mode,
            budget: self.budget,
            playouts_per_bigstep: self.playouts,
            exploration: self.exploration,
            tau: self.tau,
            heuristic_base: self.heuristic_base,
            constant_leaf: self.constant_leaf,
            discount: self.discount,
            puct: self.puct,
            retain_tree: self.retain_tree,
            playout_length: match (self.unbounded_playouts, self.playout_len) {
                (true, _) => PlayoutLength::Unbounded,
                (false, Some(d)) => PlayoutLength::Fixed(d),
                (false, None) => PlayoutLength::UntilNew,
            },
            max_nodes: self.max_nodes,
            seed,
        }
    }

    pub fn train(&self) -> TrainConfig {
        TrainConfig {
            lambda: self.lambda,
            max_epochs: self.epochs,
            ..TrainConfig::default()
        }
    }

    /// Stable hex digest naming the experiment directory. Worker count and
    /// timing do not affect results and are left out.
    pub fn digest(&self) -> String {
        let mut c = self.clone();
        c.workers = 0;
        c.timing = false;
        format!("{:016x}", fnv1a64(c.to_toml().as_bytes()))
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of the random stream for one problem.
pub fn problem_seed(master: u64, problem_id: &str) -> u64 {
    splitmix64(master ^ fnv1a64(problem_id.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_documented_constants() {
        let c = RunConfig::default();
        assert_eq!(c.budget, 200_000);
        assert_eq!(c.playouts, 2000);
        assert_eq!(c.exploration, 2.0);
        assert_eq!(c.tau, 2.5);
        assert_eq!(c.heuristic_base, 0.95);
        assert_eq!(c.discount, 0.99);
        assert_eq!(c.lambda, 1.5);
        assert_eq!(c.mode, Mode::Uct);
    }

    #[test]
    fn file_then_overrides() {
        let mut c = RunConfig::from_toml("budget = 5000\nmode = \"bare\"\ntau = 1.0\n").unwrap();
        assert_eq!(c.budget, 5000);
        assert_eq!(c.mode, Mode::Bare);
        c.set("mode=uct+policy").unwrap();
        c.set("budget = 20").unwrap();
        c.set("playout_len=4").unwrap();
        assert_eq!(c.mode, Mode::UctPolicy);
        assert_eq!(c.budget, 20);
        assert_eq!(c.search(c.mode, 0).playout_length, PlayoutLength::Fixed(4));
        assert!(c.set("no_such_key=1").is_err());
        assert!(RunConfig::from_toml("budgte = 1").is_err());
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn digest_ignores_workers() {
        let a = RunConfig::default();
        let b = RunConfig {
            workers: 4,
            ..a.clone()
        };
        let c = RunConfig { budget: 7, ..a.clone() };
        assert_eq!(a.digest(), b.digest());
        assert_ne!(a.digest(), c.digest());
    }

    #[test]
    fn problem_seeds_differ() {
        assert_ne!(problem_seed(1, "a"), problem_seed(1, "b"));
        assert_ne!(problem_seed(1, "a"), problem_seed(2, "a"));
        assert_eq!(problem_seed(3, "x"), problem_seed(3, "x"));
    }
}

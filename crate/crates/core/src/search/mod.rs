//! Proof search: Monte-Carlo playouts with bigsteps (bare or UCT-guided)
//! and an iterative-deepening baseline.

mod deepening;
mod examples;
mod mcts;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::learn::Guidance;
use crate::syntax::Problem;
use crate::tableau::Action;

pub use deepening::prove_iterative_deepening;
pub use examples::{collect_examples, BigstepRecord, SearchHistory};
pub use mcts::{ChildSelector, Search, UctSelector, UniformSelector};
pub use rand_chacha::ChaCha8Rng;
pub use tree::{NodeId, NodeStatus, SearchNode, SearchTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "id")]
    Deepening,
    #[serde(rename = "bare")]
    Bare,
    #[serde(rename = "uct")]
    Uct,
    #[serde(rename = "uct+policy")]
    UctPolicy,
    #[serde(rename = "uct+value")]
    UctValue,
    #[serde(rename = "uct+policy+value")]
    UctPolicyValue,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::Deepening,
        Mode::Bare,
        Mode::Uct,
        Mode::UctPolicy,
        Mode::UctValue,
        Mode::UctPolicyValue,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Deepening => "id",
            Mode::Bare => "bare",
            Mode::Uct => "uct",
            Mode::UctPolicy => "uct+policy",
            Mode::UctValue => "uct+value",
            Mode::UctPolicyValue => "uct+policy+value",
        }
    }

    pub fn uses_policy(self) -> bool {
        matches!(self, Mode::UctPolicy | Mode::UctPolicyValue)
    }

    pub fn uses_value(self) -> bool {
        matches!(self, Mode::UctValue | Mode::UctPolicyValue)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            format!(
                "unknown mode {:?} (expected one of id, bare, uct, uct+policy, uct+value, uct+policy+value)",
                s
            )
        })
    }
}

/// How far a single playout descends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlayoutLength {
    /// Stop at the first node not yet in the tree.
    UntilNew,
    /// Apply at most this many actions, growing the tree on the way.
    Fixed(usize),
    /// Run until the tableau closes, a dead end, or the budget.
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub mode: Mode,
    pub budget: u64,
    pub playouts_per_bigstep: u64,
    pub exploration: f64,
    pub tau: f64,
    pub heuristic_base: f64,
    /// Replaces `heuristic_base^G_o` by a constant leaf value when set.
    pub constant_leaf: Option<f64>,
    pub discount: f64,
    pub puct: bool,
    pub retain_tree: bool,
    pub playout_length: PlayoutLength,
    pub max_nodes: Option<usize>,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: Mode::Uct,
            budget: 200_000,
            playouts_per_bigstep: 2000,
            exploration: 2.0,
            tau: 2.5,
            heuristic_base: 0.95,
            constant_leaf: None,
            discount: 0.99,
            puct: false,
            retain_tree: true,
            playout_length: PlayoutLength::UntilNew,
            max_nodes: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofStatus {
    Proved,
    BudgetExhausted,
    DeadRoot,
}

impl ProofStatus {
    pub fn name(self) -> &'static str {
        match self {
            ProofStatus::Proved => "proved",
            ProofStatus::BudgetExhausted => "budget_exhausted",
            ProofStatus::DeadRoot => "dead_root",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofResult {
    pub status: ProofStatus,
    pub actions: Vec<Action>,
    pub inferences: u64,
    pub playouts: u64,
    pub bigsteps: u64,
    /// Depth bound reached by iterative deepening.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub depth_limit: Option<usize>,
    /// Set when the node cap stopped the search.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub node_cap_hit: bool,
}

impl ProofResult {
    pub fn proved(&self) -> bool {
        self.status == ProofStatus::Proved
    }
}

/// Leaf value of a state with `open_goals` open goals: `base^G_o`.
pub fn heuristic_value(open_goals: usize, base: f64) -> f64 {
    base.powi(open_goals as i32)
}

/// `w/n + c·p·sqrt(ln N / n)`; unvisited children score +∞.
pub fn uct_score(w: f64, n: u32, p: f64, parent_n: u32, c: f64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    let n = f64::from(n);
    w / n + c * p * (f64::from(parent_n.max(1)).ln() / n).sqrt()
}

/// `w/n + c·p·sqrt(N) / (1 + n)`, with mean zero for unvisited children.
pub fn puct_score(w: f64, n: u32, p: f64, parent_n: u32, c: f64) -> f64 {
    let q = if n == 0 { 0.0 } else { w / f64::from(n) };
    q + c * p * f64::from(parent_n).sqrt() / (1.0 + f64::from(n))
}

/// Runs the search selected by `config.mode`.
pub fn prove(problem: &Problem, guidance: &Guidance, config: &SearchConfig) -> ProofResult {
    prove_recorded(problem, guidance, config).0
}

/// Like [`prove`], also returning the bigstep history for training data.
pub fn prove_recorded(problem: &Problem, guidance: &Guidance, config: &SearchConfig) -> (ProofResult, SearchHistory) {
    match config.mode {
        Mode::Deepening => (prove_iterative_deepening(problem, config), SearchHistory::default()),
        _ => Search::new(problem, guidance, config).run(),
    }
}

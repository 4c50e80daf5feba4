use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::learn::{policy_priors, value_estimate, Guidance, Model};
use crate::syntax::Problem;
use crate::tableau::{Action, TableauState};

use super::examples::{BigstepRecord, SearchHistory};
use super::tree::{NodeId, SearchTree};
use super::{heuristic_value, puct_score, uct_score, Mode, PlayoutLength, ProofResult, ProofStatus, SearchConfig};

/// Picks the child to descend into. Dead children must never be returned.
pub trait ChildSelector {
    fn select(&mut self, tree: &SearchTree, node: NodeId, rng: &mut ChaCha8Rng) -> Option<NodeId>;
}

/// Maximises the UCT (or PUCT) score. Ties go to the higher prior, then to
/// the lower action encoding.
#[derive(Clone, Copy, Debug)]
pub struct UctSelector {
    pub c: f64,
    pub puct: bool,
}

impl ChildSelector for UctSelector {
    fn select(&mut self, tree: &SearchTree, node: NodeId, _rng: &mut ChaCha8Rng) -> Option<NodeId> {
        let parent_n = tree.node(node).n;
        let mut best: Option<(NodeId, f64)> = None;
        for c in tree.children(node) {
            let ch = tree.node(c);
            if ch.is_dead() {
                continue;
            }
            let score = if self.puct {
                puct_score(ch.w, ch.n, ch.prior, parent_n, self.c)
            } else {
                uct_score(ch.w, ch.n, ch.prior, parent_n, self.c)
            };
            let better = match best {
                None => true,
                Some((b, bs)) => {
                    let bn = tree.node(b);
                    score > bs
                        || (score == bs
                            && (ch.prior > bn.prior || (ch.prior == bn.prior && encoding(tree, c) < encoding(tree, b))))
                }
            };
            if better {
                best = Some((c, score));
            }
        }
        best.map(|(c, _)| c)
    }
}

/// Uniformly random choice among live children.
#[derive(Clone, Copy, Debug, Default)]
pub struct UniformSelector;

impl ChildSelector for UniformSelector {
    fn select(&mut self, tree: &SearchTree, node: NodeId, rng: &mut ChaCha8Rng) -> Option<NodeId> {
        let live: Vec<NodeId> = tree.children(node).filter(|&c| !tree.node(c).is_dead()).collect();
        if live.is_empty() {
            None
        } else {
            Some(live[rng.random_range(0..live.len())])
        }
    }
}

fn encoding(tree: &SearchTree, id: NodeId) -> u64 {
    tree.node(id).action.map_or(0, Action::encode)
}

/// Result of one playout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Playout {
    Reward(f64),
    Proved,
    Exhausted,
    DeadRoot,
}

/// One Monte-Carlo proof search over a single mutable tableau.
pub struct Search<'a> {
    problem: &'a Problem,
    config: &'a SearchConfig,
    policy: Option<&'a Model>,
    value: Option<&'a Model>,
    tree: SearchTree,
    state: TableauState,
    inferences: u64,
    playouts: u64,
    rng: ChaCha8Rng,
    selector: Box<dyn ChildSelector + 'a>,
    history: SearchHistory,
    proof: Option<Vec<Action>>,
    last_descent: usize,
    node_cap_hit: bool,
}

impl<'a> Search<'a> {
    pub fn new(problem: &'a Problem, guidance: &'a Guidance, config: &'a SearchConfig) -> Self {
        let selector: Box<dyn ChildSelector> = match config.mode {
            Mode::Bare => Box::new(UniformSelector),
            _ => Box::new(UctSelector {
                c: config.exploration,
                puct: config.puct,
            }),
        };
        let mut s = Search {
            problem,
            config,
            policy: if config.mode.uses_policy() {
                guidance.policy.as_deref()
            } else {
                None
            },
            value: if config.mode.uses_value() {
                guidance.value.as_deref()
            } else {
                None
            },
            tree: SearchTree::new(),
            state: TableauState::new(),
            inferences: 0,
            playouts: 0,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            selector,
            history: SearchHistory::default(),
            proof: None,
            last_descent: 0,
            node_cap_hit: false,
        };
        s.expand(s.tree.root());
        s
    }

    /// Replaces the descent policy.
    pub fn with_selector(mut self, selector: impl ChildSelector + 'a) -> Self {
        self.selector = Box::new(selector);
        self
    }

    pub fn tree(&self) -> &SearchTree {
        &self.tree
    }

    #[cfg(test)]
    pub(crate) fn tree_mut(&mut self) -> &mut SearchTree {
        &mut self.tree
    }

    pub fn state(&self) -> &TableauState {
        &self.state
    }

    pub fn inferences(&self) -> u64 {
        self.inferences
    }

    pub fn playouts(&self) -> u64 {
        self.playouts
    }

    pub fn proof(&self) -> Option<&[Action]> {
        self.proof.as_deref()
    }

    /// Number of actions applied by the most recent playout.
    pub fn last_descent_len(&self) -> usize {
        self.last_descent
    }

    fn expand(&mut self, id: NodeId) {
        let actions = self.state.applicable_actions(self.problem);
        let priors = policy_priors(self.policy, &self.state, &actions, self.problem, self.config.tau);
        self.tree.expand(id, &actions, &priors);
    }

    fn evaluate(&self) -> f64 {
        if self.state.is_closed() {
            return 1.0;
        }
        if let Some(m) = self.value {
            return value_estimate(m, &self.state, self.problem);
        }
        match self.config.constant_leaf {
            Some(v) => v,
            None => heuristic_value(self.state.open_goals(), self.config.heuristic_base),
        }
    }

    fn rewind(&mut self, applied: usize) {
        for _ in 0..applied {
            self.state.undo_last();
        }
    }

    fn try_apply(&mut self, action: Action) -> bool {
        if self.inferences >= self.config.budget {
            return false;
        }
        self.state
            .apply_action(self.problem, action)
            .expect("actions stored in the tree are applicable");
        self.inferences += 1;
        true
    }

    /// One descent from the current root with evaluation and backpropagation.
    pub fn playout(&mut self) -> Playout {
        if self.proof.is_some() {
            return Playout::Proved;
        }
        let root = self.tree.root();
        if self.tree.node(root).is_dead() {
            return Playout::DeadRoot;
        }
        let mut path = vec![root];
        let mut node = root;
        let mut applied = 0usize;
        let reward = loop {
            let Some(child) = self.selector.select(&self.tree, node, &mut self.rng) else {
                break 0.0;
            };
            let action = self.tree.node(child).action.expect("non-root nodes carry an action");
            if !self.try_apply(action) {
                self.last_descent = applied;
                self.rewind(applied);
                return Playout::Exhausted;
            }
            applied += 1;
            path.push(child);
            node = child;
            if self.state.is_closed() {
                self.proof = Some(self.state.applied_actions());
                self.last_descent = applied;
                self.playouts += 1;
                for &id in &path {
                    let n = self.tree.node_mut(id);
                    n.n += 1;
                    n.w += 1.0;
                }
                return Playout::Proved;
            }
            let fresh = !self.tree.node(child).is_expanded();
            if fresh {
                if self.config.max_nodes.is_some_and(|cap| self.tree.len() >= cap) {
                    self.node_cap_hit = true;
                    self.rewind(applied);
                    return Playout::Exhausted;
                }
                self.expand(child);
                if self.tree.node(child).is_dead() {
                    break 0.0;
                }
            }
            match self.config.playout_length {
                PlayoutLength::UntilNew if fresh => break self.evaluate(),
                PlayoutLength::Fixed(d) if applied >= d => break self.evaluate(),
                _ => {}
            }
        };
        for &id in &path {
            let n = self.tree.node_mut(id);
            n.n += 1;
            n.w += reward;
        }
        self.rewind(applied);
        self.playouts += 1;
        self.last_descent = applied;
        Playout::Reward(reward)
    }

    fn choose_bigstep(&mut self) -> Option<NodeId> {
        let root = self.tree.root();
        let live: Vec<NodeId> = self
            .tree
            .children(root)
            .filter(|&c| !self.tree.node(c).is_dead())
            .collect();
        if live.is_empty() {
            return None;
        }
        if self.config.mode == Mode::Bare {
            let visited: Vec<NodeId> = live.iter().copied().filter(|&c| self.tree.node(c).n > 0).collect();
            let pool = if visited.is_empty() { &live } else { &visited };
            return Some(pool[self.rng.random_range(0..pool.len())]);
        }
        let t = &self.tree;
        live.into_iter().reduce(|b, c| {
            let (bn, cn) = (t.node(b), t.node(c));
            let better = cn.n > bn.n
                || (cn.n == bn.n
                    && (cn.mean() > bn.mean() || (cn.mean() == bn.mean() && encoding(t, c) < encoding(t, b))));
            if better {
                c
            } else {
                b
            }
        })
    }

    /// Commits one inference at the root. Returns the action, or the reason
    /// the search cannot continue.
    pub fn bigstep(&mut self) -> Result<Action, ProofStatus> {
        let root = self.tree.root();
        let Some(child) = self.choose_bigstep() else {
            return Err(ProofStatus::DeadRoot);
        };
        let action = self.tree.node(child).action.expect("child has an action");
        if !self.try_apply(action) {
            return Err(ProofStatus::BudgetExhausted);
        }
        let children = self
            .tree
            .children(root)
            .filter_map(|c| {
                let n = self.tree.node(c);
                (n.n > 0).then(|| (n.action.expect("child has an action"), n.n))
            })
            .collect();
        self.history.records.push(BigstepRecord {
            trail_len: self.history.trail.len(),
            children,
            chosen: action,
        });
        self.history.trail.push(action);
        if self.state.is_closed() {
            self.proof = Some(self.state.applied_actions());
            return Ok(action);
        }
        if self.config.retain_tree {
            self.tree.reroot(child);
        } else {
            self.tree = SearchTree::new();
        }
        let root = self.tree.root();
        if !self.tree.node(root).is_expanded() {
            self.expand(root);
        }
        if self.tree.node(root).is_dead() {
            return Err(ProofStatus::DeadRoot);
        }
        Ok(action)
    }

    fn result(&self, status: ProofStatus) -> ProofResult {
        ProofResult {
            status,
            actions: self.proof.clone().unwrap_or_default(),
            inferences: self.inferences,
            playouts: self.playouts,
            bigsteps: self.history.records.len() as u64,
            depth_limit: None,
            node_cap_hit: self.node_cap_hit,
        }
    }

    /// Alternates `b` playouts with a bigstep until proved, dead or out of budget.
    pub fn run(mut self) -> (ProofResult, SearchHistory) {
        let b = self.config.playouts_per_bigstep.max(1);
        let status = 'outer: loop {
            for _ in 0..b {
                match self.playout() {
                    Playout::Reward(_) => {}
                    Playout::Proved => break 'outer ProofStatus::Proved,
                    Playout::Exhausted => break 'outer ProofStatus::BudgetExhausted,
                    Playout::DeadRoot => break 'outer ProofStatus::DeadRoot,
                }
            }
            if let Err(status) = self.bigstep() {
                break status;
            }
            if self.proof.is_some() {
                break ProofStatus::Proved;
            }
        };
        let result = self.result(status);
        (result, self.history)
    }
}

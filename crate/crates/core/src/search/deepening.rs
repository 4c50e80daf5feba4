use crate::syntax::Problem;
use crate::tableau::{Action, TableauState};

use super::{ProofResult, ProofStatus, SearchConfig};

enum Pass {
    Found(Vec<Action>),
    Exhausted,
    /// The space under the bound was exhausted; `cut` tells whether the
    /// bound pruned any extension.
    Complete {
        cut: bool,
    },
}

struct Frame {
    actions: Vec<Action>,
    next: usize,
}

fn bounded_actions(state: &mut TableauState, problem: &Problem, limit: usize, cut: &mut bool) -> Vec<Action> {
    let mut actions = state.applicable_actions(problem);
    let deep = state.current_goal().is_some_and(|g| g.depth() >= limit);
    if deep {
        let before = actions.len();
        actions.retain(|a| !matches!(a, Action::Extension { .. }));
        *cut |= actions.len() != before;
    }
    actions
}

fn bounded_pass(problem: &Problem, state: &mut TableauState, limit: usize, budget: u64, used: &mut u64) -> Pass {
    let mut cut = false;
    let first = bounded_actions(state, problem, limit, &mut cut);
    let mut stack = vec![Frame {
        actions: first,
        next: 0,
    }];
    while let Some(top) = stack.last_mut() {
        if top.next >= top.actions.len() {
            stack.pop();
            if !stack.is_empty() {
                state.undo_last();
            }
            continue;
        }
        let a = top.actions[top.next];
        top.next += 1;
        if *used >= budget {
            while state.undo_last().is_some() {}
            return Pass::Exhausted;
        }
        state.apply_action(problem, a).expect("enumerated actions apply");
        *used += 1;
        if state.is_closed() {
            let proof = state.applied_actions();
            while state.undo_last().is_some() {}
            return Pass::Found(proof);
        }
        let actions = bounded_actions(state, problem, limit, &mut cut);
        stack.push(Frame { actions, next: 0 });
    }
    Pass::Complete { cut }
}

/// Complete backtracking search, bounding the active-path length at which
/// extensions may be made by 1, 2, 3, ... in turn.
pub fn prove_iterative_deepening(problem: &Problem, config: &SearchConfig) -> ProofResult {
    let mut state = TableauState::new();
    let mut used = 0u64;
    let mut limit = 1usize;
    let (status, actions) = loop {
        match bounded_pass(problem, &mut state, limit, config.budget, &mut used) {
            Pass::Found(p) => break (ProofStatus::Proved, p),
            Pass::Exhausted => break (ProofStatus::BudgetExhausted, Vec::new()),
            Pass::Complete { cut: false } => break (ProofStatus::DeadRoot, Vec::new()),
            Pass::Complete { cut: true } => limit += 1,
        }
    };
    ProofResult {
        status,
        actions,
        inferences: used,
        playouts: 0,
        bigsteps: 0,
        depth_limit: Some(limit),
        node_cap_hit: false,
    }
}

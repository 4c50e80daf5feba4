use crate::error::TableauError;
use crate::matrix::{CLit, Matrix};
use crate::syntax::{Literal, Problem, Term};

use super::unify::{Bindings, Inst};
use super::Action;

const NO_PATH: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct LitInst {
    pub clause: u32,
    pub lit: u32,
    pub offset: u32,
}

impl LitInst {
    fn clit(self, m: &Matrix) -> CLit {
        m.clauses[self.clause as usize].lits[self.lit as usize]
    }

    fn atom(self, m: &Matrix) -> Inst {
        Inst {
            node: self.clit(m).atom,
            offset: self.offset,
        }
    }
}

/// An open goal: a literal instance and the active path leading to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Goal {
    pub(crate) lit: LitInst,
    pub(crate) path: u32,
    depth: u32,
}

impl Goal {
    /// Length of the active path above this goal.
    pub fn depth(&self) -> usize {
        self.depth as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct PathNode {
    lit: LitInst,
    parent: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct UndoEntry {
    action: Action,
    popped: Option<Goal>,
    pushed: u32,
    trail_len: u32,
    paths_len: u32,
    var_counter: u32,
    serial: u64,
}

/// Handle to an earlier point of a state's lineage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mark {
    depth: usize,
    serial: u64,
}

impl Mark {
    pub fn depth(&self) -> usize {
        self.depth
    }
}

/// Explicit connection-tableau proof state, mutated in place by
/// [`apply_action`](TableauState::apply_action) and rewound with
/// [`undo_to`](TableauState::undo_to).
#[derive(Clone, Debug, Default)]
pub struct TableauState {
    started: bool,
    goals: Vec<Goal>,
    paths: Vec<PathNode>,
    bindings: Bindings,
    var_counter: u32,
    log: Vec<UndoEntry>,
    next_serial: u64,
}

// Serial numbers only identify lineages; they are not part of the state.
impl PartialEq for TableauState {
    fn eq(&self, other: &Self) -> bool {
        self.started == other.started
            && self.goals == other.goals
            && self.paths == other.paths
            && self.bindings == other.bindings
            && self.var_counter == other.var_counter
            && self.log.len() == other.log.len()
            && self
                .log
                .iter()
                .zip(&other.log)
                .all(|(a, b)| a.action == b.action && a.popped == b.popped)
    }
}

impl TableauState {
    /// The empty tableau, before any start clause is chosen.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_started(&self) -> bool {
        self.started
    }

    pub fn is_closed(&self) -> bool {
        self.started && self.goals.is_empty()
    }

    /// Number of open goals.
    pub fn open_goals(&self) -> usize {
        self.goals.len()
    }

    pub fn goals(&self) -> &[Goal] {
        &self.goals
    }

    /// The goal the next inference works on (top of the goal stack).
    pub fn current_goal(&self) -> Option<&Goal> {
        self.goals.last()
    }

    pub fn inference_count(&self) -> usize {
        self.log.len()
    }

    pub fn applied_actions(&self) -> Vec<Action> {
        self.log.iter().map(|e| e.action).collect()
    }

    pub fn bound_var_count(&self) -> usize {
        self.bindings.bound_count()
    }

    pub fn mark(&self) -> Mark {
        Mark {
            depth: self.log.len(),
            serial: self.log.last().map_or(0, |e| e.serial),
        }
    }

    fn path_chain(&self, mut p: u32) -> Vec<LitInst> {
        let mut out = Vec::new();
        while p != NO_PATH {
            let n = self.paths[p as usize];
            out.push(n.lit);
            p = n.parent;
        }
        out.reverse();
        out
    }

    pub(crate) fn path_of(&self, goal: &Goal) -> Vec<LitInst> {
        self.path_chain(goal.path)
    }

    pub(crate) fn literal(&self, problem: &Problem, l: LitInst) -> Literal {
        let m = &problem.matrix;
        let c = l.clit(m);
        match self.bindings.resolve(&m.pool, l.atom(m)) {
            Term::App(_, args) => Literal {
                positive: c.positive,
                predicate: c.pred,
                args,
            },
            Term::Var(_) => unreachable!("atoms are applications"),
        }
    }

    /// The active path of `goal` with every literal cut below its third
    /// level, which is all that term walks read.
    pub fn path_literals_shallow(&self, problem: &Problem, goal: &Goal) -> Vec<Literal> {
        let m = &problem.matrix;
        self.path_of(goal)
            .into_iter()
            .map(|l| {
                let c = l.clit(m);
                match self.bindings.resolve_shallow(&m.pool, l.atom(m), 3) {
                    Term::App(_, args) => Literal {
                        positive: c.positive,
                        predicate: c.pred,
                        args,
                    },
                    Term::Var(_) => unreachable!("atoms are applications"),
                }
            })
            .collect()
    }

    /// A goal's literal under the current substitution.
    pub fn goal_literal(&self, problem: &Problem, goal: &Goal) -> Literal {
        self.literal(problem, goal.lit)
    }

    /// The active path of `goal` (root first) under the current substitution.
    pub fn path_literals(&self, problem: &Problem, goal: &Goal) -> Vec<Literal> {
        self.path_of(goal)
            .into_iter()
            .map(|l| self.literal(problem, l))
            .collect()
    }

    /// Current binding of every variable instance that has one.
    pub fn substitution(&self, problem: &Problem) -> Vec<(u32, Term)> {
        (0..self.var_counter)
            .filter(|v| self.bindings.get(*v).is_some())
            .map(|v| {
                (
                    v,
                    self.bindings.resolve(
                        &problem.matrix.pool,
                        Inst {
                            node: super::unify::VAR0,
                            offset: v,
                        },
                    ),
                )
            })
            .collect()
    }

    fn complementary(&mut self, m: &Matrix, a: LitInst, b: LitInst) -> bool {
        let (ca, cb) = (a.clit(m), b.clit(m));
        ca.positive != cb.positive && ca.pred == cb.pred && self.bindings.unify(&m.pool, a.atom(m), b.atom(m))
    }

    /// Every applicable inference, in deterministic order: start actions on
    /// the empty tableau; otherwise reductions by ascending path position,
    /// then extensions by ascending (clause, literal).
    pub fn applicable_actions(&mut self, problem: &Problem) -> Vec<Action> {
        let mut out = Vec::new();
        self.for_each_applicable(problem, |a| out.push(a));
        out
    }

    pub(crate) fn for_each_applicable(&mut self, problem: &Problem, mut f: impl FnMut(Action)) {
        if !self.started {
            for &c in &problem.start_clause_indices {
                f(Action::Start { clause: c as u32 });
            }
            return;
        }
        let Some(goal) = self.goals.last().copied() else {
            return;
        };
        let m = &problem.matrix;
        let mark = self.bindings.trail_len();
        for (pos, p) in self.path_of(&goal).into_iter().enumerate() {
            if self.complementary(m, goal.lit, p) {
                self.bindings.undo_to(mark);
                f(Action::Reduction {
                    path_position: pos as u32,
                });
            }
        }
        let g = goal.lit.clit(m);
        let offset = self.var_counter;
        for &(c, l) in m.candidates(g.pred, !g.positive) {
            let nvars = m.clauses[c as usize].nvars;
            self.bindings.ensure((offset + nvars) as usize);
            let cand = LitInst {
                clause: c,
                lit: l,
                offset,
            };
            let ok = self.bindings.unify(&m.pool, goal.lit.atom(m), cand.atom(m));
            self.bindings.undo_to(mark);
            if ok {
                f(Action::Extension { clause: c, literal: l });
            }
        }
        self.bindings.truncate_slots(self.var_counter as usize);
    }

    fn push_clause(&mut self, m: &Matrix, clause: u32, skip: Option<u32>, path: u32, depth: u32, offset: u32) -> u32 {
        let lits = &m.clauses[clause as usize].lits;
        let mut pushed = 0;
        for li in (0..lits.len() as u32).rev() {
            if Some(li) == skip {
                continue;
            }
            self.goals.push(Goal {
                lit: LitInst {
                    clause,
                    lit: li,
                    offset,
                },
                path,
                depth,
            });
            pushed += 1;
        }
        pushed
    }

    /// Applies one inference. Inapplicable actions leave the state untouched
    /// and return an error.
    pub fn apply_action(&mut self, problem: &Problem, action: Action) -> Result<Mark, TableauError> {
        let m = &problem.matrix;
        let entry_base = UndoEntry {
            action,
            popped: None,
            pushed: 0,
            trail_len: self.bindings.trail_len() as u32,
            paths_len: self.paths.len() as u32,
            var_counter: self.var_counter,
            serial: self.next_serial + 1,
        };
        let inapplicable = || TableauError::Inapplicable(action.to_string());
        let entry = match action {
            Action::Start { clause } => {
                if self.started || !problem.start_clause_indices.contains(&(clause as usize)) {
                    return Err(inapplicable());
                }
                let offset = self.var_counter;
                self.var_counter += m.clauses[clause as usize].nvars;
                self.bindings.ensure(self.var_counter as usize);
                self.started = true;
                let pushed = self.push_clause(m, clause, None, NO_PATH, 0, offset);
                UndoEntry { pushed, ..entry_base }
            }
            Action::Extension { clause, literal } => {
                let Some(goal) = self.goals.last().copied() else {
                    return Err(inapplicable());
                };
                let Some(c) = m.clauses.get(clause as usize) else {
                    return Err(inapplicable());
                };
                if literal as usize >= c.lits.len() {
                    return Err(inapplicable());
                }
                let offset = self.var_counter;
                let cand = LitInst {
                    clause,
                    lit: literal,
                    offset,
                };
                self.bindings.ensure((offset + c.nvars) as usize);
                if !self.complementary(m, goal.lit, cand) {
                    self.bindings.truncate_slots(self.var_counter as usize);
                    return Err(inapplicable());
                }
                self.var_counter += c.nvars;
                self.goals.pop();
                let path = self.paths.len() as u32;
                self.paths.push(PathNode {
                    lit: goal.lit,
                    parent: goal.path,
                });
                let pushed = self.push_clause(m, clause, Some(literal), path, goal.depth + 1, offset);
                UndoEntry {
                    popped: Some(goal),
                    pushed,
                    ..entry_base
                }
            }
            Action::Reduction { path_position } => {
                let Some(goal) = self.goals.last().copied() else {
                    return Err(inapplicable());
                };
                let chain = self.path_of(&goal);
                let Some(&target) = chain.get(path_position as usize) else {
                    return Err(inapplicable());
                };
                if !self.complementary(m, goal.lit, target) {
                    return Err(inapplicable());
                }
                self.goals.pop();
                UndoEntry {
                    popped: Some(goal),
                    ..entry_base
                }
            }
        };
        self.next_serial += 1;
        self.log.push(entry);
        Ok(self.mark())
    }

    /// Reverts the most recent inference.
    pub fn undo_last(&mut self) -> Option<Action> {
        let e = self.log.pop()?;
        let keep = self.goals.len() - e.pushed as usize;
        self.goals.truncate(keep);
        if let Some(g) = e.popped {
            self.goals.push(g);
        }
        if matches!(e.action, Action::Start { .. }) {
            self.started = false;
        }
        self.bindings.undo_to(e.trail_len as usize);
        self.paths.truncate(e.paths_len as usize);
        self.var_counter = e.var_counter;
        self.bindings.truncate_slots(e.var_counter as usize);
        Some(e.action)
    }

    /// Rewinds to `mark`, which must lie on this state's current lineage.
    pub fn undo_to(&mut self, mark: Mark) -> Result<(), TableauError> {
        if mark.depth > self.log.len() {
            return Err(TableauError::StaleMark);
        }
        let serial_here = if mark.depth == 0 {
            0
        } else {
            self.log[mark.depth - 1].serial
        };
        if serial_here != mark.serial {
            return Err(TableauError::StaleMark);
        }
        while self.log.len() > mark.depth {
            self.undo_last();
        }
        Ok(())
    }
}

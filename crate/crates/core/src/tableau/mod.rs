//! The connection calculus as an explicit state machine.

mod state;
mod unify;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::TableauError;
use crate::matrix::TermPool;
use crate::syntax::{Problem, Term};

pub use state::{Goal, Mark, TableauState};
pub(crate) use unify::{Bindings, Inst};

/// Action encodings are `tag * ACTION_STRIDE + clause * MAX_LITERALS + literal`
/// (start: tag 0, extension: tag 1) and `2 * ACTION_STRIDE + path_position`
/// for reductions.
pub const ACTION_STRIDE: u64 = 1 << 40;
/// Upper bound on literals per clause used by the action encoding.
pub const MAX_LITERALS: u64 = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Start { clause: u32 },
    Extension { clause: u32, literal: u32 },
    Reduction { path_position: u32 },
}

impl Action {
    pub fn encode(self) -> u64 {
        match self {
            Action::Start { clause } => u64::from(clause) * MAX_LITERALS,
            Action::Extension { clause, literal } => {
                ACTION_STRIDE + u64::from(clause) * MAX_LITERALS + u64::from(literal)
            }
            Action::Reduction { path_position } => 2 * ACTION_STRIDE + u64::from(path_position),
        }
    }

    pub fn decode(code: u64) -> Result<Self, TableauError> {
        let tag = code / ACTION_STRIDE;
        let rest = code % ACTION_STRIDE;
        let clause = u32::try_from(rest / MAX_LITERALS).map_err(|_| TableauError::BadEncoding(code))?;
        let literal = (rest % MAX_LITERALS) as u32;
        match tag {
            0 if literal == 0 => Ok(Action::Start { clause }),
            1 => Ok(Action::Extension { clause, literal }),
            2 => u32::try_from(rest)
                .map(|p| Action::Reduction { path_position: p })
                .map_err(|_| TableauError::BadEncoding(code)),
            _ => Err(TableauError::BadEncoding(code)),
        }
    }

    /// Clause index for start and extension actions.
    pub fn clause(self) -> Option<usize> {
        match self {
            Action::Start { clause } | Action::Extension { clause, .. } => Some(clause as usize),
            Action::Reduction { .. } => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Start { clause } => write!(f, "start {}", clause),
            Action::Extension { clause, literal } => write!(f, "ext {} {}", clause, literal),
            Action::Reduction { path_position } => write!(f, "red {}", path_position),
        }
    }
}

impl FromStr for Action {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let num = |i: usize| -> Result<u32, String> {
            parts
                .get(i)
                .ok_or_else(|| format!("missing field in {:?}", s))?
                .parse::<u32>()
                .map_err(|e| format!("{:?}: {}", s, e))
        };
        let action = match parts.first().copied() {
            Some("start") => Action::Start { clause: num(1)? },
            Some("ext") => Action::Extension {
                clause: num(1)?,
                literal: num(2)?,
            },
            Some("red") => Action::Reduction { path_position: num(1)? },
            _ => return Err(format!("unknown action {:?}", s)),
        };
        let arity = if matches!(action, Action::Extension { .. }) {
            3
        } else {
            2
        };
        if parts.len() != arity {
            return Err(format!("trailing fields in {:?}", s));
        }
        Ok(action)
    }
}

/// One start action per start clause, in input order.
pub fn start_actions(problem: &Problem) -> Vec<Action> {
    problem
        .start_clause_indices
        .iter()
        .map(|&c| Action::Start { clause: c as u32 })
        .collect()
}

/// A standalone substitution over [`Term`]s whose variables are global ids.
///
/// Runs the same trail-based unifier as the tableau engine.
#[derive(Clone, Debug)]
pub struct Substitution {
    pool: TermPool,
    bindings: Bindings,
}

impl Default for Substitution {
    fn default() -> Self {
        Substitution {
            pool: TermPool::new(),
            bindings: Bindings::default(),
        }
    }
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    fn inst(&mut self, t: &Term) -> Inst {
        let mut vars = Vec::new();
        t.vars(&mut vars);
        if let Some(&max) = vars.iter().max() {
            self.bindings.ensure(max as usize + 1);
        }
        Inst {
            node: self.pool.push_term(t),
            offset: 0,
        }
    }

    pub fn mark(&self) -> usize {
        self.bindings.trail_len()
    }

    pub fn undo_to(&mut self, mark: usize) {
        self.bindings.undo_to(mark);
    }

    pub fn bound_count(&self) -> usize {
        self.bindings.bound_count()
    }

    pub fn binding(&self, var: u32) -> Option<Term> {
        self.bindings.get(var)?;
        Some(self.bindings.resolve(
            &self.pool,
            Inst {
                node: unify::VAR0,
                offset: var,
            },
        ))
    }

    /// Applies the substitution to `t`.
    pub fn apply(&mut self, t: &Term) -> Term {
        let i = self.inst(t);
        self.bindings.resolve(&self.pool, i)
    }
}

/// Extends `subst` to a most general unifier of `a` and `b`; on failure the
/// substitution is left as it was.
pub fn unify(a: &Term, b: &Term, subst: &mut Substitution) -> bool {
    let ia = subst.inst(a);
    let ib = subst.inst(b);
    let Substitution { pool, bindings } = subst;
    bindings.unify(pool, ia, ib)
}

#[cfg(test)]
pub(crate) mod tests;

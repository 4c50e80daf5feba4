//! Independent proof checker.
//!
//! Replays an action sequence on a naive tree-based tableau with its own
//! substitution and unifier; nothing here touches the search engine's term
//! pool or trail. Every connection made during the replay is re-verified
//! under the final substitution.

use std::collections::HashMap;

use crate::syntax::{Literal, Problem, Term};
use crate::tableau::Action;

#[derive(Default)]
struct Subst {
    map: HashMap<u32, Term>,
}

impl Subst {
    fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.map.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    fn apply(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::Var(v) => Term::Var(*v),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    fn occurs(&self, v: u32, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(w) => *w == v,
            Term::App(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let (a, b) = (self.walk(a).clone(), self.walk(b).clone());
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if self.occurs(*x, t) {
                    return false;
                }
                self.map.insert(*x, t.clone());
                true
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                f == g && fa.len() == ga.len() && fa.iter().zip(ga).all(|(x, y)| self.unify(x, y))
            }
        }
    }

    fn unify_args(&mut self, a: &[Term], b: &[Term]) -> bool {
        let saved = self.map.clone();
        let ok = a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.unify(x, y));
        if !ok {
            self.map = saved;
        }
        ok
    }
}

fn rename(t: &Term, base: u32) -> Term {
    match t {
        Term::Var(v) => Term::Var(base + v),
        Term::App(f, args) => Term::App(*f, args.iter().map(|a| rename(a, base)).collect()),
    }
}

fn rename_lit(l: &Literal, base: u32) -> Literal {
    Literal {
        positive: l.positive,
        predicate: l.predicate,
        args: l.args.iter().map(|a| rename(a, base)).collect(),
    }
}

#[derive(Clone)]
struct OpenGoal {
    lit: Literal,
    path: Vec<Literal>,
}

/// Outcome of replaying a proof.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofCheck {
    pub closed: bool,
    pub diagnostic: Option<String>,
    /// Final bindings of every variable instance, sorted by variable.
    pub substitution: Vec<(u32, Term)>,
    /// Maximum active-path length at which an extension was performed, plus one.
    pub depth: usize,
}

/// Replays `actions` and reports whether they close the tableau.
pub fn check_proof_detailed(problem: &Problem, actions: &[Action]) -> ProofCheck {
    let fail = |msg: String| ProofCheck {
        closed: false,
        diagnostic: Some(msg),
        substitution: Vec::new(),
        depth: 0,
    };
    let mut subst = Subst::default();
    let mut goals: Vec<OpenGoal> = Vec::new();
    let mut connections: Vec<(Literal, Literal)> = Vec::new();
    let mut next_var = 0u32;
    let mut depth = 0usize;

    let Some((first, rest)) = actions.split_first() else {
        return fail("empty proof".into());
    };
    match *first {
        Action::Start { clause } => {
            let c = clause as usize;
            if !problem.start_clause_indices.contains(&c) {
                return fail(format!("clause {} is not a start clause", c));
            }
            let cl = &problem.clauses[c];
            for l in cl.literals.iter().rev() {
                goals.push(OpenGoal {
                    lit: rename_lit(l, next_var),
                    path: Vec::new(),
                });
            }
            next_var += cl.var_count();
        }
        other => return fail(format!("proof must begin with a start action, got {}", other)),
    }

    for (step, action) in rest.iter().enumerate() {
        let step = step + 1;
        let Some(goal) = goals.pop() else {
            return fail(format!("step {}: no open goal left for {}", step, action));
        };
        match *action {
            Action::Start { .. } => {
                return fail(format!("step {}: start action after the first step", step));
            }
            Action::Extension { clause, literal } => {
                let Some(cl) = problem.clauses.get(clause as usize) else {
                    return fail(format!("step {}: no clause {}", step, clause));
                };
                let Some(lit) = cl.literals.get(literal as usize) else {
                    return fail(format!("step {}: clause {} has no literal {}", step, clause, literal));
                };
                let lit = rename_lit(lit, next_var);
                if lit.positive == goal.lit.positive || lit.predicate != goal.lit.predicate {
                    return fail(format!("step {}: {} is not complementary to the goal", step, action));
                }
                if !subst.unify_args(&goal.lit.args, &lit.args) {
                    return fail(format!("step {}: {} does not unify with the goal", step, action));
                }
                connections.push((goal.lit.clone(), lit));
                let mut path = goal.path.clone();
                path.push(goal.lit.clone());
                depth = depth.max(path.len());
                for (i, l) in cl.literals.iter().enumerate().rev() {
                    if i == literal as usize {
                        continue;
                    }
                    goals.push(OpenGoal {
                        lit: rename_lit(l, next_var),
                        path: path.clone(),
                    });
                }
                next_var += cl.var_count();
            }
            Action::Reduction { path_position } => {
                let Some(target) = goal.path.get(path_position as usize) else {
                    return fail(format!("step {}: path has no position {}", step, path_position));
                };
                if target.positive == goal.lit.positive || target.predicate != goal.lit.predicate {
                    return fail(format!("step {}: {} is not complementary to the goal", step, action));
                }
                if !subst.unify_args(&goal.lit.args, &target.args) {
                    return fail(format!("step {}: {} does not unify with the goal", step, action));
                }
                connections.push((goal.lit.clone(), target.clone()));
            }
        }
    }
    if !goals.is_empty() {
        return fail(format!("{} goals remain open", goals.len()));
    }
    for (a, b) in &connections {
        let aa: Vec<Term> = a.args.iter().map(|t| subst.apply(t)).collect();
        let bb: Vec<Term> = b.args.iter().map(|t| subst.apply(t)).collect();
        if aa != bb || a.positive == b.positive || a.predicate != b.predicate {
            return fail("a connection is not complementary under the final substitution".into());
        }
    }
    let mut substitution: Vec<(u32, Term)> = (0..next_var)
        .filter(|v| subst.map.contains_key(v))
        .map(|v| (v, subst.apply(&Term::Var(v))))
        .collect();
    substitution.sort_by_key(|(v, _)| *v);
    ProofCheck {
        closed: true,
        diagnostic: None,
        substitution,
        depth,
    }
}

/// True iff replaying `actions` from the empty tableau closes it.
pub fn check_proof(problem: &Problem, actions: &[Action]) -> bool {
    check_proof_detailed(problem, actions).closed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_problem;

    use crate::test_problems::NAT;

    #[test]
    fn two_step_refutation() {
        let p = parse_problem(NAT).unwrap();
        let proof = [Action::Start { clause: 0 }, Action::Extension { clause: 2, literal: 0 }];
        assert!(check_proof(&p, &proof));
    }

    #[test]
    fn rejects_truncated_and_bogus_proofs() {
        let p = parse_problem(NAT).unwrap();
        assert!(!check_proof(&p, &[Action::Start { clause: 0 }]));
        assert!(!check_proof(&p, &[]));
        let bad = [Action::Start { clause: 0 }, Action::Extension { clause: 0, literal: 0 }];
        let r = check_proof_detailed(&p, &bad);
        assert!(!r.closed);
        assert!(r.diagnostic.unwrap().contains("complementary"));
        let red = [Action::Start { clause: 0 }, Action::Reduction { path_position: 0 }];
        assert!(!check_proof(&p, &red));
    }
}

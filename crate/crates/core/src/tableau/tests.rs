use proptest::prelude::*;

use super::*;
use crate::check::check_proof;
use crate::parse::parse_problem;
use crate::syntax::{intern_symbol, SymbolKind};

use crate::test_problems::{NAT, SIX_CLAUSES};

fn ext(clause: u32, literal: u32) -> Action {
    Action::Extension { clause, literal }
}

fn start(clause: u32) -> Action {
    Action::Start { clause }
}

fn red(path_position: u32) -> Action {
    Action::Reduction { path_position }
}

pub(crate) fn six_clause_proof() -> Vec<Action> {
    vec![
        start(0),
        ext(1, 1),
        ext(5, 0),
        ext(4, 0),
        red(1),
        ext(2, 1),
        ext(3, 0),
        red(1),
    ]
}

fn replay(p: &Problem, actions: &[Action]) -> TableauState {
    let mut s = TableauState::new();
    for &a in actions {
        s.apply_action(p, a).unwrap();
    }
    s
}

fn f(name: &str, args: Vec<Term>) -> Term {
    Term::App(intern_symbol(name, args.len(), SymbolKind::Function), args)
}

#[test]
fn encoding_is_bijective_on_samples() {
    for a in [start(0), start(7), ext(3, 2), ext(0, 0), red(0), red(41)] {
        assert_eq!(Action::decode(a.encode()).unwrap(), a);
        assert_eq!(a.to_string().parse::<Action>().unwrap(), a);
    }
    assert!(Action::decode(3 * ACTION_STRIDE).is_err());
}

#[test]
fn start_actions_follow_start_clauses() {
    let p = parse_problem(SIX_CLAUSES).unwrap();
    assert_eq!(start_actions(&p).len(), 6);
    let q =
        parse_problem("cnf(a, axiom, p). cnf(b, axiom, q). cnf(c, axiom, r). cnf(d, negated_conjecture, ~p).").unwrap();
    assert_eq!(start_actions(&q), vec![start(3)]);
    let empty = parse_problem("").unwrap();
    assert!(start_actions(&empty).is_empty());
    assert!(TableauState::new().applicable_actions(&empty).is_empty());
}

#[test]
fn extension_candidates_for_negated_p() {
    let text = format!("{} cnf(g, negated_conjecture, ~p(a)).", SIX_CLAUSES);
    let p = parse_problem(&text).unwrap();
    let mut s = replay(&p, &[start(6)]);
    assert_eq!(s.applicable_actions(&p), vec![ext(0, 0)]);
}

#[test]
fn reduction_to_path_literal_is_offered() {
    let p = parse_problem("cnf(g, negated_conjecture, ~q(X)). cnf(h, axiom, q(Y) | q(b)).").unwrap();
    let mut s = replay(&p, &[start(0), ext(1, 0)]);
    let acts = s.applicable_actions(&p);
    assert_eq!(acts.first(), Some(&red(0)));
}

#[test]
fn looping_clause_and_closing_clause_both_apply() {
    let p = parse_problem(NAT).unwrap();
    let mut s = replay(&p, &[start(0)]);
    assert_eq!(s.applicable_actions(&p), vec![ext(1, 0), ext(2, 0)]);
}

#[test]
fn start_pushes_the_clause() {
    let p = parse_problem(SIX_CLAUSES).unwrap();
    let s = replay(&p, &[start(0)]);
    assert_eq!(s.open_goals(), 1);
    assert_eq!(s.inference_count(), 1);
    assert!(!s.is_closed());
}

#[test]
fn immediate_closure_and_infinite_branch() {
    let p = parse_problem(NAT).unwrap();
    let s = replay(&p, &[start(0), ext(2, 0)]);
    assert!(s.is_closed());
    assert_eq!(s.inference_count(), 2);

    let mut s = replay(&p, &[start(0)]);
    let k = 25;
    for _ in 0..k {
        s.apply_action(&p, ext(1, 0)).unwrap();
    }
    assert_eq!(s.open_goals(), 1);
    let goal = *s.current_goal().unwrap();
    let lit = s.goal_literal(&p, &goal);
    let mut expected = f("0", vec![]);
    for _ in 0..k {
        expected = f("s", vec![expected]);
    }
    assert_eq!(lit.args, vec![expected]);
    assert!(lit.positive);
    assert_eq!(goal.depth(), k);
}

#[test]
fn inapplicable_actions_are_rejected() {
    let p = parse_problem(NAT).unwrap();
    let mut s = replay(&p, &[start(0)]);
    let before = s.clone();
    assert!(s.apply_action(&p, ext(0, 0)).is_err());
    assert!(s.apply_action(&p, red(0)).is_err());
    assert!(s.apply_action(&p, start(1)).is_err());
    assert!(s.apply_action(&p, ext(9, 0)).is_err());
    assert_eq!(s, before);
}

#[test]
fn six_clause_proof_closes() {
    let p = parse_problem(SIX_CLAUSES).unwrap();
    let s = replay(&p, &six_clause_proof());
    assert!(s.is_closed());
    assert!(check_proof(&p, &six_clause_proof()));
    let mut shorter = six_clause_proof();
    shorter.remove(4);
    assert!(!check_proof(&p, &shorter));
}

#[test]
fn undo_restores_state() {
    let p = parse_problem(SIX_CLAUSES).unwrap();
    let mut s = TableauState::new();
    let m0 = s.mark();
    let mut marks = vec![];
    for a in six_clause_proof().into_iter().take(5) {
        marks.push(s.apply_action(&p, a).unwrap());
    }
    let after_two = replay(&p, &six_clause_proof()[..2]);
    s.undo_to(marks[1]).unwrap();
    assert_eq!(s.inference_count(), 2);
    assert_eq!(s, after_two);
    // marks[3] now lies on an abandoned lineage.
    assert_eq!(s.undo_to(marks[3]), Err(TableauError::StaleMark));
    s.apply_action(&p, ext(5, 0)).unwrap();
    s.apply_action(&p, ext(0, 0)).unwrap_err();
    s.undo_to(m0).unwrap();
    assert_eq!(s, TableauState::new());
}

#[test]
fn rewinding_then_reapplying_different_step_invalidates_old_marks() {
    let p = parse_problem(NAT).unwrap();
    let mut s = replay(&p, &[start(0)]);
    let m1 = s.mark();
    let m2 = s.apply_action(&p, ext(1, 0)).unwrap();
    s.undo_to(m1).unwrap();
    s.apply_action(&p, ext(2, 0)).unwrap();
    assert_eq!(s.undo_to(m2), Err(TableauError::StaleMark));
}

#[test]
fn unify_examples() {
    let a = f("a", vec![]);
    let b = f("b", vec![]);
    let mut s = Substitution::new();
    assert!(unify(&Term::Var(0), &a, &mut s));
    assert_eq!(s.binding(0), Some(a.clone()));

    let mut s = Substitution::new();
    let l = f("f", vec![Term::Var(0), b.clone()]);
    let r = f("f", vec![a.clone(), Term::Var(1)]);
    assert!(unify(&l, &r, &mut s));
    assert_eq!(s.binding(0), Some(a.clone()));
    assert_eq!(s.binding(1), Some(b.clone()));

    let mut s = Substitution::new();
    assert!(!unify(&Term::Var(0), &f("f", vec![Term::Var(0)]), &mut s));
    assert_eq!(s.bound_count(), 0);
    assert_eq!(s.binding(0), None);
}

#[test]
fn failed_unification_rewinds_partial_bindings() {
    let mut s = Substitution::new();
    let l = f("g", vec![Term::Var(0), Term::Var(1), f("a", vec![])]);
    let r = f("g", vec![f("c", vec![]), Term::Var(0), f("b", vec![])]);
    assert!(!unify(&l, &r, &mut s));
    assert_eq!(s.bound_count(), 0);
}

#[test]
fn nested_occurs_check() {
    let mut s = Substitution::new();
    assert!(unify(&Term::Var(1), &f("h", vec![Term::Var(0)]), &mut s));
    let m = s.mark();
    assert!(!unify(&Term::Var(0), &f("k", vec![Term::Var(1)]), &mut s));
    assert_eq!(s.mark(), m);
}

fn term_strategy() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0u32..4).prop_map(Term::Var),
        prop_oneof![Just("a"), Just("b")].prop_map(|n| f(n, vec![])),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| f("g", vec![t])),
            (inner.clone(), inner).prop_map(|(x, y)| f("h", vec![x, y])),
        ]
    })
}

/// Exhaustive candidate list: every clause/literal pair plus every path position.
fn all_candidates(p: &Problem, s: &TableauState) -> Vec<Action> {
    if !s.is_started() {
        return (0..p.clauses.len() as u32).map(start).collect();
    }
    let depth = s.current_goal().map_or(0, |g| g.depth());
    let mut out: Vec<Action> = (0..=depth as u32).map(red).collect();
    for (ci, c) in p.clauses.iter().enumerate() {
        for li in 0..c.literals.len() {
            out.push(ext(ci as u32, li as u32));
        }
    }
    out
}

proptest! {
    #[test]
    fn unifier_is_a_unifier_and_idempotent(a in term_strategy(), b in term_strategy()) {
        let mut s = Substitution::new();
        if unify(&a, &b, &mut s) {
            let sa = s.apply(&a);
            prop_assert_eq!(&sa, &s.apply(&b));
            prop_assert_eq!(s.apply(&sa), sa);
        } else {
            prop_assert_eq!(s.bound_count(), 0);
        }
    }

    #[test]
    fn random_apply_undo_walks_return_to_start(choices in proptest::collection::vec(0usize..64, 1000)) {
        let p = parse_problem(SIX_CLAUSES).unwrap();
        let mut s = TableauState::new();
        let initial = s.clone();
        let mut history: Vec<TableauState> = vec![s.clone()];
        for c in choices {
            let acts = if s.is_closed() { vec![] } else { s.applicable_actions(&p) };
            if c % 3 == 0 || acts.is_empty() {
                if s.undo_last().is_some() {
                    history.pop();
                    prop_assert_eq!(&s, history.last().unwrap());
                }
            } else {
                let a = acts[c % acts.len()];
                s.apply_action(&p, a).unwrap();
                history.push(s.clone());
            }
            prop_assert_eq!(s.inference_count(), history.len() - 1);
            prop_assert_eq!(s.open_goals(), s.goals().len());
        }
        while s.undo_last().is_some() {}
        prop_assert_eq!(s, initial);
    }

    #[test]
    fn listed_actions_are_exactly_the_applicable_ones(choices in proptest::collection::vec(0usize..16, 1..12)) {
        let p = parse_problem(SIX_CLAUSES).unwrap();
        let mut s = TableauState::new();
        for c in choices {
            if s.is_closed() {
                break;
            }
            let listed = s.applicable_actions(&p);
            for cand in all_candidates(&p, &s) {
                let before = s.clone();
                let ok = s.apply_action(&p, cand).is_ok();
                prop_assert_eq!(ok, listed.contains(&cand), "{}", cand);
                if ok {
                    s.undo_last();
                }
                prop_assert_eq!(&s, &before);
            }
            if listed.is_empty() {
                break;
            }
            s.apply_action(&p, listed[c % listed.len()]).unwrap();
        }
    }
}

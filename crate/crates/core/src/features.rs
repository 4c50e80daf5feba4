//! Sparse features of expressions, proof states and inferences.
//!
//! Term walks are symbol sequences read downwards from the root of a literal
//! or term, of length 1 to 3. Each walk hashes to `h = salt; h = h * P + id`
//! (wrapping) and lands at index `h mod WALK_DIM`; the feature value counts
//! occurrences. Variables all read as [`VAR_MARKER`], and the root predicate
//! of a negative literal reads as the bitwise complement of its id. Abstract
//! state features live at the dense indices `WALK_DIM..WALK_DIM + 10`.

use std::collections::HashMap;

use crate::syntax::{Literal, Problem, SymbolId, Term};
use crate::tableau::{Action, TableauState};

/// Size of the hashed walk space, `2^18 - 5`.
pub const WALK_DIM: u32 = 262_139;
/// Number of reserved abstract slots after the walk space.
pub const ABSTRACT_SLOTS: u32 = 16;
/// Total feature dimension.
pub const FEATURE_DIM: u32 = WALK_DIM + ABSTRACT_SLOTS;
/// Multiplier used to combine walk symbol ids.
pub const WALK_PRIME: u64 = 1_000_003;
/// Id every variable takes inside a walk.
pub const VAR_MARKER: u64 = 0x9e37_79b9_7f4a_7c15;
/// Modulus applied to symbol ids stored as most-common-symbol features.
pub const SYMBOL_VALUE_MODULUS: u64 = 1009;

/// Where an expression occurs; each context salts its walks differently.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ContextTag {
    Goal,
    Path,
    Tableau,
    ActionClause,
    ActionLiteral,
}

impl ContextTag {
    pub const ALL: [ContextTag; 5] = [
        ContextTag::Goal,
        ContextTag::Path,
        ContextTag::Tableau,
        ContextTag::ActionClause,
        ContextTag::ActionLiteral,
    ];

    pub fn salt(self) -> u64 {
        match self {
            ContextTag::Goal => 0x243f_6a88_85a3_08d3,
            ContextTag::Path => 0x1319_8a2e_0370_7344,
            ContextTag::Tableau => 0xa409_3822_299f_31d0,
            ContextTag::ActionClause => 0x082e_fa98_ec4e_6c89,
            ContextTag::ActionLiteral => 0x4528_21e6_38d0_1377,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ContextTag::Goal => "goal",
            ContextTag::Path => "path",
            ContextTag::Tableau => "tableau",
            ContextTag::ActionClause => "action_clause",
            ContextTag::ActionLiteral => "action_literal",
        }
    }
}

/// Offsets of the abstract features relative to [`WALK_DIM`].
pub mod slot {
    pub const GOAL_COUNT: u32 = 0;
    pub const TOTAL_GOAL_SIZE: u32 = 1;
    pub const MAX_GOAL_SIZE: u32 = 2;
    pub const MAX_GOAL_DEPTH: u32 = 3;
    pub const PATH_LENGTH: u32 = 4;
    pub const BOUND_VARS: u32 = 5;
    pub const TOP_SYMBOL: u32 = 6;
    pub const TOP_SYMBOL_FREQ: u32 = 7;
    pub const SECOND_SYMBOL: u32 = 8;
    pub const SECOND_SYMBOL_FREQ: u32 = 9;
}

/// Sparse vector sorted by index with no duplicate indices and no zeros.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FeatureVector {
    entries: Vec<(u32, f64)>,
}

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from arbitrary pairs, summing duplicates and dropping
    /// zeros.
    pub fn from_pairs(mut pairs: Vec<(u32, f64)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut entries: Vec<(u32, f64)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match entries.last_mut() {
                Some(last) if last.0 == i => last.1 += v,
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|e| e.1 != 0.0);
        FeatureVector { entries }
    }

    fn from_indices(mut idx: Vec<u32>) -> Self {
        idx.sort_unstable();
        let mut entries: Vec<(u32, f64)> = Vec::with_capacity(idx.len());
        for i in idx {
            match entries.last_mut() {
                Some(last) if last.0 == i => last.1 += 1.0,
                _ => entries.push((i, 1.0)),
            }
        }
        FeatureVector { entries }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: u32) -> f64 {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    /// Index-wise sum.
    pub fn add(&self, other: &FeatureVector) -> FeatureVector {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let v = a[i].1 + b[j].1;
                    if v != 0.0 {
                        out.push((a[i].0, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        FeatureVector { entries: out }
    }
}

/// An expression walks can be read from.
#[derive(Clone, Copy, Debug)]
pub enum Expr<'a> {
    Literal(&'a Literal),
    Term(&'a Term),
}

impl<'a> From<&'a Literal> for Expr<'a> {
    fn from(l: &'a Literal) -> Self {
        Expr::Literal(l)
    }
}

impl<'a> From<&'a Term> for Expr<'a> {
    fn from(t: &'a Term) -> Self {
        Expr::Term(t)
    }
}

fn term_id(t: &Term) -> u64 {
    match t {
        Term::Var(_) => VAR_MARKER,
        Term::App(SymbolId(id), _) => *id,
    }
}

fn term_args(t: &Term) -> &[Term] {
    match t {
        Term::Var(_) => &[],
        Term::App(_, args) => args,
    }
}

/// Id of a literal's root, carrying the polarity.
pub fn signed_predicate_id(l: &Literal) -> u64 {
    if l.positive {
        l.predicate.0
    } else {
        !l.predicate.0
    }
}

#[inline]
fn walk_index(salt: u64, ids: &[u64]) -> u32 {
    let h = ids
        .iter()
        .fold(salt, |h, &id| h.wrapping_mul(WALK_PRIME).wrapping_add(id));
    (h % u64::from(WALK_DIM)) as u32
}

fn push_walks(root: u64, args: &[Term], tag: ContextTag, out: &mut Vec<u32>) {
    let salt = tag.salt();
    out.push(walk_index(salt, &[root]));
    for a in args {
        let ai = term_id(a);
        out.push(walk_index(salt, &[root, ai]));
        for g in term_args(a) {
            out.push(walk_index(salt, &[root, ai, term_id(g)]));
        }
    }
}

fn push_expr(expr: Expr<'_>, tag: ContextTag, out: &mut Vec<u32>) {
    match expr {
        Expr::Literal(l) => push_walks(signed_predicate_id(l), &l.args, tag, out),
        Expr::Term(t) => push_walks(term_id(t), term_args(t), tag, out),
    }
}

/// Walk features of one literal or term under `tag`.
pub fn walk_features<'a>(expr: impl Into<Expr<'a>>, tag: ContextTag) -> FeatureVector {
    let mut idx = Vec::new();
    push_expr(expr.into(), tag, &mut idx);
    FeatureVector::from_indices(idx)
}

/// Walk features of several literals under one tag, summed.
pub fn walk_features_all<'a>(lits: impl IntoIterator<Item = &'a Literal>, tag: ContextTag) -> FeatureVector {
    let mut idx = Vec::new();
    for l in lits {
        push_expr(Expr::Literal(l), tag, &mut idx);
    }
    FeatureVector::from_indices(idx)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureMode {
    Policy,
    Value,
}

fn term_height(t: &Term) -> usize {
    1 + term_args(t).iter().map(term_height).max().unwrap_or(0)
}

fn count_symbols(t: &Term, counts: &mut HashMap<u64, u32>) {
    if let Term::App(SymbolId(id), args) = t {
        *counts.entry(*id).or_default() += 1;
        args.iter().for_each(|a| count_symbols(a, counts));
    }
}

/// Nesting height of a literal, the predicate counting as 1.
pub fn literal_height(l: &Literal) -> usize {
    1 + l.args.iter().map(term_height).max().unwrap_or(0)
}

/// Features of a proof state. Policy mode reads the current goal with the
/// goal tag; value mode reads every open goal with it. Both add the current
/// goal's active path, all open goals under the tableau tag, and the abstract
/// features.
pub fn state_features(state: &TableauState, problem: &Problem, mode: FeatureMode) -> FeatureVector {
    let goals: Vec<Literal> = state.goals().iter().map(|g| state.goal_literal(problem, g)).collect();
    let current = state.current_goal();
    let path: Vec<Literal> = current
        .map(|g| state.path_literals_shallow(problem, g))
        .unwrap_or_default();

    let mut idx = Vec::new();
    match mode {
        FeatureMode::Policy => {
            if let Some(top) = goals.last() {
                push_expr(Expr::Literal(top), ContextTag::Goal, &mut idx);
            }
        }
        FeatureMode::Value => {
            for g in &goals {
                push_expr(Expr::Literal(g), ContextTag::Goal, &mut idx);
            }
        }
    }
    for l in &path {
        push_expr(Expr::Literal(l), ContextTag::Path, &mut idx);
    }
    for g in &goals {
        push_expr(Expr::Literal(g), ContextTag::Tableau, &mut idx);
    }
    let walks = FeatureVector::from_indices(idx);

    let mut counts: HashMap<u64, u32> = HashMap::new();
    let mut total = 0usize;
    let mut max_size = 0usize;
    for g in &goals {
        *counts.entry(g.predicate.0).or_default() += 1;
        g.args.iter().for_each(|a| count_symbols(a, &mut counts));
        let s = g.size();
        total += s;
        max_size = max_size.max(s);
    }
    let max_depth = state.goals().iter().map(|g| g.depth() + 1).max().unwrap_or(0);
    let mut ranked: Vec<(u64, u32)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let sym = |i: usize| {
        ranked.get(i).map_or((0.0, 0.0), |&(id, n)| {
            ((id % SYMBOL_VALUE_MODULUS) as f64, f64::from(n))
        })
    };
    let (top, top_n) = sym(0);
    let (second, second_n) = sym(1);
    let abstract_values = [
        (slot::GOAL_COUNT, goals.len() as f64),
        (slot::TOTAL_GOAL_SIZE, total as f64),
        (slot::MAX_GOAL_SIZE, max_size as f64),
        (slot::MAX_GOAL_DEPTH, max_depth as f64),
        (slot::PATH_LENGTH, path.len() as f64),
        (slot::BOUND_VARS, state.bound_var_count() as f64),
        (slot::TOP_SYMBOL, top),
        (slot::TOP_SYMBOL_FREQ, top_n),
        (slot::SECOND_SYMBOL, second),
        (slot::SECOND_SYMBOL_FREQ, second_n),
    ];
    let dense = FeatureVector::from_pairs(abstract_values.iter().map(|&(s, v)| (WALK_DIM + s, v)).collect());
    walks.add(&dense)
}

/// Features of the clause (and connecting literal) an inference uses.
/// A reduction's path literal plays both roles; a start action has only
/// the clause part.
pub fn action_features(action: Action, state: &TableauState, problem: &Problem) -> FeatureVector {
    match action {
        Action::Start { clause } => clause_features(problem, clause as usize, None),
        Action::Extension { clause, literal } => clause_features(problem, clause as usize, Some(literal as usize)),
        Action::Reduction { path_position } => {
            let Some(goal) = state.current_goal() else {
                return FeatureVector::new();
            };
            let path = state.path_literals(problem, goal);
            match path.get(path_position as usize) {
                Some(l) => {
                    let mut idx = Vec::new();
                    push_expr(Expr::Literal(l), ContextTag::ActionClause, &mut idx);
                    push_expr(Expr::Literal(l), ContextTag::ActionLiteral, &mut idx);
                    FeatureVector::from_indices(idx)
                }
                None => FeatureVector::new(),
            }
        }
    }
}

/// Features of an input clause and optionally one of its literals, read
/// before any instantiation.
pub fn clause_features(problem: &Problem, clause: usize, literal: Option<usize>) -> FeatureVector {
    let c = &problem.clauses[clause];
    let mut idx = Vec::new();
    for l in &c.literals {
        push_expr(Expr::Literal(l), ContextTag::ActionClause, &mut idx);
    }
    if let Some(li) = literal {
        push_expr(Expr::Literal(&c.literals[li]), ContextTag::ActionLiteral, &mut idx);
    }
    FeatureVector::from_indices(idx)
}

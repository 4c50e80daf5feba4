//! Flat, index-based copy of the clause set used by the tableau engine.
//!
//! Terms are stored once in a node pool; a clause instance in a tableau is a
//! pair (node, variable offset), so renaming apart never copies terms.

use std::collections::HashMap;

use crate::syntax::{Clause, SymbolId, Term};

pub(crate) type NodeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Node {
    Var(u32),
    App { sym: SymbolId, args: u32, arity: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct CLit {
    pub positive: bool,
    pub pred: SymbolId,
    /// Atom node: an `App` whose symbol is the predicate.
    pub atom: NodeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct CClause {
    pub lits: Vec<CLit>,
    pub nvars: u32,
}

/// Shared storage for term nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct TermPool {
    pub nodes: Vec<Node>,
    pub args: Vec<NodeId>,
}

impl TermPool {
    /// A pool whose node 0 is `Var(0)`, used to reference bare variables.
    pub fn new() -> Self {
        TermPool {
            nodes: vec![Node::Var(0)],
            args: Vec::new(),
        }
    }

    pub fn push_app(&mut self, sym: SymbolId, args: &[Term]) -> NodeId {
        let ids: Vec<NodeId> = args.iter().map(|a| self.push_term(a)).collect();
        let start = self.args.len() as u32;
        self.args.extend_from_slice(&ids);
        let id = self.nodes.len() as NodeId;
        self.nodes.push(Node::App {
            sym,
            args: start,
            arity: ids.len() as u32,
        });
        id
    }

    pub fn push_term(&mut self, t: &Term) -> NodeId {
        match t {
            Term::Var(v) => {
                let id = self.nodes.len() as NodeId;
                self.nodes.push(Node::Var(*v));
                id
            }
            Term::App(sym, args) => self.push_app(*sym, args),
        }
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id as usize]
    }

    #[inline]
    pub fn arg(&self, start: u32, i: u32) -> NodeId {
        self.args[(start + i) as usize]
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Matrix {
    pub pool: TermPool,
    pub clauses: Vec<CClause>,
    /// (predicate, polarity) -> (clause, literal) pairs in ascending order.
    pub by_pred: HashMap<(SymbolId, bool), Vec<(u32, u32)>>,
}

impl Matrix {
    pub fn build(clauses: &[Clause]) -> Self {
        let mut m = Matrix {
            pool: TermPool::new(),
            clauses: Vec::with_capacity(clauses.len()),
            by_pred: HashMap::new(),
        };
        for (ci, c) in clauses.iter().enumerate() {
            let mut lits = Vec::with_capacity(c.literals.len());
            for (li, l) in c.literals.iter().enumerate() {
                let atom = m.pool.push_app(l.predicate, &l.args);
                lits.push(CLit {
                    positive: l.positive,
                    pred: l.predicate,
                    atom,
                });
                m.by_pred
                    .entry((l.predicate, l.positive))
                    .or_default()
                    .push((ci as u32, li as u32));
            }
            m.clauses.push(CClause {
                lits,
                nvars: c.var_count(),
            });
        }
        m
    }

    pub fn candidates(&self, pred: SymbolId, positive: bool) -> &[(u32, u32)] {
        self.by_pred.get(&(pred, positive)).map(Vec::as_slice).unwrap_or(&[])
    }
}

//! Trail-based unification with occurs check over shared term nodes.

use crate::matrix::{Node, NodeId, TermPool};
use crate::syntax::Term;

/// A term instance: a pool node read under a variable offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Inst {
    pub node: NodeId,
    pub offset: u32,
}

/// Variable-instance bindings plus the chronological trail of bound slots.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Bindings {
    slots: Vec<Option<Inst>>,
    trail: Vec<u32>,
}

enum Deref {
    Var(u32),
    App(Inst),
}

impl Bindings {
    pub fn ensure(&mut self, vars: usize) {
        if self.slots.len() < vars {
            self.slots.resize(vars, None);
        }
    }

    pub fn truncate_slots(&mut self, vars: usize) {
        debug_assert!(self.slots[vars.min(self.slots.len())..].iter().all(Option::is_none));
        self.slots.truncate(vars);
    }

    pub fn trail_len(&self) -> usize {
        self.trail.len()
    }

    pub fn bound_count(&self) -> usize {
        self.trail.len()
    }

    pub fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let v = self.trail.pop().unwrap();
            self.slots[v as usize] = None;
        }
    }

    pub fn get(&self, var: u32) -> Option<Inst> {
        self.slots.get(var as usize).copied().flatten()
    }

    fn deref(&self, pool: &TermPool, mut t: Inst) -> Deref {
        loop {
            match pool.node(t.node) {
                Node::Var(v) => {
                    let id = t.offset + v;
                    match self.get(id) {
                        Some(b) => t = b,
                        None => return Deref::Var(id),
                    }
                }
                Node::App { .. } => return Deref::App(t),
            }
        }
    }

    fn bind(&mut self, var: u32, t: Inst) {
        self.ensure(var as usize + 1);
        self.slots[var as usize] = Some(t);
        self.trail.push(var);
    }

    fn occurs(&self, pool: &TermPool, var: u32, t: Inst, stack: &mut Vec<Inst>) -> bool {
        stack.clear();
        stack.push(t);
        while let Some(t) = stack.pop() {
            match self.deref(pool, t) {
                Deref::Var(v) => {
                    if v == var {
                        return true;
                    }
                }
                Deref::App(a) => {
                    if let Node::App { args, arity, .. } = pool.node(a.node) {
                        for i in 0..arity {
                            stack.push(Inst {
                                node: pool.arg(args, i),
                                offset: a.offset,
                            });
                        }
                    }
                }
            }
        }
        false
    }

    /// Unifies two instances. On failure every binding made by this call is
    /// undone.
    pub fn unify(&mut self, pool: &TermPool, a: Inst, b: Inst) -> bool {
        let mark = self.trail.len();
        let mut todo = vec![(a, b)];
        let mut scratch = Vec::new();
        while let Some((x, y)) = todo.pop() {
            match (self.deref(pool, x), self.deref(pool, y)) {
                (Deref::Var(u), Deref::Var(v)) => {
                    if u != v {
                        self.bind(u, Inst { node: VAR0, offset: v });
                    }
                }
                (Deref::Var(u), Deref::App(t)) | (Deref::App(t), Deref::Var(u)) => {
                    if self.occurs(pool, u, t, &mut scratch) {
                        self.undo_to(mark);
                        return false;
                    }
                    self.bind(u, t);
                }
                (Deref::App(s), Deref::App(t)) => {
                    let (
                        Node::App {
                            sym: fs,
                            args: aa,
                            arity: na,
                        },
                        Node::App {
                            sym: ft,
                            args: ab,
                            arity: nb,
                        },
                    ) = (pool.node(s.node), pool.node(t.node))
                    else {
                        unreachable!()
                    };
                    if fs != ft || na != nb {
                        self.undo_to(mark);
                        return false;
                    }
                    for i in (0..na).rev() {
                        todo.push((
                            Inst {
                                node: pool.arg(aa, i),
                                offset: s.offset,
                            },
                            Inst {
                                node: pool.arg(ab, i),
                                offset: t.offset,
                            },
                        ));
                    }
                }
            }
        }
        true
    }

    /// Materialises an instance as a [`Term`] over global variable ids.
    pub fn resolve(&self, pool: &TermPool, t: Inst) -> Term {
        match self.deref(pool, t) {
            Deref::Var(v) => Term::Var(v),
            Deref::App(a) => match pool.node(a.node) {
                Node::App { sym, args, arity } => Term::App(
                    sym,
                    (0..arity)
                        .map(|i| {
                            self.resolve(
                                pool,
                                Inst {
                                    node: pool.arg(args, i),
                                    offset: a.offset,
                                },
                            )
                        })
                        .collect(),
                ),
                Node::Var(_) => unreachable!(),
            },
        }
    }

    /// Like [`resolve`](Self::resolve), but subterms at `levels` below `t`
    /// keep only their head symbol.
    pub fn resolve_shallow(&self, pool: &TermPool, t: Inst, levels: u32) -> Term {
        match self.deref(pool, t) {
            Deref::Var(v) => Term::Var(v),
            Deref::App(a) => match pool.node(a.node) {
                Node::App { sym, args, arity } => {
                    if levels <= 1 {
                        return Term::App(sym, Vec::new());
                    }
                    Term::App(
                        sym,
                        (0..arity)
                            .map(|i| {
                                let arg = Inst {
                                    node: pool.arg(args, i),
                                    offset: a.offset,
                                };
                                self.resolve_shallow(pool, arg, levels - 1)
                            })
                            .collect(),
                    )
                }
                Node::Var(_) => unreachable!(),
            },
        }
    }
}

/// Node 0 of every pool is `Var(0)`, so `(VAR0, v)` names variable `v`.
pub(crate) const VAR0: NodeId = 0;

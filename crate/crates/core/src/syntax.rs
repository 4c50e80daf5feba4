//! First-order clausal syntax: interned symbols, terms, literals, clauses and
//! the problem matrix.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ProblemError;
use crate::matrix::Matrix;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a over a byte string.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymbolKind {
    Function,
    Predicate,
}

impl SymbolKind {
    fn tag(self) -> &'static str {
        match self {
            SymbolKind::Function => "func",
            SymbolKind::Predicate => "pred",
        }
    }
}

/// Stable 64-bit symbol identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymbolId(pub u64);

/// Interns `(name, arity, kind)` as the FNV-1a hash of `name/arity/kind`,
/// e.g. `q/1/pred`. The result depends on nothing but the triple.
pub fn intern_symbol(name: &str, arity: usize, kind: SymbolKind) -> SymbolId {
    let key = format!("{}/{}/{}", name, arity, kind.tag());
    SymbolId(fnv1a64(key.as_bytes()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub id: SymbolId,
    pub name: String,
    pub arity: usize,
    pub kind: SymbolKind,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolTable {
    symbols: Vec<Symbol>,
    by_id: HashMap<SymbolId, usize>,
    arities: HashMap<(String, SymbolKind), usize>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns a symbol, rejecting arity clashes and hash collisions.
    pub fn intern(&mut self, name: &str, arity: usize, kind: SymbolKind) -> Result<SymbolId, ProblemError> {
        if let Some(&prev) = self.arities.get(&(name.to_string(), kind)) {
            if prev != arity {
                return Err(ProblemError::ArityClash {
                    name: name.to_string(),
                    first: prev,
                    second: arity,
                });
            }
        }
        let id = intern_symbol(name, arity, kind);
        if let Some(&i) = self.by_id.get(&id) {
            let s = &self.symbols[i];
            if s.name != name || s.arity != arity || s.kind != kind {
                return Err(ProblemError::SymbolCollision {
                    first: format!("{}/{}", s.name, s.arity),
                    second: format!("{}/{}", name, arity),
                });
            }
            return Ok(id);
        }
        self.by_id.insert(id, self.symbols.len());
        self.arities.insert((name.to_string(), kind), arity);
        self.symbols.push(Symbol {
            id,
            name: name.to_string(),
            arity,
            kind,
        });
        Ok(id)
    }

    pub fn get(&self, id: SymbolId) -> Option<&Symbol> {
        self.by_id.get(&id).map(|&i| &self.symbols[i])
    }

    pub fn name(&self, id: SymbolId) -> &str {
        self.get(id).map(|s| s.name.as_str()).unwrap_or("?")
    }

    pub fn arity(&self, id: SymbolId) -> Option<usize> {
        self.get(id).map(|s| s.arity)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// A term. Variables are clause-local indices inside a [`Clause`]; terms
/// produced from a tableau use global variable-instance ids instead.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(u32),
    App(SymbolId, Vec<Term>),
}

impl Term {
    pub fn constant(id: SymbolId) -> Self {
        Term::App(id, Vec::new())
    }

    /// Number of nodes in the term tree.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn vars(&self, out: &mut Vec<u32>) {
        match self {
            Term::Var(v) => out.push(*v),
            Term::App(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub positive: bool,
    pub predicate: SymbolId,
    pub args: Vec<Term>,
}

impl Literal {
    pub fn size(&self) -> usize {
        1 + self.args.iter().map(Term::size).sum::<usize>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub index: usize,
    pub name: String,
    pub role: String,
    pub literals: Vec<Literal>,
    pub from_conjecture: bool,
    /// Names of the clause's variables, indexed by local variable number.
    pub var_names: Vec<String>,
}

impl Clause {
    pub fn var_count(&self) -> u32 {
        self.var_names.len() as u32
    }
}

/// A parsed clausal problem. Immutable once built.
#[derive(Clone, Debug)]
pub struct Problem {
    pub clauses: Vec<Clause>,
    pub symbols: SymbolTable,
    pub start_clause_indices: Vec<usize>,
    pub(crate) matrix: Matrix,
}

impl PartialEq for Problem {
    fn eq(&self, other: &Self) -> bool {
        self.clauses == other.clauses
            && self.symbols == other.symbols
            && self.start_clause_indices == other.start_clause_indices
    }
}

impl Problem {
    /// Builds a problem from clauses; start clauses are the conjecture
    /// clauses, or every clause when there are none.
    pub fn new(clauses: Vec<Clause>, symbols: SymbolTable) -> Result<Self, ProblemError> {
        for (i, c) in clauses.iter().enumerate() {
            if c.index != i {
                return Err(ProblemError::Invalid(format!("clause {} carries index {}", i, c.index)));
            }
            if c.literals.is_empty() {
                return Err(ProblemError::Invalid(format!("clause {} is empty", c.name)));
            }
            if c.literals.len() > crate::tableau::MAX_LITERALS as usize {
                return Err(ProblemError::Invalid(format!(
                    "clause {} has more than {} literals",
                    c.name,
                    crate::tableau::MAX_LITERALS
                )));
            }
        }
        let conj: Vec<usize> = clauses.iter().filter(|c| c.from_conjecture).map(|c| c.index).collect();
        let start_clause_indices = if conj.is_empty() {
            (0..clauses.len()).collect()
        } else {
            conj
        };
        let matrix = Matrix::build(&clauses);
        Ok(Problem {
            clauses,
            symbols,
            start_clause_indices,
            matrix,
        })
    }

    /// True when no clause is marked as coming from the conjecture, so every
    /// clause is a start candidate.
    pub fn starts_from_all_clauses(&self) -> bool {
        !self.clauses.iter().any(|c| c.from_conjecture)
    }

    pub fn term_display<'a>(&'a self, term: &'a Term, names: Option<&'a [String]>) -> TermDisplay<'a> {
        TermDisplay {
            symbols: &self.symbols,
            term,
            names,
        }
    }

    pub fn literal_display<'a>(&'a self, lit: &'a Literal, names: Option<&'a [String]>) -> LiteralDisplay<'a> {
        LiteralDisplay {
            symbols: &self.symbols,
            lit,
            names,
        }
    }
}

fn write_name(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    let plain = name
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain {
        f.write_str(name)
    } else {
        write!(f, "'{}'", name.replace('\\', "\\\\").replace('\'', "\\'"))
    }
}

pub struct TermDisplay<'a> {
    symbols: &'a SymbolTable,
    term: &'a Term,
    names: Option<&'a [String]>,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(v) => match self.names.and_then(|n| n.get(*v as usize)) {
                Some(name) => f.write_str(name),
                None => write!(f, "X{}", v),
            },
            Term::App(id, args) => {
                write_name(f, self.symbols.name(*id))?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        let d = TermDisplay {
                            symbols: self.symbols,
                            term: a,
                            names: self.names,
                        };
                        write!(f, "{}", d)?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

pub struct LiteralDisplay<'a> {
    symbols: &'a SymbolTable,
    lit: &'a Literal,
    names: Option<&'a [String]>,
}

impl fmt::Display for LiteralDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.lit.positive {
            f.write_str("~")?;
        }
        let head = Term::App(self.lit.predicate, self.lit.args.clone());
        write!(
            f,
            "{}",
            TermDisplay {
                symbols: self.symbols,
                term: &head,
                names: self.names,
            }
        )
    }
}

impl fmt::Display for Problem {
    /// Prints the problem back in the clausal input syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            write!(f, "cnf({}, {}, (", c.name, c.role)?;
            for (i, l) in c.literals.iter().enumerate() {
                if i > 0 {
                    f.write_str(" | ")?;
                }
                write!(f, "{}", self.literal_display(l, Some(&c.var_names)))?;
            }
            writeln!(f, ")).")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_deterministic_and_keyed_by_arity() {
        let a = intern_symbol("p", 1, SymbolKind::Predicate);
        let b = intern_symbol("p", 1, SymbolKind::Predicate);
        let c = intern_symbol("p", 2, SymbolKind::Predicate);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, intern_symbol("p", 1, SymbolKind::Function));
    }

    #[test]
    fn interned_id_regression() {
        // FNV-1a of the bytes "q/1/pred", computed independently.
        assert_eq!(
            intern_symbol("q", 1, SymbolKind::Predicate),
            SymbolId(0xd3e6_d022_2e9b_74c6)
        );
    }

    #[test]
    fn arity_clash_is_rejected() {
        let mut t = SymbolTable::new();
        t.intern("p", 2, SymbolKind::Predicate).unwrap();
        assert!(matches!(
            t.intern("p", 1, SymbolKind::Predicate),
            Err(ProblemError::ArityClash { .. })
        ));
    }
}

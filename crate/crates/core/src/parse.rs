//! Reader for TPTP-style clausal problems.
//!
//! Accepted statements are `cnf(name, role, formula).` and
//! `include('file').` / `include('file', [name, ...]).`. The formula is a
//! disjunction of literals, optionally parenthesised; `~` negates, `=` and
//! `!=` are read as an ordinary binary predicate named `=`. Words starting
//! with an uppercase letter or `_` are variables, scoped per clause. `%` line
//! comments and `/* */` block comments are skipped.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::ProblemError;
use crate::syntax::{Clause, Literal, Problem, SymbolKind, SymbolTable, Term};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Lower(String),
    Upper(String),
    Quoted(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Bar,
    Tilde,
    Eq,
    Neq,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> ProblemError {
    ProblemError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<(Vec<Spanned>, (usize, usize)), ProblemError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(syntax(l0, c0, "unterminated block comment"));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '|' => Tok::Bar,
            '~' => Tok::Tilde,
            '=' => Tok::Eq,
            '!' if chars.get(i + 1) == Some(&'=') => {
                bump!();
                Tok::Neq
            }
            '\'' | '"' => {
                let quote = c;
                bump!();
                let mut s = String::new();
                loop {
                    match chars.get(i) {
                        None => return Err(syntax(l0, c0, "unterminated quoted name")),
                        Some('\\') => {
                            bump!();
                            match chars.get(i) {
                                Some(&e) => {
                                    s.push(e);
                                    bump!();
                                }
                                None => return Err(syntax(l0, c0, "unterminated quoted name")),
                            }
                        }
                        Some(&q) if q == quote => {
                            bump!();
                            break;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            bump!();
                        }
                    }
                }
                if quote == '"' {
                    s = format!("\"{}\"", s);
                }
                out.push(Spanned {
                    tok: Tok::Quoted(s),
                    line: l0,
                    col: c0,
                });
                continue;
            }
            c if c.is_alphanumeric() || c == '_' || c == '$' => {
                let mut s = String::new();
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                    s.push(chars[i]);
                    bump!();
                }
                let first = s.chars().next().unwrap();
                let tok = if first.is_uppercase() || first == '_' {
                    Tok::Upper(s)
                } else {
                    Tok::Lower(s)
                };
                out.push(Spanned { tok, line: l0, col: c0 });
                continue;
            }
            other => return Err(syntax(l0, c0, format!("unexpected character {:?}", other))),
        };
        bump!();
        out.push(Spanned { tok, line: l0, col: c0 });
    }
    Ok((out, (line, col)))
}

/// One parsed `cnf` statement before symbol interning.
struct RawClause {
    name: String,
    role: String,
    literals: Vec<RawLiteral>,
    line: usize,
    col: usize,
}

struct RawLiteral {
    positive: bool,
    name: String,
    args: Vec<RawTerm>,
}

enum RawTerm {
    Var(String),
    App(String, Vec<RawTerm>),
}

enum Statement {
    Clause(RawClause),
    Include(String, Option<Vec<String>>, usize, usize),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|s| (s.line, s.col)).unwrap_or(self.end)
    }

    fn err(&self, message: impl Into<String>) -> ProblemError {
        let (l, c) = self.here();
        syntax(l, c, message)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ProblemError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {}", what)))
        }
    }

    fn name(&mut self) -> Result<String, ProblemError> {
        match self.peek().cloned() {
            Some(Tok::Lower(s)) | Some(Tok::Quoted(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err("expected a name")),
        }
    }

    fn statement(&mut self) -> Result<Statement, ProblemError> {
        let (line, col) = self.here();
        let head = self.name()?;
        match head.as_str() {
            "cnf" => {
                self.expect(Tok::LParen, "'('")?;
                let name = match self.peek().cloned() {
                    Some(Tok::Upper(s)) => {
                        self.pos += 1;
                        s
                    }
                    _ => self.name()?,
                };
                self.expect(Tok::Comma, "','")?;
                let role = self.name()?;
                self.expect(Tok::Comma, "','")?;
                let literals = self.disjunction()?;
                // Optional annotations are skipped up to the closing paren.
                if self.peek() == Some(&Tok::Comma) {
                    self.skip_annotations()?;
                }
                self.expect(Tok::RParen, "')'")?;
                self.expect(Tok::Dot, "'.'")?;
                Ok(Statement::Clause(RawClause {
                    name,
                    role,
                    literals,
                    line,
                    col,
                }))
            }
            "include" => {
                self.expect(Tok::LParen, "'('")?;
                let file = match self.peek().cloned() {
                    Some(Tok::Quoted(s)) => {
                        self.pos += 1;
                        s
                    }
                    _ => return Err(self.err("expected a quoted file name")),
                };
                let mut names = None;
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    self.expect(Tok::LBrack, "'['")?;
                    let mut list = Vec::new();
                    if self.peek() != Some(&Tok::RBrack) {
                        loop {
                            list.push(self.name()?);
                            if self.peek() == Some(&Tok::Comma) {
                                self.pos += 1;
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RBrack, "']'")?;
                    names = Some(list);
                }
                self.expect(Tok::RParen, "')'")?;
                self.expect(Tok::Dot, "'.'")?;
                Ok(Statement::Include(file, names, line, col))
            }
            other => Err(syntax(line, col, format!("unsupported statement {}", other))),
        }
    }

    fn skip_annotations(&mut self) -> Result<(), ProblemError> {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                None => return Err(self.err("unterminated annotations")),
                Some(Tok::LParen) | Some(Tok::LBrack) => depth += 1,
                Some(Tok::RParen) | Some(Tok::RBrack) if depth == 0 => return Ok(()),
                Some(Tok::RParen) | Some(Tok::RBrack) => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
    }

    fn disjunction(&mut self) -> Result<Vec<RawLiteral>, ProblemError> {
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let lits = self.disjunction()?;
            self.expect(Tok::RParen, "')'")?;
            return Ok(lits);
        }
        let mut lits = vec![self.literal()?];
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            lits.push(self.literal()?);
        }
        Ok(lits)
    }

    fn literal(&mut self) -> Result<RawLiteral, ProblemError> {
        let (line, col) = self.here();
        let mut positive = true;
        while self.peek() == Some(&Tok::Tilde) {
            self.pos += 1;
            positive = !positive;
        }
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let mut inner = self.literal()?;
            self.expect(Tok::RParen, "')'")?;
            inner.positive = inner.positive == positive;
            return Ok(inner);
        }
        let lhs = self.term()?;
        match self.peek() {
            Some(Tok::Eq) | Some(Tok::Neq) => {
                if self.peek() == Some(&Tok::Neq) {
                    positive = !positive;
                }
                self.pos += 1;
                let rhs = self.term()?;
                Ok(RawLiteral {
                    positive,
                    name: "=".to_string(),
                    args: vec![lhs, rhs],
                })
            }
            _ => match lhs {
                RawTerm::App(name, args) => Ok(RawLiteral { positive, name, args }),
                RawTerm::Var(v) => Err(syntax(line, col, format!("variable {} used as atom", v))),
            },
        }
    }

    fn term(&mut self) -> Result<RawTerm, ProblemError> {
        match self.peek().cloned() {
            Some(Tok::Upper(v)) => {
                self.pos += 1;
                Ok(RawTerm::Var(v))
            }
            Some(Tok::Lower(s)) | Some(Tok::Quoted(s)) => {
                self.pos += 1;
                let mut args = Vec::new();
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    loop {
                        args.push(self.term()?);
                        match self.peek() {
                            Some(Tok::Comma) => self.pos += 1,
                            Some(Tok::RParen) => {
                                self.pos += 1;
                                break;
                            }
                            _ => return Err(self.err("expected ',' or ')'")),
                        }
                    }
                }
                Ok(RawTerm::App(s, args))
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

fn parse_statements(text: &str) -> Result<Vec<Statement>, ProblemError> {
    let (toks, end) = lex(text)?;
    let mut p = Parser { toks, pos: 0, end };
    let mut out = Vec::new();
    while p.peek().is_some() {
        out.push(p.statement()?);
    }
    Ok(out)
}

/// Loads problems from text or files, resolving `include` directives
/// relative to `include_dir` (falling back to the including file's
/// directory, then the current directory).
#[derive(Clone, Debug, Default)]
pub struct ProblemLoader {
    pub include_dir: Option<PathBuf>,
}

struct Builder {
    symbols: SymbolTable,
    clauses: Vec<Clause>,
}

impl Builder {
    fn term(
        &mut self,
        t: &RawTerm,
        vars: &mut HashMap<String, u32>,
        names: &mut Vec<String>,
    ) -> Result<Term, ProblemError> {
        match t {
            RawTerm::Var(v) => {
                let next = names.len() as u32;
                let id = *vars.entry(v.clone()).or_insert_with(|| {
                    names.push(v.clone());
                    next
                });
                Ok(Term::Var(id))
            }
            RawTerm::App(name, args) => {
                let id = self.symbols.intern(name, args.len(), SymbolKind::Function)?;
                let args = args
                    .iter()
                    .map(|a| self.term(a, vars, names))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Term::App(id, args))
            }
        }
    }

    fn clause(&mut self, raw: RawClause) -> Result<(), ProblemError> {
        let mut vars = HashMap::new();
        let mut names = Vec::new();
        let mut literals = Vec::with_capacity(raw.literals.len());
        for l in &raw.literals {
            let predicate = self.symbols.intern(&l.name, l.args.len(), SymbolKind::Predicate)?;
            let args = l
                .args
                .iter()
                .map(|a| self.term(a, &mut vars, &mut names))
                .collect::<Result<Vec<_>, _>>()?;
            literals.push(Literal {
                positive: l.positive,
                predicate,
                args,
            });
        }
        if literals.is_empty() {
            return Err(syntax(raw.line, raw.col, "empty clause"));
        }
        self.clauses.push(Clause {
            index: self.clauses.len(),
            from_conjecture: raw.role == "negated_conjecture",
            name: raw.name,
            role: raw.role,
            literals,
            var_names: names,
        });
        Ok(())
    }
}

impl ProblemLoader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_include_dir(dir: impl Into<PathBuf>) -> Self {
        ProblemLoader {
            include_dir: Some(dir.into()),
        }
    }

    pub fn parse(&self, text: &str) -> Result<Problem, ProblemError> {
        self.parse_in(text, None)
    }

    pub fn load(&self, path: &Path) -> Result<Problem, ProblemError> {
        let text = read(path)?;
        self.parse_in(&text, path.parent())
    }

    fn parse_in(&self, text: &str, here: Option<&Path>) -> Result<Problem, ProblemError> {
        let mut b = Builder {
            symbols: SymbolTable::new(),
            clauses: Vec::new(),
        };
        self.collect(text, here, None, &mut b, 0)?;
        Problem::new(b.clauses, b.symbols)
    }

    fn collect(
        &self,
        text: &str,
        here: Option<&Path>,
        filter: Option<&[String]>,
        b: &mut Builder,
        depth: usize,
    ) -> Result<(), ProblemError> {
        for st in parse_statements(text)? {
            match st {
                Statement::Clause(raw) => {
                    if filter.is_none_or(|f| f.contains(&raw.name)) {
                        b.clause(raw)?;
                    }
                }
                Statement::Include(file, names, line, col) => {
                    if depth > 32 {
                        return Err(syntax(line, col, "include nesting too deep"));
                    }
                    let path = self.resolve(&file, here);
                    let inner = read(&path)?;
                    self.collect(&inner, path.parent(), names.as_deref(), b, depth + 1)?;
                }
            }
        }
        Ok(())
    }

    fn resolve(&self, file: &str, here: Option<&Path>) -> PathBuf {
        let rel = Path::new(file);
        if rel.is_absolute() {
            return rel.to_path_buf();
        }
        if let Some(dir) = &self.include_dir {
            return dir.join(rel);
        }
        match here {
            Some(dir) => dir.join(rel),
            None => rel.to_path_buf(),
        }
    }
}

fn read(path: &Path) -> Result<String, ProblemError> {
    fs::read_to_string(path).map_err(|e| ProblemError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Parses clausal problem text; includes resolve against the current directory.
pub fn parse_problem(text: &str) -> Result<Problem, ProblemError> {
    ProblemLoader::new().parse(text)
}

/// Reads and parses a problem file; includes resolve against its directory.
pub fn load_problem(path: &Path) -> Result<Problem, ProblemError> {
    ProblemLoader::new().load(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::test_problems::SIX_CLAUSES;

    #[test]
    fn smallest_input() {
        let p = parse_problem("cnf(a, axiom, (p(X))).").unwrap();
        assert_eq!(p.clauses.len(), 1);
        assert_eq!(p.clauses[0].literals.len(), 1);
        assert!(p.clauses[0].literals[0].positive);
        assert_eq!(p.clauses[0].var_count(), 1);
    }

    #[test]
    fn six_clause_set() {
        let p = parse_problem(SIX_CLAUSES).unwrap();
        assert_eq!(p.clauses.len(), 6);
        let mut preds: Vec<_> = p
            .symbols
            .iter()
            .filter(|s| s.kind == SymbolKind::Predicate)
            .map(|s| s.name.clone())
            .collect();
        preds.sort();
        assert_eq!(preds, ["p", "q", "r", "s"]);
        let mut consts: Vec<_> = p
            .symbols
            .iter()
            .filter(|s| s.kind == SymbolKind::Function && s.arity == 0)
            .map(|s| s.name.clone())
            .collect();
        consts.sort();
        assert_eq!(consts, ["a", "b"]);
        assert_eq!(p.start_clause_indices, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn arity_clash_error() {
        let e = parse_problem("cnf(a, axiom, (p(X,Y))). cnf(b, axiom, (~p(X))).").unwrap_err();
        assert!(matches!(e, ProblemError::ArityClash { ref name, .. } if name == "p"));
    }

    #[test]
    fn syntax_error_has_position() {
        let e = parse_problem("cnf(a, axiom, (p(X))).\ncnf(b, axiom, (p(X) |)).").unwrap_err();
        match e {
            ProblemError::Syntax { line, col, .. } => {
                assert_eq!(line, 2);
                assert_eq!(col, 22);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn conjecture_role_selects_start_clauses() {
        let p = parse_problem("cnf(a, axiom, p(a)). cnf(b, axiom, ~p(X) | q(X)). cnf(c, negated_conjecture, ~q(a)).")
            .unwrap();
        assert_eq!(p.start_clause_indices, vec![2]);
        assert!(p.clauses[2].from_conjecture);
    }

    #[test]
    fn equality_and_comments() {
        let p =
            parse_problem("% comment\n/* block\n comment */ cnf(e, axiom, (X = X)). cnf(f, axiom, a != b).").unwrap();
        assert_eq!(p.symbols.name(p.clauses[0].literals[0].predicate), "=");
        assert!(!p.clauses[1].literals[0].positive);
    }

    #[test]
    fn includes_resolve_against_base_dir() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("ax.p"), "cnf(x, axiom, p(a)). cnf(y, axiom, q(a)).").unwrap();
        let loader = ProblemLoader::with_include_dir(dir.path());
        let p = loader
            .parse("include('ax.p', [y]). cnf(g, negated_conjecture, ~q(a)).")
            .unwrap();
        assert_eq!(p.clauses.len(), 2);
        assert_eq!(p.clauses[0].name, "y");
    }

    #[test]
    fn pretty_print_round_trip() {
        let p = parse_problem(SIX_CLAUSES).unwrap();
        let q = parse_problem(&p.to_string()).unwrap();
        assert_eq!(p, q);
    }
}

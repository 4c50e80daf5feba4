//! Proof files: one action per line (`start c`, `ext c l`, `red p`), then
//! the final substitution as `subst X<i> = <term>` lines. Lines starting
//! with `%` are comments.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::check::check_proof_detailed;
use crate::error::RunError;
use crate::syntax::Problem;
use crate::tableau::{Action, ACTION_STRIDE, MAX_LITERALS};

pub fn format_proof(problem: &Problem, actions: &[Action]) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "% {} actions; stride {} max_literals {}",
        actions.len(),
        ACTION_STRIDE,
        MAX_LITERALS
    )
    .unwrap();
    for a in actions {
        writeln!(s, "{}", a).unwrap();
    }
    let check = check_proof_detailed(problem, actions);
    if !check.substitution.is_empty() {
        writeln!(s, "% substitution").unwrap();
    }
    for (v, t) in &check.substitution {
        writeln!(s, "subst X{} = {}", v, problem.term_display(t, None)).unwrap();
    }
    s
}

pub fn parse_proof(text: &str) -> Result<Vec<Action>, RunError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with("subst ") {
            continue;
        }
        let a = line
            .parse::<Action>()
            .map_err(|e| RunError::Invalid(format!("proof line {}: {}", n + 1, e)))?;
        out.push(a);
    }
    Ok(out)
}

pub fn read_proof(path: &Path) -> Result<Vec<Action>, RunError> {
    parse_proof(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::check_proof;
    use crate::parse::parse_problem;
    use crate::test_problems::SIX_CLAUSES;

    #[test]
    fn proof_file_round_trip() {
        let p = parse_problem(SIX_CLAUSES).unwrap();
        let proof = crate::tableau::tests::six_clause_proof();
        let text = format_proof(&p, &proof);
        assert!(text.contains("subst X0 = a"));
        let back = parse_proof(&text).unwrap();
        assert_eq!(back, proof);
        assert!(check_proof(&p, &back));
        assert!(parse_proof("start 0\nbogus 1\n").is_err());
    }
}

//! Sparse example files: one `target idx:value ...` line per example.
//!
//! Origins are kept out of the example file so it stays readable by any
//! LIBSVM-style learner; they go to a `<file>.origin` sidecar with one
//! tab-separated `problem iteration bigstep` line per example.

use std::fmt::Write as _;
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::LearnError;
use crate::features::FeatureVector;

use super::{ModelKind, Origin, TrainingExample};

pub fn origin_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".origin");
    PathBuf::from(s)
}

fn example_line(e: &TrainingExample) -> String {
    let mut s = format!("{}", e.target);
    for &(i, v) in e.features.entries() {
        write!(s, " {}:{}", i, v).unwrap();
    }
    s
}

fn origin_line(o: Option<&Origin>) -> String {
    match o {
        Some(o) => format!("{}\t{}\t{}", o.problem, o.iteration, o.bigstep),
        None => "-".to_string(),
    }
}

/// Writes the examples in the sparse text format to `out`.
pub fn write_examples<W: Write>(out: &mut W, examples: &[TrainingExample]) -> std::io::Result<()> {
    for e in examples {
        writeln!(out, "{}", example_line(e))?;
    }
    Ok(())
}

/// Parses sparse example lines; `source` names the input in diagnostics.
pub fn read_examples<R: BufRead>(input: R, kind: ModelKind, source: &str) -> Result<Vec<TrainingExample>, LearnError> {
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let malformed = |message: String| LearnError::Malformed {
            path: source.to_string(),
            line: n + 1,
            message,
        };
        let mut parts = line.split_whitespace();
        let Some(target) = parts.next() else {
            return Err(malformed("empty line".into()));
        };
        let target: f64 = target
            .parse()
            .map_err(|_| malformed(format!("bad target {:?}", target)))?;
        if !target.is_finite() {
            return Err(malformed("target is not finite".into()));
        }
        let mut pairs = Vec::new();
        let mut last: Option<u32> = None;
        for p in parts {
            let (i, v) = p
                .split_once(':')
                .ok_or_else(|| malformed(format!("expected idx:value, got {:?}", p)))?;
            let i: u32 = i.parse().map_err(|_| malformed(format!("bad index {:?}", i)))?;
            let v: f64 = v.parse().map_err(|_| malformed(format!("bad value {:?}", v)))?;
            if last.is_some_and(|l| l >= i) {
                return Err(malformed("indices must be strictly ascending".into()));
            }
            last = Some(i);
            pairs.push((i, v));
        }
        out.push(TrainingExample {
            kind,
            features: FeatureVector::from_pairs(pairs),
            target,
            origin: None,
        });
    }
    Ok(out)
}

fn write_to(path: &Path, examples: &[TrainingExample], append: bool) -> Result<(), LearnError> {
    let open = |p: &Path| {
        OpenOptions::new()
            .create(true)
            .write(true)
            .append(append)
            .truncate(!append)
            .open(p)
    };
    let mut body = String::new();
    let mut origins = String::new();
    for e in examples {
        body.push_str(&example_line(e));
        body.push('\n');
        origins.push_str(&origin_line(e.origin.as_ref()));
        origins.push('\n');
    }
    open(path)?.write_all(body.as_bytes())?;
    let side = origin_path(path);
    if examples.iter().any(|e| e.origin.is_some()) || (append && side.exists()) {
        open(&side)?.write_all(origins.as_bytes())?;
    } else if !append && side.exists() {
        fs::remove_file(side)?;
    }
    Ok(())
}

/// Writes an example file (and its origin sidecar when origins are known).
pub fn export_examples(examples: &[TrainingExample], path: &Path) -> Result<(), LearnError> {
    write_to(path, examples, false)
}

/// Appends to an example file; accumulation across iterations is plain concatenation.
pub fn append_examples(examples: &[TrainingExample], path: &Path) -> Result<(), LearnError> {
    write_to(path, examples, true)
}

/// Reads an example file, attaching origins from the sidecar if present.
pub fn import_examples(path: &Path, kind: ModelKind) -> Result<Vec<TrainingExample>, LearnError> {
    let source = path.display().to_string();
    let file = fs::File::open(path)?;
    let mut examples = read_examples(BufReader::new(file), kind, &source)?;
    let side = origin_path(path);
    if side.exists() {
        let text = fs::read_to_string(&side)?;
        let lines: Vec<&str> = text.lines().collect();
        let side_name = side.display().to_string();
        if lines.len() != examples.len() {
            return Err(LearnError::Malformed {
                path: side_name,
                line: lines.len(),
                message: format!("{} origins for {} examples", lines.len(), examples.len()),
            });
        }
        for (n, (e, l)) in examples.iter_mut().zip(lines).enumerate() {
            if l == "-" {
                continue;
            }
            let bad = || LearnError::Malformed {
                path: side_name.clone(),
                line: n + 1,
                message: format!("bad origin {:?}", l),
            };
            let f: Vec<&str> = l.split('\t').collect();
            if f.len() != 3 {
                return Err(bad());
            }
            e.origin = Some(Origin {
                problem: f[0].to_string(),
                iteration: f[1].parse().map_err(|_| bad())?,
                bigstep: f[2].parse().map_err(|_| bad())?,
            });
        }
    }
    Ok(examples)
}

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::problem_seed;
use crate::error::RunError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub id: String,
    pub path: PathBuf,
}

/// An ordered problem list with an optional train/test assignment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
    pub splits: Option<Vec<Split>>,
}

fn entry(path: PathBuf) -> CorpusEntry {
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    CorpusEntry { id, path }
}

impl Corpus {
    pub fn from_paths(paths: impl IntoIterator<Item = PathBuf>) -> Self {
        Corpus {
            entries: paths.into_iter().map(entry).collect(),
            splits: None,
        }
    }

    /// A directory of `*.p` files (sorted by name), a single `.p` file, or a
    /// list file naming one problem per line relative to the list's directory
    /// (`#` starts a comment).
    pub fn load(path: &Path) -> Result<Self, RunError> {
        if path.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(path)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "p"))
                .collect();
            files.sort();
            return Ok(Self::from_paths(files));
        }
        if path.extension().is_some_and(|x| x == "p") {
            return Ok(Self::from_paths([path.to_path_buf()]));
        }
        let base = path.parent().unwrap_or(Path::new("."));
        let text = fs::read_to_string(path)?;
        let files = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| base.join(l));
        Ok(Self::from_paths(files))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn split_of(&self, i: usize) -> Option<Split> {
        self.splits.as_ref().map(|s| s[i])
    }

    /// Entries used for learning: the train split, or everything when unsplit.
    pub fn is_training(&self, i: usize) -> bool {
        self.split_of(i) != Some(Split::Test)
    }
}

/// Assigns exactly `round(fraction * n)` problems to the test split: those
/// with the smallest seeded hash of their id.
pub fn split_corpus(corpus: &Corpus, test_fraction: f64, seed: u64) -> Result<Corpus, RunError> {
    let n = corpus.len();
    if n == 0 {
        return Err(RunError::Invalid("cannot split an empty corpus".into()));
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(RunError::Invalid(format!(
            "test fraction {} is not in (0, 1)",
            test_fraction
        )));
    }
    let n_test = (test_fraction * n as f64).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (problem_seed(seed, &corpus.entries[i].id), i));
    let mut splits = vec![Split::Train; n];
    for &i in order.iter().take(n_test) {
        splits[i] = Split::Test;
    }
    Ok(Corpus {
        entries: corpus.entries.clone(),
        splits: Some(splits),
    })
}

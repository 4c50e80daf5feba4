use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::check::check_proof;
use crate::config::{problem_seed, RunConfig};
use crate::learn::{Guidance, TrainingExample};
use crate::parse::load_problem;
use crate::search::{collect_examples, prove_recorded, Mode};

use super::corpus::{Corpus, Split};

/// One line of a results file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub problem: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub split: Option<Split>,
    pub iteration: u32,
    pub mode: Mode,
    pub seed: u64,
    /// `proved`, `budget_exhausted`, `dead_root` or `error`.
    pub status: String,
    pub inferences: u64,
    pub playouts: u64,
    pub bigsteps: u64,
    pub policy_examples: usize,
    pub value_examples: usize,
    /// Set when no clause was a conjecture clause and every clause served as a start.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub all_clauses_start: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub actions: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl ResultRecord {
    pub fn proved(&self) -> bool {
        self.status == "proved"
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorpusRun {
    pub records: Vec<ResultRecord>,
    pub policy: Vec<TrainingExample>,
    pub value: Vec<TrainingExample>,
}

impl CorpusRun {
    pub fn to_jsonl(&self) -> String {
        records_to_jsonl(&self.records)
    }
}

pub fn records_to_jsonl(records: &[ResultRecord]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("records serialise"));
        s.push('\n');
    }
    s
}

struct Outcome {
    record: ResultRecord,
    policy: Vec<TrainingExample>,
    value: Vec<TrainingExample>,
}

fn run_one(
    corpus: &Corpus,
    i: usize,
    guidance: &Guidance,
    config: &RunConfig,
    mode: Mode,
    iteration: u32,
    collect: bool,
) -> Outcome {
    let e = &corpus.entries[i];
    let seed = problem_seed(config.seed, &e.id);
    let mut record = ResultRecord {
        problem: e.id.clone(),
        split: corpus.split_of(i),
        iteration,
        mode,
        seed,
        status: "error".into(),
        inferences: 0,
        playouts: 0,
        bigsteps: 0,
        policy_examples: 0,
        value_examples: 0,
        all_clauses_start: false,
        wall_ms: None,
        actions: None,
        error: None,
    };
    let t0 = Instant::now();
    let problem = match load_problem(&e.path) {
        Ok(p) => p,
        Err(err) => {
            record.error = Some(err.to_string());
            return Outcome {
                record,
                policy: Vec::new(),
                value: Vec::new(),
            };
        }
    };
    let search = config.search(mode, seed);
    let (result, history) = prove_recorded(&problem, guidance, &search);
    if config.timing {
        record.wall_ms = Some((t0.elapsed().as_secs_f64() * 1e3 * 1000.0).round() / 1000.0);
    }
    record.all_clauses_start = problem.starts_from_all_clauses();
    record.inferences = result.inferences;
    record.playouts = result.playouts;
    record.bigsteps = result.bigsteps;
    record.status = result.status.name().to_string();
    if result.node_cap_hit {
        record.error = Some("node cap reached".into());
    }
    if result.proved() {
        if check_proof(&problem, &result.actions) {
            record.actions = Some(result.actions.iter().map(|a| a.to_string()).collect());
        } else {
            record.status = "error".into();
            record.error = Some("proof rejected by the independent checker".into());
        }
    }
    let (policy, value) = if collect && corpus.is_training(i) {
        collect_examples(&problem, &history, &result, config.discount, Some((&e.id, iteration)))
    } else {
        (Vec::new(), Vec::new())
    };
    record.policy_examples = policy.len();
    record.value_examples = value.len();
    Outcome { record, policy, value }
}

#[cfg(feature = "parallel")]
fn map_indices<T: Send>(n: usize, workers: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    if workers == 1 {
        return (0..n).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool starts");
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}

#[cfg(not(feature = "parallel"))]
fn map_indices<T>(n: usize, _workers: usize, f: impl Fn(usize) -> T) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Proves every problem of the corpus, in parallel across problems when the
/// `parallel` feature is on and `config.workers != 1`. Results and examples
/// come back in corpus order whatever the worker count. Examples are only
/// gathered from training problems, and only when `collect` is set.
pub fn run_corpus(
    corpus: &Corpus,
    guidance: &Guidance,
    config: &RunConfig,
    mode: Mode,
    iteration: u32,
    collect: bool,
) -> CorpusRun {
    let outcomes = map_indices(corpus.len(), config.workers, |i| {
        run_one(corpus, i, guidance, config, mode, iteration, collect)
    });
    let mut run = CorpusRun::default();
    for o in outcomes {
        run.records.push(o.record);
        run.policy.extend(o.policy);
        run.value.extend(o.value);
    }
    run
}

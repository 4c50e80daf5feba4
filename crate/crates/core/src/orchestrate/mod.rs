//! Corpus runs, the learning loop, baseline tables and experiment directories.

mod corpus;
mod run;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::RunError;
use crate::learn::{
    export_examples, train, BoostedSettings, ExternalLearner, Guidance, Model, ModelKind, TrainingExample,
};
use crate::search::Mode;
use crate::syntax::fnv1a64;

pub use corpus::{split_corpus, Corpus, CorpusEntry, Split};
pub use run::{records_to_jsonl, run_corpus, CorpusRun, ResultRecord};

/// Counts per split; for an unsplit corpus everything is `train`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub test: usize,
    pub total: usize,
}

impl SplitCounts {
    pub fn count(records: &[ResultRecord], pred: impl Fn(&ResultRecord) -> bool) -> Self {
        let mut c = SplitCounts::default();
        for r in records.iter().filter(|r| pred(r)) {
            match r.split {
                Some(Split::Test) => c.test += 1,
                _ => c.train += 1,
            }
        }
        c.total = c.train + c.test;
        c
    }

    pub fn solved(records: &[ResultRecord]) -> Self {
        Self::count(records, ResultRecord::proved)
    }

    pub fn get(&self, split: &str) -> usize {
        match split {
            "train" => self.train,
            "test" => self.test,
            _ => self.total,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub iteration: u32,
    pub mode: Mode,
    pub solved: SplitCounts,
    pub attempted: SplitCounts,
    pub errors: usize,
    pub inferences: u64,
    pub policy_examples: usize,
    pub value_examples: usize,
    /// File names relative to the experiment directory.
    pub results: String,
    pub policy_data: Option<String>,
    pub value_data: Option<String>,
    pub policy_model: Option<String>,
    pub value_model: Option<String>,
    pub config: RunConfig,
}

impl IterationReport {
    fn from_run(iteration: u32, mode: Mode, run: &CorpusRun, config: &RunConfig) -> Self {
        IterationReport {
            iteration,
            mode,
            solved: SplitCounts::solved(&run.records),
            attempted: SplitCounts::count(&run.records, |_| true),
            errors: run.records.iter().filter(|r| r.status == "error").count(),
            inferences: run.records.iter().map(|r| r.inferences).sum(),
            policy_examples: run.policy.len(),
            value_examples: run.value.len(),
            results: format!("results-{}.jsonl", iteration),
            policy_data: None,
            value_data: None,
            policy_model: None,
            value_model: None,
            config: config.clone(),
        }
    }
}

pub const LOOP_CSV_HEADER: &str =
    "iteration,mode,train_solved,test_solved,total_solved,train_attempted,test_attempted,total_attempted,errors,inferences,policy_examples,value_examples";

pub fn loop_csv(reports: &[IterationReport]) -> String {
    let mut s = format!("{}\n", LOOP_CSV_HEADER);
    for r in reports {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.iteration,
            r.mode,
            r.solved.train,
            r.solved.test,
            r.solved.total,
            r.attempted.train,
            r.attempted.test,
            r.attempted.total,
            r.errors,
            r.inferences,
            r.policy_examples,
            r.value_examples
        )
        .unwrap();
    }
    s
}

pub fn reports_to_jsonl(reports: &[IterationReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s.push_str(&serde_json::to_string(r).expect("reports serialise"));
        s.push('\n');
    }
    s
}

/// Per-experiment directory, keyed by the config digest and the problem ids
/// and splits of the corpus.
pub fn experiment_dir(root: &Path, config: &RunConfig, corpus: &Corpus) -> PathBuf {
    let mut key = config.digest();
    for (i, e) in corpus.entries.iter().enumerate() {
        write!(key, "\n{} {}", e.id, corpus.split_of(i).map_or("-", |s| s.name())).unwrap();
    }
    root.join(format!("exp-{:016x}", fnv1a64(key.as_bytes())))
}

/// A loop that stopped early; the reports of finished iterations are kept
/// (and already written to the experiment directory).
#[derive(Debug, thiserror::Error)]
#[error("iteration {iteration}: {error}")]
pub struct LoopFailure {
    pub iteration: u32,
    pub reports: Vec<IterationReport>,
    #[source]
    pub error: RunError,
}

fn write_reports(dir: &Path, reports: &[IterationReport]) -> Result<(), RunError> {
    fs::write(dir.join("reports.jsonl"), reports_to_jsonl(reports))?;
    fs::write(dir.join("loop.csv"), loop_csv(reports))?;
    Ok(())
}

fn fit(
    kind: ModelKind,
    data: &Path,
    examples: &[TrainingExample],
    model: &Path,
    config: &RunConfig,
) -> Result<Model, RunError> {
    let m = match &config.external_learner {
        Some(cmd) => ExternalLearner::new(cmd.clone()).train(data, kind, model)?,
        None => {
            let m = train(examples, &config.train())?;
            m.save(model)?;
            m
        }
    };
    Ok(m)
}

/// Trains a model of `kind` on the concatenated history and records the
/// files in `report`. No examples means no model: the search then runs
/// without that kind of guidance.
fn train_on_history(
    kind: ModelKind,
    history: &[Vec<TrainingExample>],
    iteration: u32,
    dir: &Path,
    config: &RunConfig,
    report: &mut IterationReport,
) -> Result<Option<Arc<Model>>, RunError> {
    let from = config.window.map_or(0, |w| history.len().saturating_sub(w));
    let data: Vec<TrainingExample> = history[from..].iter().flatten().cloned().collect();
    let data_name = format!("{}-train-{}.examples", kind.name(), iteration);
    export_examples(&data, &dir.join(&data_name))?;
    let (data_slot, model_slot) = match kind {
        ModelKind::Policy => (&mut report.policy_data, &mut report.policy_model),
        ModelKind::Value => (&mut report.value_data, &mut report.value_model),
    };
    *data_slot = Some(data_name.clone());
    if data.is_empty() {
        return Ok(None);
    }
    let model_name = format!("{}-{}.model", kind.name(), iteration);
    let m = fit(kind, &dir.join(&data_name), &data, &dir.join(&model_name), config)?;
    *model_slot = Some(model_name);
    Ok(Some(Arc::new(m)))
}

/// Runs `iterations` rounds of prove, collect, train. Iteration 0 is plain
/// uct; later iterations run `config.mode` with models trained on the
/// examples of all earlier iterations (or the last `config.window`).
pub fn rl_loop(
    corpus: &Corpus,
    config: &RunConfig,
    iterations: usize,
    dir: &Path,
) -> Result<Vec<IterationReport>, LoopFailure> {
    let mut reports = Vec::new();
    let fail = |iteration: u32, reports: &Vec<IterationReport>, error: RunError| {
        let _ = write_reports(dir, reports);
        LoopFailure {
            iteration,
            reports: reports.clone(),
            error,
        }
    };
    if iterations == 0 {
        return Err(fail(
            0,
            &reports,
            RunError::Invalid("the loop needs at least one iteration".into()),
        ));
    }
    let setup = || -> Result<(), RunError> {
        config.validate()?;
        fs::create_dir_all(dir)?;
        fs::write(dir.join("config.toml"), config.to_toml())?;
        fs::write(dir.join("boosted.conf"), BoostedSettings::default().to_template())?;
        Ok(())
    };
    setup().map_err(|e| fail(0, &reports, e))?;

    let mut policy_history: Vec<Vec<TrainingExample>> = Vec::new();
    let mut value_history: Vec<Vec<TrainingExample>> = Vec::new();
    for it in 0..iterations as u32 {
        let mode = if it == 0 { Mode::Uct } else { config.mode };
        let step = |report_slot: &mut Option<IterationReport>| -> Result<CorpusRun, RunError> {
            let mut scratch = IterationReport::from_run(it, mode, &CorpusRun::default(), config);
            let mut guidance = Guidance::none();
            if it > 0 && mode.uses_policy() {
                guidance.policy = train_on_history(ModelKind::Policy, &policy_history, it, dir, config, &mut scratch)?;
            }
            if it > 0 && mode.uses_value() {
                guidance.value = train_on_history(ModelKind::Value, &value_history, it, dir, config, &mut scratch)?;
            }
            let run = run_corpus(corpus, &guidance, config, mode, it, true);
            fs::write(dir.join(&scratch.results), run.to_jsonl())?;
            export_examples(&run.policy, &dir.join(format!("policy-{}.examples", it)))?;
            export_examples(&run.value, &dir.join(format!("value-{}.examples", it)))?;
            let mut report = IterationReport::from_run(it, mode, &run, config);
            report.policy_data = scratch.policy_data;
            report.value_data = scratch.value_data;
            report.policy_model = scratch.policy_model;
            report.value_model = scratch.value_model;
            *report_slot = Some(report);
            Ok(run)
        };
        let mut slot = None;
        let run = step(&mut slot).map_err(|e| fail(it, &reports, e))?;
        reports.push(slot.expect("report set on success"));
        policy_history.push(run.policy);
        value_history.push(run.value);
        write_reports(dir, &reports).map_err(|e| fail(it, &reports, e))?;
    }
    Ok(reports)
}

pub const BASELINE_MODES: [Mode; 3] = [Mode::Deepening, Mode::Bare, Mode::Uct];

/// Solved counts of iterative deepening, bare and uct at equal budgets.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineTable {
    pub counts: Vec<(Mode, SplitCounts)>,
    pub records: Vec<ResultRecord>,
}

impl BaselineTable {
    pub fn solved(&self, mode: Mode) -> Option<SplitCounts> {
        self.counts.iter().find(|(m, _)| *m == mode).map(|(_, c)| *c)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("split");
        for (m, _) in &self.counts {
            write!(s, ",{}", m).unwrap();
        }
        s.push('\n');
        for split in ["train", "test", "total"] {
            s.push_str(split);
            for (_, c) in &self.counts {
                write!(s, ",{}", c.get(split)).unwrap();
            }
            s.push('\n');
        }
        s
    }
}

pub fn evaluate_baselines(corpus: &Corpus, config: &RunConfig) -> BaselineTable {
    let mut counts = Vec::new();
    let mut records = Vec::new();
    for mode in BASELINE_MODES {
        let run = run_corpus(corpus, &Guidance::none(), config, mode, 0, false);
        counts.push((mode, SplitCounts::solved(&run.records)));
        records.extend(run.records);
    }
    BaselineTable { counts, records }
}

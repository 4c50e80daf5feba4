use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use conmcts::config::{problem_seed, RunConfig};
use conmcts::learn::{
    export_examples, import_examples, rmse, train, BoostedSettings, ExternalLearner, Guidance, Model, ModelKind,
};
use conmcts::orchestrate::{
    evaluate_baselines, experiment_dir, loop_csv, records_to_jsonl, rl_loop, run_corpus, split_corpus, Corpus,
};
use conmcts::proof::{format_proof, read_proof};
use conmcts::search::{prove, Mode};
use conmcts::{check_proof_detailed, load_problem};

#[derive(Parser)]
#[command(
    name = "conmcts",
    version,
    about = "Connection-tableau prover guided by Monte-Carlo tree search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand. The config file is read first, then
/// `--set` assignments, then the dedicated flags.
#[derive(Args, Clone)]
struct Common {
    /// TOML file of `key = value` settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` override (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Playouts per bigstep.
    #[arg(long)]
    playouts: Option<u64>,
    /// Worker threads for corpus runs (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Leave wall-clock times out of result records.
    #[arg(long)]
    no_timing: bool,
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
            None => RunConfig::default(),
        };
        for s in &self.sets {
            c.set(s)?;
        }
        if let Some(m) = self.mode {
            c.mode = m;
        }
        if let Some(b) = self.budget {
            c.budget = b;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(p) = self.playouts {
            c.playouts = p;
        }
        if let Some(w) = self.workers {
            c.workers = w;
        }
        if self.no_timing {
            c.timing = false;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Prove one problem; prints a JSON result line.
    Prove {
        file: PathBuf,
        #[arg(long, value_name = "MODEL")]
        policy: Option<PathBuf>,
        #[arg(long, value_name = "MODEL")]
        value: Option<PathBuf>,
        /// Write the proof (actions and substitution) here.
        #[arg(long)]
        proof_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Solved counts of id, bare and uct at equal budgets as CSV.
    Baseline {
        corpus: PathBuf,
        #[arg(long)]
        test_frac: Option<f64>,
        /// Also write every result record here as JSON lines.
        #[arg(long)]
        results: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Prove, collect examples, train, repeat.
    Loop {
        corpus: PathBuf,
        #[arg(long, default_value_t = 3)]
        iters: usize,
        #[arg(long)]
        test_frac: Option<f64>,
        /// Root under which the experiment directory is created.
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Assign problems to train and test splits; prints `id,split` CSV.
    Split {
        corpus: PathBuf,
        #[arg(long)]
        test_frac: f64,
        /// Directory for `train.list` and `test.list`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Replay a proof file against a problem.
    Check { file: PathBuf, proof: PathBuf },
    /// Run a corpus once and write policy and value example files.
    ExportData {
        corpus: PathBuf,
        #[arg(long, default_value = "data")]
        out: PathBuf,
        #[arg(long, value_name = "MODEL")]
        policy: Option<PathBuf>,
        #[arg(long, value_name = "MODEL")]
        value: Option<PathBuf>,
        #[arg(long)]
        test_frac: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Fit a policy or value model to an example file.
    Train {
        examples: PathBuf,
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        lambda: Option<f64>,
        /// External learner command (`{examples}`, `{kind}`, `{model}`).
        #[arg(long)]
        external: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

fn guidance(policy: Option<&Path>, value: Option<&Path>) -> Result<Guidance> {
    let load = |p: Option<&Path>, kind: ModelKind| -> Result<Option<Arc<Model>>> {
        let Some(p) = p else { return Ok(None) };
        let m = Model::load(p).with_context(|| format!("loading {}", p.display()))?;
        if m.kind != kind {
            bail!(
                "{} holds a {} model, expected {}",
                p.display(),
                m.kind.name(),
                kind.name()
            );
        }
        Ok(Some(Arc::new(m)))
    };
    Ok(Guidance {
        policy: load(policy, ModelKind::Policy)?,
        value: load(value, ModelKind::Value)?,
    })
}

fn load_corpus(path: &Path, test_frac: Option<f64>, config: &RunConfig) -> Result<Corpus> {
    let corpus = Corpus::load(path).with_context(|| format!("reading corpus {}", path.display()))?;
    Ok(match test_frac.or(config.test_fraction) {
        Some(f) => split_corpus(&corpus, f, config.seed)?,
        None => corpus,
    })
}

fn problem_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// `Ok(true)` maps to exit code 0, `Ok(false)` to 1.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Prove {
            file,
            policy,
            value,
            proof_out,
            common,
        } => {
            let config = common.config()?;
            let problem = load_problem(&file)?;
            let g = guidance(policy.as_deref(), value.as_deref())?;
            let seed = problem_seed(config.seed, &problem_id(&file));
            let result = prove(&problem, &g, &config.search(config.mode, seed));
            let proved = result.proved() && check_proof_detailed(&problem, &result.actions).closed;
            let mut line = json!({
                "problem": problem_id(&file),
                "mode": config.mode,
                "seed": seed,
                "status": if result.proved() && !proved { "error" } else { result.status.name() },
                "inferences": result.inferences,
                "playouts": result.playouts,
                "bigsteps": result.bigsteps,
            });
            if let Some(d) = result.depth_limit {
                line["depth_limit"] = json!(d);
            }
            if proved {
                line["actions"] = json!(result.actions.iter().map(|a| a.to_string()).collect::<Vec<_>>());
                if let Some(p) = &proof_out {
                    fs::write(p, format_proof(&problem, &result.actions))?;
                }
            } else if result.proved() {
                bail!("search returned a proof the checker rejects");
            }
            println!("{}", line);
            Ok(proved)
        }
        Command::Baseline {
            corpus,
            test_frac,
            results,
            common,
        } => {
            let config = common.config()?;
            let corpus = load_corpus(&corpus, test_frac, &config)?;
            let table = evaluate_baselines(&corpus, &config);
            if let Some(p) = results {
                fs::write(p, records_to_jsonl(&table.records))?;
            }
            print!("{}", table.to_csv());
            Ok(true)
        }
        Command::Loop {
            corpus,
            iters,
            test_frac,
            out,
            common,
        } => {
            let config = common.config()?;
            let corpus = load_corpus(&corpus, test_frac, &config)?;
            let dir = experiment_dir(&out, &config, &corpus);
            eprintln!("experiment directory {}", dir.display());
            let reports = rl_loop(&corpus, &config, iters, &dir).map_err(|f| {
                eprint!("{}", loop_csv(&f.reports));
                anyhow::Error::new(f)
            })?;
            print!("{}", loop_csv(&reports));
            Ok(true)
        }
        Command::Split {
            corpus,
            test_frac,
            out,
            common,
        } => {
            let config = common.config()?;
            let c = split_corpus(&Corpus::load(&corpus)?, test_frac, config.seed)?;
            let (mut train_list, mut test_list) = (String::new(), String::new());
            println!("id,split");
            for (i, e) in c.entries.iter().enumerate() {
                let split = c.split_of(i).expect("split assigned");
                println!("{},{}", e.id, split.name());
                let line = format!("{}\n", fs::canonicalize(&e.path).unwrap_or(e.path.clone()).display());
                if c.is_training(i) {
                    train_list.push_str(&line);
                } else {
                    test_list.push_str(&line);
                }
            }
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                fs::write(dir.join("train.list"), train_list)?;
                fs::write(dir.join("test.list"), test_list)?;
            }
            Ok(true)
        }
        Command::Check { file, proof } => {
            let problem = load_problem(&file)?;
            let actions = read_proof(&proof).with_context(|| format!("reading {}", proof.display()))?;
            let check = check_proof_detailed(&problem, &actions);
            println!(
                "{}",
                json!({
                    "closed": check.closed,
                    "actions": actions.len(),
                    "depth": check.depth,
                    "diagnostic": check.diagnostic,
                })
            );
            Ok(check.closed)
        }
        Command::ExportData {
            corpus,
            out,
            policy,
            value,
            test_frac,
            common,
        } => {
            let config = common.config()?;
            let corpus = load_corpus(&corpus, test_frac, &config)?;
            let g = guidance(policy.as_deref(), value.as_deref())?;
            let run = run_corpus(&corpus, &g, &config, config.mode, 0, true);
            fs::create_dir_all(&out)?;
            fs::write(out.join("results.jsonl"), run.to_jsonl())?;
            export_examples(&run.policy, &out.join("policy.examples"))?;
            export_examples(&run.value, &out.join("value.examples"))?;
            fs::write(out.join("boosted.conf"), BoostedSettings::default().to_template())?;
            println!(
                "{}",
                json!({
                    "problems": run.records.len(),
                    "proved": run.records.iter().filter(|r| r.proved()).count(),
                    "policy_examples": run.policy.len(),
                    "value_examples": run.value.len(),
                    "out": out.display().to_string(),
                })
            );
            Ok(true)
        }
        Command::Train {
            examples,
            kind,
            out,
            lambda,
            external,
            common,
        } => {
            let mut config = common.config()?;
            if let Some(l) = lambda {
                config.lambda = l;
            }
            let kind = ModelKind::parse(&kind).with_context(|| format!("unknown model kind {:?}", kind))?;
            let out = out.unwrap_or_else(|| examples.with_extension("model"));
            let data = import_examples(&examples, kind)?;
            let model = match external.or(config.external_learner.clone()) {
                Some(cmd) => ExternalLearner::new(cmd).train(&examples, kind, &out)?,
                None => {
                    let m = train(&data, &config.train())?;
                    m.save(&out)?;
                    m
                }
            };
            println!(
                "{}",
                json!({
                    "kind": kind.name(),
                    "examples": data.len(),
                    "rmse": rmse(&model, &data),
                    "nonzero_weights": model.nonzero_weights(),
                    "model": out.display().to_string(),
                })
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}

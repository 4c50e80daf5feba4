//! Acceptance suite: one pass/fail line per criterion.
//!
//!     cargo test -p conmcts --release --test acceptance

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use conmcts::config::RunConfig;
use conmcts::features::FeatureVector;
use conmcts::learn::{
    export_examples, import_examples, rmse, softmax, train, Guidance, Model, ModelKind, TrainConfig, TrainingExample,
};
use conmcts::orchestrate::{evaluate_baselines, rl_loop, run_corpus, Corpus, ResultRecord};
use conmcts::search::{
    heuristic_value, prove, uct_score, ChaCha8Rng, ChildSelector, Mode, NodeId, PlayoutLength, Search, SearchConfig,
    SearchTree,
};
use conmcts::{check_proof, check_proof_detailed, load_problem, parse_problem, Action, Problem, TableauState};
use rand::{Rng, SeedableRng};

const C1_C6: &str = "
    cnf(c1, axiom, (p(X))).
    cnf(c2, axiom, (r(X,Y) | ~p(X) | q(Y))).
    cnf(c3, axiom, (s(X) | ~q(b))).
    cnf(c4, axiom, (~s(X) | ~q(X))).
    cnf(c5, axiom, (~q(X) | ~r(a,X))).
    cnf(c6, axiom, (~r(a,X) | q(X))).
";
const NAT: &str = "cnf(c1, axiom, p(0)). cnf(c2, axiom, ~p(X) | p(s(X))). cnf(c3, axiom, ~p(0)).";
const SEEDS: [u64; 3] = [1, 2, 3];

type Outcome = Result<String, String>;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn bundled() -> Corpus {
    Corpus::load(&root().join("corpus/bundled")).expect("bundled corpus")
}

fn bundled_config(seed: u64) -> RunConfig {
    let mut c = RunConfig::load(&root().join("corpus/bundled.toml")).expect("bundled.toml");
    c.seed = seed;
    c
}

/// Every proof produced anywhere in the suite, for the soundness gate.
#[derive(Default)]
struct Proofs {
    inline: Vec<(Problem, Vec<Action>)>,
    records: Vec<ResultRecord>,
}

impl Proofs {
    fn add_records(&mut self, records: &[ResultRecord]) {
        self.records.extend(records.iter().filter(|r| r.proved()).cloned());
    }

    fn check(&self, corpus: &Corpus) -> Outcome {
        let paths: HashMap<_, _> = corpus.entries.iter().map(|e| (e.id.clone(), e.path.clone())).collect();
        let mut problems: HashMap<String, Problem> = HashMap::new();
        let mut bad = Vec::new();
        for r in &self.records {
            let problem = problems
                .entry(r.problem.clone())
                .or_insert_with(|| load_problem(&paths[&r.problem]).expect("corpus problem loads"));
            let actions: Result<Vec<Action>, _> = r.actions.iter().flatten().map(|a| a.parse::<Action>()).collect();
            match actions {
                Ok(a) if !a.is_empty() && check_proof(problem, &a) => {}
                _ => bad.push(format!("{} ({}, iteration {})", r.problem, r.mode, r.iteration)),
            }
        }
        for (p, a) in &self.inline {
            if !check_proof(p, a) {
                bad.push("inline proof".into());
            }
        }
        let total = self.records.len() + self.inline.len();
        if bad.is_empty() {
            Ok(format!("{} of {} proofs check", total, total))
        } else {
            Err(format!(
                "{} of {} proofs rejected: {}",
                bad.len(),
                total,
                bad.join(", ")
            ))
        }
    }
}

fn six_clauses(proofs: &mut Proofs) -> Outcome {
    let p = parse_problem(C1_C6).unwrap();
    let mut parts = Vec::new();
    for mode in [Mode::Deepening, Mode::Uct] {
        let cfg = SearchConfig {
            mode,
            budget: 10_000,
            seed: 1,
            ..SearchConfig::default()
        };
        let r = prove(&p, &Guidance::none(), &cfg);
        if !r.proved() {
            return Err(format!("{} did not prove it ({})", mode, r.status.name()));
        }
        let check = check_proof_detailed(&p, &r.actions);
        if !check.closed || r.inferences > 10_000 {
            return Err(format!(
                "{}: closed {}, {} inferences",
                mode, check.closed, r.inferences
            ));
        }
        parts.push(format!("{} in {} inferences", mode, r.inferences));
        proofs.inline.push((p.clone(), r.actions));
    }
    Ok(parts.join(", "))
}

/// Always extends with clause 1 (the P(s(x)) extension) when it can.
struct AlwaysSuccessor;

impl ChildSelector for AlwaysSuccessor {
    fn select(&mut self, tree: &SearchTree, node: NodeId, _rng: &mut ChaCha8Rng) -> Option<NodeId> {
        let kids = tree.children(node);
        kids.clone()
            .find(|&c| matches!(tree.node(c).action, Some(Action::Extension { clause: 1, .. })))
            .or((!kids.is_empty()).then_some(kids.start))
    }
}

fn path_actions(tree: &SearchTree, mut id: NodeId) -> Vec<Action> {
    let mut actions = Vec::new();
    while let Some(parent) = tree.parent(id) {
        actions.push(tree.node(id).action.unwrap());
        id = parent;
    }
    actions.reverse();
    actions
}

fn incompleteness(proofs: &mut Proofs) -> Outcome {
    let p = parse_problem(NAT).unwrap();
    let g = Guidance::none();
    let cfg = SearchConfig {
        mode: Mode::Bare,
        budget: 1500,
        playout_length: PlayoutLength::Unbounded,
        ..SearchConfig::default()
    };
    let mut s = Search::new(&p, &g, &cfg).with_selector(AlwaysSuccessor);
    s.playout();
    if s.proof().is_some() {
        return Err("the stubbed playout closed the tableau".into());
    }
    let t = s.tree();
    let deepest = (0..t.len() as NodeId)
        .max_by_key(|&id| path_actions(t, id).len())
        .unwrap();
    let mut state = TableauState::new();
    for a in path_actions(t, deepest) {
        state.apply_action(&p, a).unwrap();
    }
    let depth = state.current_goal().map_or(0, |g| g.depth());
    if depth < 1000 || state.is_closed() {
        return Err(format!("stubbed playout reached depth {}", depth));
    }
    let uct = SearchConfig {
        mode: Mode::Uct,
        playouts_per_bigstep: 2000,
        ..SearchConfig::default()
    };
    let r = prove(&p, &g, &uct);
    if !r.proved() || r.playouts > 2000 || r.actions.len() != 2 {
        return Err(format!(
            "uct: {}, {} playouts, {} actions",
            r.status.name(),
            r.playouts,
            r.actions.len()
        ));
    }
    proofs.inline.push((p.clone(), r.actions.clone()));
    Ok(format!(
        "stubbed depth {} open; uct proof of {} steps after {} playouts",
        depth,
        r.actions.len(),
        r.playouts
    ))
}

fn ordering(proofs: &mut Proofs) -> Outcome {
    let corpus = bundled();
    let mut lines = Vec::new();
    let mut bare_below = true;
    let mut heuristic_wins = 0;
    for seed in SEEDS {
        let config = bundled_config(seed);
        let table = evaluate_baselines(&corpus, &config);
        proofs.add_records(&table.records);
        let constant = RunConfig {
            constant_leaf: Some(0.5),
            ..config.clone()
        };
        let c = run_corpus(&corpus, &Guidance::none(), &constant, Mode::Uct, 0, false);
        proofs.add_records(&c.records);
        let bare = table.solved(Mode::Bare).unwrap().total;
        let uct = table.solved(Mode::Uct).unwrap().total;
        let constant = c.records.iter().filter(|r| r.proved()).count();
        bare_below &= bare < uct;
        heuristic_wins += usize::from(uct > constant);
        lines.push(format!(
            "seed {}: bare {} uct {} constant {}",
            seed, bare, uct, constant
        ));
    }
    let detail = format!("{} problems; {}", corpus.len(), lines.join("; "));
    if corpus.len() >= 50 && bare_below && heuristic_wins >= 1 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn learning(proofs: &mut Proofs, work: &Path) -> (Outcome, Option<PathBuf>) {
    let corpus = bundled();
    let mut lines = Vec::new();
    let (mut never_worse, mut better) = (true, 0);
    let mut first_dir = None;
    for seed in SEEDS {
        let config = RunConfig {
            mode: Mode::UctPolicyValue,
            ..bundled_config(seed)
        };
        let dir = work.join(format!("loop-{}", seed));
        let reports = match rl_loop(&corpus, &config, 3, &dir) {
            Ok(r) => r,
            Err(e) => return (Err(format!("seed {}: {}", seed, e)), None),
        };
        for r in &reports {
            let text = fs::read_to_string(dir.join(&r.results)).unwrap();
            let records: Vec<ResultRecord> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
            proofs.add_records(&records);
        }
        let counts: Vec<usize> = reports.iter().map(|r| r.solved.total).collect();
        never_worse &= counts[2] >= counts[0];
        better += usize::from(counts[2] > counts[0]);
        lines.push(format!("seed {}: {:?}", seed, counts));
        first_dir.get_or_insert(dir);
    }
    let detail = lines.join("; ");
    (
        if never_worse && better >= 2 {
            Ok(detail)
        } else {
            Err(detail)
        },
        first_dir,
    )
}

fn formulas() -> Outcome {
    let h = heuristic_value(3, 0.95);
    let u = uct_score(0.5, 2, 0.5, 8, 2.0);
    let d = 0.99f64.powi(10);
    // Independently evaluated: 0.25 + sqrt(ln 8 / 2) and 0.99^10.
    let ok = (h - 0.857375).abs() < 1e-12
        && (u - 1.269_666_990_168_809).abs() < 1e-4
        && (d - 0.904_382_075_008_804_5).abs() < 1e-9;
    let detail = format!("heuristic {} uct {} discount {}", h, u, d);
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn learner() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let truth: Vec<f64> = (0..50).map(|_| rng.random_range(-2.0..2.0)).collect();
    let data: Vec<TrainingExample> = (0..200)
        .map(|_| {
            let pairs: Vec<(u32, f64)> = (0..50u32).map(|j| (j * 5 + 1, rng.random_range(-1.0..1.0))).collect();
            let target = pairs.iter().zip(&truth).map(|((_, x), w)| x * w).sum::<f64>() - 0.7;
            TrainingExample {
                kind: ModelKind::Value,
                features: FeatureVector::from_pairs(pairs),
                target,
                origin: None,
            }
        })
        .collect();
    let m = train(
        &data,
        &TrainConfig {
            lambda: 0.0,
            ..TrainConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let err = rmse(&m, &data);
    let mut bad = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..40);
        let preds: Vec<f64> = (0..n).map(|_| rng.random_range(-20.0..20.0)).collect();
        let p = softmax(&preds, 2.5);
        let argmax = |v: &[f64]| (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b });
        if (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 || argmax(&p) != argmax(&preds) {
            bad += 1;
        }
    }
    let detail = format!("train rmse {:e}; {} of 1000 prior vectors off", err, bad);
    if err < 1e-6 && bad == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn determinism(proofs: &mut Proofs, work: &Path) -> Outcome {
    let corpus = bundled();
    for mode in [Mode::Uct, Mode::Bare] {
        let run = |workers| {
            let c = RunConfig {
                workers,
                ..bundled_config(5)
            };
            run_corpus(&corpus, &Guidance::none(), &c, mode, 0, true)
        };
        let (a, b, c) = (run(1), run(1), run(4));
        proofs.add_records(&a.records);
        if a.to_jsonl() != b.to_jsonl() || a.to_jsonl() != c.to_jsonl() {
            return Err(format!("{} results differ between runs or worker counts", mode));
        }
        for (kind, examples) in [(ModelKind::Policy, &a.policy), (ModelKind::Value, &a.value)] {
            let first = work.join(format!("{}-{}.examples", mode, kind.name()));
            let second = work.join(format!("{}-{}-again.examples", mode, kind.name()));
            export_examples(examples, &first).map_err(|e| e.to_string())?;
            let back = import_examples(&first, kind).map_err(|e| e.to_string())?;
            export_examples(&back, &second).map_err(|e| e.to_string())?;
            if fs::read(&first).unwrap() != fs::read(&second).unwrap() {
                return Err(format!("{} example file changes on re-export", kind.name()));
            }
            if examples.is_empty() {
                continue;
            }
            let m = train(examples, &TrainConfig::default()).map_err(|e| e.to_string())?;
            let (mf, ms) = (first.with_extension("model"), second.with_extension("model"));
            m.save(&mf).map_err(|e| e.to_string())?;
            Model::load(&mf)
                .map_err(|e| e.to_string())?
                .save(&ms)
                .map_err(|e| e.to_string())?;
            if fs::read(&mf).unwrap() != fs::read(&ms).unwrap() {
                return Err(format!("{} model file changes on reload", kind.name()));
            }
        }
    }
    Ok(format!(
        "uct and bare identical over workers 1 and 4 on {} problems; files byte-stable",
        corpus.len()
    ))
}

fn ips(corpus: &Corpus, guidance: &Guidance, mode: Mode, proofs: &mut Proofs) -> f64 {
    let config = RunConfig {
        workers: 1,
        ..bundled_config(1)
    };
    let start = Instant::now();
    let run = run_corpus(corpus, guidance, &config, mode, 0, false);
    let secs = start.elapsed().as_secs_f64();
    proofs.add_records(&run.records);
    run.records.iter().map(|r| r.inferences).sum::<u64>() as f64 / secs
}

fn throughput(proofs: &mut Proofs, loop_dir: Option<&Path>) -> Outcome {
    let corpus = bundled();
    let unguided = ips(&corpus, &Guidance::none(), Mode::Uct, proofs);
    let mut detail = format!("unguided {:.0} inferences/s", unguided);
    let mut ok = unguided >= 1e4;
    let models = loop_dir.and_then(|d| {
        Some(Guidance {
            policy: Some(Model::load(&d.join("policy-2.model")).ok()?.into()),
            value: Some(Model::load(&d.join("value-2.model")).ok()?.into()),
        })
    });
    match models {
        Some(g) => {
            let guided = ips(&corpus, &g, Mode::UctPolicyValue, proofs);
            detail.push_str(&format!(", guided {:.0} inferences/s", guided));
            ok &= guided >= 1e3;
        }
        None => {
            detail.push_str(", guided not measured (no trained models)");
            ok = false;
        }
    }
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let work = tempfile::tempdir().expect("temporary directory");
    let mut proofs = Proofs::default();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((2, "closed tableau for clauses c1..c6", six_clauses(&mut proofs)));
    results.push((3, "incompleteness of a stubbed playout", incompleteness(&mut proofs)));
    results.push((4, "strategy ordering on the bundled corpus", ordering(&mut proofs)));
    let (outcome, loop_dir) = learning(&mut proofs, work.path());
    results.push((5, "learning improves search", outcome));
    results.push((6, "formula spot checks", formulas()));
    results.push((7, "learner sanity", learner()));
    results.push((8, "determinism and round trips", determinism(&mut proofs, work.path())));
    results.push((
        9,
        "throughput (warning only)",
        throughput(&mut proofs, loop_dir.as_deref()),
    ));
    results.insert(0, (1, "soundness of every proof", proofs.check(&bundled())));

    let mut failed = 0;
    for (n, name, outcome) in &results {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) if *n == 9 => ("WARN", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{} criterion {}: {}: {}", tag, n, name, detail);
    }
    if failed == 0 {
        println!("acceptance: all gating criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} gating criteria fail", failed);
        ExitCode::FAILURE
    }
}

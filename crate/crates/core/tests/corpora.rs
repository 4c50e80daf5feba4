use std::path::{Path, PathBuf};

use conmcts::config::RunConfig;
use conmcts::learn::Guidance;
use conmcts::orchestrate::{rl_loop, run_corpus, split_corpus, Corpus};
use conmcts::search::Mode;
use conmcts::{check_proof, load_problem, Action};

fn corpus_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn quick() -> RunConfig {
    RunConfig {
        budget: 5000,
        playouts: 100,
        timing: false,
        seed: 4,
        ..RunConfig::default()
    }
}

#[test]
fn every_bundled_problem_parses() {
    for name in ["bundled", "extra", "smoke"] {
        let corpus = Corpus::load(&corpus_dir(name)).unwrap();
        assert!(!corpus.is_empty(), "{}", name);
        for e in &corpus.entries {
            let p = load_problem(&e.path).unwrap_or_else(|err| panic!("{}: {}", e.id, err));
            assert!(
                p.clauses.iter().any(|c| c.from_conjecture),
                "{} has no conjecture clause",
                e.id
            );
        }
    }
    assert!(Corpus::load(&corpus_dir("bundled")).unwrap().len() >= 50);
}

#[test]
fn smoke_corpus_runs_in_every_mode() {
    let corpus = Corpus::load(&corpus_dir("smoke")).unwrap();
    for mode in [Mode::Deepening, Mode::Bare, Mode::Uct] {
        let run = run_corpus(&corpus, &Guidance::none(), &quick(), mode, 0, true);
        assert_eq!(run.records.len(), 6);
        assert!(run.records.iter().any(|r| r.proved()), "{}", mode);
        assert!(run.records.iter().all(|r| r.status != "error"));
        for r in run.records.iter().filter(|r| r.proved()) {
            let p = load_problem(&corpus_dir("smoke").join(format!("{}.p", r.problem))).unwrap();
            let actions: Vec<Action> = r.actions.iter().flatten().map(|a| a.parse().unwrap()).collect();
            assert!(check_proof(&p, &actions), "{}", r.problem);
        }
    }
}

#[test]
fn guided_smoke_loop_does_not_collapse() {
    let corpus = Corpus::load(&corpus_dir("smoke")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        mode: Mode::UctPolicyValue,
        ..quick()
    };
    let reports = rl_loop(&corpus, &config, 2, dir.path()).unwrap();
    assert_eq!(reports.len(), 2);
    assert!(reports[1].solved.total >= 1);
    assert_eq!(reports[1].errors, 0);
    assert!(reports[1].policy_model.is_some());
}

#[test]
fn bundled_splits_are_disjoint_and_stable() {
    let corpus = Corpus::load(&corpus_dir("bundled")).unwrap();
    let a = split_corpus(&corpus, 0.25, 9).unwrap();
    let b = split_corpus(&corpus, 0.25, 9).unwrap();
    let test = (0..a.len()).filter(|&i| !a.is_training(i)).count();
    assert_eq!(test, (corpus.len() as f64 * 0.25).round() as usize);
    assert_eq!(a, b);
}

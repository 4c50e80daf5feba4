//! Corpus runs with one worker against the thread pool.
//!
//!     cargo bench -p conmcts                         # sequential and parallel
//!     cargo bench -p conmcts --no-default-features   # fallback build only

use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use conmcts::config::RunConfig;
use conmcts::learn::Guidance;
use conmcts::orchestrate::{run_corpus, Corpus};
use conmcts::search::Mode;

fn corpus() -> Corpus {
    Corpus::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/bundled")).expect("bundled corpus")
}

fn config(workers: usize) -> RunConfig {
    RunConfig {
        budget: 20_000,
        playouts: 100,
        timing: false,
        workers,
        ..RunConfig::default()
    }
}

fn corpus_runs(c: &mut Criterion) {
    let corpus = corpus();
    let mut group = c.benchmark_group("bundled_corpus");
    group.sample_size(10);
    let workers: &[(&str, usize)] = if cfg!(feature = "parallel") {
        &[("sequential", 1), ("parallel", 0)]
    } else {
        &[("sequential", 1)]
    };
    for mode in [Mode::Uct, Mode::Bare] {
        for &(name, w) in workers {
            let cfg = config(w);
            group.bench_with_input(BenchmarkId::new(name, mode), &cfg, |b, cfg| {
                b.iter(|| run_corpus(&corpus, &Guidance::none(), cfg, mode, 0, true))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, corpus_runs);
criterion_main!(benches);

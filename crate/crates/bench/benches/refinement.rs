use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use futs_core::gen::{random_corpus, random_model, rng_from_seed};
use futs_core::iml::{self, ImlPrefix};
use futs_core::pepa::{self, RatedAction};
use futs_core::{coarsest_bisimulation, quotient, DEFAULT_STATE_CAP};

fn raw_models(c: &mut Criterion) {
    let mut group = c.benchmark_group("raw-refinement");
    for states in [16, 64, 256] {
        let mut rng = rng_from_seed(states as u64);
        let models: Vec<_> = (0..8)
            .map(|_| random_model(&mut rng, states).unwrap())
            .collect();
        group.bench_with_input(BenchmarkId::from_parameter(states), &models, |b, models| {
            b.iter(|| {
                models
                    .iter()
                    .map(|m| coarsest_bisimulation(m).len())
                    .sum::<usize>()
            })
        });
    }
    group.finish();
}

fn pepa_pipeline(c: &mut Criterion) {
    let docs = random_corpus::<RatedAction>(42, 50, 5);
    c.bench_function("pepa explore+minimize x50", |b| {
        b.iter(|| {
            for d in &docs {
                let root = d.root.clone().unwrap();
                let e = pepa::explore_pepa(&[root], &d.env, DEFAULT_STATE_CAP).unwrap();
                quotient(&e.model, &coarsest_bisimulation(&e.model)).unwrap();
            }
        })
    });
    c.bench_function("pepa standard equivalence x50", |b| {
        b.iter(|| {
            for d in &docs {
                let root = d.root.clone().unwrap();
                let s = pepa::explore_standard(&[root], &d.env, DEFAULT_STATE_CAP).unwrap();
                pepa::strong_equivalence_partition(&s);
            }
        })
    });
}

fn iml_pipeline(c: &mut Criterion) {
    let docs = random_corpus::<ImlPrefix>(42, 50, 5);
    c.bench_function("iml explore+minimize x50", |b| {
        b.iter(|| {
            for d in &docs {
                let root = d.root.clone().unwrap();
                if let Ok(e) = iml::explore_iml(&[root], &d.env, DEFAULT_STATE_CAP) {
                    quotient(&e.model, &coarsest_bisimulation(&e.model)).unwrap();
                }
            }
        })
    });
}

criterion_group!(benches, raw_models, pepa_pipeline, iml_pipeline);
criterion_main!(benches);

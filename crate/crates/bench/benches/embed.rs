use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use glz_embed::oracle::classify;
use glz_embed::quadrature::{weighted_lq_norm, WeightedIntegrand};
use glz_embed::rearrange::random_step_function;
use glz_embed::sweep::table_sweep;
use glz_embed::verify::DEFAULT_SEED;
use glz_embed::{glz_norm_numeric, QuadratureConfig};
use glz_embed_bench::{sample_kernels, sample_queries, sample_spaces};

fn symbolic(c: &mut Criterion) {
    let queries = sample_queries();
    c.bench_function("classify/5 queries", |b| {
        b.iter(|| queries.iter().for_each(|q| drop(black_box(classify(black_box(q))))))
    });
    c.bench_function("table_sweep/3 per row", |b| b.iter(|| table_sweep(black_box(3)).unwrap().len()));
}

fn numeric(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let mut group = c.benchmark_group("head norm at r = 2^-20");
    for p in sample_kernels() {
        let ig = WeightedIntegrand::psi(&p, (0.0, 2f64.powi(-20))).unwrap();
        group.bench_function(format!("lambda={} q={} alpha={} beta={}", p.lambda, p.q, p.alpha, p.beta), |b| {
            b.iter(|| weighted_lq_norm(black_box(&ig), &cfg).unwrap())
        });
    }
    group.finish();

    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let f = random_step_function(&mut rng);
    let mut group = c.benchmark_group("random step function norm");
    for d in sample_spaces() {
        group.bench_function(d.to_string(), |b| b.iter(|| glz_norm_numeric(black_box(&f), &d, &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, symbolic, numeric);
criterion_main!(benches);

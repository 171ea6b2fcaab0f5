//! Benchmarks for the predictor pipeline: single-parameter explicit sets,
//! whole-atlas construction, and digit-witness construction.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_bigint::BigUint;

use tame_weights::context::Context;
use tame_weights::digit_witness;
use tame_weights::tame_types::{enumerate_types, TameType};
use tame_weights::weight_sets::{closure_c, expl_seed_atlas, obvious_atlas, w_expl, w_obv};

fn gl3_ctx(p: u64) -> Context {
    Context::new(p, 1, 1, 3).expect("valid context")
}

fn irreducible_parameter(p: u64) -> TameType {
    let ctx = gl3_ctx(p);
    // A niveau-three parameter with spread-out digits.
    let exp = BigUint::from(1u64 + 3 * p + 5 * p * p);
    TameType::from_raw_pieces(ctx, vec![(3, exp)])
}

fn bench_single_explicit_set(c: &mut Criterion) {
    for p in [5u64, 7, 11] {
        let t = irreducible_parameter(p);
        c.bench_function(&format!("w_expl/niveau3/p{p}"), |b| {
            b.iter(|| w_expl(black_box(&t)).expect("explicit set"))
        });
    }
}

fn bench_closure(c: &mut Criterion) {
    let t = irreducible_parameter(7);
    let obv = w_obv(&t);
    c.bench_function("closure_c/niveau3/p7", |b| {
        b.iter(|| closure_c(black_box(&obv)).expect("closure"))
    });
}

fn bench_atlases(c: &mut Criterion) {
    let ctx = gl3_ctx(7);
    c.bench_function("obvious_atlas/p7", |b| {
        b.iter(|| obvious_atlas(black_box(ctx)))
    });
    c.bench_function("expl_seed_atlas/p7", |b| {
        b.iter(|| expl_seed_atlas(black_box(ctx)))
    });
    c.bench_function("enumerate_types/p7", |b| {
        b.iter(|| enumerate_types(black_box(ctx)))
    });
}

fn bench_digit_witness(c: &mut Criterion) {
    let p = 7u64;
    let exp = BigUint::from(2u64 + 4 * p + p * p * p + 6 * p * p * p * p);
    c.bench_function("digit_witness/d3_f2_p7", |b| {
        b.iter(|| digit_witness::construct(3, 2, p, black_box(&exp)).expect("witness"))
    });
}

criterion_group!(
    benches,
    bench_single_explicit_set,
    bench_closure,
    bench_atlases,
    bench_digit_witness
);
criterion_main!(benches);

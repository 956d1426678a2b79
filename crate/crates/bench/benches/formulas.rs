use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use compstruct::formulas::{closed_table, ClosedForm};
use compstruct::{delete_one_ball_pushforward, pmf_table, DecrementMatrix};
use compstruct_bench::representative_models;

fn tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("pmf_table");
    group.sample_size(20);
    for model in representative_models() {
        for n in [6, 10] {
            group.bench_with_input(BenchmarkId::new(model.short_name(), n), &n, |b, &n| {
                b.iter(|| pmf_table(black_box(&model), n).unwrap())
            });
        }
    }
    group.finish();
}

fn closed_forms(c: &mut Criterion) {
    let mut group = c.benchmark_group("closed_table");
    group.sample_size(20);
    for model in representative_models()
        .into_iter()
        .filter(|m| m.has_closed_form())
    {
        group.bench_function(model.short_name(), |b| {
            b.iter(|| closed_table(black_box(&model), 10, ClosedForm::Corrected).unwrap())
        });
    }
    group.finish();
}

fn decrement_matrix(c: &mut Criterion) {
    let mut group = c.benchmark_group("decrement_matrix");
    for model in representative_models() {
        group.bench_function(model.short_name(), |b| {
            b.iter(|| DecrementMatrix::new(black_box(&model), 20).unwrap())
        });
    }
    group.finish();
}

fn pushforward(c: &mut Criterion) {
    let table = pmf_table(&representative_models()[2], 10).unwrap();
    c.bench_function("delete_one_ball_pushforward/g/10", |b| {
        b.iter(|| delete_one_ball_pushforward(black_box(&table)).unwrap())
    });
}

criterion_group!(benches, tables, closed_forms, decrement_matrix, pushforward);
criterion_main!(benches);

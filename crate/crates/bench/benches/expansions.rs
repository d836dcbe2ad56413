use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use juhl_kit::backends::{oracle_q, MatrixBackend};
use juhl_kit::exact::Composition;
use juhl_kit::formulae::{kcoeff, kcoeff_closed_form};
use juhl_kit::nc_series::iterate_l_full;
use juhl_kit::{expand_p_recursive, expand_q_recursive};

fn bench_iteration(c: &mut Criterion) {
    let mut group = c.benchmark_group("iterate_l_full");
    for n in [4u32, 6, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| iterate_l_full(n).unwrap()));
    }
    group.finish();
}

fn bench_inversion(c: &mut Criterion) {
    let mut group = c.benchmark_group("inversion");
    group.sample_size(10);
    for n in [6u32, 8, 10] {
        group.bench_with_input(BenchmarkId::new("P", n), &n, |b, &n| b.iter(|| expand_p_recursive(n).unwrap()));
    }
    for n in [4u32, 6, 8] {
        group.bench_with_input(BenchmarkId::new("Q", n), &n, |b, &n| b.iter(|| expand_q_recursive(n).unwrap()));
    }
    group.finish();
}

fn bench_kcoeff(c: &mut Criterion) {
    let k = Composition::new(vec![2, 1, 3, 1]).unwrap();
    c.bench_function("kcoeff literal", |b| b.iter(|| kcoeff(&k, 3).unwrap()));
    c.bench_function("kcoeff closed", |b| b.iter(|| kcoeff_closed_form(&k, 3).unwrap()));
}

fn bench_oracle(c: &mut Criterion) {
    let backend = MatrixBackend::random(4, 6, 0);
    c.bench_function("oracle_q d=4 N=6", |b| b.iter(|| oracle_q(&backend, 6).unwrap()));
}

criterion_group!(benches, bench_iteration, bench_inversion, bench_kcoeff, bench_oracle);
criterion_main!(benches);

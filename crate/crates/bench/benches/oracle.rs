use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use skalab::bits::{bs, encode_condition};
use skalab::vm::{run_program, VmLimits};
use skalab_bench::oracle;

fn vm(c: &mut Criterion) {
    let copy_loop = bs("11100111110111100111111");
    let cond = encode_condition(&[bs("0110100111")]);
    c.bench_function("vm/copy_loop", |b| {
        b.iter(|| run_program(&copy_loop, &cond, VmLimits::new(0)))
    });
    let spin = bs("111110111111");
    let one = bs("1");
    c.bench_function("vm/cycle_detection", |b| {
        b.iter(|| run_program(&spin, &one, VmLimits::new(0)))
    });
}

fn cold_queries(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle/cold");
    g.sample_size(10);
    for n in [6usize, 8, 10] {
        let x = skalab::BitString::from_uint(0b10_1100_1101 & ((1 << n) - 1), n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| oracle(n).complexity(&x, &[], 0).unwrap())
        });
    }
    g.finish();
}

fn warm_queries(c: &mut Criterion) {
    let o = oracle(8);
    let cond = [bs("10110")];
    for x in skalab::BitString::all_up_to(8) {
        o.value(&x, &cond, 0).unwrap();
    }
    c.bench_function("oracle/warm_lookup", |b| {
        b.iter(|| o.value(&bs("10110011"), &cond, 0).unwrap())
    });
    c.bench_function("oracle/candidate_set", |b| {
        b.iter(|| o.candidate_set(6, &cond, 0, 5).unwrap())
    });
}

criterion_group!(benches, vm, cold_queries, warm_queries);
criterion_main!(benches);

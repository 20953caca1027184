use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use refrou::bench_harness::gen_random_instance;
use refrou::{rank_one_update, ref_lu_factorize_with, Execution, UpdateSpec};

const SIZES: [usize; 3] = [32, 64, 128];

fn factorize(c: &mut Criterion) {
    let mut g = c.benchmark_group("factorize");
    g.sample_size(10);
    for n in SIZES {
        let a = gen_random_instance(n, 1).a;
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            g.bench_with_input(BenchmarkId::new(label, n), &a, |b, a| {
                b.iter(|| ref_lu_factorize_with(a, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn update(c: &mut Criterion) {
    let mut g = c.benchmark_group("rank_one_update");
    g.sample_size(10);
    for n in SIZES {
        let inst = gen_random_instance(n, 1);
        let (f, _) = ref_lu_factorize_with(&inst.a, Execution::Parallel).unwrap();
        let spec = UpdateSpec::outer(inst.v, inst.w).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &(f, spec), |b, (f, spec)| {
            b.iter(|| rank_one_update(f, spec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, factorize, update);
criterion_main!(benches);

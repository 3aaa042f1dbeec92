use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use z2graded::points::{check_lambda0_linearity, check_naturality_square, LambdaPoint, LinearitySample};
use z2graded::sampling::Sampler;

struct Workload {
    f: z2graded::domains::BerezinVector,
    psi: z2graded::AlgebraMorphism,
    points: Vec<LambdaPoint>,
    samples: Vec<LinearitySample>,
}

fn workload() -> Workload {
    let mut s = Sampler::new(42);
    let src = z2graded::domains::Domain::all_space(2, 2, &[1, 1, 1]).unwrap();
    let f = s.domain_morphism(&src, &src, 3, 6).to_berezin();
    let (a, b) = (s.algebra(2, 3, 6), s.algebra(2, 3, 6));
    let psi = s.algebra_morphism(&a, &b);
    let points = (0..64).map(|_| s.point(&src, &a)).collect();
    let samples = (0..64).map(|_| s.linearity_sample(&src, &a)).collect();
    Workload { f, psi, points, samples }
}

fn harnesses(c: &mut Criterion) {
    let w = workload();
    let sequential = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let default = rayon::ThreadPoolBuilder::new().build().unwrap();
    let mut group = c.benchmark_group("harness");
    group.sample_size(10);
    for (name, pool) in [("1-thread", &sequential), ("pool", &default)] {
        group.bench_function(BenchmarkId::new("naturality", name), |bench| {
            bench.iter(|| pool.install(|| check_naturality_square(&w.f, &w.psi, &w.points).unwrap()))
        });
        group.bench_function(BenchmarkId::new("lambda0-linearity", name), |bench| {
            bench.iter(|| pool.install(|| check_lambda0_linearity(&w.f, &w.samples).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, harnesses);
criterion_main!(benches);

use billiards_core::model::{default_tetrahedron, random_instance, Limits};
use billiards_core::{find_period, oracle_run, Engine, Model, Rational, SystemState, Until};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn model(seed: u64) -> Model {
    Model::new(random_instance(seed, &Limits::default()).unwrap()).unwrap()
}

fn rational(c: &mut Criterion) {
    let a = Rational::new(355, 113).unwrap();
    let b = Rational::new(-22, 7).unwrap();
    c.bench_function("rational/add_mul", |bench| {
        bench.iter(|| black_box(a) * black_box(b) + black_box(a))
    });
    c.bench_function("rational/parse", |bench| {
        bench.iter(|| black_box("39469/12").parse::<Rational>().unwrap())
    });
}

fn events(c: &mut Criterion) {
    let mut g = c.benchmark_group("engine/run_20_units");
    for seed in [1u64, 7, 33] {
        let m = model(seed);
        let horizon = m.unit_length() * Rational::from_integer(20);
        g.bench_with_input(BenchmarkId::from_parameter(seed), &m, |bench, m| {
            bench.iter(|| Engine::new(m).run(&SystemState::initial(m), Until::Time(horizon)))
        });
    }
    g.finish();
}

fn periods(c: &mut Criterion) {
    let tetra = Model::new(default_tetrahedron()).unwrap();
    c.bench_function("period/tetrahedron", |bench| {
        bench.iter(|| find_period(&tetra, None).unwrap())
    });
    let m = model(84);
    let mut g = c.benchmark_group("period/seed_84");
    g.sample_size(10);
    g.bench_function("original", |bench| {
        bench.iter(|| find_period(&m, None).unwrap())
    });
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let m = model(1);
    let horizon = m.unit_length() * Rational::from_integer(20);
    c.bench_function("oracle/seed_1_20_units", |bench| {
        bench.iter(|| oracle_run(&m, horizon).unwrap())
    });
}

criterion_group!(benches, rational, events, periods, oracle);
criterion_main!(benches);

//! Dissipative-dynamics costs: building the generator, assembling the
//! dense superoperator, integrating to stationarity, and the random-shape
//! sampling behind the Monte Carlo coefficients.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use permutherm_core::asymptotics::sample_scaled_shape;
use permutherm_core::lindblad::{
    build_generator, nullspace_dimension, steady_state, thermal_state, RateModel,
    SteadyStateOptions,
};
use permutherm_core::thermo::Ensemble;
use permutherm_core::SpectrumSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn generator_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("generator_assembly");
    let rates = RateModel::new(1.0, 1.0).unwrap();
    for (n, d) in [(3u32, 2usize), (4, 2), (3, 3)] {
        let ensemble = Ensemble::qudits(n, SpectrumSpec::ladder(d).unwrap()).unwrap();
        group.bench_function(format!("build_n{n}_d{d}"), |b| {
            b.iter(|| build_generator(black_box(&ensemble), black_box(&rates)).unwrap())
        });
    }
    group.finish();
}

fn superoperator_nullspace(c: &mut Criterion) {
    let ensemble = Ensemble::qudits(4, SpectrumSpec::ladder(2).unwrap()).unwrap();
    let generator = build_generator(&ensemble, &RateModel::new(1.0, 1.0).unwrap()).unwrap();
    c.bench_function("nullspace_svd_n4_d2", |b| {
        b.iter(|| nullspace_dimension(&generator.superoperator().unwrap()))
    });
}

fn relaxation_to_stationarity(c: &mut Criterion) {
    let ensemble = Ensemble::qudits(2, SpectrumSpec::ladder(2).unwrap()).unwrap();
    let generator = build_generator(&ensemble, &RateModel::new(1.0, 1.0).unwrap()).unwrap();
    let rho0 = thermal_state(generator.hamiltonian_diagonal(), 3.0);
    let options = SteadyStateOptions::default();
    let mut group = c.benchmark_group("relaxation");
    group.sample_size(20);
    group.bench_function("steady_state_n2_d2", |b| {
        b.iter(|| steady_state(&generator, black_box(&rho0), &options).unwrap())
    });
    group.finish();
}

fn scaled_shape_sampling(c: &mut Criterion) {
    let mut group = c.benchmark_group("scaled_shape_sampling");
    for d in [3usize, 7] {
        group.bench_function(format!("gue_batch1000_d{d}"), |b| {
            b.iter(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(7);
                (0..1000)
                    .map(|_| sample_scaled_shape(black_box(d), &mut rng).unwrap().dim())
                    .sum::<usize>()
            })
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    generator_assembly,
    superoperator_nullspace,
    relaxation_to_stationarity,
    scaled_shape_sampling
);
criterion_main!(benches);

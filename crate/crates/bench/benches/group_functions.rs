//! Character-based block sums: the per-block partition functions and the
//! full steady-state sweep built on them.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use permutherm_core::characters::{block_partition_function, spin_ln_block_partition_function};
use permutherm_core::partitions::enumerate_partitions;
use permutherm_core::thermo::{steady_state_quantities, Ensemble};
use permutherm_core::SpectrumSpec;

fn block_partition_functions(c: &mut Criterion) {
    let mut group = c.benchmark_group("block_partition_functions");
    let spec = SpectrumSpec::ladder(3).unwrap();
    for n in [6u32, 10, 14] {
        let shapes = enumerate_partitions(n, 3);
        group.bench_function(format!("all_shapes_n{n}_d3"), |b| {
            b.iter(|| {
                shapes
                    .iter()
                    .map(|p| block_partition_function(p, &spec, black_box(1.0)).unwrap())
                    .sum::<f64>()
            })
        });
    }
    group.finish();
}

fn spin_ladder_sums(c: &mut Criterion) {
    c.bench_function("spin_block_ln_z_2j200", |b| {
        b.iter(|| spin_ln_block_partition_function(black_box(200), black_box(0.7)).unwrap())
    });
}

fn steady_state_sweep(c: &mut Criterion) {
    let qudits = Ensemble::qudits(10, SpectrumSpec::ladder(3).unwrap()).unwrap();
    let spins = Ensemble::spins(10, 2).unwrap();
    let mut group = c.benchmark_group("steady_state_sweep");
    group.bench_function("qudits_n10_d3", |b| {
        b.iter(|| steady_state_quantities(&qudits, black_box(1.3), black_box(2.0)).unwrap())
    });
    group.bench_function("spins_n10_s1", |b| {
        b.iter(|| steady_state_quantities(&spins, black_box(1.3), black_box(2.0)).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    block_partition_functions,
    spin_ladder_sums,
    steady_state_sweep
);
criterion_main!(benches);

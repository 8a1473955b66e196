//! Parallel vs sequential throughput on the data-parallel hot paths:
//! the correlation-grid bound optimizers and the Monte Carlo trial loop.
//! Run with `cargo bench -p diamond-core`; the Sequential rows use the
//! same code path the `--no-default-features` build falls back to.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use diamond_core::exec::{map_index_range, ExecMode};
use diamond_core::info::DiscreteJointDist;
use diamond_core::report::GridSpec;
use diamond_core::three_relay::{upper_bound3, LinkCaps3, UpperBound3Options};
use diamond_core::two_relay::{upper_bound2, LinkCaps2, PhiVariant};
use diamond_core::typicality::{CoveringExperiment, TypicalityConfig};

fn modes() -> Vec<(&'static str, ExecMode)> {
    vec![
        ("sequential", ExecMode::Sequential),
        ("parallel", ExecMode::Parallel),
    ]
}

fn bench_exec_map(c: &mut Criterion) {
    let mut group = c.benchmark_group("exec_map_indexed");
    for (name, mode) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &mode, |b, &mode| {
            b.iter(|| {
                map_index_range(20_000, mode, |i| {
                    let x = i as f64 * 1e-3;
                    (x.sin() * x.cosh()).ln_1p()
                })
                .len()
            })
        });
    }
    group.finish();
}

// The bound optimizers pick their mode from ExecMode::auto(); benching the
// default-feature build here against the numbers from
// `cargo bench --no-default-features` compares the two lanes end to end.
fn bench_two_relay_upper(c: &mut Criterion) {
    let caps = LinkCaps2::new(1.0, 1.0, 0.25, 0.25);
    let grid = GridSpec::new(21);
    c.bench_function("upper_bound2_grid21", |b| {
        b.iter(|| upper_bound2(&caps, 1.0, 1.0, &grid, PhiVariant::Squared).unwrap())
    });
}

fn bench_three_relay_upper(c: &mut Criterion) {
    let caps = LinkCaps3::symmetric(1.0, 0.25);
    let grid = GridSpec::new(13);
    c.bench_function("upper_bound3_grid13", |b| {
        b.iter(|| upper_bound3(&caps, 1.0, &grid, UpperBound3Options::default()).unwrap())
    });
}

fn bench_covering(c: &mut Criterion) {
    let joint = DiscreteJointDist::new(
        vec!["U1".into(), "U2".into()],
        vec![2, 2],
        vec![0.5, 0.0, 0.0, 0.5],
    )
    .unwrap();
    let exp = CoveringExperiment {
        joint,
        rates: vec![0.8, 0.8],
        bin_rate: 0.0,
        config: TypicalityConfig {
            epsilon: 0.1,
            n: 14,
        },
        trials: 60,
        seed: 7,
    };
    c.bench_function("covering_n14_60trials", |b| b.iter(|| exp.run().unwrap()));
}

criterion_group!(
    benches,
    bench_exec_map,
    bench_two_relay_upper,
    bench_three_relay_upper,
    bench_covering
);
criterion_main!(benches);

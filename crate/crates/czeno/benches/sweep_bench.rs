//! Compares the data-parallel sweep executor against the sequential
//! reference on identical grids. On multi-core machines the parallel
//! path should win once grid points are nontrivial; on a single core the
//! two should be within scheduling overhead of each other.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use czeno::cli::config::{resolve, Resolved, RunKind};
use czeno::cli::sweep::{grid_size, run_points_sequential, Axis};
use czeno::cli::{Cli, Command};

use clap::Parser;

fn bench_setup(n: usize, points: usize) -> (Resolved, Vec<Axis>, usize) {
    let seeds: Vec<String> = (0..points).map(|s| s.to_string()).collect();
    let axis = format!("seed={}", seeds.join(","));
    let cli = Cli::try_parse_from([
        "czeno",
        "sweep",
        "--run",
        "photon-cz",
        "--n",
        &n.to_string(),
        "--axis",
        &axis,
    ])
    .expect("bench arguments parse");
    let Command::Sweep(args) = cli.command else {
        unreachable!("sweep arguments");
    };
    let resolved = resolve(&args.base, RunKind::PhotonCz).expect("bench config resolves");
    let total = grid_size(&args.axes, false).expect("grid fits");
    (resolved, args.axes, total)
}

fn sweep_strategies(c: &mut Criterion) {
    let mut group = c.benchmark_group("photon_cz_sweep");
    group.sample_size(20);

    for &(n, points) in &[(100usize, 8usize), (400, 8)] {
        let (resolved, axes, total) = bench_setup(n, points);
        group.bench_with_input(
            BenchmarkId::new("sequential", format!("n{n}_x{points}")),
            &(&resolved, &axes, total),
            |b, (resolved, axes, total)| {
                b.iter(|| {
                    run_points_sequential(RunKind::PhotonCz, resolved, axes, *total, false)
                        .expect("sweep runs")
                })
            },
        );
        #[cfg(feature = "parallel")]
        group.bench_with_input(
            BenchmarkId::new("parallel", format!("n{n}_x{points}")),
            &(&resolved, &axes, total),
            |b, (resolved, axes, total)| {
                b.iter(|| {
                    czeno::cli::sweep::run_points_parallel(
                        RunKind::PhotonCz,
                        resolved,
                        axes,
                        *total,
                        false,
                    )
                    .expect("sweep runs")
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, sweep_strategies);
criterion_main!(benches);

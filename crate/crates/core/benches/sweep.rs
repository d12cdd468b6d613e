use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use liemax::catalog;
use liemax::exec::Execution;
use liemax::flows::FlowConfig;
use liemax::maxwell::{parse_p_grid, run_sweep};
use liemax::symmetry::{verify_candidate, Verdict};

fn sweep(c: &mut Criterion) {
    let b = catalog::builtin("se2").unwrap();
    let h = b.hamiltonian("sr").unwrap();
    let Verdict::Verified(v) = verify_candidate(b.algebra(), b.symmetry("eps_central").unwrap(), h, 100, 0).unwrap().0
    else {
        panic!("eps_central rejected");
    };
    let ps = parse_p_grid("0.6:0.6:1,-1.5:1.5:16,0.8:0.8:1", 3).unwrap();
    let cfg = FlowConfig::default();
    let jobs = std::thread::available_parallelism().map_or(4, |n| n.get());

    let mut group = c.benchmark_group("se2_sweep_16");
    group.sample_size(10);
    for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::with_jobs(jobs))] {
        group.bench_with_input(BenchmarkId::from_parameter(label), &exec, |bench, &exec| {
            bench.iter(|| run_sweep(b.algebra(), &v, h, &ps, 20.0, 1e-2, b.strata(), &cfg, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use genkraw::convergence::halving_ladder;
use genkraw::numerics::{parse_rational, Rational};
use genkraw::painleve::p5_ladder;
use genkraw::toda::toda_ladder;
use genkraw::{stieltjes, trajectory, Execution, WeightParams};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn sweep_sets() -> Vec<WeightParams<Rational>> {
    let mut sets = Vec::new();
    for n in [6, 12, 20] {
        for alpha in ["-1", "1/2", "4/5"] {
            for c in ["1/10", "2", "30"] {
                sets.push(WeightParams::parse(n, alpha, c).unwrap());
            }
        }
    }
    sets
}

fn equivalence_sweep(cr: &mut Criterion) {
    let sets = sweep_sets();
    let mut g = cr.benchmark_group("equivalence_sweep");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &sets, |b, sets| {
            b.iter(|| exec.map(sets, |p| trajectory(p).unwrap() == stieltjes(p).unwrap()))
        });
    }
    g.finish();
}

fn ladders(cr: &mut Criterion) {
    let p = WeightParams::parse(10, "-1", "2").unwrap();
    let hs = halving_ladder(&parse_rational("1/8").unwrap(), 5);
    let mut g = cr.benchmark_group("ladders");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new("toda", name), |b| {
            b.iter(|| toda_ladder(black_box(&p), 4, &hs, exec).unwrap())
        });
        g.bench_function(BenchmarkId::new("p5", name), |b| {
            b.iter(|| p5_ladder(black_box(&p), 4, &hs, 256, None, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, equivalence_sweep, ladders);
criterion_main!(benches);

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ermakov_audit::audit::{run_audit, AuditConfig, ClaimSelection, SystemSpec};
use ermakov_audit::pinney::{uniform_grid, UnitSigma};
use ermakov_audit::reduction::{integrate_oscillator, ConstantFrequency};
use ermakov_audit::symmetry::{flow_symmetry_test, PointGenerator, DEFAULT_EPSILONS};
use ermakov_audit::systems::{polar_identity_audit, ErmakovSystem};
use ermakov_audit::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn polar_sweep(c: &mut Criterion) {
    let toy = ErmakovSystem::toy();
    let mut g = c.benchmark_group("polar_identity");
    for n in [1_000, 20_000] {
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| polar_identity_audit(&toy, n, 42, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn flow_test(c: &mut Criterion) {
    let freq = ConstantFrequency { omega_squared: 1.0, domain: (0.0, 3.0) };
    let unit = UnitSigma { theta0: 0.0, domain: (0.0, 3.0) };
    let base = integrate_oscillator(&freq, 0.0, [1.0, 0.5], (0.0, 3.0), 1e-10).unwrap();
    let gen = PointGenerator::new(8, &unit).unwrap();
    let mut g = c.benchmark_group("flow_gamma8");
    for n in [201, 2001] {
        let grid = uniform_grid((0.3, 2.7), n);
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &grid, |b, grid| {
                b.iter(|| flow_symmetry_test(&gen, &freq, &base, black_box(grid), &DEFAULT_EPSILONS, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn full_audit(c: &mut Criterion) {
    let mut cfg = AuditConfig::new(SystemSpec::Inline(ErmakovSystem::toy().definition()));
    cfg.claims = ClaimSelection::All;
    let mut g = c.benchmark_group("audit_toy");
    g.sample_size(10).measurement_time(Duration::from_secs(20));
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| run_audit(&cfg, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, polar_sweep, flow_test, full_audit);
criterion_main!(benches);

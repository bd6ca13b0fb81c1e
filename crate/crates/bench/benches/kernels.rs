use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tubeaction_bench::{bench_scheme, hyperbolic, slow_field, unit_tube};
use tubeaction_core::action::{interaction_total, mass_term};
use tubeaction_core::regint::{hadamard_finite_part, self_energy_integrand};
use tubeaction_core::{Biquaternion, Complex64, FourVector, SingularityField};

fn algebra(c: &mut Criterion) {
    let p = Biquaternion::new(
        Complex64::new(0.3, -1.0),
        [
            Complex64::new(1.0, 0.2),
            Complex64::new(-0.4, 0.9),
            Complex64::new(2.0, 0.0),
        ],
    );
    let q = p.conj();
    c.bench_function("biquaternion product", |b| {
        b.iter(|| black_box(p) * black_box(q))
    });
}

fn retarded(c: &mut Criterion) {
    let w = hyperbolic();
    let f = SingularityField::new(1.0, &w);
    let x = FourVector::spacetime(2.0, [1.5, 0.7, -0.3]);
    c.bench_function("retarded solve", |b| {
        b.iter(|| w.retarded_solve(black_box(&x)).unwrap())
    });
    c.bench_function("LW field", |b| b.iter(|| f.field(black_box(&x)).unwrap()));
}

fn surfaces(c: &mut Criterion) {
    let w = hyperbolic();
    let g = unit_tube();
    let s = bench_scheme();
    let a = slow_field();
    let mut group = c.benchmark_group("surface terms");
    group.sample_size(10);
    group.bench_function("mass term", |b| {
        b.iter(|| mass_term(&w, 1.0, &g, &s).unwrap())
    });
    group.bench_function("interaction total", |b| {
        b.iter(|| interaction_total(&w, 1.0, &a, &g, &s, None).unwrap())
    });
    group.finish();
}

fn finite_part(c: &mut Criterion) {
    let f = self_energy_integrand(1.0, 1.0);
    c.bench_function("hadamard finite part", |b| {
        b.iter(|| hadamard_finite_part(black_box(&f)).unwrap())
    });
}

criterion_group!(benches, algebra, retarded, surfaces, finite_part);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use helmpert::catalog;
use helmpert::perturb::{energy, second_order_wavefunction};
use helmpert::shapes::expand_with;
use helmpert::specfun::{bessel_zero, clebsch_gordan, spherical_bessel_j_all, AngularMomentumTriple, BesselZeroKind};
use helmpert::{BoundaryCondition, EnergyOptions, ModeIndex};

fn specfun(c: &mut Criterion) {
    c.bench_function("bessel_j_all l<=40", |b| b.iter(|| spherical_bessel_j_all(40, black_box(7.3))));
    c.bench_function("bessel_zero alpha(8,6)", |b| {
        b.iter(|| bessel_zero(black_box(8), black_box(6), BesselZeroKind::DerivativeZero))
    });
    let t = AngularMomentumTriple::new(12, 9, 15, 3, -2, 1).unwrap();
    c.bench_function("clebsch_gordan (12,9,15)", |b| b.iter(|| clebsch_gordan(black_box(&t))));
}

fn shapes(c: &mut Criterion) {
    for name in ["superegg-1.7", "rounded-cylinder"] {
        let e = catalog::lookup(name).unwrap();
        let opts = e.expansion_options(30, 32);
        c.bench_function(&format!("expand {name}"), |b| b.iter(|| expand_with(black_box(&e.shape), &opts)));
    }
}

fn perturb(c: &mut Criterion) {
    let e = catalog::lookup("oblate").unwrap();
    let exp = expand_with(&e.shape, &e.expansion_options(30, 32)).unwrap();
    let opts = EnergyOptions::default();
    for (n, l, m) in [(1, 0, 0), (1, 3, 2)] {
        let mode = ModeIndex::new(n, l, m, BoundaryCondition::Neumann).unwrap();
        c.bench_function(&format!("energy {mode}"), |b| b.iter(|| energy(black_box(&mode), &exp, &opts)));
    }
    let mode = ModeIndex::new(1, 0, 0, BoundaryCondition::Dirichlet).unwrap();
    c.bench_function("second-order wavefunction (1,0,0)", |b| {
        b.iter(|| second_order_wavefunction(black_box(&mode), &exp, &opts))
    });
}

criterion_group!(benches, specfun, shapes, perturb);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, Criterion};
use helmpert::catalog;
use helmpert::{compute_spectrum, BoundaryCondition, SpectrumRequest};

fn tables(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectrum");
    g.sample_size(10);
    for name in ["superegg-2.5", "pear-a"] {
        let e = catalog::lookup(name).unwrap();
        for (bc, levels) in [(BoundaryCondition::Dirichlet, 17), (BoundaryCondition::Neumann, 16)] {
            let req = SpectrumRequest::for_catalog(&e, bc, levels);
            g.bench_function(format!("{name} {bc}"), |b| b.iter(|| compute_spectrum(&req).unwrap()));
        }
    }
    g.finish();
}

criterion_group!(benches, tables);
criterion_main!(benches);

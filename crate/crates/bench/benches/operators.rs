use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use phasemax::rng::sample_complex_gaussian;
use phasemax::{CodedDiffraction, DenseEnsemble, MeasurementEnsemble, RngStream};

fn operators(c: &mut Criterion) {
    let mut rng = RngStream::new(1, 0);
    let dense: MeasurementEnsemble = DenseEnsemble::gaussian(128, 1280, &mut rng).unwrap().into();
    let cdp: MeasurementEnsemble = CodedDiffraction::rademacher(4096, 20, &mut rng).unwrap().into();

    for ens in [&dense, &cdp] {
        let x = sample_complex_gaussian(ens.n(), &mut rng).unwrap();
        let z = sample_complex_gaussian(ens.m(), &mut rng).unwrap();
        let label = format!("{} n={} m={}", ens.kind(), ens.n(), ens.m());
        c.bench_function(&format!("forward {label}"), |bch| {
            bch.iter(|| ens.forward(black_box(&x)).unwrap())
        });
        c.bench_function(&format!("adjoint {label}"), |bch| {
            bch.iter(|| ens.adjoint(black_box(&z)).unwrap())
        });
    }
}

criterion_group!(benches, operators);
criterion_main!(benches);

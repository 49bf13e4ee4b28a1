use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ndescent::blackbox::trivialize;
use ndescent::flex::flex;
use ndescent::hesse::hesse;
use ndescent::segre::segre;
use ndescent::theta::{enveloping_algebra, tau1};
use ndescent_bench::fixture;

fn methods(c: &mut Criterion) {
    let (s, classes) = fixture(13, 2, 5);
    let et = &s.etale;
    let rho = &classes[classes.len() - 1].rho;
    let eps_f = s.epsilon_f(1).unwrap();
    let t1 = tau1(et, s.translations.as_ref().unwrap()).unwrap();
    let alg = enveloping_algebra(et, &s.epsilon.mul(rho)).unwrap();

    c.bench_function("trivialize", |b| b.iter(|| trivialize(black_box(&alg), 3).unwrap()));
    c.bench_function("hesse", |b| b.iter(|| hesse(et, &s.epsilon, black_box(rho), 3).unwrap()));
    c.bench_function("flex", |b| b.iter(|| flex(et, &s.epsilon, &t1, black_box(rho), 3).unwrap()));
    c.bench_function("segre", |b| b.iter(|| segre(et, &eps_f, black_box(rho), 3).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = methods
}
criterion_main!(benches);

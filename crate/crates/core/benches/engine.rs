//! Wall-clock comparison of the data-parallel hot paths against a single
//! rayon thread: lower-hull vertex flagging, full domain-complex
//! construction, and generic map sampling.
//!
//! The "sequential" series installs a one-thread pool around the same
//! call, so the two series share code and differ only in available
//! parallelism. With the `parallel` feature disabled the helpers ignore
//! the pool entirely and both series coincide.

use criterion::{criterion_group, criterion_main, Criterion};
use trop_core::polyhedra::{hull_vertices, LiftedPoint};
use trop_core::project::sample_generic;
use trop_core::rat::{qi, qq, Q};
use trop_core::series::LaurentPolynomial;
use trop_core::trophyper::{tropicalize, Tropicalization};
use trop_core::valcoef::ValuedCoefficient;

/// Truncation of the quadratic-valuation series to the box [0, s]^2:
/// val(x^i y^j) = i^2 + j^2 + ij - i - j.
fn quadratic_box(s: i64) -> Tropicalization {
    let mut terms = Vec::new();
    for i in 0..=s {
        for j in 0..=s {
            let g = i * i + j * j + i * j - i - j;
            terms.push((vec![i, j], ValuedCoefficient::term(qi(g), qi(1))));
        }
    }
    tropicalize(&LaurentPolynomial::from_terms(2, terms).unwrap()).unwrap()
}

fn quadratic_lift(s: i64) -> Vec<LiftedPoint> {
    let mut points = Vec::new();
    for i in 0..=s {
        for j in 0..=s {
            points.push(LiftedPoint {
                point: vec![i, j],
                height: qi(i * i + j * j + i * j - i - j),
            });
        }
    }
    points
}

/// Six-term polynomial in three variables whose subdivision has a curve
/// for a 1-skeleton; the sampler hunts for maps generic on that curve.
fn space_curve() -> trop_core::polyhedra::PolyhedralComplex {
    let terms: Vec<(Vec<i64>, ValuedCoefficient)> = [
        (vec![0, 0, 0], qi(0)),
        (vec![3, 0, 0], qi(1)),
        (vec![0, 3, 0], qq(3, 2)),
        (vec![0, 0, 3], qi(2)),
        (vec![1, 1, 1], qi(-1)),
        (vec![2, 1, 0], qq(1, 2)),
    ]
    .into_iter()
    .map(|(u, v): (Vec<i64>, Q)| (u, ValuedCoefficient::term(v, qi(1))))
    .collect();
    let f = LaurentPolynomial::from_terms(3, terms).unwrap();
    let (complex, _) = tropicalize(&f).unwrap().domain_complex().unwrap();
    complex.skeleton(1)
}

fn one_thread() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
}

fn bench_hull_vertices(c: &mut Criterion) {
    let points = quadratic_lift(12);
    let seq = one_thread();
    let mut group = c.benchmark_group("hull_vertices_169_points");
    group.sample_size(20);
    group.bench_function("parallel", |b| b.iter(|| hull_vertices(&points).unwrap()));
    group.bench_function("sequential", |b| {
        b.iter(|| seq.install(|| hull_vertices(&points).unwrap()))
    });
    group.finish();
}

fn bench_domain_complex(c: &mut Criterion) {
    let trop = quadratic_box(5);
    let seq = one_thread();
    let mut group = c.benchmark_group("domain_complex_36_terms");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| trop.domain_complex().unwrap()));
    group.bench_function("sequential", |b| {
        b.iter(|| seq.install(|| trop.domain_complex().unwrap()))
    });
    group.finish();
}

fn bench_generic_sampling(c: &mut Criterion) {
    let curve = space_curve();
    let seq = one_thread();
    let mut group = c.benchmark_group("sample_generic_on_curve");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| sample_generic(2, &curve, 10, 0, 200).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| seq.install(|| sample_generic(2, &curve, 10, 0, 200).unwrap()))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_hull_vertices,
    bench_domain_complex,
    bench_generic_sampling
);
criterion_main!(benches);

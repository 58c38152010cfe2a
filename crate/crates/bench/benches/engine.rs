use criterion::{black_box, criterion_group, criterion_main, Criterion};
use szabo_bench::{dense_power, generic_family1, generic_family2};
use szabo_core::corpus::{family1_linear, family2_f1_zero, rotation};
use szabo_core::riemext::{extension_report, levi_civita_closed_form, levi_civita_koszul, riemannian_extension};
use szabo_core::szabo::{analyze, char_poly_cofactor, char_poly_faddeev_leverrier, szabo_operator};
use szabo_core::tensorcalc::{cov_deriv_curvature, curvature};

fn ring(c: &mut Criterion) {
    let a = dense_power(6);
    let b = dense_power(5);
    c.bench_function("multiply dense polynomials", |bench| bench.iter(|| black_box(&a) * black_box(&b)));
    c.bench_function("differentiate dense polynomial", |bench| bench.iter(|| black_box(&a).diff(1)));
}

fn tensors(c: &mut Criterion) {
    let g1 = generic_family1();
    let g2 = generic_family2();
    c.bench_function("curvature of generic first family", |b| b.iter(|| curvature(black_box(&g1)).unwrap()));
    c.bench_function("covariant derivative of curvature, second family", |b| {
        b.iter(|| cov_deriv_curvature(black_box(&g2)).unwrap())
    });
    c.bench_function("full Szabó analysis, generic first family", |b| b.iter(|| analyze(black_box(&g1)).unwrap()));
}

fn char_polys(c: &mut Criterion) {
    let s3 = szabo_operator(&generic_family2()).unwrap();
    let product = rotation().direct_sum(&family2_f1_zero()).unwrap();
    let s6 = szabo_operator(&product).unwrap();
    c.bench_function("char poly 3x3 by cofactors", |b| b.iter(|| char_poly_cofactor(black_box(s3.matrix()))));
    c.bench_function("char poly 3x3 by trace recursion", |b| {
        b.iter(|| char_poly_faddeev_leverrier(black_box(s3.matrix())))
    });
    c.bench_function("char poly 6x6 product by trace recursion", |b| {
        b.iter(|| char_poly_faddeev_leverrier(black_box(s6.matrix())))
    });
}

fn extensions(c: &mut Criterion) {
    let base = family1_linear();
    let g = riemannian_extension(&base).unwrap();
    c.bench_function("Koszul symbols of a 6-dim extension", |b| b.iter(|| levi_civita_koszul(black_box(&g)).unwrap()));
    c.bench_function("closed-form symbols of a 6-dim extension", |b| {
        b.iter(|| levi_civita_closed_form(black_box(&base)).unwrap())
    });
    let mut group = c.benchmark_group("extension");
    group.sample_size(10);
    group.bench_function("full extension report", |b| b.iter(|| extension_report(black_box(&base)).unwrap()));
    group.finish();
}

criterion_group!(benches, ring, tensors, char_polys, extensions);
criterion_main!(benches);

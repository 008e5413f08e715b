use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ncrs_core::delta_shock::build_delta_shock;
use ncrs_core::dlm_paths::PathKind;
use ncrs_core::identity_verify::identity_residuals;
use ncrs_core::quadrature::{GaussLegendre, QuadratureSpec};
use ncrs_core::rh_shock::{builtin_rh_residual, sigma_quadratic_roots, ShockPath};
use ncrs_core::test_function::{TestFunction, TestFunction1d};
use ncrs_core::weak_asymptotics::{build_ansatz, expansion_term, make_mollifier, weak_residual, LemmaTerm, MollifierKind, RegularizedPieces};
use ncrs_core::RiemannData;

fn kernels(c: &mut Criterion) {
    let data = RiemannData::from_components(2.0, 1.0, 0.0, 0.0, 0.0).unwrap();
    let moll = make_mollifier(MollifierKind::Bump).unwrap();
    let theta = TestFunction::new(0.5, 1.0, 1.0, 0.8, 1).unwrap();

    c.bench_function("gauss_legendre_20", |b| b.iter(|| GaussLegendre::new(black_box(20))));

    c.bench_function("quadratic_roots", |b| {
        b.iter(|| sigma_quadratic_roots(black_box(-1.3), black_box(1e-4), ShockPath::Phi).unwrap())
    });

    let shock = RiemannData::from_components(2.0, 0.0, 0.0, -1.0, 0.0).unwrap();
    c.bench_function("rh_residual_phi", |b| {
        b.iter(|| builtin_rh_residual(PathKind::PhiExample, black_box(&shock), QuadratureSpec::default()).unwrap())
    });

    let sol = build_delta_shock(&data).unwrap();
    c.bench_function("identity_residuals", |b| b.iter(|| identity_residuals(black_box(&sol), &theta).unwrap()));

    let ansatz = build_ansatz(&data, 2f64.powi(-9), &moll).unwrap();
    c.bench_function("weak_residual_eps_2e-9", |b| b.iter(|| weak_residual(black_box(&ansatz), &theta).unwrap()));

    let pieces = RegularizedPieces::new(moll, 0.25);
    let th1 = TestFunction1d::new(0.1, 1.0, 1).unwrap();
    c.bench_function("lemma_term_h_delta_x", |b| {
        b.iter(|| expansion_term(LemmaTerm::HReflectedDeltaX, &pieces, &th1, black_box(2f64.powi(-9))).unwrap())
    });
}

criterion_group!(benches, kernels);
criterion_main!(benches);

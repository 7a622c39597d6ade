mod common;

use common::*;
use disturbance_cost::gramian::norm_integral;
use disturbance_cost::{
    build_bundle, controllability_gramian, disturbance_response, disturbed_control, disturbed_signal_energy, expm,
    make_disturbance, models, nominal_control, nominal_energy, sym_eig, DisturbanceSpec, Matrix, StabilizationTask,
};

#[test]
fn expm_matches_taylor_series() {
    let m = models::admire().a().scale(0.5);
    let err = rel_inf(&expm(&m).unwrap(), &taylor_expm(&m, 50));
    assert!(err < 1e-10, "relative error {err:e}");
}

#[test]
fn expm_matches_taylor_on_the_augmented_gramian_matrix() {
    let sys = models::admire();
    let a = sys.a();
    let bbt = sys.b() * &sys.b().transpose();
    let mut aug = Matrix::zeros(6, 6);
    aug.set_block(0, 0, a);
    aug.set_block(0, 3, &bbt);
    aug.set_block(3, 3, &a.transpose().scale(-1.0));
    for t in [0.1, 1.0, 5.0] {
        let m = aug.scale(t);
        let err = rel_inf(&expm(&m).unwrap(), &taylor_expm_scaled(&m));
        assert!(err < 1e-10, "t = {t}: relative error {err:e}");
    }
}

#[test]
fn gramian_matches_simpson_at_five_seconds() {
    let sys = models::admire();
    let w = controllability_gramian(&sys, 5.0).unwrap();
    let oracle = simpson_gramian(sys.a(), sys.b(), 5.0, 2048);
    let err = rel_inf(&w, &oracle);
    assert!(err < 1e-8, "relative error {err:e}");
}

#[test]
fn gramian_matches_simpson_across_horizons() {
    let sys = models::admire();
    for t_f in [0.1, 0.5, 1.0, 5.0] {
        let w = controllability_gramian(&sys, t_f).unwrap();
        let err = rel_inf(&w, &simpson_gramian(sys.a(), sys.b(), t_f, 2048));
        assert!(err < 1e-7, "t_f = {t_f}: relative error {err:e}");
    }
}

#[test]
fn norm_integral_matches_fixed_simpson() {
    let sys = models::admire();
    let v = norm_integral(&sys, 0.5).unwrap();
    let oracle = simpson_norm_integral(sys.a(), 0.5, 4096);
    assert!(rel(v, oracle) < 1e-8, "{v} vs {oracle}");
}

#[test]
fn response_matches_trapezoid() {
    let sys = models::admire();
    let w = make_disturbance(
        &DisturbanceSpec::ConstantSign {
            signs: vec![1.0, 1.0, 1.0],
        },
        1.0,
        3,
        0,
    )
    .unwrap();
    let r = disturbance_response(&sys, &w, 0.5).unwrap();
    let oracle = trapezoid_response(sys.a(), &w, 0.5, 8192);
    let err = r.sub(&oracle).norm(disturbance_cost::NormKind::Inf);
    assert!(err < 1e-8, "absolute error {err:e}");
}

#[test]
fn sinusoid_response_matches_trapezoid() {
    let sys = models::admire();
    let w = make_disturbance(&DisturbanceSpec::default_sinusoid(), 1.0, 3, 0).unwrap();
    let r = disturbance_response(&sys, &w, 1.0).unwrap();
    let oracle = trapezoid_response(sys.a(), &w, 1.0, 16384);
    let err = r.sub(&oracle).norm(disturbance_cost::NormKind::Inf);
    assert!(err < 1e-7, "absolute error {err:e}");
}

#[test]
fn nominal_energy_matches_signal_quadrature() {
    let sys = models::admire();
    let task = StabilizationTask::new(x0(), 5.0, 1.0).unwrap();
    let bundle = build_bundle(&sys, 5.0).unwrap();
    let e = nominal_energy(&sys, &task, &bundle).unwrap();
    let u = nominal_control(&sys, &task, &bundle).unwrap();
    let q = signal_energy(&u, 2000);
    assert!(rel(e, q) < 1e-6, "{e} vs {q}");
}

#[test]
fn disturbed_energy_matches_signal_quadrature() {
    let sys = models::admire();
    let task = StabilizationTask::new(x0(), 0.5, 1.0).unwrap();
    let bundle = build_bundle(&sys, 0.5).unwrap();
    for spec in [
        DisturbanceSpec::ConstantSign {
            signs: vec![1.0, -1.0, 1.0],
        },
        DisturbanceSpec::default_sinusoid(),
    ] {
        let w = make_disturbance(&spec, 1.0, 3, 0).unwrap();
        let e = disturbed_signal_energy(&sys, &task, &bundle, &w).unwrap();
        let u = disturbed_control(&sys, &task, &bundle, &w).unwrap();
        let q = signal_energy(&u, 2000);
        assert!(rel(e, q) < 1e-6, "{}: {e} vs {q}", spec.label());
    }
}

#[test]
fn inverse_gramian_decomposition_reconstructs() {
    let sys = models::admire();
    let bundle = build_bundle(&sys, 0.5).unwrap();
    let spec = sym_eig(&bundle.w_b_inv).unwrap();
    assert!(spec.lambdas.iter().all(|&l| l > 0.0));
    let err = rel_inf(&spec.reconstruct(), &bundle.w_b_inv);
    assert!(err <= 1e-8, "{err:e}");
    assert!(spec.orthogonality_residual() <= 1e-10 * 3.0);
    assert!(bundle.inverse_residual() <= 1e-8 * 3.0);
}

#[test]
fn bundle_at_long_horizon_is_positive_definite() {
    let bundle = build_bundle(&models::admire(), 5.0).unwrap();
    assert!(bundle.spec.lambdas.iter().all(|&l| l > 0.0));
    assert!(bundle.inverse_residual() <= 1e-8 * 3.0);
}

#[test]
fn scalar_decay_norm_integral_closed_form() {
    let sys =
        disturbance_cost::LtiSystem::new("decay", Matrix::from_rows(&[[-1.0]]).unwrap(), Matrix::identity(1)).unwrap();
    let v = norm_integral(&sys, 1.0).unwrap();
    assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-10);
}

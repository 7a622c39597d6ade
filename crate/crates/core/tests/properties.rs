use disturbance_cost::experiments::DisturbanceSampler;
use disturbance_cost::metrics::MetricConstants;
use disturbance_cost::{
    build_bundle, controllability_gramian, disturbance_response, disturbed_energy_bound, disturbed_signal_energy, expm,
    make_disturbance, models, sym_eig, DisturbanceSpec, Matrix, NormKind, StabilizationTask, Vector,
};
use proptest::prelude::*;

fn matrix(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| Matrix::new(n, n, v).unwrap())
}

fn sized_matrix() -> impl Strategy<Value = Matrix> {
    (1usize..=6).prop_flat_map(matrix)
}

/// Gershgorin discs strictly in the left half plane, `‖M‖∞ ≤ 10`.
fn stable_matrix() -> impl Strategy<Value = Matrix> {
    (sized_matrix(), 0.1f64..10.0).prop_map(|(r, scale)| {
        let shifted = r.sub(&Matrix::identity(r.rows()).scale(r.norm(NormKind::Inf) + 0.1));
        shifted.scale(scale / shifted.norm(NormKind::Inf))
    })
}

fn symmetric_matrix() -> impl Strategy<Value = Matrix> {
    sized_matrix().prop_map(|m| m.add(&m.transpose()))
}

fn admire_x0() -> impl Strategy<Value = Vector> {
    prop::collection::vec(-10.0f64..10.0, 3)
        .prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
        .prop_map(|v| Vector::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expm_of_negation_is_the_inverse(m in stable_matrix()) {
        let n = m.rows();
        let p = &expm(&m).unwrap() * &expm(&m.scale(-1.0)).unwrap();
        let err = p.sub(&Matrix::identity(n)).norm(NormKind::Inf);
        prop_assert!(err <= 1e-8 * n as f64, "{err:e}");
    }

    #[test]
    fn eigenvalues_come_out_descending(m in symmetric_matrix()) {
        let spec = sym_eig(&m).unwrap();
        prop_assert!(spec.lambdas.windows(2).all(|w| w[0] >= w[1]));
        let err = spec.reconstruct().sub(&m).norm(NormKind::Inf);
        prop_assert!(err <= 1e-8 * m.norm(NormKind::Inf).max(1e-300));
    }

    #[test]
    fn induced_norms_are_submultiplicative((a, b) in (1usize..=5).prop_flat_map(|n| (matrix(n), matrix(n)))) {
        let ab = &a * &b;
        for kind in [NormKind::One, NormKind::Inf, NormKind::Two] {
            prop_assert!(ab.norm(kind) <= a.norm(kind) * b.norm(kind) + 1e-12);
        }
    }

    #[test]
    fn one_norm_within_root_n_of_two_norm(v in prop::collection::vec(-100.0f64..100.0, 1..10)) {
        let n = v.len() as f64;
        let x = Vector::new(v).unwrap();
        prop_assert!(x.norm(NormKind::One) <= n.sqrt() * x.norm(NormKind::Two) + 1e-12);
    }

    #[test]
    fn gramian_grows_with_the_horizon(t in 0.05f64..4.0, dt in 0.01f64..2.0) {
        let sys = models::admire();
        let w1 = controllability_gramian(&sys, t).unwrap();
        let w2 = controllability_gramian(&sys, t + dt).unwrap();
        let d = w2.sub(&w1).symmetrized();
        let min = sym_eig(&d).unwrap().min_eigenvalue();
        prop_assert!(min >= -1e-10 * w2.norm(NormKind::Inf), "{min:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn disturbance_response_obeys_the_norm_integral_bound(
        seed in any::<u64>(), t_f in 0.05f64..5.0, w_bar in 0.1f64..3.0,
    ) {
        let sys = models::admire();
        let bundle = build_bundle(&sys, t_f).unwrap();
        let mut sampler = DisturbanceSampler::new(seed, 3, w_bar, t_f);
        for _ in 0..3 {
            let w = sampler.next_signal().unwrap();
            let r = disturbance_response(&sys, &w, t_f).unwrap();
            prop_assert!(r.norm(NormKind::Inf) <= w_bar * bundle.v_bar_unit + 1e-8);
        }
    }

    #[test]
    fn disturbed_energy_never_exceeds_the_bound(
        seed in any::<u64>(), t_f in 0.05f64..5.0, x0 in admire_x0(),
    ) {
        let sys = models::admire();
        let bundle = build_bundle(&sys, t_f).unwrap();
        let task = StabilizationTask::new(x0, t_f, 1.0).unwrap();
        let bound = disturbed_energy_bound(&sys, &task, &bundle).unwrap().e_d_bound;
        let mut sampler = DisturbanceSampler::new(seed, 3, 1.0, t_f);
        for _ in 0..3 {
            let w = sampler.next_signal().unwrap();
            let e = disturbed_signal_energy(&sys, &task, &bundle, &w).unwrap();
            prop_assert!(e <= bound * (1.0 + 1e-9), "{e} > {bound}");
        }
    }

    #[test]
    fn bound_is_quadratic_and_monotone_in_w_bar(t_f in 0.05f64..5.0, x0 in admire_x0()) {
        let sys = models::admire();
        let bundle = build_bundle(&sys, t_f).unwrap();
        let excess = |w_bar: f64| {
            let task = StabilizationTask::new(x0.clone(), t_f, w_bar).unwrap();
            let rep = disturbed_energy_bound(&sys, &task, &bundle).unwrap();
            rep.e_d_bound - rep.e_n
        };
        // Fit γ₁w̄ + γ₂w̄² through w̄ = 1, 2 and predict w̄ = 3.
        let (e1, e2, e3) = (excess(1.0), excess(2.0), excess(3.0));
        let g2 = (e2 - 2.0 * e1) / 2.0;
        let g1 = e1 - g2;
        let predicted = 3.0 * g1 + 9.0 * g2;
        prop_assert!((predicted - e3).abs() <= 1e-9 * e3.abs().max(1.0), "{predicted} vs {e3}");
        prop_assert!(excess(0.0) == 0.0);
        prop_assert!(excess(0.5) <= e1 && e1 <= e2 && e2 <= e3);
    }

    #[test]
    fn worst_constant_sits_on_a_sign_vertex(
        c in prop::collection::vec(-1.0f64..1.0, 3), t_f in 0.05f64..5.0, x0 in admire_x0(),
    ) {
        let sys = models::admire();
        let bundle = build_bundle(&sys, t_f).unwrap();
        let task = StabilizationTask::new(x0, t_f, 1.0).unwrap();
        let basis: Vec<Vector> = (0..3)
            .map(|i| {
                let mut s = vec![0.0; 3];
                s[i] = 1.0;
                let w = make_disturbance(&DisturbanceSpec::ConstantSign { signs: s }, 1.0, 3, 0).unwrap();
                disturbance_response(&sys, &w, t_f).unwrap()
            })
            .collect();
        let z = bundle.free_response(task.x0());
        let energy = |coef: &[f64]| {
            let mut r = Vector::zeros(3);
            for (ci, ri) in coef.iter().zip(&basis) {
                r.axpy(*ci, ri);
            }
            disturbance_cost::weighted_energy(&bundle, &z.add(&r)).unwrap()
        };
        let mut best = f64::NEG_INFINITY;
        for mask in 0..8u32 {
            let s: Vec<f64> = (0..3).map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 }).collect();
            best = best.max(energy(&s));
        }
        prop_assert!(best >= energy(&c) * (1.0 - 1e-12));
    }

    #[test]
    fn multiplicative_bound_rises_with_radius(t_f in 0.05f64..5.0, w_bar in 0.1f64..3.0) {
        let sys = models::admire();
        let bundle = build_bundle(&sys, t_f).unwrap();
        let k = MetricConstants::new(&sys, &bundle, w_bar).unwrap();
        for r in [1.0, 10.0, 100.0] {
            prop_assert!(k.multiplicative_bound(10.0 * r).unwrap() > k.multiplicative_bound(r).unwrap());
        }
        let r = 1e8;
        let gap = 1.0 - k.multiplicative_bound(r).unwrap();
        let rate = k.gamma * (k.n as f64).sqrt() / k.l_min;
        prop_assert!(gap >= 0.0 && gap <= 1e-4 * rate.max(1.0), "gap {gap:e}, rate {rate:e}");
    }
}

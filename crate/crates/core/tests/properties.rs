use hetnet_meta::{moment, MomentOrder, NetworkModel, QuadratureConfig};
use num_complex::Complex64;
use proptest::prelude::*;

fn m(beta: f64, b: MomentOrder, model: &NetworkModel) -> Complex64 {
    moment(beta, b, model, &QuadratureConfig::default())
        .unwrap()
        .value
}

fn two_tier(sigma: f64, type2: bool, alpha: f64) -> NetworkModel {
    let mut model = NetworkModel::two_tier_reference(sigma, type2);
    model.alpha = alpha;
    model
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ppp_moments_are_ordered(beta in 0.01f64..100.0, alpha in 2.5f64..6.0, lambda in 0.1f64..10.0) {
        let model = NetworkModel::single_ppp(lambda, 1.0, alpha);
        let (m1, m2) = (m(beta, 1.0.into(), &model).re, m(beta, 2.0.into(), &model).re);
        prop_assert!(m2 >= m1 * m1 - 1e-9);
        prop_assert!(m2 <= m1 + 1e-9);
        prop_assert!((0.0..=1.0).contains(&m1));
    }

    #[test]
    fn ppp_coverage_falls_with_threshold(beta in 0.01f64..50.0, step in 1.1f64..4.0) {
        let model = NetworkModel::single_ppp(1.0, 1.0, 4.0);
        prop_assert!(m(beta * step, 1.0.into(), &model).re < m(beta, 1.0.into(), &model).re);
    }

    #[test]
    fn ppp_conjugate_orders(beta in 0.05f64..20.0, t in 0.1f64..30.0) {
        let model = NetworkModel::single_ppp(1.0, 1.0, 4.0);
        let up = m(beta, MomentOrder::imag(t), &model);
        let down = m(beta, MomentOrder::imag(-t), &model);
        prop_assert!((up - down.conj()).norm() < 1e-9);
        prop_assert!(up.norm() <= 1.0 + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn clustered_moments_satisfy_jensen(
        beta_db in -10.0f64..10.0,
        sigma in 0.02f64..0.3,
        type2 in any::<bool>(),
        alpha in 3.0f64..5.0,
    ) {
        let model = two_tier(sigma, type2, alpha);
        let beta = 10f64.powf(beta_db / 10.0);
        let (m1, m2) = (m(beta, 1.0.into(), &model).re, m(beta, 2.0.into(), &model).re);
        prop_assert!(m2 >= m1 * m1 - 1e-7, "m1={m1} m2={m2}");
        prop_assert!(m2 <= m1 + 1e-7);
    }

    #[test]
    fn clustered_conjugate_orders(sigma in 0.02f64..0.2, type2 in any::<bool>(), t in 0.5f64..5.0) {
        let model = two_tier(sigma, type2, 4.0);
        let up = m(1.0, MomentOrder::imag(t), &model);
        let down = m(1.0, MomentOrder::imag(-t), &model);
        prop_assert!((up - down.conj()).norm() < 1e-6, "{up} vs {down}");
    }
}

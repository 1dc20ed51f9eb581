use ccdp::bounds::{
    ccdp2_inner, ccdp2_outer, ccdp_es_inner, ccdp_es_outer, ccdp_m_inner, ccdp_m_inner_raw,
    ccdp_m_outer, conditional_variances_dense, delta_conditional_variances, delta_covariance,
    Branch, InnerForm, OuterVariant,
};
use ccdp::model::rho_lower_bound;
use ccdp::{tolerance, ChannelParams};
use proptest::prelude::*;

fn power() -> impl Strategy<Value = f64> {
    (0.5f64..4.0).prop_map(|e| 10f64.powf(e))
}

fn gain2() -> impl Strategy<Value = f64> {
    (-2.0f64..6.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #[test]
    fn inner_never_exceeds_outer(m in 2usize..=8, p in power(), c2 in gain2(), t in 0.0f64..1.0) {
        let rho = rho_lower_bound(m) + t * (1.0 - rho_lower_bound(m));
        let params = ChannelParams::with_c2(m, p, c2, rho).unwrap();
        let outer = ccdp_es_outer(&params, OuterVariant::Appendix).unwrap().value;
        for form in [InnerForm::Stated, InnerForm::Optimal] {
            let inner = ccdp_es_inner(&params, form).unwrap().value;
            prop_assert!(inner <= outer + tolerance::NEGATIVE_GAP, "{inner} > {outer}");
        }
    }

    #[test]
    fn optimal_inner_dominates_any_split(m in 2usize..=8, p in power(), c2 in gain2(), ab in 0.0f64..=1.0) {
        let params = ChannelParams::with_c2(m, p, c2, 0.0).unwrap();
        let best = ccdp_m_inner(&params, InnerForm::Optimal).unwrap().value;
        let any = ccdp_m_inner_raw(&params, ab).unwrap().value;
        prop_assert!(any <= best + tolerance::OPTIMIZER);
    }

    #[test]
    fn optimized_bounds_do_not_increase_in_gain(m in 2usize..=8, p in power(), c2 in gain2(), f in 1.0001f64..10.0) {
        let lo = ChannelParams::with_c2(m, p, c2, 0.0).unwrap();
        let hi = ChannelParams::with_c2(m, p, c2 * f, 0.0).unwrap();
        let o = |x: &ChannelParams| ccdp_m_outer(x, OuterVariant::Appendix).unwrap().value;
        let i = |x: &ChannelParams| ccdp_m_inner(x, InnerForm::Optimal).unwrap().value;
        prop_assert!(o(&hi) <= o(&lo) + tolerance::MONOTONE);
        prop_assert!(i(&hi) <= i(&lo) + tolerance::MONOTONE);
    }

    #[test]
    fn two_user_middle_gap_is_one(p in power(), u in 0.001f64..0.999) {
        let c2 = (u * (p + 1.0).ln()).exp().max(1.0 + 1e-9);
        let params = ChannelParams::with_c2(2, p, c2, 0.0).unwrap();
        let outer = ccdp2_outer(&params, OuterVariant::Appendix).unwrap();
        let inner = ccdp2_inner(&params).unwrap();
        prop_assume!(outer.branch == Branch::Middle && inner.branch == Branch::Middle);
        prop_assert!((outer.value - inner.value - 1.0).abs() <= tolerance::IDENTITY);
    }

    #[test]
    fn m_user_middle_gap_is_two(m in 2usize..=8, p in power(), u in 0.001f64..0.999) {
        let lo = (m - 1) as f64;
        let c2 = lo * (u * (p + 1.0).ln()).exp();
        let params = ChannelParams::with_c2(m, p, c2, 0.0).unwrap();
        let outer = ccdp_m_outer(&params, OuterVariant::Appendix).unwrap();
        let inner = ccdp_m_inner(&params, InnerForm::Stated).unwrap();
        prop_assume!(outer.branch == Branch::Middle && inner.branch == Branch::Middle);
        prop_assert!((outer.value - inner.value - 2.0).abs() <= tolerance::IDENTITY);
    }

    #[test]
    fn correlated_bounds_reduce_to_independent_at_zero_rho(m in 2usize..=8, p in power(), c2 in gain2()) {
        let params = ChannelParams::with_c2(m, p, c2, 0.0).unwrap();
        for form in [InnerForm::Stated, InnerForm::Optimal] {
            let es = ccdp_es_inner(&params, form).unwrap().value;
            let plain = if m == 2 { ccdp2_inner(&params) } else { ccdp_m_inner(&params, form) }.unwrap().value;
            prop_assert!((es - plain).abs() <= tolerance::IDENTITY);
        }
        let es = ccdp_es_outer(&params, OuterVariant::Appendix).unwrap().value;
        let plain = ccdp_m_outer(&params, OuterVariant::Appendix).unwrap().value;
        prop_assert!((es - plain).abs() <= tolerance::IDENTITY);
    }

    #[test]
    fn delta_variances_match_dense_oracle(m in 2usize..=24, t in 0.001f64..1.0) {
        let rho = rho_lower_bound(m) + t * (1.0 - rho_lower_bound(m));
        let fast = delta_conditional_variances(m, rho).unwrap();
        let dense = conditional_variances_dense(&delta_covariance(m, rho).unwrap());
        if rho < 1.0 - 1e-9 {
            let dense = dense.unwrap();
            for (a, b) in fast.iter().zip(&dense) {
                prop_assert!((a - b).abs() <= tolerance::SCHUR * a.abs().max(1.0));
            }
        }
    }

    #[test]
    fn feasibility_matches_lower_bound(m in 2usize..=32, rho in -1.5f64..1.5) {
        let ok = ChannelParams::new(m, 1.0, 1.0, rho).is_ok();
        prop_assert_eq!(ok, rho >= rho_lower_bound(m) && rho <= 1.0);
    }
}

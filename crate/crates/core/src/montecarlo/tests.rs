use super::*;

fn params(m: usize, p: f64, c2: f64, rho: f64) -> ChannelParams {
    ChannelParams::with_c2(m, p, c2, rho).unwrap()
}

fn config(
    m: usize,
    p: f64,
    c2: f64,
    rho: f64,
    alpha_bar: f64,
    n: usize,
    seed: u64,
) -> SimulationConfig {
    SimulationConfig::new(params(m, p, c2, rho), n, seed, alpha_bar, Target::Scheme).unwrap()
}

#[test]
fn analytic_covariance_reproduces_closed_forms() {
    let cases = [
        (2, 10.0, 4.0, 0.0, 0.0),
        (2, 10.0, 4.0, 0.0, 0.3),
        (2, 10.0, 4.0, 0.0, 1.0),
        (3, 5.0, 9.0, 0.64, 0.35),
        (4, 10.0, 2.0, -1.0 / 3.0, 0.2),
        (5, 30.0, 50.0, 0.3, 0.6),
        (2, 10.0, 16.0, 0.75, 0.3),
        (3, 10.0, 7.0, 1.0, 0.5),
        (6, 2.0, 0.0, 0.1, 0.4),
    ];
    for (m, p, c2, rho, ab) in cases {
        let layout = Layout::new(params(m, p, c2, rho), ab).unwrap();
        for r in 0..m {
            let san = layout.exact(layout.san_term(r, 1.0)).unwrap();
            assert!(
                (san - layout.san_closed_form()).abs() < 1e-10,
                "san {m} {c2} {rho} {ab}"
            );
            if ab > 0.0 {
                let gp = layout.exact(layout.gp_term(r, 1.0, None).unwrap()).unwrap();
                assert!(
                    (gp - layout.gp_closed_form()).abs() < 1e-10,
                    "gp {m} {c2} {rho} {ab}"
                );
                let mut both = layout.san_term(r, 1.0);
                both.extend(layout.gp_term(r, 1.0 / m as f64, None).unwrap());
                let combined = layout.exact(both).unwrap();
                assert!((combined - layout.scheme_closed_form().unwrap()).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn analytic_gp_at_any_lambda() {
    let layout = Layout::new(params(2, 10.0, 4.0, 0.0), 1.0).unwrap();
    for lambda in [0.0, 0.3, 10.0 / 11.0, 1.0, 1.4] {
        let v = layout
            .exact(layout.gp_term(0, 1.0, Some(lambda)).unwrap())
            .unwrap();
        assert!((v - gp_closed_form_at(&layout, lambda)).abs() < 1e-10);
    }
    assert!(
        (gp_closed_form_at(&layout, layout.gp_lambda()) - layout.gp_closed_form()).abs() < 1e-12
    );
}

#[test]
fn scheme_closed_form_matches_es_inner_at_optimal_split() {
    let p = params(3, 10.0, 25.0, 0.64);
    let split = bounds::alpha_star_m(&p);
    let layout = Layout::new(p, split.alpha_bar).unwrap();
    let es = bounds::ccdp_es_inner(&p, bounds::InnerForm::Optimal)
        .unwrap()
        .value;
    assert!((layout.scheme_closed_form().unwrap() - es).abs() < 1e-12);
}

#[test]
fn san_estimate_tracks_closed_form() {
    let est = estimate_san_rate(&config(2, 10.0, 4.0, 0.0, 0.0, 200_000, 1)).unwrap();
    assert!((est.closed_form - 0.5 * 3f64.log2()).abs() < 1e-12);
    assert!(est.z_score.abs() < 4.0, "{est:?}");
    assert!(est.stderr > 0.0);
}

#[test]
fn san_without_common_power_is_zero() {
    let est = estimate_san_rate(&config(2, 10.0, 4.0, 0.0, 1.0, 200_000, 2)).unwrap();
    assert_eq!(est.closed_form, 0.0);
    assert!(est.stderr > 0.0);
    assert!(est.z_score.abs() < 4.0, "{est:?}");
}

#[test]
fn gp_estimate_tracks_costa() {
    let est = estimate_gp_rate(&config(2, 10.0, 4.0, 0.0, 0.3, 200_000, 3)).unwrap();
    assert!((est.closed_form - 1.0).abs() < 1e-12);
    assert!(est.z_score.abs() < 4.0, "{est:?}");
}

#[test]
fn gp_needs_precoded_power() {
    let err = estimate_gp_rate(&config(2, 10.0, 4.0, 0.0, 0.0, 10_000, 1)).unwrap_err();
    assert_eq!(err.kind(), "InvalidSplit");
}

#[test]
fn zero_inflation_loses_the_state() {
    let cfg = config(2, 10.0, 4.0, 0.0, 1.0, 200_000, 4).with_gp_lambda(0.0);
    let est = estimate_gp_rate(&cfg).unwrap();
    assert!(est.value < 0.5 * 11f64.log2() - 0.2);
    assert!((est.closed_form - 0.5 * 3f64.log2()).abs() < 1e-12);
}

#[test]
fn inflation_factor_maximizes_empirical_rate() {
    let cfg = config(2, 10.0, 4.0, 0.0, 1.0, 200_000, 5);
    let lambdas: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let scan = gp_lambda_scan(&cfg, &lambdas).unwrap();
    let (best, _) =
        scan.iter().copied().fold(
            (0.0, f64::NEG_INFINITY),
            |a, b| if b.1 > a.1 { b } else { a },
        );
    assert!((best - 10.0 / 11.0).abs() <= 0.01 + 1e-12, "argmax {best}");
}

#[test]
fn scheme_combines_worst_receiver() {
    let rate = verify_scheme_rate(&config(2, 10.0, 4.0, 0.0, 0.3, 200_000, 6)).unwrap();
    assert_eq!(rate.per_receiver.len(), 2);
    assert!((rate.combined.closed_form - 0.953_445_297_804_259_3).abs() < 1e-12);
    assert!(rate.combined.z_score.abs() < 4.0, "{:?}", rate.combined);
    let min = rate
        .per_receiver
        .iter()
        .map(|r| r.combined.value)
        .fold(f64::INFINITY, f64::min);
    assert_eq!(rate.combined.value, min);
}

#[test]
fn scheme_without_state_is_awgn() {
    let rate = verify_scheme_rate(&config(4, 10.0, 0.0, 0.0, 0.0, 100_000, 7)).unwrap();
    assert!((rate.combined.closed_form - 0.5 * 11f64.log2()).abs() < 1e-12);
    assert!(rate.per_receiver.iter().all(|r| r.gp.is_none()));
    assert!((rate.combined.value - rate.combined.closed_form).abs() < 0.02);
}

#[test]
fn runs_are_reproducible() {
    let cfg = config(3, 10.0, 25.0, 0.64, 0.35, 50_000, 9);
    let a = verify_scheme_rate(&cfg).unwrap();
    let b = verify_scheme_rate(&cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn config_validation() {
    let p = params(2, 10.0, 4.0, 0.0);
    assert_eq!(
        SimulationConfig::new(p, 999, 0, 0.5, Target::San)
            .unwrap_err()
            .kind(),
        "InvalidSampleCount"
    );
    assert_eq!(
        SimulationConfig::new(p, 1000, 0, 1.5, Target::San)
            .unwrap_err()
            .kind(),
        "InvalidSplit"
    );
    let bad = SimulationConfig::new(p, 1000, 0, 0.5, Target::San)
        .unwrap()
        .with_receiver(2);
    assert_eq!(estimate_san_rate(&bad).unwrap_err().kind(), "Domain");
}

#[test]
fn decomposition_statistics() {
    for (m, rho) in [(2, 0.5), (4, -1.0 / 3.0)] {
        let d = StateDecomposition::new(m, rho).unwrap();
        assert!(verify_decomposition_stats(&d, 1_000_000, 11).unwrap() < 0.01);
    }
    let d = StateDecomposition::new(3, 0.2).unwrap();
    assert_eq!(
        verify_decomposition_stats(&d, 9_999, 1).unwrap_err().kind(),
        "InvalidSampleCount"
    );
}

#[test]
fn decomposition_error_shrinks_with_root_n() {
    let d = StateDecomposition::new(3, 0.4).unwrap();
    let avg = |n| {
        (0..8)
            .map(|s| verify_decomposition_stats(&d, n, s).unwrap())
            .sum::<f64>()
            / 8.0
    };
    let ratio = avg(10_000) / avg(1_000_000);
    assert!((10.0 / 3.0..=30.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn gain_reduction_matches_reduced_channel() {
    for (m, rho, t) in [(2, 0.0, 0.5), (3, 0.4, 0.75), (4, -0.3, 0.2)] {
        let p = params(m, 10.0, 9.0, rho);
        let check = verify_gain_reduction(&p, t, 500_000, 13).unwrap();
        assert!((check.reduced_gain - 3.0 * (1.0 - t).sqrt()).abs() < 1e-12);
        assert!(check.max_correlation_error < 0.01, "{check:?}");
    }
}

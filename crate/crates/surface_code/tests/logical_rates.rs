use surface_code::*;

#[test]
fn noiseless_readout_never_fails() {
    for d in [1, 3, 5] {
        assert_eq!(logical_error_rate(d, 0.0, 2_000, 1).unwrap().failures, 0);
    }
}

#[test]
fn maximal_noise_is_uninformative() {
    let est = logical_error_rate(3, 0.5, 100_000, 2).unwrap();
    assert!(est.ci_low <= 0.5 && 0.5 <= est.ci_high, "{est:?}");
}

#[test]
fn invalid_arguments() {
    assert_eq!(logical_error_rate(3, 1.0, 10, 0).unwrap_err(), SurfaceError::Rate(1.0));
    assert_eq!(logical_error_rate(3, -0.1, 10, 0).unwrap_err(), SurfaceError::Rate(-0.1));
    assert_eq!(logical_error_rate(3, 0.1, 0, 0).unwrap_err(), SurfaceError::Trials);
    assert_eq!(logical_error_rate(4, 0.1, 10, 0).unwrap_err(), SurfaceError::Distance(4));
}

#[test]
fn distance_five_beats_three_at_one_percent() {
    let p3 = logical_error_rate(3, 0.01, 100_000, 3).unwrap();
    let p5 = logical_error_rate(5, 0.01, 100_000, 5).unwrap();
    assert!(p5.estimate < p3.estimate);
    assert!(!p5.overlaps(&p3), "{p3:?} {p5:?}");
}

#[test]
fn rates_do_not_grow_with_distance() {
    for p in [0.005, 0.01] {
        let rates: Vec<RateEstimate> = [3, 5, 7].iter().map(|&d| logical_error_rate(d, p, 50_000, 7 + d as u64).unwrap()).collect();
        for w in rates.windows(2) {
            assert!(w[1].estimate <= w[0].estimate || w[1].overlaps(&w[0]), "{rates:?}");
        }
    }
}

#[test]
fn same_seed_same_estimate() {
    assert_eq!(logical_error_rate(5, 0.05, 5_000, 11).unwrap(), logical_error_rate(5, 0.05, 5_000, 11).unwrap());
}

#[test]
fn wilson_interval_properties() {
    let (lo, hi) = wilson_interval(0, 100, Z95);
    assert!(lo.abs() < 1e-12);
    assert!(hi > 0.0 && hi < 0.05);
    let (lo, hi) = wilson_interval(50, 100, Z95);
    assert!((lo + hi - 1.0).abs() < 1e-12);
    assert!(lo < 0.5 && hi > 0.5);
}

#[test]
fn stratified_estimate_agrees_with_plain_sampling() {
    let plain = logical_error_rate(3, 0.05, 200_000, 21).unwrap();
    let strat = logical_error_rate_stratified(3, 0.05, 200_000, 22).unwrap();
    let tol = 3.0 * strat.std_error + (plain.ci_high - plain.ci_low);
    assert!((plain.estimate - strat.estimate).abs() <= tol, "{plain:?} {strat:?}");
    // Patterns up to the correction radius never fail.
    assert_eq!(strat.strata[0].2, 0);
}

#[test]
fn exponent_fit_examples() {
    let synthetic: Vec<(usize, f64)> = [3, 5, 7, 9].iter().map(|&d| (d, (-2.0 * d as f64).exp())).collect();
    let fit = fit_pf_exponent(&synthetic).unwrap();
    assert!((fit.c - 2.0).abs() < 1e-6);
    assert!(fit_pf_exponent(&[(3, 0.1)]).is_err());
    assert!(fit_pf_exponent(&[(3, 0.1), (3, 0.2)]).is_err());
    assert!(fit_pf_exponent(&[(3, 0.1), (5, 0.0)]).is_err());
}

#[test]
fn measured_exponent_is_positive() {
    let pts: Vec<(usize, f64)> = [3, 5, 7]
        .iter()
        .map(|&d| (d, logical_error_rate_stratified(d, 0.01, 100_000, 30 + d as u64).unwrap().estimate))
        .collect();
    let fit = fit_pf_exponent(&pts).unwrap();
    assert!(fit.c > 0.0, "{pts:?} {fit:?}");
}

#[test]
fn sweep_csv_has_expected_columns() {
    let rows = rate_sweep(&[3], &[0.0, 0.1], 200, 1).unwrap();
    assert_eq!(rows[0].p_l, 0.0);
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("distance,l,p,trials,p_L,ci_low,ci_high\n"));
    assert_eq!(text.lines().count(), 3);
}

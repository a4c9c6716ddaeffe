use msd::*;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn recursion_examples() {
    assert!(rel(epsilon_recursion(0.1, 3, 1, 1.0).unwrap(), 1e-3) < 1e-12);
    assert!(rel(epsilon_recursion(0.1, 3, 2, 1.0).unwrap(), 1e-9) < 1e-12);
    assert_eq!(epsilon_recursion(0.3, 2, 0, 2.0).unwrap(), 0.3);
}

#[test]
fn recursion_rejects_out_of_regime_inputs() {
    for (eps, d, c) in [(0.0, 3, 1.0), (1.0, 3, 1.0), (-0.1, 2, 1.0), (0.5, 2, 4.0), (0.1, 1, 1.0), (0.1, 3, 0.0)] {
        assert!(epsilon_recursion(eps, d, 1, c).is_err(), "{eps} {d} {c}");
    }
}

#[test]
fn leading_form_is_exact_for_unit_constant_or_one_layer() {
    for z in 0..4 {
        let a = epsilon_recursion(0.05, 3, z, 1.0).unwrap();
        assert!(rel(epsilon_leading_form(0.05, 3, z, 1.0), a) < 1e-12);
    }
    assert!(rel(epsilon_leading_form(0.05, 3, 1, 35.0), epsilon_recursion(0.05, 3, 1, 35.0).unwrap()) < 1e-12);
    // With C > 1 and z >= 2 the exact recursion carries extra factors of C.
    assert!(epsilon_recursion(0.05, 3, 2, 35.0).unwrap() > epsilon_leading_form(0.05, 3, 2, 35.0));
}

proptest! {
    #[test]
    fn closed_form_matches_iteration(eps in 1e-4f64..0.3, d in 2u32..6, z in 0u32..5, c in 0.5f64..40.0) {
        prop_assume!(c * eps.powi(d as i32) < 1.0);
        let it = epsilon_recursion(eps, d, z, c).unwrap();
        prop_assume!(it > 1e-290);
        prop_assert!(rel(epsilon_closed_form(eps, d, z, c), it) < 1e-12, "{} vs {}", epsilon_closed_form(eps, d, z, c), it);
    }

    #[test]
    fn planned_layer_count_is_minimal(eps in 1e-3f64..0.2, d in 2u32..5, c in 1.0f64..10.0, exp in 2.0f64..40.0) {
        prop_assume!(c * eps.powi(d as i32) < 1.0);
        let target = eps * 10f64.powf(-exp);
        let k = PlanConstants { c, ..PlanConstants::default() };
        if let Ok(plan) = plan_zmsd(eps, target, d, 4, &k) {
            prop_assert!(plan.eps_out <= target * (1.0 + TARGET_SLACK));
            let prev = epsilon_recursion(eps, d, plan.z - 1, c).unwrap();
            prop_assert!(prev > target * (1.0 + TARGET_SLACK));
            prop_assert_eq!(plan.big_n, (d as u64).pow(plan.z - 1));
            prop_assert_eq!(plan.copies_per_layer.len(), plan.z as usize);
            for (i, &cp) in plan.copies_per_layer.iter().enumerate() {
                prop_assert_eq!(cp * (d as u64).pow(i as u32), plan.big_n);
            }
            prop_assert_eq!(*plan.copies_per_layer.last().unwrap(), 1);
        }
    }
}

#[test]
fn plan_examples() {
    let plan = plan_zmsd(0.1, 1e-9, 3, 8, &PlanConstants::default()).unwrap();
    assert_eq!((plan.z, plan.big_n), (2, 3));
    assert_eq!(plan.copies_per_layer, vec![3, 1]);
    assert_eq!(plan.n_nmsd, 9.0);
    // n_c = (d^2 log2 d)(d^2)(d), n_T = d n_c.
    let n_c = 9.0 * 3f64.log2() * 9.0 * 3.0;
    assert!(rel(plan.n_c, n_c) < 1e-12);
    assert!(rel(plan.n_t, 3.0 * n_c) < 1e-12);
    assert!(rel(plan.layered_qubits, 4.0 * 3.0 * n_c) < 1e-12);
    assert_eq!(plan.target_successes, 64);
    assert!(plan.m.is_some());
    assert!(matches!(plan_zmsd(0.1, 0.2, 3, 8, &PlanConstants::default()), Err(MsdError::Target(_))));
}

#[test]
fn quartic_target_is_met() {
    for n in [16u64, 100, 1000] {
        let target = (n as f64).powi(-4);
        let plan = plan_zmsd(0.01, target, 3, n, &PlanConstants::default()).unwrap();
        assert!(plan.eps_out <= target * (1.0 + TARGET_SLACK));
    }
}

#[test]
fn calibrated_input_gives_log2_n_qubits() {
    for (d, zmax) in [(2u32, 5u32), (3, 3), (5, 2), (7, 2)] {
        for z in 1..=zmax {
            for beta in [4.0, 5.0] {
                let dz = d.pow(z);
                let n = 1u64 << dz;
                let eps = calibrated_eps(1.0, beta, 1.0, d);
                let plan = plan_zmsd(eps, (n as f64).powf(-beta), d, n, &PlanConstants::default()).unwrap();
                assert_eq!(plan.z, z, "d={d} z={z} beta={beta}");
                assert_eq!(plan.n_nmsd, (n as f64).log2());
                assert_eq!(success_probability_bound(plan.n_nmsd), 1.0 / n as f64);
            }
        }
    }
}

#[test]
fn success_bound_examples() {
    assert_eq!(success_probability_bound(0.0), 1.0);
    assert_eq!(success_probability_bound(10.0), 1.0 / 1024.0);
    assert_eq!(success_probability_bound(3.0), 0.125);
}

/// Direct binomial sum for small cases.
fn tail_direct(m: u64, p: f64, below: u64) -> f64 {
    let mut total = 0.0;
    for k in 0..below.min(m + 1) {
        let c: f64 = (0..k).map(|i| (m - i) as f64 / (i + 1) as f64).product();
        total += c * p.powi(k as i32) * (1.0 - p).powi((m - k) as i32);
    }
    total
}

#[test]
fn copies_examples() {
    assert_eq!(copies_for_target(1.0, 5, 0.01).unwrap().m, 5);
    let r = copies_for_target(0.5, 1, 1e-6).unwrap();
    assert_eq!(r.m, 20);
    assert!(rel(r.ln_exact_tail.exp(), 2f64.powi(-20)) < 1e-9);
    let n = 16u64;
    let r = copies_for_target(1.0 / n as f64, n * n, 1e-9).unwrap();
    let n3 = (n * n * n) as f64;
    assert!(r.m as f64 >= n3 && (r.m as f64) <= n3 * (n as f64).ln(), "{}", r.m);
    assert!(r.chain.applicable && r.chain.dominates(r.ln_exact_tail), "{r:?}");
    assert_eq!(copies_for_target(0.0, 3, 0.1).unwrap_err(), MsdError::Probability(0.0));
}

#[test]
fn copies_are_minimal_and_match_direct_sums() {
    for &(p, t, budget) in &[(0.3, 4, 1e-3), (0.1, 2, 1e-2), (0.45, 7, 1e-5), (0.05, 1, 0.2)] {
        let r = copies_for_target(p, t, budget).unwrap();
        let at = tail_direct(r.m, p, t);
        assert!(rel(r.ln_exact_tail.exp(), at) < 1e-9);
        assert!(at <= budget);
        assert!(tail_direct(r.m - 1, p, t) > budget);
    }
}

#[test]
fn bound_chain_dominates_on_grid() {
    let mut checked = 0;
    for &p in &[0.5, 0.3, 0.1, 0.03, 0.01] {
        for &t in &[1u64, 3, 10, 40, 120] {
            for &budget in &[1e-3, 1e-9] {
                let r = copies_for_target(p, t, budget).unwrap();
                assert!(r.chain.dominates(r.ln_exact_tail), "p={p} t={t} {r:?}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 50);
}

#[test]
fn noisy_input_examples() {
    assert_eq!(n_noisy_inputs((-1f64).exp(), 1.0).unwrap(), 1);
    assert_eq!(n_noisy_inputs(1e-9, 1.0).unwrap(), 21);
    // (ln 1e9)^1.77 = 213.86...
    assert_eq!(n_noisy_inputs(1e-9, Y_GAMMA).unwrap(), 214);
    assert!(n_noisy_inputs(0.0, 1.0).is_err());
}

#[test]
fn input_count_gap_grows_with_target() {
    let mut last_gap = 0;
    for e in 1..12 {
        let t = 10f64.powi(-e);
        let a = n_noisy_inputs(t, 1.0).unwrap();
        let b = n_noisy_inputs(t, Y_GAMMA).unwrap();
        assert!(b >= a);
        assert!(b - a >= last_gap);
        last_gap = b - a;
    }
}

#[test]
fn y_state_examples() {
    let r = y_state_requirements(16, 0.5).unwrap();
    assert_eq!(r.n_y, 1);
    assert_eq!(r.p_s, 0.5);
    let n = 1_000_000u64;
    let ln_n = (n as f64).ln();
    let r = y_state_requirements(n, 1.0 / (ln_n * ln_n)).unwrap();
    assert_eq!(r.n_y, (2.0 * ln_n.ln()).powf(Y_GAMMA).ceil() as u64);
    assert!(r.n_y_below_log_n);
    assert!(r.p_s >= 1.0 / n as f64);
    // Too small an n fails the ancilla condition.
    assert!(!y_state_requirements(4, 1e-3).unwrap().n_y_below_log_n);
}

#[test]
fn corrected_bound_approaches_inverse_n() {
    let mut last = 0.0;
    for e in [3, 6, 9, 12, 18] {
        let n = 10f64.powi(e) as u64;
        let ln_n = (n as f64).ln();
        let r = y_state_requirements(n, 1.0 / (ln_n * ln_n)).unwrap();
        assert!(r.ratio_to_inverse_n > last && r.ratio_to_inverse_n < 1.0);
        last = r.ratio_to_inverse_n;
    }
    assert!(last > 0.95);
}

use pauli_core::seed;
use proptest::prelude::*;
use rand::Rng;
use surface_code::matching::{matching_blossom, matching_dp};
use surface_code::*;

/// Exhaustive minimum over every way of pairing defects or sending them to the boundary.
fn brute_force(n: usize, pair: &dyn Fn(usize, usize) -> u64, boundary: &dyn Fn(usize) -> Option<u64>) -> u64 {
    fn go(left: &mut Vec<usize>, pair: &dyn Fn(usize, usize) -> u64, boundary: &dyn Fn(usize) -> Option<u64>) -> u64 {
        let Some(i) = left.pop() else { return 0 };
        let mut best = u64::MAX;
        if let Some(b) = boundary(i) {
            best = best.min(b.saturating_add(go(left, pair, boundary)));
        }
        for k in 0..left.len() {
            let j = left.remove(k);
            best = best.min(pair(i, j).saturating_add(go(left, pair, boundary)));
            left.insert(k, j);
        }
        left.push(i);
        best
    }
    go(&mut (0..n).collect(), pair, boundary)
}

fn is_perfect(n: usize, m: &Matching) -> bool {
    let mut seen = vec![0; n];
    for &(a, b) in &m.pairs {
        seen[a] += 1;
        seen[b] += 1;
    }
    for &a in &m.boundary {
        seen[a] += 1;
    }
    seen.iter().all(|&c| c == 1)
}

#[test]
fn matching_examples() {
    let p = build_patch(5).unwrap();
    let empty = mwpm(&[], &p);
    assert_eq!(empty, Matching::default());
    let d = Decoder::new(&p);
    let (a, b) = (0..d.num_checks())
        .flat_map(|a| (a + 1..d.num_checks()).map(move |b| (a, b)))
        .find(|&(a, b)| d.check_distance(a, b) == 1)
        .unwrap();
    let m = mwpm(&[a, b], &p);
    assert_eq!(m.pairs, vec![(0, 1)]);
    assert_eq!(m.weight, 1);
}

#[test]
fn distance_seven_matching_is_optimal() {
    let p = build_patch(7).unwrap();
    let d = Decoder::new(&p);
    let mut rng = seed::rng_from_seed(77);
    for case in 0..500 {
        let k = rng.gen_range(0..=10);
        let defects: Vec<usize> = rand::seq::index::sample(&mut rng, d.num_checks(), k).into_vec();
        let pair = |i: usize, j: usize| d.check_distance(defects[i], defects[j]);
        let bnd = |i: usize| d.boundary_distance(defects[i]);
        let optimum = brute_force(k, &pair, &bnd);
        let m = d.mwpm(&defects);
        assert!(is_perfect(k, &m), "case {case}");
        assert_eq!(m.weight, optimum, "case {case}");
        let b = matching_blossom(k, pair, bnd);
        assert!(is_perfect(k, &b));
        assert_eq!(b.weight, optimum, "blossom, case {case}");
    }
}

#[test]
fn large_defect_sets_use_blossom_consistently() {
    let p = build_patch(9).unwrap();
    let d = Decoder::new(&p);
    let mut rng = seed::rng_from_seed(9);
    for _ in 0..40 {
        let k = rng.gen_range(13..=18);
        let defects: Vec<usize> = rand::seq::index::sample(&mut rng, d.num_checks(), k).into_vec();
        let pair = |i: usize, j: usize| d.check_distance(defects[i], defects[j]);
        let bnd = |i: usize| d.boundary_distance(defects[i]);
        let m = d.mwpm(&defects);
        assert!(is_perfect(k, &m));
        assert_eq!(m.weight, matching_dp(k, pair, bnd).weight);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn blossom_agrees_with_dp_on_random_metrics(
        n in 0usize..11,
        seed_value in any::<u64>(),
        reach in 0u64..3,
    ) {
        let mut rng = seed::rng_from_seed(seed_value);
        let w: Vec<Vec<u64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..20)).collect()).collect();
        let b: Vec<Option<u64>> = (0..n).map(|_| if rng.gen_range(0..3) < reach { None } else { Some(rng.gen_range(0..20)) }).collect();
        let pair = |i: usize, j: usize| w[i.min(j)][i.max(j)];
        let bnd = |i: usize| b[i];
        let opt = brute_force(n, &pair, &bnd);
        let dp = matching_dp(n, pair, bnd);
        if opt < u64::MAX / 8 {
            prop_assert_eq!(dp.weight, opt);
            let bl = matching_blossom(n, pair, bnd);
            prop_assert!(is_perfect(n, &bl));
            prop_assert_eq!(bl.weight, opt);
        }
    }
}

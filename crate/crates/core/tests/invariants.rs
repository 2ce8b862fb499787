//! Algebraic invariants of the kernels and closed forms, checked against the
//! brute-force oracles.

use itertools::Itertools;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use permlab::domain::parse_matrix;
use permlab::model::{constraint_class_size, enumerate_constraint_matrices};
use permlab::moments::{
    alpha_beta, brute_second_moment_pairs, exact_second_moment_homogeneous, mu_n,
    pre_approximation_bounds, second_moment_bounds,
};
use permlab::permanent::{per_naive, per_ryser, per_scaled};
use permlab::{DenseMatrix, Distribution, ModelSpec, ScaledValue};

fn random_matrix(seed: u64, n: usize) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = (0..n * n).map(|_| rng.random_range(0.0..2.0)).collect();
    DenseMatrix::new(n, entries).unwrap()
}

fn dist_strategy() -> impl Strategy<Value = Distribution> {
    prop_oneof![
        (0.01f64..100.0).prop_map(|c| Distribution::constant(c).unwrap()),
        (0.01f64..10.0, 0.0f64..10.0)
            .prop_map(|(a, w)| Distribution::uniform(a, a + w + 1e-3).unwrap()),
        (0.01f64..100.0).prop_map(|l| Distribution::exponential(l).unwrap()),
        (-3.0f64..3.0, 0.01f64..1.5).prop_map(|(m, s)| Distribution::lognormal(m, s).unwrap()),
    ]
}

/// Sorted row-count vector with every entry in `lo..=n`.
fn sorted_counts(n: usize, lo: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(lo..=n, n).prop_map(|mut r| {
        r.sort_unstable();
        r
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn row_permutation_leaves_6x6_permanent_unchanged(seed in any::<u64>()) {
        let m = random_matrix(seed, 6);
        let mut order: Vec<usize> = (0..6).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 0x9e37));
        let p = m.permute_rows(&order);
        let (a, b) = (per_ryser(&m).unwrap(), per_ryser(&p).unwrap());
        prop_assert!(a.rel_diff(&b) < 1e-12);
        prop_assert!(per_naive(&m).unwrap().rel_diff(&per_naive(&p).unwrap()) < 1e-12);
    }

    #[test]
    fn row_linearity(seed in any::<u64>(), n in 2usize..8, row in 0usize..8) {
        let m = random_matrix(seed, n);
        let i = row % n;
        let base = per_ryser(&m).unwrap();
        prop_assert!(per_ryser(&m.scale_row(i, 0.0)).unwrap().is_zero());
        for c in [2.0, 0.5] {
            let scaled = per_ryser(&m.scale_row(i, c)).unwrap();
            prop_assert!(scaled.rel_diff(&(base * ScaledValue::from_f64(c))) < 1e-12);
        }
    }

    #[test]
    fn row_scales_do_not_change_the_permanent(seed in any::<u64>(), n in 2usize..9) {
        let m = random_matrix(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scales: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.random_range(-3.0..3.0))).collect();
        let direct = per_naive(&m).unwrap();
        prop_assert!(per_scaled(&m, &scales).unwrap().rel_diff(&direct) < 1e-10);
    }

    #[test]
    fn second_moment_dominates_squared_mean(dist in dist_strategy()) {
        let (nu, delta) = dist.moments();
        prop_assert!(delta - nu * nu >= -1e-12 * delta);
        if matches!(dist, Distribution::Constant { .. }) {
            prop_assert_eq!(delta - nu * nu, 0.0);
        }
    }

    #[test]
    fn dist_strings_round_trip(dist in dist_strategy()) {
        let back: Distribution = dist.to_string().parse().unwrap();
        prop_assert_eq!(back, dist);
    }

    #[test]
    fn matrix_text_round_trip(n in 1usize..7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<f64> = (0..n * n)
            .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random::<f64>() * 10f64.powi(rng.random_range(-200..200)) })
            .collect();
        let m = DenseMatrix::new(n, entries).unwrap();
        prop_assert_eq!(parse_matrix(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn alpha_beta_ordering(n in 3usize..30, seed in any::<u64>(), dist in dist_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r: Vec<usize> = (0..n).map(|_| rng.random_range(2..=n)).collect();
        let spec = ModelSpec::new(n, r, dist).unwrap();
        let ab = alpha_beta(&spec).unwrap();
        prop_assert!(ab.alpha_low <= ab.alpha_up);
        prop_assert!(ab.beta_low <= ab.beta_up);
        if spec.r_low() == spec.r_up() {
            prop_assert_eq!(ab.alpha_low, ab.alpha_up);
            prop_assert_eq!(ab.beta_low, ab.beta_up);
        }
        if let Ok(b) = second_moment_bounds(&spec) {
            prop_assert!(b.lower <= b.upper);
        }
    }
}

proptest! {
    // Each case sums (7!)² permutation pairs.
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn pre_approximation_sandwich_at_n7(r in sorted_counts(7, 2), kind in 0usize..2) {
        let dist = [Distribution::constant(1.0).unwrap(), Distribution::exponential(1.0).unwrap()][kind];
        let spec = ModelSpec::new(7, r, dist).unwrap();
        let ratio = brute_second_moment_pairs(&spec).unwrap().ratio;
        let (lo, up) = pre_approximation_bounds(&spec).unwrap();
        prop_assert!(lo <= ratio * (1.0 + 1e-12) && ratio <= up * (1.0 + 1e-12), "{lo} {ratio} {up}");
    }
}

#[test]
fn pre_approximation_sandwich_for_every_sorted_spec_up_to_n6() {
    let dists = [
        Distribution::constant(1.0).unwrap(),
        Distribution::exponential(1.0).unwrap(),
        Distribution::lognormal(0.0, 1.0).unwrap(),
    ];
    for dist in dists {
        for n in 2..=6 {
            for r in (2..=n).combinations_with_replacement(n) {
                let spec = ModelSpec::new(n, r, dist).unwrap();
                let ratio = brute_second_moment_pairs(&spec).unwrap().ratio;
                let (lo, up) = pre_approximation_bounds(&spec).unwrap();
                assert!(
                    lo <= ratio * (1.0 + 1e-12) && ratio <= up * (1.0 + 1e-12),
                    "{}: {lo} <= {ratio} <= {up}",
                    spec.label()
                );
            }
        }
    }
}

#[test]
fn ratio_is_nondecreasing_in_weight_dispersion() {
    // Increasing δ/ν²: 1, 13/12, 2, e.
    let dists = [
        Distribution::constant(1.0).unwrap(),
        Distribution::uniform(0.5, 1.5).unwrap(),
        Distribution::exponential(1.0).unwrap(),
        Distribution::lognormal(0.0, 1.0).unwrap(),
    ];
    assert!(dists
        .windows(2)
        .all(|w| w[0].moment_ratio() < w[1].moment_ratio()));
    for n in 2..=20 {
        for r in 2..=n {
            let ratios: Vec<f64> = dists
                .iter()
                .map(|&d| exact_second_moment_homogeneous(n, r, d).unwrap())
                .collect();
            assert!(
                ratios.windows(2).all(|w| w[0] <= w[1]),
                "n={n} r={r}: {ratios:?}"
            );
        }
    }
    for r in (2..=5).combinations_with_replacement(5) {
        let ratios: Vec<f64> = dists
            .iter()
            .map(|&d| {
                brute_second_moment_pairs(&ModelSpec::new(5, r.clone(), d).unwrap())
                    .unwrap()
                    .ratio
            })
            .collect();
        assert!(
            ratios.windows(2).all(|w| w[0] <= w[1]),
            "r={r:?}: {ratios:?}"
        );
    }
}

#[test]
fn mean_is_invariant_under_reordering_row_counts() {
    let dist = Distribution::exponential(1.0).unwrap();
    for r in [1, 2, 3, 4, 5].into_iter().permutations(5).step_by(7) {
        let spec = ModelSpec::new(5, r, dist).unwrap();
        let sorted = ModelSpec::new(5, vec![1, 2, 3, 4, 5], dist).unwrap();
        assert_eq!(mu_n(&spec).to_f64(), mu_n(&sorted).to_f64());
        let a = brute_second_moment_pairs(&spec).unwrap().second_moment;
        let b = brute_second_moment_pairs(&sorted).unwrap().second_moment;
        assert!((a - b).abs() <= 1e-12 * b);
    }
}

#[test]
fn enumeration_is_duplicate_free_with_correct_cardinality() {
    let dist = Distribution::constant(1.0).unwrap();
    let mut checked = 0;
    for n in 1..=5 {
        for r in (0..n).map(|_| 1..=n).multi_cartesian_product() {
            let spec = ModelSpec::new(n, r, dist).unwrap();
            let size = constraint_class_size(&spec);
            if size > 10_000 {
                continue;
            }
            let mut seen = std::collections::HashSet::new();
            for x in enumerate_constraint_matrices(&spec).unwrap() {
                assert_eq!(x.row_support_sizes(), spec.r());
                let bits = x
                    .entries()
                    .iter()
                    .fold(0u64, |acc, &v| acc << 1 | u64::from(v != 0.0));
                assert!(seen.insert(bits), "{} repeats a matrix", spec.label());
            }
            assert_eq!(seen.len() as u128, size);
            checked += 1;
        }
    }
    assert!(checked > 2000);
}

#[test]
fn large_permanents_stay_finite_in_log_space() {
    let m = DenseMatrix::filled(24, 1e15);
    let per = per_ryser(&m).unwrap();
    let expected = (1..=24).map(|k| (k as f64).ln()).sum::<f64>() + 24.0 * 1e15f64.ln();
    assert!((per.log_mag().unwrap() - expected).abs() < 1e-8 * expected);
    assert!(!per.to_decimal_string(6).contains("inf"));
    let tiny = per_ryser(&DenseMatrix::filled(24, 1e-15)).unwrap();
    assert!(
        (tiny.log_mag().unwrap() + expected - 2.0 * (1..=24).map(|k| (k as f64).ln()).sum::<f64>())
            .abs()
            < 1e-8 * expected
    );
}

//! Metric and sorting implementations checked against brute-force oracles.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taea_core::metrics::{hypervolume, igd_plus, wilcoxon_rank_sum};
use taea_core::pareto::{nondominated_sort, nondominated_sort_objectives};
use taea_core::Solution;

#[path = "support/oracles.rs"]
mod oracles;

use oracles::{brute_fronts, enumerated_p, monte_carlo_hv, random_front};

#[test]
fn nondominated_sort_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..100 {
        let m = if case % 2 == 0 { 2 } else { 3 };
        let n = rng.random_range(1..=50);
        // a coarse grid forces ties and duplicates
        let set: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..m).map(|_| f64::from(rng.random_range(0..8u8))).collect())
            .collect();
        let expected = brute_fronts(&set);
        assert_eq!(nondominated_sort_objectives(&set).unwrap(), expected, "case {case}");
        let sols: Vec<Solution> = set.iter().map(|f| Solution::unconstrained(vec![], f.clone())).collect();
        assert_eq!(nondominated_sort(&sols).unwrap(), expected, "case {case}");
    }
}

#[test]
fn hypervolume_matches_monte_carlo_with_ten_million_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in [2, 3] {
        for _ in 0..2 {
            let pts = random_front(&mut rng, m, 15);
            let reference = vec![1.2; m];
            let exact = hypervolume(&pts, &reference).unwrap();
            let (est, sigma) = monte_carlo_hv(&pts, &reference, 10_000_000, &mut rng);
            assert!((exact - est).abs() <= 3.0 * sigma, "M={m}: {exact} vs {est} +- {sigma}");
        }
    }
}

#[test]
fn hypervolume_2d_matches_monte_carlo_on_many_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..100 {
        let n = rng.random_range(1..=20);
        let pts = random_front(&mut rng, 2, n);
        let reference = [1.1, 1.1];
        let exact = hypervolume(&pts, &reference).unwrap();
        let (est, sigma) = monte_carlo_hv(&pts, &reference, 200_000, &mut rng);
        assert!((exact - est).abs() <= 3.0 * sigma, "case {case}: {exact} vs {est} +- {sigma}");
    }
}

#[test]
fn rank_sum_p_matches_enumeration_for_eight_per_side() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..20 {
        let shift = 0.15 * case as f64;
        let tied = case % 3 == 0;
        let draw = |rng: &mut ChaCha8Rng, offset: f64| -> Vec<f64> {
            (0..8)
                .map(|_| {
                    let v: f64 = rng.random::<f64>() + offset;
                    if tied {
                        (v * 4.0).round() / 4.0
                    } else {
                        v
                    }
                })
                .collect()
        };
        let a = draw(&mut rng, 0.0);
        let b = draw(&mut rng, shift);
        let lib = wilcoxon_rank_sum(&a, &b, 0.05, true).unwrap();
        let oracle = enumerated_p(&a, &b);
        assert!((lib.p_value - oracle).abs() <= 0.01, "case {case}: {} vs {oracle}", lib.p_value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn igd_plus_never_increases_when_a_point_is_added(
        approx in prop::collection::vec(prop::collection::vec(0.0f64..2.0, 2), 1..15),
        extra in prop::collection::vec(0.0f64..2.0, 2),
        reference in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 1..30),
    ) {
        let before = igd_plus(&approx, &reference).unwrap();
        let mut grown = approx.clone();
        grown.push(extra);
        prop_assert!(igd_plus(&grown, &reference).unwrap() <= before + 1e-15);
    }

    #[test]
    fn hypervolume_is_permutation_invariant_and_grows(
        pts in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 1..12),
        seed in any::<u64>(),
    ) {
        let reference = [1.1, 1.1, 1.1];
        let base = hypervolume(&pts, &reference).unwrap();
        let mut shuffled = pts.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        prop_assert!((hypervolume(&shuffled, &reference).unwrap() - base).abs() < 1e-12);
        // a point strictly better than every other point in all objectives
        let best: Vec<f64> = (0..3)
            .map(|k| pts.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min) - 0.01)
            .collect();
        let mut grown = pts.clone();
        grown.push(best);
        prop_assert!(hypervolume(&grown, &reference).unwrap() > base);
    }
}

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use coactive::consistency::ConsistencyMethod;
use coactive::domain::Domain;
use coactive::experiment::{fnv1a, split_seed, splitmix64, user_seed};
use coactive::model::FeatureView;
use coactive::rectangles::RectanglesDomain;
use coactive::user::{SimulatedUser, User};

use common::*;

#[test]
fn rectangles_inference_matches_brute_force() {
    let tally = check_rectangles(40, 1);
    assert!(tally.passed(), "{:#?}", tally.mismatches);
}

#[test]
fn trip_inference_matches_brute_force() {
    let tally = check_trips(50, 4, 2);
    assert!(tally.passed(), "{:#?}", tally.mismatches);
}

#[test]
fn consistency_matches_lp_and_grid() {
    let tally = check_consistency(300, 3);
    assert!(tally.passed(), "{:#?}", tally.mismatches);
}

#[test]
fn lp_oracle_small_cases() {
    assert!(lp_feasible(&[vec![1, 0], vec![0, 1]]));
    assert!(!lp_feasible(&[vec![1, 0], vec![-1, 0]]));
    assert!(!lp_feasible(&[vec![0, 0]]));
    // Three directions that positively span the plane.
    assert!(!lp_feasible(&[vec![1, 0], vec![-1, 1], vec![-1, -1]]));
    assert!(lp_feasible(&[vec![2, -1], vec![-1, 2]]));
}

#[test]
fn critique_picks_follow_clamped_contributions() {
    let (a, b) = critique_frequencies(10_000, 4);
    assert!((a - 0.75).abs() <= 0.03, "{a}");
    assert!((b - 0.25).abs() <= 0.03, "{b}");
}

#[test]
fn true_weights_are_standard_normal() {
    let d = RectanglesDomain::generate(10, 10, 20, 5).unwrap();
    let mut values = Vec::new();
    for seed in 0..500 {
        let u = SimulatedUser::sample(&d, 0.1, seed).unwrap();
        values.extend_from_slice(u.w_star());
    }
    assert_eq!(values.len(), 10_000);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    assert!(mean.abs() <= 0.05, "{mean}");
    assert!((std - 1.0).abs() <= 0.05, "{std}");
}

#[test]
fn noiseless_user_is_satisfied_at_the_optimum() {
    let d = RectanglesDomain::generate(30, 30, 12, 6).unwrap();
    for seed in 0..20 {
        let mut u = SimulatedUser::sample(&d, 0.0, seed).unwrap();
        let best = *u.x_star();
        assert_eq!(u.query_improvement(&d, &best), best);
        assert_eq!(u.loss(&d, &best), 0.0);
        let full = FeatureView::full(d.catalog().len());
        assert_eq!(d.infer_argmax(u.w_star(), &full).unwrap().config, best);
    }
}

#[test]
fn seed_derivation_is_frozen() {
    // Reference values of SplitMix64 and 64-bit FNV-1a.
    assert_eq!(splitmix64(0), 0xe220a8397b1dcdaf);
    assert_eq!(splitmix64(1), 0x910a2dec89025cc1);
    assert_eq!(fnv1a(""), 0xcbf29ce484222325);
    assert_eq!(fnv1a("a"), 0xaf63dc4c8601ec8c);
    // Derived streams, computed independently.
    assert_eq!(split_seed(0, 0), 0xa706dd2f4d197e6f);
    assert_eq!(user_seed(0, 3), 0x6ff32697509fac7c);
    assert_eq!(split_seed(0, fnv1a("domain")), 0x4889f7448920914c);
}

#[test]
fn margin_perceptron_and_simplex_agree_on_random_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let data = random_dataset(&mut rng);
        let deltas: Vec<Vec<f64>> = data
            .iter()
            .map(|d| d.iter().map(|&v| v as f64 * 0.5).collect())
            .collect();
        assert_eq!(
            ConsistencyMethod::default().is_consistent(&deltas),
            ConsistencyMethod::Simplex.is_consistent(&deltas),
            "{data:?}"
        );
    }
}

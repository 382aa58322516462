use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use coactive::domain::Domain;
use coactive::dsl;
use coactive::learner::{cc_loop, random_view, sample_subspace, LoopOptions, NeedCritiqueStrategy};
use coactive::model::{
    dot, extend_view, perceptron_update, utility, Critique, FeatureView, WeightVector,
};
use coactive::rectangles::{Point, RectanglesDomain};
use coactive::regret::{regret_accounting, step_checks};
use coactive::trip::TripDomain;
use coactive::user::{SimulatedUser, User};

fn small_rectangles(seed: u64) -> RectanglesDomain {
    RectanglesDomain::generate(25, 25, 10, seed).unwrap()
}

fn strategy() -> impl Strategy<Value = NeedCritiqueStrategy> {
    prop_oneof![
        Just(NeedCritiqueStrategy::Consistency),
        Just(NeedCritiqueStrategy::Never),
        Just(NeedCritiqueStrategy::Always),
        (0.05f64..=1.0).prop_map(|theta| NeedCritiqueStrategy::Random { theta }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extending_the_view_keeps_every_utility(
        seed in 0u64..1000,
        k in 1usize..10,
        weights in prop::collection::vec(-3.0f64..3.0, 10),
        fresh in 0usize..10,
    ) {
        let d = small_rectangles(seed);
        let m = d.catalog().len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let view = random_view(m, k, &mut rng).unwrap();
        let missing: Vec<usize> = (0..m).filter(|i| !view.contains(*i)).collect();
        let index = missing[fresh % missing.len()];
        let w = WeightVector::from_vec(weights[..k].to_vec());
        let (next, w2) = extend_view(&view, &w, &Critique::catalog(index), m).unwrap();
        prop_assert_eq!(next.len(), view.len() + 1);
        prop_assert_eq!(w2.len(), next.len());
        for p in d.points().step_by(7) {
            prop_assert_eq!(utility(&d, &w, &view, &p).unwrap(), utility(&d, &w2, &next, &p).unwrap());
        }
    }

    #[test]
    fn perceptron_update_adds_the_delta(
        w in prop::collection::vec(-5.0f64..5.0, 0..8),
        delta in prop::collection::vec(-2.0f64..2.0, 0..8),
        probe in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        let next = perceptron_update(&WeightVector::from_vec(w.clone()), &delta);
        prop_assert_eq!(next.len(), w.len().max(delta.len()));
        let lhs = next.dot(&probe);
        let rhs = dot(&w, &probe) + dot(&delta, &probe);
        prop_assert!((lhs - rhs).abs() <= 1e-9);
    }

    #[test]
    fn runs_satisfy_bound_and_step_checks(
        seed in 0u64..10_000,
        strategy in strategy(),
        sigma in prop_oneof![Just(0.0), 0.0f64..0.5],
        initial in 1usize..4,
    ) {
        let d = small_rectangles(seed % 50);
        let m = d.catalog().len();
        let mut user = SimulatedUser::sample(&d, sigma, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let view = random_view(m, initial, &mut rng).unwrap();
        let options = LoopOptions { seed, ..LoopOptions::new(30, strategy) };
        let trace = cc_loop(&d, &view, &mut user, &options).unwrap();

        let mut seen = view.clone();
        for r in &trace.records {
            prop_assert_eq!(r.weights.len(), r.features);
            if let Some(c) = &r.critique {
                prop_assert!(!seen.contains(c.catalog_index));
                seen = seen.extended(c.catalog_index, m).unwrap();
            }
            prop_assert_eq!(seen.len(), r.features);
        }
        prop_assert_eq!(trace.final_weights.len(), trace.final_view.len());

        let report = regret_accounting(&d, &trace, user.w_star(), user.x_star(), 1.0).unwrap();
        prop_assert!(report.bound_holds(), "{} > {}", report.average_regret, report.bound_rhs);
        let checks = step_checks(&d, &trace, user.w_star(), &report);
        prop_assert!(checks.passed(), "{:?}", checks.violations);
        if sigma == 0.0 {
            for it in &report.iterations {
                prop_assert!(it.slack <= it.loss + 1e-12);
                prop_assert!(it.gain > 0.0);
            }
        }
    }

    #[test]
    fn improvements_raise_the_perturbed_utility(seed in 0u64..10_000, sigma in 0.0f64..1.0, x in 0u32..25, y in 0u32..25) {
        let d = small_rectangles(seed % 20);
        let user = SimulatedUser::sample(&d, sigma, seed).unwrap();
        let point = Point::new(x, y);
        let mut shadow = user.clone();
        let mut user = user;
        let perturbed = shadow.perturbed_weights();
        let improved = user.query_improvement(&d, &point);
        if improved != point {
            prop_assert!(dot(&perturbed, &d.full_features(&improved)) > dot(&perturbed, &d.full_features(&point)));
        } else {
            prop_assert_eq!(d.min_change_improvement(&point, &perturbed), None);
        }
    }

    #[test]
    fn subspaces_have_the_requested_size(m in 1usize..200, fraction in 0.001f64..=1.0, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let view = sample_subspace(m, fraction, &mut rng).unwrap();
        prop_assert_eq!(view.len(), ((fraction * m as f64).ceil() as usize).min(m));
        let mut idx = view.indices().to_vec();
        idx.sort_unstable();
        idx.dedup();
        prop_assert_eq!(idx.len(), view.len());
        prop_assert!(idx.iter().all(|&i| i < m));
        prop_assert!(FeatureView::new(view.indices().to_vec(), m).is_ok());
    }
}

fn atom() -> impl Strategy<Value = String> {
    let plain = prop_oneof![
        Just("total_cost"),
        Just("total_travel"),
        Just("distinct_locations"),
        Just("regions_visited"),
        Just("moves"),
        Just("indoor_hours"),
        Just("outdoor_hours"),
    ]
    .prop_map(str::to_string);
    let indexed = prop_oneof![
        (0usize..10).prop_map(|i| format!("time_at_city({i})")),
        (0usize..10).prop_map(|i| format!("slots_at_city({i})")),
        (0usize..15).prop_map(|i| format!("activity_hours({i})")),
        (0usize..4).prop_map(|i| format!("slots_in_region({i})")),
    ];
    let op = prop_oneof![
        Just("<="),
        Just(">="),
        Just("<"),
        Just(">"),
        Just("="),
        Just("≤"),
        Just("≥"),
        Just("==")
    ];
    let compare = (prop_oneof![plain, indexed], op, -400i32..400)
        .prop_map(|(attr, op, v)| format!("{attr} {op} {}", v as f64 / 4.0));
    let season = prop_oneof![
        Just("winter"),
        Just("spring"),
        Just("summer"),
        Just("autumn")
    ]
    .prop_map(|s| format!("season = {s}"));
    prop_oneof![4 => compare, 1 => season]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn critique_names_compile_back_to_the_same_feature(
        atoms in prop::collection::vec(atom(), 1..5),
        joiner in prop_oneof![Just(" and "), Just(" && "), Just(" AND "), Just(" ∧ ")],
    ) {
        let d = TripDomain::generate(3, 4);
        let src = atoms.join(joiner);
        let feature = dsl::compile(&src, &d).unwrap();
        let again = dsl::compile(&feature.name(), &d).unwrap();
        prop_assert_eq!(&again, &feature);
        prop_assert_eq!(again.name(), feature.name());
    }

    #[test]
    fn dsl_never_panics(src in "\\PC{0,40}") {
        let d = TripDomain::generate(3, 4);
        let _ = dsl::compile(&src, &d);
    }
}

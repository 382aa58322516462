//! Brute-force oracles shared by the oracle tests and the acceptance run.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use coactive::consistency::ConsistencyMethod;
use coactive::domain::Domain;
use coactive::experiment::{DomainSpec, ExperimentConfig};
use coactive::learner::random_view;
use coactive::model::{dot, utility, FeatureView, WeightVector};
use coactive::rectangles::{Point, RectanglesDomain};
use coactive::trip::{Route, TripDomain};
use coactive::user::pick_critique;

/// Outcome of a batch of oracle comparisons.
#[derive(Debug, Default)]
pub struct Tally {
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.mismatches.len() < 20 {
            self.mismatches.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.checked > 0 && self.mismatches.is_empty()
    }
}

fn gaussian(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn rect_argmax(d: &RectanglesDomain, w: &[f64], view: &FeatureView) -> Point {
    let w = WeightVector::from_vec(w.to_vec());
    let mut best: Option<(f64, Point)> = None;
    for p in d.points() {
        let u = utility(d, &w, view, &p).unwrap();
        if best.is_none_or(|(b, _)| u > b) {
            best = Some((u, p));
        }
    }
    best.unwrap().1
}

/// Closest strictly better point, then higher utility, then smallest point.
pub fn rect_improvement(d: &RectanglesDomain, x: &Point, perturbed: &[f64]) -> Option<Point> {
    let current = dot(perturbed, &d.full_features(x));
    let mut best: Option<(f64, f64, Point)> = None;
    for p in d.points() {
        let u = dot(perturbed, &d.full_features(&p));
        if u <= current {
            continue;
        }
        let dist = d.distance(x, &p);
        let better = match best {
            None => true,
            Some((bd, bu, _)) => dist < bd || (dist == bd && u > bu),
        };
        if better {
            best = Some((dist, u, p));
        }
    }
    best.map(|b| b.2)
}

/// The rectangles instances the experiments run on, plus a few others.
pub fn rectangle_instances() -> Vec<RectanglesDomain> {
    let cfg = ExperimentConfig::new(
        DomainSpec::Rectangles {
            width: 100,
            height: 100,
            rectangles: 50,
            seed: None,
        },
        vec!["cl:1.0".parse().unwrap()],
    );
    let mut out = vec![RectanglesDomain::standard(cfg.domain_seed())];
    for seed in 0..3 {
        out.push(RectanglesDomain::generate(20, 20, 8, 100 + seed).unwrap());
        out.push(RectanglesDomain::generate(100, 100, 50, 200 + seed).unwrap());
    }
    out
}

pub fn check_rectangles(queries: usize, seed: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    for (n, d) in rectangle_instances().iter().enumerate() {
        let m = d.catalog().len();
        for q in 0..queries {
            let k = rng.gen_range(1..=m);
            let view = random_view(m, k, &mut rng).unwrap();
            let w = if q == 0 {
                vec![0.0; k]
            } else {
                gaussian(&mut rng, k)
            };
            let got = d.infer_argmax(&w, &view).unwrap().config;
            let want = rect_argmax(d, &w, &view);
            tally.record(got == want, || {
                format!("rectangles #{n} argmax: {got:?} vs {want:?}")
            });

            let (width, height) = (d.instance().width, d.instance().height);
            let x = Point::new(rng.gen_range(0..width), rng.gen_range(0..height));
            let perturbed = gaussian(&mut rng, m);
            let got = d.min_change_improvement(&x, &perturbed);
            let want = rect_improvement(d, &x, &perturbed);
            tally.record(got == want, || {
                format!("rectangles #{n} improvement of {x:?}: {got:?} vs {want:?}")
            });
        }
    }
    tally
}

const TIE: f64 = 1e-9;

/// Smallest route among those within `TIE` of the best utility.
pub fn trip_argmax(d: &TripDomain, w: &[f64], view: &FeatureView) -> Route {
    let w = WeightVector::from_vec(w.to_vec());
    let scored: Vec<(f64, Route)> = d
        .all_routes()
        .map(|r| (utility(d, &w, view, &r).unwrap(), r))
        .collect();
    let top = scored.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    scored.into_iter().find(|s| s.0 >= top - TIE).unwrap().1
}

pub fn hamming(a: &Route, b: &Route) -> usize {
    a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count()
}

pub fn trip_improvement(d: &TripDomain, x: &Route, perturbed: &[f64]) -> Option<Route> {
    let current = dot(perturbed, &d.full_features(x));
    let better: Vec<(usize, f64, Route)> = d
        .all_routes()
        .filter_map(|r| {
            let u = dot(perturbed, &d.full_features(&r));
            (u > current).then(|| (hamming(x, &r), u, r))
        })
        .collect();
    let radius = better.iter().map(|b| b.0).min()?;
    let top = better
        .iter()
        .filter(|b| b.0 == radius)
        .map(|b| b.1)
        .fold(f64::NEG_INFINITY, f64::max);
    better
        .into_iter()
        .find(|b| b.0 == radius && b.1 >= top - TIE)
        .map(|b| b.2)
}

/// Horizons 2 to 5 with the largest ones kept rare.
pub fn small_trip(index: u64) -> TripDomain {
    let horizon = match index % 10 {
        0 => 5,
        1..=3 => 2,
        4..=6 => 3,
        _ => 4,
    };
    TripDomain::generate(1000 + index, horizon)
}

pub fn check_trips(trips: u64, queries: usize, seed: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    for i in 0..trips {
        let d = small_trip(i);
        let m = d.catalog().len();
        let routes: Vec<Route> = d.all_routes().collect();
        for q in 0..queries {
            let view = match q {
                0 => d.base_view(),
                1 => FeatureView::full(m),
                _ => {
                    let k = rng.gen_range(1..=m);
                    random_view(m, k, &mut rng).unwrap()
                }
            };
            let w = gaussian(&mut rng, view.len());
            let got = d.infer_argmax(&w, &view).unwrap().config;
            let want = trip_argmax(&d, &w, &view);
            tally.record(got == want, || {
                format!("trip {i} argmax: {got:?} vs {want:?}")
            });

            let x = routes[rng.gen_range(0..routes.len())].clone();
            let perturbed = gaussian(&mut rng, m);
            let got = d.min_change_improvement(&x, &perturbed);
            let want = trip_improvement(&d, &x, &perturbed);
            tally.record(got == want, || {
                format!("trip {i} improvement of {x:?}: {got:?} vs {want:?}")
            });
        }
    }
    tally
}

/// Fourier-Motzkin elimination on `<w, d_j> >= 1` over the integers.
pub fn lp_feasible(deltas: &[Vec<i64>]) -> bool {
    let dims = deltas.iter().map(Vec::len).max().unwrap_or(0);
    let mut rows: Vec<(Vec<i64>, i64)> = deltas
        .iter()
        .map(|d| {
            let mut a = d.clone();
            a.resize(dims, 0);
            (a, 1)
        })
        .collect();
    for k in 0..dims {
        let (zero, rest): (Vec<_>, Vec<_>) = rows.into_iter().partition(|r| r.0[k] == 0);
        let (pos, neg): (Vec<_>, Vec<_>) = rest.into_iter().partition(|r| r.0[k] > 0);
        rows = zero;
        for (pa, pb) in &pos {
            for (na, nb) in &neg {
                let (sp, sn) = (-na[k], pa[k]);
                let a = pa.iter().zip(na).map(|(p, n)| sp * p + sn * n).collect();
                rows.push((a, sp * pb + sn * nb));
            }
        }
    }
    rows.iter().all(|(_, b)| *b <= 0)
}

/// Searches a grid of directions for a strictly separating `w`.
pub fn grid_feasible(deltas: &[Vec<i64>]) -> bool {
    const K: i64 = 16;
    let dims = deltas.iter().map(Vec::len).max().unwrap_or(0);
    let mut w = vec![-K; dims];
    loop {
        if deltas
            .iter()
            .all(|d| d.iter().zip(&w).map(|(a, b)| a * b).sum::<i64>() > 0)
        {
            return true;
        }
        let mut i = 0;
        loop {
            if i == dims {
                return false;
            }
            if w[i] < K {
                w[i] += 1;
                break;
            }
            w[i] = -K;
            i += 1;
        }
    }
}

pub fn random_dataset(rng: &mut impl Rng) -> Vec<Vec<i64>> {
    let dims = rng.gen_range(1..=3);
    let pairs = rng.gen_range(1..=6);
    (0..pairs)
        .map(|_| (0..dims).map(|_| rng.gen_range(-2..=2)).collect())
        .collect()
}

pub fn check_consistency(datasets: usize, seed: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    let methods = [ConsistencyMethod::default(), ConsistencyMethod::Simplex];
    for _ in 0..datasets {
        let data = random_dataset(&mut rng);
        let lp = lp_feasible(&data);
        let grid = grid_feasible(&data);
        tally.record(lp == grid, || {
            format!("oracles disagree on {data:?}: lp {lp}, grid {grid}")
        });
        let deltas: Vec<Vec<f64>> = data
            .iter()
            .map(|d| d.iter().map(|&v| v as f64).collect())
            .collect();
        for method in methods {
            let got = method.is_consistent(&deltas);
            tally.record(got == lp, || {
                format!("{method:?} says {got} on {data:?}, lp says {lp}")
            });
        }
    }
    tally
}

/// Pick frequencies of the critique oracle for contributions (3, 1).
pub fn critique_frequencies(draws: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let candidates = [(0, 3.0), (1, 1.0)];
    let first = (0..draws)
        .filter(|_| pick_critique(&candidates, &mut rng).unwrap() == 0)
        .count();
    let p = first as f64 / draws as f64;
    (p, 1.0 - p)
}

//! Touristic trip planning: a route is a fixed-length sequence of cities
//! (one per time slot, repeats allowed) scored through route attributes.
//!
//! The default catalog holds base features (normalized time at each city,
//! time spent on each activity) followed by acquirable indicator features
//! built from templated families; see [`TripDomain::default_features`].

pub mod attributes;
pub mod data;
mod search;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, DomainError, Inference};
use crate::model::{dot, FeatureCatalog, FeatureInfo, FeatureView};

pub use attributes::{Atom, Attribute, CmpOp, Conjunction, Season, Summary, TripFeature};
pub use data::{City, TripData, TripDataError, ACTIVITIES, NUM_ACTIVITIES};

/// One city id per time slot; ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Route(pub Vec<usize>);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum InferenceMode {
    /// Depth-first branch-and-bound; returns a true maximizer.
    Exact,
    /// Beam search over route prefixes; fast but inexact.
    Beam { width: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub inference: InferenceMode,
    /// Largest Hamming radius explored by the improvement search; `None`
    /// searches up to the horizon.
    #[serde(default)]
    pub max_improvement_radius: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            inference: InferenceMode::Exact,
            max_improvement_radius: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TripSpec {
    data: TripData,
    season: Season,
    #[serde(default)]
    search: SearchOptions,
    #[serde(default)]
    custom: Vec<TripFeature>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "TripSpec", into = "TripSpec")]
pub struct TripDomain {
    data: TripData,
    season: Season,
    search: SearchOptions,
    features: Vec<TripFeature>,
    num_base: usize,
    num_default: usize,
    catalog: FeatureCatalog,
    region_names: Vec<String>,
    region_of: Vec<usize>,
    travel: Vec<f64>,
    max_travel: f64,
    min_cost: f64,
    max_cost: f64,
    indoor: Vec<bool>,
    outdoor: Vec<bool>,
    offered_any: Vec<bool>,
}

impl PartialEq for TripDomain {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data
            && self.season == other.season
            && self.search == other.search
            && self.features == other.features
    }
}

impl TryFrom<TripSpec> for TripDomain {
    type Error = TripDataError;

    fn try_from(spec: TripSpec) -> Result<Self, Self::Error> {
        let mut domain = TripDomain::with_season(spec.data, spec.season)?;
        domain.search = spec.search;
        for f in spec.custom {
            domain.push_feature(f);
        }
        Ok(domain)
    }
}

impl From<TripDomain> for TripSpec {
    fn from(d: TripDomain) -> Self {
        let custom = d.features[d.num_default..].to_vec();
        TripSpec {
            data: d.data,
            season: d.season,
            search: d.search,
            custom,
        }
    }
}

impl TripDomain {
    pub fn new(data: TripData) -> Result<Self, TripDataError> {
        Self::with_season(data, Season::Winter)
    }

    pub fn generate(seed: u64, horizon: usize) -> Self {
        Self::new(TripData::generate_with_horizon(seed, horizon)).expect("generated data is valid")
    }

    pub fn with_season(data: TripData, season: Season) -> Result<Self, TripDataError> {
        data.validate()?;
        let n = data.cities.len();

        let region_names: Vec<String> = data
            .cities
            .iter()
            .map(|c| c.region.clone())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let region_of = data
            .cities
            .iter()
            .map(|c| region_names.iter().position(|r| *r == c.region).unwrap())
            .collect();

        let dist = |i: usize, j: usize| {
            let (a, b) = (&data.cities[i], &data.cities[j]);
            ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
        };
        let longest = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| dist(i, j))
            .fold(0.0, f64::max);
        let mut travel = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j && longest > 0.0 {
                    travel[i * n + j] = dist(i, j) / longest;
                }
            }
        }
        let max_travel = travel.iter().copied().fold(0.0, f64::max);
        let min_cost = data
            .cities
            .iter()
            .map(|c| c.cost)
            .fold(f64::INFINITY, f64::min);
        let max_cost = data.cities.iter().map(|c| c.cost).fold(0.0, f64::max);

        let has = |c: usize, indoor: bool| {
            ACTIVITIES
                .iter()
                .enumerate()
                .any(|(a, &(_, i))| i == indoor && data.offerings[c][a])
        };
        let indoor: Vec<bool> = (0..n).map(|c| has(c, true)).collect();
        let outdoor: Vec<bool> = (0..n).map(|c| has(c, false)).collect();
        let offered_any = (0..NUM_ACTIVITIES)
            .map(|a| data.offerings.iter().any(|r| r[a]))
            .collect();

        let mut domain = TripDomain {
            data,
            season,
            search: SearchOptions::default(),
            features: Vec::new(),
            num_base: 0,
            num_default: 0,
            catalog: FeatureCatalog::new(vec![FeatureInfo::indicator("placeholder")]).unwrap(),
            region_names,
            region_of,
            travel,
            max_travel,
            min_cost,
            max_cost,
            indoor,
            outdoor,
            offered_any,
        };
        let (base, acquirable) = domain.default_features();
        domain.num_base = base.len();
        domain.features = base.into_iter().chain(acquirable).collect();
        domain.num_default = domain.features.len();
        domain.catalog = FeatureCatalog::new(domain.features.iter().map(feature_info).collect())
            .expect("default catalog is non-empty");
        Ok(domain)
    }

    pub fn with_search(mut self, search: SearchOptions) -> Self {
        self.search = search;
        self
    }

    pub fn search_options(&self) -> SearchOptions {
        self.search
    }

    /// Base features and acquirable features of the default catalog.
    ///
    /// Base: `time_at_city(c) / horizon` for every city, then
    /// `activity_hours(a) / horizon` for every activity.
    ///
    /// Acquirable indicator families, in order:
    /// visits each city; stays at least two slots in each city; visits each
    /// region; does each activity (at least half a slot); does each activity
    /// for at least a third of the trip; total cost below eight evenly spaced
    /// thresholds; total travel below eight thresholds; at least k distinct
    /// locations (k = 2..=6); at least k regions (k = 2..=#regions); indoor
    /// and outdoor hours above a quarter, half and three quarters of the
    /// trip; at most k moves (k = 0..=4); and three conjunctions (winter with
    /// indoor activities, cheap trips covering three places, short-travel
    /// trips with outdoor time).
    ///
    /// With ten cities in four regions this yields 25 base and 92
    /// acquirable features.
    pub fn default_features(&self) -> (Vec<TripFeature>, Vec<TripFeature>) {
        use Attribute::*;
        let n = self.num_cities();
        let h = self.data.horizon as f64;
        let cmp = |attr, op, value| Atom::Compare { attr, op, value };
        let ind = |atoms: Vec<Atom>| TripFeature::indicator(atoms);

        let mut base = Vec::new();
        for c in 0..n {
            base.push(TripFeature::Linear {
                attr: TimeAtCity(c),
                scale: h,
            });
        }
        for a in 0..NUM_ACTIVITIES {
            base.push(TripFeature::Linear {
                attr: ActivityHours(a),
                scale: h,
            });
        }

        let cost_threshold = |k: usize| {
            (h * (self.min_cost + (self.max_cost - self.min_cost) * k as f64 / 9.0)).round()
        };
        let travel_threshold =
            |k: usize| ((h - 1.0).max(1.0) * k as f64 / 9.0 * 100.0).round() / 100.0;

        let mut acq = Vec::new();
        for c in 0..n {
            acq.push(ind(vec![cmp(SlotsAtCity(c), CmpOp::Ge, 1.0)]));
        }
        for c in 0..n {
            acq.push(ind(vec![cmp(SlotsAtCity(c), CmpOp::Ge, 2.0)]));
        }
        for r in 0..self.num_regions() {
            acq.push(ind(vec![cmp(SlotsInRegion(r), CmpOp::Ge, 1.0)]));
        }
        for a in 0..NUM_ACTIVITIES {
            acq.push(ind(vec![cmp(ActivityHours(a), CmpOp::Ge, 0.5)]));
        }
        for a in 0..NUM_ACTIVITIES {
            acq.push(ind(vec![cmp(
                ActivityHours(a),
                CmpOp::Ge,
                (h / 3.0 * 100.0).round() / 100.0,
            )]));
        }
        for k in 1..=8 {
            acq.push(ind(vec![cmp(TotalCost, CmpOp::Le, cost_threshold(k))]));
        }
        for k in 1..=8 {
            acq.push(ind(vec![cmp(TotalTravel, CmpOp::Le, travel_threshold(k))]));
        }
        for k in 2..=6 {
            acq.push(ind(vec![cmp(DistinctLocations, CmpOp::Ge, k as f64)]));
        }
        for k in 2..=self.num_regions() {
            acq.push(ind(vec![cmp(RegionsVisited, CmpOp::Ge, k as f64)]));
        }
        for attr in [IndoorHours, OutdoorHours] {
            for k in 1..=3 {
                acq.push(ind(vec![cmp(attr, CmpOp::Ge, h * k as f64 / 4.0)]));
            }
        }
        for k in 0..=4 {
            acq.push(ind(vec![cmp(Moves, CmpOp::Le, k as f64)]));
        }
        acq.push(ind(vec![
            Atom::Season {
                season: Season::Winter,
            },
            cmp(IndoorHours, CmpOp::Ge, 1.0),
        ]));
        acq.push(ind(vec![
            cmp(TotalCost, CmpOp::Le, cost_threshold(4)),
            cmp(DistinctLocations, CmpOp::Ge, 3.0),
        ]));
        acq.push(ind(vec![
            cmp(TotalTravel, CmpOp::Le, travel_threshold(2)),
            cmp(OutdoorHours, CmpOp::Ge, 2.0),
        ]));
        (base, acq)
    }

    pub fn data(&self) -> &TripData {
        &self.data
    }

    pub fn horizon(&self) -> usize {
        self.data.horizon
    }

    pub fn season(&self) -> Season {
        self.season
    }

    pub fn cities(&self) -> &[City] {
        &self.data.cities
    }

    pub fn num_cities(&self) -> usize {
        self.data.cities.len()
    }

    pub fn num_activities(&self) -> usize {
        NUM_ACTIVITIES
    }

    pub fn num_regions(&self) -> usize {
        self.region_names.len()
    }

    pub fn region_names(&self) -> &[String] {
        &self.region_names
    }

    pub fn region_of(&self, city: usize) -> usize {
        self.region_of[city]
    }

    pub fn travel_time(&self, a: usize, b: usize) -> f64 {
        self.travel[a * self.num_cities() + b]
    }

    pub fn max_travel(&self) -> f64 {
        self.max_travel
    }

    pub fn min_cost(&self) -> f64 {
        self.min_cost
    }

    pub fn max_cost(&self) -> f64 {
        self.max_cost
    }

    pub fn offers(&self, city: usize, activity: usize) -> bool {
        self.data.offerings[city][activity]
    }

    pub fn has_indoor(&self, city: usize) -> bool {
        self.indoor[city]
    }

    pub fn has_outdoor(&self, city: usize) -> bool {
        self.outdoor[city]
    }

    pub fn any_indoor(&self) -> bool {
        self.indoor.iter().any(|&b| b)
    }

    pub fn any_outdoor(&self) -> bool {
        self.outdoor.iter().any(|&b| b)
    }

    pub fn activity_offered_anywhere(&self, activity: usize) -> bool {
        self.offered_any[activity]
    }

    pub fn catalog_len(&self) -> usize {
        self.catalog.len()
    }

    pub fn features(&self) -> &[TripFeature] {
        &self.features
    }

    pub fn num_base_features(&self) -> usize {
        self.num_base
    }

    pub fn num_default_features(&self) -> usize {
        self.num_default
    }

    /// The base features, the initial view of a critiquing run.
    pub fn base_view(&self) -> FeatureView {
        FeatureView::new((0..self.num_base).collect(), self.catalog.len()).unwrap()
    }

    /// Position of a catalog feature with this exact definition, if any.
    pub fn find_feature(&self, feature: &TripFeature) -> Option<usize> {
        self.features.iter().position(|f| f == feature)
    }

    /// Appends a feature to the catalog and returns its index.
    pub fn push_feature(&mut self, feature: TripFeature) -> usize {
        let index = self
            .catalog
            .push(feature_info(&feature))
            .expect("trip feature ranges are valid");
        self.features.push(feature);
        index
    }

    pub fn summary(&self, route: &Route) -> Summary {
        Summary::of_route(self, &route.0)
    }

    /// Routes enumerated in lexicographic order; only sensible for tiny
    /// instances.
    pub fn all_routes(&self) -> impl Iterator<Item = Route> + '_ {
        let n = self.num_cities();
        let h = self.horizon();
        let total = n.checked_pow(h as u32).expect("route space overflows");
        (0..total).map(move |mut k| {
            let mut route = vec![0; h];
            for slot in (0..h).rev() {
                route[slot] = k % n;
                k /= n;
            }
            Route(route)
        })
    }

    /// Per-slot description used by the session API.
    pub fn describe(&self, route: &Route) -> Vec<BTreeMap<&'static str, serde_json::Value>> {
        let mut prev: Option<usize> = None;
        route
            .0
            .iter()
            .map(|&c| {
                let city = &self.data.cities[c];
                let travel = prev
                    .filter(|&p| p != c)
                    .map_or(0.0, |p| self.travel_time(p, c));
                prev = Some(c);
                let acts: Vec<&str> = (0..NUM_ACTIVITIES)
                    .filter(|&a| self.offers(c, a))
                    .map(|a| ACTIVITIES[a].0)
                    .collect();
                let mut m = BTreeMap::new();
                m.insert("city", serde_json::json!(c));
                m.insert("name", serde_json::json!(city.name));
                m.insert("region", serde_json::json!(city.region));
                m.insert("cost", serde_json::json!(city.cost));
                m.insert("travel", serde_json::json!(travel));
                m.insert("activities", serde_json::json!(acts));
                m
            })
            .collect()
    }

    pub(crate) fn value_with(&self, weights: &[f64], features: &[usize], s: &Summary) -> f64 {
        let values: Vec<f64> = features
            .iter()
            .map(|&i| self.features[i].value(self, s))
            .collect();
        dot(weights, &values)
    }
}

fn feature_info(f: &TripFeature) -> FeatureInfo {
    match f {
        TripFeature::Linear { .. } => FeatureInfo::ranged(f.name(), 0.0, 1.0),
        TripFeature::Indicator { .. } => FeatureInfo::indicator(f.name()),
    }
}

impl Domain for TripDomain {
    type Config = Route;

    fn catalog(&self) -> &FeatureCatalog {
        &self.catalog
    }

    fn check_feasible(&self, x: &Route) -> Result<(), DomainError> {
        let mut problems = Vec::new();
        if x.0.len() != self.horizon() {
            problems.push(format!(
                "route has {} slots, expected {}",
                x.0.len(),
                self.horizon()
            ));
        }
        for (slot, &c) in x.0.iter().enumerate() {
            if c >= self.num_cities() {
                problems.push(format!("slot {slot}: unknown city {c}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(DomainError::Infeasible(problems))
        }
    }

    fn full_features(&self, x: &Route) -> Vec<f64> {
        let s = self.summary(x);
        self.features.iter().map(|f| f.value(self, &s)).collect()
    }

    fn view_features(&self, view: &FeatureView, x: &Route) -> Vec<f64> {
        let s = self.summary(x);
        view.indices()
            .iter()
            .map(|&i| self.features[i].value(self, &s))
            .collect()
    }

    fn infer_argmax(&self, w: &[f64], view: &FeatureView) -> Result<Inference<Route>, DomainError> {
        if view.is_empty() {
            return Err(DomainError::EmptyView);
        }
        let search = search::Prepared::new(self, w, view);
        match self.search.inference {
            InferenceMode::Exact => search.branch_and_bound(),
            InferenceMode::Beam { width } => search.beam(width.max(1)),
        }
        .ok_or(DomainError::EmptyFeasibleSet)
    }

    fn distance(&self, a: &Route, b: &Route) -> f64 {
        let differing = a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count();
        (differing + a.0.len().abs_diff(b.0.len())) as f64
    }

    fn min_change_improvement(&self, x: &Route, perturbed: &[f64]) -> Option<Route> {
        search::min_change_improvement(self, x, perturbed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_catalog_counts() {
        let d = TripDomain::generate(3, 10);
        assert_eq!(d.num_base_features(), 25);
        assert_eq!(d.catalog().len(), 117);
        assert_eq!(d.catalog().len() - d.num_base_features(), 92);
        assert!((d.catalog().norm_bound() - 117f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn travel_time_is_symmetric_with_zero_diagonal() {
        let d = TripDomain::generate(5, 6);
        for i in 0..d.num_cities() {
            assert_eq!(d.travel_time(i, i), 0.0);
            for j in 0..d.num_cities() {
                assert_eq!(d.travel_time(i, j), d.travel_time(j, i));
                assert!(d.travel_time(i, j) >= 0.0 && d.travel_time(i, j) <= 1.0);
            }
        }
    }

    #[test]
    fn hamming_distance() {
        let d = TripDomain::generate(5, 4);
        let a = Route(vec![0, 1, 2, 3]);
        assert_eq!(d.distance(&a, &a), 0.0);
        assert_eq!(d.distance(&a, &Route(vec![0, 1, 5, 3])), 1.0);
    }

    #[test]
    fn features_stay_in_declared_ranges() {
        let d = TripDomain::generate(11, 5);
        let r = d.catalog().norm_bound();
        for k in [0usize, 7, 133, 4242, 99_999] {
            let route = d.all_routes().nth(k).unwrap();
            let f = d.full_features(&route);
            for (v, info) in f.iter().zip(d.catalog().features()) {
                assert!(
                    *v >= info.min - 1e-12 && *v <= info.max + 1e-12,
                    "{} = {}",
                    info.name,
                    v
                );
            }
            assert!(dot(&f, &f).sqrt() <= r + 1e-9);
        }
    }

    #[test]
    fn infeasible_routes_are_listed() {
        let d = TripDomain::generate(5, 4);
        match d.check_feasible(&Route(vec![0, 99, 1])) {
            Err(DomainError::Infeasible(p)) => assert_eq!(p.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_round_trip_keeps_custom_features() {
        let mut d = TripDomain::generate(5, 4);
        d.push_feature(TripFeature::indicator(vec![Atom::Compare {
            attr: Attribute::TotalCost,
            op: CmpOp::Le,
            value: 500.0,
        }]));
        let json = serde_json::to_string(&d).unwrap();
        let back: TripDomain = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.catalog().len(), d.catalog().len());
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }
}

//! Exact and approximate search over routes.

use std::cmp::Ordering;

use super::attributes::{Atom, Attribute, CmpOp, Conjunction, Summary, TripFeature};
use super::{InferenceMode, Route, TripDomain};
use crate::domain::Inference;
use crate::model::FeatureView;

// Slack on pruning so that float noise in the bound never discards a
// subtree holding a tie for the incumbent.
const PRUNE_SLACK: f64 = 1e-7;

/// Weights and view compiled into bound-friendly terms.
pub(crate) struct Prepared<'a> {
    domain: &'a TripDomain,
    weights: Vec<f64>,
    indices: Vec<usize>,
    slot_terms: Vec<(f64, Attribute, f64)>,
    other_linear: Vec<(f64, Attribute, f64)>,
    indicators: Vec<Indicator<'a>>,
    // max(0, linear gain of one full slot at city c)
    slot_gain: Vec<f64>,
    max_slot_gain: f64,
}

struct Indicator<'a> {
    weight: f64,
    expr: &'a Conjunction,
    kind: Kind,
}

/// How an undecided indicator can reach the outcome its weight prefers.
enum Kind {
    /// Some slot must land in one of these cities.
    Goal(Vec<usize>),
    /// Some slot must grow the attribute, and any city might.
    AnyGoal,
    /// The attribute must not grow past the threshold.
    Avoid(Attribute, CmpOp, f64),
    Free,
}

impl<'a> Prepared<'a> {
    pub(crate) fn new(domain: &'a TripDomain, w: &[f64], view: &FeatureView) -> Self {
        let len = w.len().min(view.len());
        let weights = w[..len].to_vec();
        let indices = view.indices()[..len].to_vec();
        let mut slot_terms = Vec::new();
        let mut other_linear = Vec::new();
        let mut indicators = Vec::new();
        for (&wi, &i) in weights.iter().zip(&indices) {
            if wi == 0.0 {
                continue;
            }
            match &domain.features()[i] {
                TripFeature::Linear { attr, scale } => match attr {
                    Attribute::TimeAtCity(_) | Attribute::ActivityHours(_) => {
                        slot_terms.push((wi, *attr, *scale))
                    }
                    _ => other_linear.push((wi, *attr, *scale)),
                },
                TripFeature::Indicator { expr } => indicators.push(Indicator {
                    weight: wi,
                    expr,
                    kind: classify(domain, expr, wi),
                }),
            }
        }
        // A slot at city c adds avail * gain(c) to the per-slot terms, with
        // avail in [0, 1].
        let slot_gain: Vec<f64> = (0..domain.num_cities())
            .map(|c| {
                slot_terms
                    .iter()
                    .map(|&(wi, attr, scale)| match attr {
                        Attribute::TimeAtCity(k) if k == c => wi / scale,
                        Attribute::ActivityHours(a) if domain.offers(c, a) => wi / scale,
                        _ => 0.0,
                    })
                    .sum::<f64>()
                    .max(0.0)
            })
            .collect();
        let max_slot_gain = slot_gain.iter().copied().fold(0.0, f64::max);
        Prepared {
            domain,
            weights,
            indices,
            slot_terms,
            other_linear,
            indicators,
            slot_gain,
            max_slot_gain,
        }
    }

    fn value(&self, s: &Summary) -> f64 {
        self.domain.value_with(&self.weights, &self.indices, s)
    }

    /// Upper bound on the value of any completion of the partial route.
    ///
    /// Undecided indicators that need an attribute to grow are paid for by
    /// the remaining slots: each slot is credited with everything its city
    /// could advance. Indicators that need an attribute to stay put are
    /// charged to every city whose single slot would already break them.
    /// Using one city for every remaining slot dominates mixing cities in
    /// this relaxation, so the best single city gives the bound.
    pub(crate) fn bound(&self, s: &Summary, remaining: usize) -> f64 {
        let d = self.domain;
        let mut b = 0.0;
        for &(w, attr, scale) in &self.slot_terms {
            b += w * s.value(attr) / scale;
        }
        for &(w, attr, scale) in &self.other_linear {
            let (lo, hi) = s.interval(d, attr, remaining);
            b += if w > 0.0 {
                w * hi / scale
            } else {
                w * lo / scale
            };
        }
        let r = remaining as f64;
        let n = self.slot_gain.len();
        let mut gain: Vec<f64> = self.slot_gain.iter().map(|g| r * g).collect();
        let mut loss = vec![0.0; n];
        let mut goal_total = 0.0;
        let mut any_total = 0.0;
        for ind in &self.indicators {
            let w = ind.weight;
            let Some(known) = ind.expr.decide(d, s, remaining) else {
                let a = w.abs();
                b -= a;
                match &ind.kind {
                    Kind::Goal(cities) => {
                        goal_total += 2.0 * a;
                        for &c in cities {
                            gain[c] += 2.0 * r * a;
                        }
                    }
                    Kind::AnyGoal => any_total += 2.0 * a,
                    Kind::Avoid(attr, op, value) => {
                        b += 2.0 * a;
                        let (lo, _) = s.interval(d, *attr, remaining);
                        for (c, l) in loss.iter_mut().enumerate() {
                            let grown = lo + certain_growth(d, s, *attr, c);
                            if op.holds(grown, *value) != (w > 0.0) {
                                *l += 2.0 * a;
                            }
                        }
                    }
                    Kind::Free => b += 2.0 * a,
                }
                continue;
            };
            b += if known { w } else { -w };
        }
        if remaining == 0 {
            return b;
        }
        let single = (0..n)
            .map(|c| gain[c] - loss[c])
            .fold(f64::NEG_INFINITY, f64::max);
        let min_loss = loss.iter().copied().fold(f64::INFINITY, f64::min);
        let pooled = r * self.max_slot_gain + goal_total - min_loss;
        b + any_total + single.min(pooled)
    }

    pub(crate) fn branch_and_bound(&self) -> Option<Inference<Route>> {
        let h = self.domain.horizon();
        if self.domain.num_cities() == 0 {
            return None;
        }
        let mut best: Option<(f64, Vec<usize>)> = None;
        let mut route = Vec::with_capacity(h);
        self.dfs(&mut route, &Summary::new(self.domain), &mut best);
        best.map(|(_, r)| Inference {
            config: Route(r),
            exact: true,
        })
    }

    fn offer(best: &mut Option<(f64, Vec<usize>)>, value: f64, route: &[usize]) {
        let better = match best {
            None => true,
            Some((v, r)) => value > *v || (value == *v && route < r.as_slice()),
        };
        if better {
            *best = Some((value, route.to_vec()));
        }
    }

    fn dfs(&self, route: &mut Vec<usize>, s: &Summary, best: &mut Option<(f64, Vec<usize>)>) {
        let h = self.domain.horizon();
        let n = self.domain.num_cities();
        let remaining = h - route.len() - 1;
        if remaining == 0 {
            for c in 0..n {
                let mut leaf = s.clone();
                leaf.push(self.domain, c);
                route.push(c);
                Self::offer(best, self.value(&leaf), route);
                route.pop();
            }
            return;
        }
        let mut children: Vec<(f64, usize, Summary)> = (0..n)
            .map(|c| {
                let mut child = s.clone();
                child.push(self.domain, c);
                (self.bound(&child, remaining), c, child)
            })
            .collect();
        children.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap_or(Ordering::Equal)
                .then(a.1.cmp(&b.1))
        });
        for (b, c, child) in children {
            if let Some((incumbent, _)) = best {
                if b < *incumbent - PRUNE_SLACK {
                    break;
                }
            }
            route.push(c);
            self.dfs(route, &child, best);
            route.pop();
        }
    }

    pub(crate) fn beam(&self, width: usize) -> Option<Inference<Route>> {
        let h = self.domain.horizon();
        let n = self.domain.num_cities();
        let mut frontier: Vec<(Vec<usize>, Summary)> =
            vec![(Vec::new(), Summary::new(self.domain))];
        for depth in 0..h {
            let remaining = h - depth - 1;
            let mut next: Vec<(f64, Vec<usize>, Summary)> = Vec::with_capacity(frontier.len() * n);
            for (prefix, s) in &frontier {
                for c in 0..n {
                    let mut child = s.clone();
                    child.push(self.domain, c);
                    let mut r = prefix.clone();
                    r.push(c);
                    let score = if remaining == 0 {
                        self.value(&child)
                    } else {
                        self.bound(&child, remaining)
                    };
                    next.push((score, r, child));
                }
            }
            next.sort_by(|a, b| {
                b.0.partial_cmp(&a.0)
                    .unwrap_or(Ordering::Equal)
                    .then_with(|| a.1.cmp(&b.1))
            });
            next.truncate(width);
            frontier = next.into_iter().map(|(_, r, s)| (r, s)).collect();
        }
        frontier.into_iter().next().map(|(r, _)| Inference {
            config: Route(r),
            exact: false,
        })
    }
}

/// Classifies a single-atom indicator by what its preferred outcome needs.
/// Every attribute is non-decreasing as slots are appended.
fn classify(domain: &TripDomain, expr: &Conjunction, w: f64) -> Kind {
    let [Atom::Compare { attr, op, value }] = expr.0.as_slice() else {
        return Kind::Free;
    };
    let wants_growth = match op {
        CmpOp::Ge | CmpOp::Gt => w > 0.0,
        CmpOp::Le | CmpOp::Lt => w < 0.0,
        CmpOp::Eq => return Kind::Free,
    };
    if !wants_growth {
        return Kind::Avoid(*attr, *op, *value);
    }
    let n = domain.num_cities();
    let cities: Vec<usize> = match *attr {
        Attribute::SlotsAtCity(c) | Attribute::TimeAtCity(c) => vec![c],
        Attribute::SlotsInRegion(r) => (0..n).filter(|&c| domain.region_of(c) == r).collect(),
        Attribute::ActivityHours(a) => (0..n).filter(|&c| domain.offers(c, a)).collect(),
        Attribute::IndoorHours => (0..n).filter(|&c| domain.has_indoor(c)).collect(),
        Attribute::OutdoorHours => (0..n).filter(|&c| domain.has_outdoor(c)).collect(),
        _ => return Kind::AnyGoal,
    };
    if cities.len() == n {
        Kind::AnyGoal
    } else {
        Kind::Goal(cities)
    }
}

/// Growth of `attr` beyond the lower end of its interval that one of the
/// remaining slots placed at city `c` guarantees.
fn certain_growth(domain: &TripDomain, s: &Summary, attr: Attribute, c: usize) -> f64 {
    match attr {
        Attribute::TotalCost => domain.cities()[c].cost - domain.min_cost(),
        Attribute::SlotsAtCity(k) if k == c => 1.0,
        Attribute::SlotsInRegion(r) if domain.region_of(c) == r => 1.0,
        Attribute::DistinctLocations if s.slots[c] == 0 => 1.0,
        Attribute::RegionsVisited if s.region_slots[domain.region_of(c)] == 0 => 1.0,
        _ => 0.0,
    }
}

/// Value of a route under full-catalog weights.
pub(crate) fn full_value(
    domain: &TripDomain,
    weights: &[f64],
    route: &[usize],
    all: &[usize],
) -> f64 {
    domain.value_with(weights, all, &Summary::of_route(domain, route))
}

/// Iterative deepening over the Hamming radius around `x`.
pub(crate) fn min_change_improvement(
    domain: &TripDomain,
    x: &Route,
    perturbed: &[f64],
) -> Option<Route> {
    let h = domain.horizon();
    let n = domain.num_cities();
    let all: Vec<usize> = (0..domain.catalog_len()).collect();
    let current = full_value(domain, perturbed, &x.0, &all);
    let exact = matches!(domain.search_options().inference, InferenceMode::Exact);
    let max_radius = domain
        .search_options()
        .max_improvement_radius
        .unwrap_or(h)
        .min(h);

    for radius in 1..=max_radius {
        if radius == 3 && exact {
            // Far radii are expensive; stop early if x is already optimal.
            let view = FeatureView::full(all.len());
            let top = Prepared::new(domain, perturbed, &view).branch_and_bound()?;
            if full_value(domain, perturbed, &top.config.0, &all) <= current {
                return None;
            }
        }
        let mut best: Option<(f64, Vec<usize>)> = None;
        let mut positions = Vec::with_capacity(radius);
        let mut route = x.0.clone();
        visit_radius(n, &x.0, radius, 0, &mut positions, &mut route, &mut |r| {
            let v = full_value(domain, perturbed, r, &all);
            if v > current {
                let better = match &best {
                    None => true,
                    Some((bv, br)) => v > *bv || (v == *bv && r < br.as_slice()),
                };
                if better {
                    best = Some((v, r.to_vec()));
                }
            }
        });
        if let Some((_, r)) = best {
            return Some(Route(r));
        }
    }
    None
}

/// Calls `f` on every route differing from `base` in exactly `radius` slots.
fn visit_radius(
    n: usize,
    base: &[usize],
    radius: usize,
    start: usize,
    positions: &mut Vec<usize>,
    route: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if positions.len() == radius {
        assign(n, base, positions, 0, route, f);
        return;
    }
    let needed = radius - positions.len();
    for p in start..=base.len().saturating_sub(needed) {
        if p >= base.len() {
            break;
        }
        positions.push(p);
        visit_radius(n, base, radius, p + 1, positions, route, f);
        positions.pop();
    }
}

fn assign(
    n: usize,
    base: &[usize],
    positions: &[usize],
    k: usize,
    route: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if k == positions.len() {
        f(route);
        return;
    }
    let p = positions[k];
    for c in (0..n).filter(|&c| c != base[p]) {
        route[p] = c;
        assign(n, base, positions, k + 1, route, f);
    }
    route[p] = base[p];
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_enumeration_counts() {
        let base = vec![0, 1, 2, 3];
        for (radius, expected) in [(1, 4 * 4), (2, 6 * 16), (4, 256)] {
            let mut count = 0;
            let mut route = base.clone();
            visit_radius(5, &base, radius, 0, &mut Vec::new(), &mut route, &mut |r| {
                assert_eq!(r.iter().zip(&base).filter(|(a, b)| a != b).count(), radius);
                count += 1;
            });
            assert_eq!(count, expected);
        }
    }
}

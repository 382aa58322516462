//! Route attributes and the features built from them.
//!
//! Every trip feature, whether part of the default catalog or compiled from
//! a user critique, is a function of a [`Summary`] of the route. Summaries
//! are accumulated slot by slot, which lets branch-and-bound bound partial
//! routes with per-attribute intervals.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::TripDomain;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Season {
    Winter,
    Spring,
    Summer,
    Autumn,
}

impl Season {
    pub fn parse(s: &str) -> Option<Season> {
        match s {
            "winter" => Some(Season::Winter),
            "spring" => Some(Season::Spring),
            "summer" => Some(Season::Summer),
            "autumn" => Some(Season::Autumn),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Season::Winter => "winter",
            Season::Spring => "spring",
            Season::Summer => "summer",
            Season::Autumn => "autumn",
        }
    }
}

/// Numeric route attributes; arguments are city, activity or region ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attribute {
    TotalCost,
    TotalTravel,
    DistinctLocations,
    RegionsVisited,
    Moves,
    IndoorHours,
    OutdoorHours,
    TimeAtCity(usize),
    SlotsAtCity(usize),
    ActivityHours(usize),
    SlotsInRegion(usize),
}

impl Attribute {
    pub fn name(&self) -> &'static str {
        match self {
            Attribute::TotalCost => "total_cost",
            Attribute::TotalTravel => "total_travel",
            Attribute::DistinctLocations => "distinct_locations",
            Attribute::RegionsVisited => "regions_visited",
            Attribute::Moves => "moves",
            Attribute::IndoorHours => "indoor_hours",
            Attribute::OutdoorHours => "outdoor_hours",
            Attribute::TimeAtCity(_) => "time_at_city",
            Attribute::SlotsAtCity(_) => "slots_at_city",
            Attribute::ActivityHours(_) => "activity_hours",
            Attribute::SlotsInRegion(_) => "slots_in_region",
        }
    }

    pub fn argument(&self) -> Option<usize> {
        match *self {
            Attribute::TimeAtCity(i)
            | Attribute::SlotsAtCity(i)
            | Attribute::ActivityHours(i)
            | Attribute::SlotsInRegion(i) => Some(i),
            _ => None,
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.argument() {
            Some(i) => write!(f, "{}({})", self.name(), i),
            None => f.write_str(self.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "=")]
    Eq,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Eq => "=",
        }
    }

    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CmpOp::Le => lhs <= rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Eq => lhs == rhs,
        }
    }

    /// Truth of `[lo, hi] op rhs` when the value is only known to lie in
    /// the interval; `None` when both outcomes remain possible.
    pub fn decide(self, lo: f64, hi: f64, rhs: f64) -> Option<bool> {
        let (always, never) = match self {
            CmpOp::Le => (hi <= rhs, lo > rhs),
            CmpOp::Ge => (lo >= rhs, hi < rhs),
            CmpOp::Lt => (hi < rhs, lo >= rhs),
            CmpOp::Gt => (lo > rhs, hi <= rhs),
            CmpOp::Eq => (lo == rhs && hi == rhs, rhs < lo || rhs > hi),
        };
        if always {
            Some(true)
        } else if never {
            Some(false)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Atom {
    Compare {
        attr: Attribute,
        op: CmpOp,
        value: f64,
    },
    Season {
        season: Season,
    },
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Compare { attr, op, value } => write!(f, "{} {} {}", attr, op.symbol(), value),
            Atom::Season { season } => write!(f, "season = {}", season.name()),
        }
    }
}

/// A conjunction of atoms, evaluated as a +1/-1 indicator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Conjunction(pub Vec<Atom>);

impl fmt::Display for Conjunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, atom) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" and ")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

/// One entry of the trip feature catalog.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TripFeature {
    /// `attr / scale`, used for the base time features.
    Linear {
        attr: Attribute,
        scale: f64,
    },
    Indicator {
        expr: Conjunction,
    },
}

impl TripFeature {
    pub fn indicator(atoms: Vec<Atom>) -> Self {
        TripFeature::Indicator {
            expr: Conjunction(atoms),
        }
    }

    pub fn name(&self) -> String {
        match self {
            TripFeature::Linear { attr, .. } => attr.to_string(),
            TripFeature::Indicator { expr } => expr.to_string(),
        }
    }
}

/// Aggregates of a (partial) route, updated one slot at a time.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub len: usize,
    pub last: Option<usize>,
    pub slots: Vec<u32>,
    pub city_time: Vec<f64>,
    pub activity_time: Vec<f64>,
    pub region_slots: Vec<u32>,
    pub total_cost: f64,
    pub total_travel: f64,
    pub distinct: u32,
    pub regions: u32,
    pub moves: u32,
    pub indoor: f64,
    pub outdoor: f64,
}

impl Summary {
    pub fn new(domain: &TripDomain) -> Self {
        Summary {
            len: 0,
            last: None,
            slots: vec![0; domain.num_cities()],
            city_time: vec![0.0; domain.num_cities()],
            activity_time: vec![0.0; domain.num_activities()],
            region_slots: vec![0; domain.num_regions()],
            total_cost: 0.0,
            total_travel: 0.0,
            distinct: 0,
            regions: 0,
            moves: 0,
            indoor: 0.0,
            outdoor: 0.0,
        }
    }

    pub fn of_route(domain: &TripDomain, route: &[usize]) -> Self {
        let mut s = Summary::new(domain);
        for &c in route {
            s.push(domain, c);
        }
        s
    }

    /// Appends one slot spent at `city`. Travelling from the previous
    /// city consumes part of the slot.
    pub fn push(&mut self, domain: &TripDomain, city: usize) {
        let travel = match self.last {
            Some(prev) if prev != city => {
                self.moves += 1;
                domain.travel_time(prev, city)
            }
            _ => 0.0,
        };
        let avail = 1.0 - travel;
        if self.slots[city] == 0 {
            self.distinct += 1;
        }
        self.slots[city] += 1;
        self.city_time[city] += avail;
        let region = domain.region_of(city);
        if self.region_slots[region] == 0 {
            self.regions += 1;
        }
        self.region_slots[region] += 1;
        for (a, t) in self.activity_time.iter_mut().enumerate() {
            if domain.offers(city, a) {
                *t += avail;
            }
        }
        if domain.has_indoor(city) {
            self.indoor += avail;
        }
        if domain.has_outdoor(city) {
            self.outdoor += avail;
        }
        self.total_cost += domain.cities()[city].cost;
        self.total_travel += travel;
        self.len += 1;
        self.last = Some(city);
    }

    pub fn value(&self, attr: Attribute) -> f64 {
        match attr {
            Attribute::TotalCost => self.total_cost,
            Attribute::TotalTravel => self.total_travel,
            Attribute::DistinctLocations => self.distinct as f64,
            Attribute::RegionsVisited => self.regions as f64,
            Attribute::Moves => self.moves as f64,
            Attribute::IndoorHours => self.indoor,
            Attribute::OutdoorHours => self.outdoor,
            Attribute::TimeAtCity(c) => self.city_time[c],
            Attribute::SlotsAtCity(c) => self.slots[c] as f64,
            Attribute::ActivityHours(a) => self.activity_time[a],
            Attribute::SlotsInRegion(r) => self.region_slots[r] as f64,
        }
    }

    /// Interval containing the attribute's final value once `remaining`
    /// more slots are appended. Upper ends are accumulated one slot at a
    /// time so they dominate any actual float accumulation.
    pub fn interval(&self, domain: &TripDomain, attr: Attribute, remaining: usize) -> (f64, f64) {
        let v = self.value(attr);
        let step = |start: f64, inc: f64| (0..remaining).fold(start, |acc, _| acc + inc);
        match attr {
            Attribute::TotalCost => (step(v, domain.min_cost()), step(v, domain.max_cost())),
            Attribute::TotalTravel => (v, step(v, domain.max_travel())),
            Attribute::DistinctLocations => (
                v,
                (self.distinct as usize + remaining).min(domain.num_cities()) as f64,
            ),
            Attribute::RegionsVisited => (
                v,
                (self.regions as usize + remaining).min(domain.num_regions()) as f64,
            ),
            Attribute::Moves | Attribute::SlotsAtCity(_) | Attribute::SlotsInRegion(_) => {
                (v, v + remaining as f64)
            }
            Attribute::TimeAtCity(_) => (v, step(v, 1.0)),
            Attribute::IndoorHours => (v, if domain.any_indoor() { step(v, 1.0) } else { v }),
            Attribute::OutdoorHours => (
                v,
                if domain.any_outdoor() {
                    step(v, 1.0)
                } else {
                    v
                },
            ),
            Attribute::ActivityHours(a) => (
                v,
                if domain.activity_offered_anywhere(a) {
                    step(v, 1.0)
                } else {
                    v
                },
            ),
        }
    }
}

impl Conjunction {
    pub fn holds(&self, domain: &TripDomain, s: &Summary) -> bool {
        self.0.iter().all(|atom| match atom {
            Atom::Compare { attr, op, value } => op.holds(s.value(*attr), *value),
            Atom::Season { season } => domain.season() == *season,
        })
    }

    /// Whether the indicator is already decided for every completion of
    /// the partial route.
    pub fn decide(&self, domain: &TripDomain, s: &Summary, remaining: usize) -> Option<bool> {
        let mut all_true = true;
        for atom in &self.0 {
            let d = match atom {
                Atom::Compare { attr, op, value } => {
                    let (lo, hi) = s.interval(domain, *attr, remaining);
                    op.decide(lo, hi, *value)
                }
                Atom::Season { season } => Some(domain.season() == *season),
            };
            match d {
                Some(false) => return Some(false),
                Some(true) => {}
                None => all_true = false,
            }
        }
        if all_true {
            Some(true)
        } else {
            None
        }
    }
}

impl TripFeature {
    pub fn value(&self, domain: &TripDomain, s: &Summary) -> f64 {
        match self {
            TripFeature::Linear { attr, scale } => s.value(*attr) / scale,
            TripFeature::Indicator { expr } => {
                if expr.holds(domain, s) {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

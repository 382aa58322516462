//! Synthetic benchmark: integer points in a bounding box scored by
//! rectangle membership indicators.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Domain, DomainError, Inference};
use crate::model::{FeatureCatalog, FeatureInfo, FeatureView};

pub const DEFAULT_SIDE: u32 = 100;
pub const DEFAULT_RECTANGLES: usize = 50;

/// A point in the box; ordered by `x`, then `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub fn new(x: u32, y: u32) -> Self {
        Point { x, y }
    }
}

/// Axis-aligned rectangle with inclusive integer bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

impl Rect {
    pub fn contains(&self, p: Point) -> bool {
        (self.x0..=self.x1).contains(&p.x) && (self.y0..=self.y1).contains(&p.y)
    }
}

/// Serialized form of a rectangles instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectanglesInstance {
    pub width: u32,
    pub height: u32,
    pub rectangles: Vec<Rect>,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RectanglesInstance", into = "RectanglesInstance")]
pub struct RectanglesDomain {
    instance: RectanglesInstance,
    catalog: FeatureCatalog,
    // Points that share a membership mask share every feature value, so
    // utilities are computed once per distinct mask ("cell").
    cells: Vec<u64>,
    cell_of: Vec<u32>,
    first_point: Vec<u32>,
}

impl RectanglesDomain {
    /// Samples `count` rectangles inside a `width x height` box: each side
    /// length is uniform over `1..=side`, then the offset is uniform over
    /// the placements that keep the rectangle inside the box.
    pub fn generate(width: u32, height: u32, count: usize, seed: u64) -> Result<Self, DomainError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut span = |side: u32| {
            let len = rng.gen_range(1..=side.max(1));
            let start = rng.gen_range(0..=side.max(1) - len);
            (start, start + len - 1)
        };
        let rectangles = (0..count)
            .map(|_| {
                let (x0, x1) = span(width);
                let (y0, y1) = span(height);
                Rect { x0, y0, x1, y1 }
            })
            .collect();
        Self::from_instance(RectanglesInstance {
            width,
            height,
            rectangles,
            seed,
        })
    }

    pub fn standard(seed: u64) -> Self {
        Self::generate(DEFAULT_SIDE, DEFAULT_SIDE, DEFAULT_RECTANGLES, seed)
            .expect("default instance is valid")
    }

    pub fn from_instance(instance: RectanglesInstance) -> Result<Self, DomainError> {
        let mut problems = Vec::new();
        if instance.width == 0 || instance.height == 0 {
            problems.push("bounding box must be non-empty".to_string());
        }
        if instance.rectangles.is_empty() || instance.rectangles.len() > 64 {
            problems.push(format!(
                "need between 1 and 64 rectangles, got {}",
                instance.rectangles.len()
            ));
        }
        for (i, r) in instance.rectangles.iter().enumerate() {
            if r.x0 > r.x1 || r.y0 > r.y1 || r.x1 >= instance.width || r.y1 >= instance.height {
                problems.push(format!("rectangle {i} does not lie inside the box"));
            }
        }
        if !problems.is_empty() {
            return Err(DomainError::Infeasible(problems));
        }

        let catalog = FeatureCatalog::new(
            (0..instance.rectangles.len())
                .map(|i| FeatureInfo::indicator(format!("inside_rect_{i}")))
                .collect(),
        )
        .expect("non-empty indicator catalog");

        let n = (instance.width * instance.height) as usize;
        let mut index: HashMap<u64, u32> = HashMap::new();
        let mut cells = Vec::new();
        let mut first_point = Vec::new();
        let mut cell_of = Vec::with_capacity(n);
        for p in 0..n as u32 {
            let point = Point::new(p / instance.height, p % instance.height);
            let mask = instance
                .rectangles
                .iter()
                .enumerate()
                .filter(|(_, r)| r.contains(point))
                .fold(0u64, |m, (i, _)| m | (1 << i));
            let id = *index.entry(mask).or_insert_with(|| {
                cells.push(mask);
                first_point.push(p);
                (cells.len() - 1) as u32
            });
            cell_of.push(id);
        }

        Ok(RectanglesDomain {
            instance,
            catalog,
            cells,
            cell_of,
            first_point,
        })
    }

    pub fn instance(&self) -> &RectanglesInstance {
        &self.instance
    }

    pub fn rectangles(&self) -> &[Rect] {
        &self.instance.rectangles
    }

    pub fn num_points(&self) -> usize {
        self.cell_of.len()
    }

    /// Points in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        let h = self.instance.height;
        (0..self.num_points() as u32).map(move |p| Point::new(p / h, p % h))
    }

    fn point_index(&self, p: Point) -> usize {
        (p.x * self.instance.height + p.y) as usize
    }

    fn point_at(&self, index: u32) -> Point {
        Point::new(index / self.instance.height, index % self.instance.height)
    }

    fn sign(mask: u64, feature: usize) -> f64 {
        if mask & (1 << feature) != 0 {
            1.0
        } else {
            -1.0
        }
    }

    // Same accumulation order as `model::dot` over the view's features.
    fn cell_scores(&self, w: &[f64], indices: &[usize]) -> Vec<f64> {
        self.cells
            .iter()
            .map(|&mask| {
                indices
                    .iter()
                    .zip(w)
                    .map(|(&i, &wi)| wi * Self::sign(mask, i))
                    .sum()
            })
            .collect()
    }
}

impl TryFrom<RectanglesInstance> for RectanglesDomain {
    type Error = DomainError;

    fn try_from(instance: RectanglesInstance) -> Result<Self, Self::Error> {
        Self::from_instance(instance)
    }
}

impl From<RectanglesDomain> for RectanglesInstance {
    fn from(domain: RectanglesDomain) -> Self {
        domain.instance
    }
}

impl Domain for RectanglesDomain {
    type Config = Point;

    fn catalog(&self) -> &FeatureCatalog {
        &self.catalog
    }

    fn check_feasible(&self, x: &Point) -> Result<(), DomainError> {
        let mut problems = Vec::new();
        if x.x >= self.instance.width {
            problems.push(format!("x = {} outside [0, {})", x.x, self.instance.width));
        }
        if x.y >= self.instance.height {
            problems.push(format!("y = {} outside [0, {})", x.y, self.instance.height));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(DomainError::Infeasible(problems))
        }
    }

    fn full_features(&self, x: &Point) -> Vec<f64> {
        let mask = self.cells[self.cell_of[self.point_index(*x)] as usize];
        (0..self.catalog.len())
            .map(|i| Self::sign(mask, i))
            .collect()
    }

    fn view_features(&self, view: &FeatureView, x: &Point) -> Vec<f64> {
        let mask = self.cells[self.cell_of[self.point_index(*x)] as usize];
        view.indices()
            .iter()
            .map(|&i| Self::sign(mask, i))
            .collect()
    }

    fn infer_argmax(&self, w: &[f64], view: &FeatureView) -> Result<Inference<Point>, DomainError> {
        if view.is_empty() {
            return Err(DomainError::EmptyView);
        }
        let scores = self.cell_scores(w, view.indices());
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let first = scores
            .iter()
            .zip(&self.first_point)
            .filter(|(s, _)| **s == best)
            .map(|(_, &p)| p)
            .min()
            .ok_or(DomainError::EmptyFeasibleSet)?;
        Ok(Inference {
            config: self.point_at(first),
            exact: true,
        })
    }

    fn distance(&self, a: &Point, b: &Point) -> f64 {
        (a.x.abs_diff(b.x) + a.y.abs_diff(b.y)) as f64
    }

    fn min_change_improvement(&self, x: &Point, perturbed: &[f64]) -> Option<Point> {
        let all: Vec<usize> = (0..self.catalog.len()).collect();
        let scores = self.cell_scores(perturbed, &all);
        let current = scores[self.cell_of[self.point_index(*x)] as usize];
        let mut best: Option<(u32, f64, Point)> = None;
        for (p, &cell) in self.cell_of.iter().enumerate() {
            let s = scores[cell as usize];
            if s <= current {
                continue;
            }
            let point = self.point_at(p as u32);
            let d = x.x.abs_diff(point.x) + x.y.abs_diff(point.y);
            // Points are visited in lexicographic order, so only strictly
            // better (distance, utility) pairs replace the incumbent.
            let better = match best {
                None => true,
                Some((bd, bs, _)) => d < bd || (d == bd && s > bs),
            };
            if better {
                best = Some((d, s, point));
            }
        }
        best.map(|(_, _, p)| p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::dot;

    fn small() -> RectanglesDomain {
        RectanglesDomain::from_instance(RectanglesInstance {
            width: 10,
            height: 10,
            rectangles: vec![
                Rect {
                    x0: 2,
                    y0: 2,
                    x1: 4,
                    y1: 4,
                },
                Rect {
                    x0: 0,
                    y0: 5,
                    x1: 9,
                    y1: 9,
                },
                Rect {
                    x0: 3,
                    y0: 0,
                    x1: 3,
                    y1: 9,
                },
            ],
            seed: 0,
        })
        .unwrap()
    }

    #[test]
    fn features_are_plus_minus_one() {
        let d = small();
        assert_eq!(d.full_features(&Point::new(3, 3)), vec![1.0, -1.0, 1.0]);
        assert_eq!(d.full_features(&Point::new(0, 0)), vec![-1.0, -1.0, -1.0]);
        let view = FeatureView::new(vec![2, 0], 3).unwrap();
        assert_eq!(d.view_features(&view, &Point::new(3, 6)), vec![1.0, -1.0]);
        assert!(d
            .view_features(&FeatureView::empty(), &Point::new(3, 6))
            .is_empty());
    }

    #[test]
    fn single_feature_argmax_is_first_point_inside() {
        let d = small();
        let view = FeatureView::new(vec![0], 3).unwrap();
        let got = d.infer_argmax(&[1.0], &view).unwrap();
        assert_eq!(got.config, Point::new(2, 2));
        assert!(got.exact);
    }

    #[test]
    fn zero_weights_pick_origin() {
        let d = small();
        let got = d
            .infer_argmax(&[0.0, 0.0, 0.0], &FeatureView::full(3))
            .unwrap();
        assert_eq!(got.config, Point::new(0, 0));
        assert_eq!(
            d.infer_argmax(&[], &FeatureView::empty()),
            Err(DomainError::EmptyView)
        );
    }

    #[test]
    fn manhattan_distance() {
        let d = small();
        assert_eq!(d.distance(&Point::new(3, 4), &Point::new(5, 4)), 2.0);
        assert_eq!(d.distance(&Point::new(3, 4), &Point::new(3, 4)), 0.0);
    }

    #[test]
    fn improvement_steps_into_preferred_rectangle() {
        let d = small();
        // Only rectangle 0 matters; (1, 3) is one step left of it.
        let got = d.min_change_improvement(&Point::new(1, 3), &[1.0, 0.0, 0.0]);
        assert_eq!(got, Some(Point::new(2, 3)));
        // Already optimal.
        assert_eq!(
            d.min_change_improvement(&Point::new(2, 3), &[1.0, 0.0, 0.0]),
            None
        );
    }

    #[test]
    fn argmax_matches_scan_with_plain_dot() {
        let d = small();
        let w = [0.3, -1.2, 0.7];
        let view = FeatureView::full(3);
        let mut best: Option<(f64, Point)> = None;
        for p in d.points() {
            let s = dot(&w, &d.full_features(&p));
            if best.is_none_or(|(b, _)| s > b) {
                best = Some((s, p));
            }
        }
        assert_eq!(d.infer_argmax(&w, &view).unwrap().config, best.unwrap().1);
    }

    #[test]
    fn instance_json_round_trip() {
        let d = RectanglesDomain::standard(7);
        let json = serde_json::to_string(&d).unwrap();
        let back: RectanglesDomain = serde_json::from_str(&json).unwrap();
        assert_eq!(back.instance(), d.instance());
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    #[test]
    fn rejects_rectangles_outside_box() {
        let bad = RectanglesInstance {
            width: 5,
            height: 5,
            rectangles: vec![Rect {
                x0: 0,
                y0: 0,
                x1: 5,
                y1: 1,
            }],
            seed: 0,
        };
        assert!(RectanglesDomain::from_instance(bad).is_err());
    }

    #[test]
    fn standard_has_fifty_indicator_features() {
        let d = RectanglesDomain::standard(1);
        assert_eq!(d.catalog().len(), 50);
        assert_eq!(d.num_points(), 10_000);
        assert!((d.catalog().norm_bound() - 50f64.sqrt()).abs() < 1e-12);
        for p in d.points().step_by(37) {
            let f = d.full_features(&p);
            assert!(f.iter().all(|v| *v == 1.0 || *v == -1.0));
            assert!(dot(&f, &f).sqrt() <= d.catalog().norm_bound() + 1e-9);
        }
    }
}

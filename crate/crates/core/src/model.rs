//! Utilities over growing feature spaces.
//!
//! A learner never sees the whole catalog at once: it works with a
//! [`FeatureView`], an ordered list of catalog indices in acquisition order,
//! and a [`WeightVector`] positionally aligned with that view. Vectors of
//! different lengths are combined as if the shorter one were zero padded.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Domain, DomainError};

/// Absolute tolerance used for floating point comparisons.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("feature catalog must contain at least one feature")]
    EmptyCatalog,
    #[error("feature {index} is outside the catalog (size {size})")]
    OutOfRange { index: usize, size: usize },
    #[error("feature {0} is already part of the view")]
    DuplicateFeature(usize),
    #[error("feature {name} has an invalid range [{min}, {max}]")]
    InvalidRange { name: String, min: f64, max: f64 },
    #[error("subspace fraction must lie in (0, 1], got {0}")]
    InvalidFraction(f64),
}

/// Inner product of two vectors, zero padding the shorter one.
///
/// Every utility in the crate goes through this function so that the same
/// configuration always receives bit-identical scores.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Metadata for one feature of the hidden catalog.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureInfo {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

impl FeatureInfo {
    pub fn indicator(name: impl Into<String>) -> Self {
        FeatureInfo {
            name: name.into(),
            min: -1.0,
            max: 1.0,
        }
    }

    pub fn ranged(name: impl Into<String>, min: f64, max: f64) -> Self {
        FeatureInfo {
            name: name.into(),
            min,
            max,
        }
    }

    fn magnitude(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }
}

/// The full feature space of a domain together with the norm bound `R`.
///
/// The bound is derived from the declared per-feature ranges, so an
/// indicator catalog with `m` features gets `R = sqrt(m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureCatalog {
    features: Vec<FeatureInfo>,
    norm_bound: f64,
}

impl FeatureCatalog {
    pub fn new(features: Vec<FeatureInfo>) -> Result<Self, ModelError> {
        if features.is_empty() {
            return Err(ModelError::EmptyCatalog);
        }
        for f in &features {
            if !(f.min <= f.max) || !f.min.is_finite() || !f.max.is_finite() {
                return Err(ModelError::InvalidRange {
                    name: f.name.clone(),
                    min: f.min,
                    max: f.max,
                });
            }
        }
        let norm_bound = features
            .iter()
            .map(|f| f.magnitude().powi(2))
            .sum::<f64>()
            .sqrt();
        Ok(FeatureCatalog {
            features,
            norm_bound,
        })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&FeatureInfo> {
        self.features.get(index)
    }

    pub fn features(&self) -> &[FeatureInfo] {
        &self.features
    }

    /// `R` such that `|phi(x)| <= R` for every feasible configuration.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// Appends a feature; only used by human sessions, whose catalogs grow.
    pub fn push(&mut self, feature: FeatureInfo) -> Result<usize, ModelError> {
        if !(feature.min <= feature.max) {
            return Err(ModelError::InvalidRange {
                name: feature.name,
                min: feature.min,
                max: feature.max,
            });
        }
        self.features.push(feature);
        self.norm_bound = self
            .features
            .iter()
            .map(|f| f.magnitude().powi(2))
            .sum::<f64>()
            .sqrt();
        Ok(self.features.len() - 1)
    }
}

/// The learner's current subspace: catalog indices in acquisition order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureView {
    acquired: Vec<usize>,
}

impl FeatureView {
    pub fn new(acquired: Vec<usize>, catalog_len: usize) -> Result<Self, ModelError> {
        let mut seen = vec![false; catalog_len];
        for &i in &acquired {
            if i >= catalog_len {
                return Err(ModelError::OutOfRange {
                    index: i,
                    size: catalog_len,
                });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(ModelError::DuplicateFeature(i));
            }
        }
        Ok(FeatureView { acquired })
    }

    pub fn empty() -> Self {
        FeatureView::default()
    }

    pub fn full(catalog_len: usize) -> Self {
        FeatureView {
            acquired: (0..catalog_len).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.acquired.len()
    }

    pub fn is_empty(&self) -> bool {
        self.acquired.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.acquired
    }

    pub fn contains(&self, index: usize) -> bool {
        self.acquired.contains(&index)
    }

    /// The view as it was when it held only its first `k` features.
    pub fn prefix(&self, k: usize) -> FeatureView {
        FeatureView {
            acquired: self.acquired[..k.min(self.acquired.len())].to_vec(),
        }
    }

    /// 0-1 mask over the catalog marking acquired features.
    pub fn mask(&self, catalog_len: usize) -> Vec<bool> {
        let mut mask = vec![false; catalog_len];
        for &i in &self.acquired {
            if i < catalog_len {
                mask[i] = true;
            }
        }
        mask
    }

    pub fn extended(&self, index: usize, catalog_len: usize) -> Result<FeatureView, ModelError> {
        if index >= catalog_len {
            return Err(ModelError::OutOfRange {
                index,
                size: catalog_len,
            });
        }
        if self.contains(index) {
            return Err(ModelError::DuplicateFeature(index));
        }
        let mut acquired = self.acquired.clone();
        acquired.push(index);
        Ok(FeatureView { acquired })
    }

    /// Picks the view's components out of a full catalog vector.
    pub fn select(&self, full: &[f64]) -> Vec<f64> {
        self.acquired.iter().map(|&i| full[i]).collect()
    }

    /// Scatters view-aligned weights into a catalog-length vector.
    pub fn scatter(&self, weights: &[f64], catalog_len: usize) -> Vec<f64> {
        let mut out = vec![0.0; catalog_len];
        for (&i, &w) in self.acquired.iter().zip(weights) {
            out[i] = w;
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn zeros(len: usize) -> Self {
        WeightVector(vec![0.0; len])
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        WeightVector(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn padded(&self, len: usize) -> WeightVector {
        let mut values = self.0.clone();
        if values.len() < len {
            values.resize(len, 0.0);
        }
        WeightVector(values)
    }
}

/// An implicit ranking `improved > suggested` collected at some iteration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankingPair<C> {
    pub suggested: C,
    pub improved: C,
    pub iteration: usize,
}

/// A critique, materialized as the catalog feature it adds to the view.
///
/// On the human path the critique starts as an expression which is compiled
/// and appended to the catalog; `expression` keeps its source text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Critique {
    pub catalog_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
}

impl Critique {
    pub fn catalog(index: usize) -> Self {
        Critique {
            catalog_index: index,
            expression: None,
        }
    }
}

/// `phi^t(x)`: the view's features evaluated at `x`.
pub fn evaluate<D: Domain>(
    domain: &D,
    view: &FeatureView,
    x: &D::Config,
) -> Result<Vec<f64>, DomainError> {
    domain.check_feasible(x)?;
    Ok(domain.view_features(view, x))
}

/// `<w, phi^t(x)>` over the overlapping prefix of `w` and the view.
pub fn utility<D: Domain>(
    domain: &D,
    w: &WeightVector,
    view: &FeatureView,
    x: &D::Config,
) -> Result<f64, DomainError> {
    Ok(w.dot(&evaluate(domain, view, x)?))
}

/// `phi^t(improved) - phi^t(suggested)`.
pub fn feature_delta<D: Domain>(
    domain: &D,
    view: &FeatureView,
    improved: &D::Config,
    suggested: &D::Config,
) -> Result<Vec<f64>, DomainError> {
    let a = evaluate(domain, view, improved)?;
    let b = evaluate(domain, view, suggested)?;
    Ok(a.iter().zip(&b).map(|(x, y)| x - y).collect())
}

/// Unit-step perceptron update; `w` is zero padded up to the delta length.
pub fn perceptron_update(w: &WeightVector, delta: &[f64]) -> WeightVector {
    let len = w.len().max(delta.len());
    let mut out = w.padded(len).0;
    for (o, d) in out.iter_mut().zip(delta) {
        *o += d;
    }
    WeightVector(out)
}

/// Appends the critiqued feature to the view and a zero to the weights.
pub fn extend_view(
    view: &FeatureView,
    w: &WeightVector,
    critique: &Critique,
    catalog_len: usize,
) -> Result<(FeatureView, WeightVector), ModelError> {
    let next = view.extended(critique.catalog_index, catalog_len)?;
    let mut weights = w.padded(view.len()).0;
    weights.truncate(view.len());
    weights.push(0.0);
    Ok((next, WeightVector(weights)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_zero_pads_shorter_vector() {
        assert_eq!(dot(&[1.0, 2.0], &[3.0, 4.0, 5.0]), 11.0);
        assert_eq!(dot(&[], &[3.0]), 0.0);
    }

    #[test]
    fn perceptron_update_pads_then_adds() {
        let w = WeightVector::from_vec(vec![1.0, -1.0]);
        let next = perceptron_update(&w, &[0.5, 0.5, 2.0]);
        assert_eq!(next.as_slice(), &[1.5, -0.5, 2.0]);

        let zero = WeightVector::zeros(3);
        assert_eq!(
            perceptron_update(&zero, &[1.0, -2.0, 3.0]).as_slice(),
            &[1.0, -2.0, 3.0]
        );
    }

    #[test]
    fn extend_view_appends_index_and_zero_weight() {
        let view = FeatureView::new(vec![3, 1], 10).unwrap();
        let w = WeightVector::from_vec(vec![0.25, -4.0]);
        let (view2, w2) = extend_view(&view, &w, &Critique::catalog(7), 10).unwrap();
        assert_eq!(view2.indices(), &[3, 1, 7]);
        assert_eq!(w2.as_slice(), &[0.25, -4.0, 0.0]);
    }

    #[test]
    fn extend_view_rejects_duplicates_and_out_of_range() {
        let view = FeatureView::new(vec![3, 1], 10).unwrap();
        let w = WeightVector::zeros(2);
        assert_eq!(
            extend_view(&view, &w, &Critique::catalog(1), 10),
            Err(ModelError::DuplicateFeature(1))
        );
        assert!(matches!(
            extend_view(&view, &w, &Critique::catalog(10), 10),
            Err(ModelError::OutOfRange { .. })
        ));
    }

    #[test]
    fn view_validation() {
        assert!(FeatureView::new(vec![0, 0], 3).is_err());
        assert!(FeatureView::new(vec![3], 3).is_err());
        let v = FeatureView::new(vec![2, 0], 3).unwrap();
        assert_eq!(v.mask(3), vec![true, false, true]);
        assert_eq!(v.prefix(1).indices(), &[2]);
        assert_eq!(v.select(&[10.0, 11.0, 12.0]), vec![12.0, 10.0]);
        assert_eq!(v.scatter(&[1.0, 2.0], 3), vec![2.0, 0.0, 1.0]);
    }

    #[test]
    fn indicator_catalog_norm_bound_is_sqrt_m() {
        let cat = FeatureCatalog::new(
            (0..50)
                .map(|i| FeatureInfo::indicator(format!("f{i}")))
                .collect(),
        )
        .unwrap();
        assert!((cat.norm_bound() - 50f64.sqrt()).abs() < TOLERANCE);
        assert_eq!(FeatureCatalog::new(vec![]), Err(ModelError::EmptyCatalog));
    }

    #[test]
    fn ranged_catalog_norm_bound_uses_largest_magnitude() {
        let cat = FeatureCatalog::new(vec![
            FeatureInfo::ranged("a", 0.0, 3.0),
            FeatureInfo::ranged("b", -4.0, 1.0),
        ])
        .unwrap();
        assert!((cat.norm_bound() - 5.0).abs() < TOLERANCE);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn zero_padding_never_changes_dot(
                w in proptest::collection::vec(-10.0f64..10.0, 0..8),
                v in proptest::collection::vec(-10.0f64..10.0, 0..8),
                extra in 0usize..5,
            ) {
                let padded = WeightVector::from_vec(w.clone()).padded(w.len() + extra);
                prop_assert_eq!(dot(&w, &v), padded.dot(&v));
            }
        }
    }
}

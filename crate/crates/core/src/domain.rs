use std::fmt::Debug;
use std::hash::Hash;

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use crate::model::{FeatureCatalog, FeatureView};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("infeasible configuration: {}", .0.join("; "))]
    Infeasible(Vec<String>),
    #[error("inference needs a non-empty feature view")]
    EmptyView,
    #[error("the feasible set is empty")]
    EmptyFeasibleSet,
    #[error("weight vector has {weights} entries but the view has {view}")]
    DimensionMismatch { weights: usize, view: usize },
}

/// Result of an argmax query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inference<C> {
    pub config: C,
    /// False when the search ran in an inexact (beam) mode; the returned
    /// configuration then need not be a true maximizer.
    pub exact: bool,
}

/// A constructive domain: feasible configurations, their hidden feature
/// catalog, exact argmax inference and the minimal-change improvement
/// problem solved by simulated users.
///
/// Configurations are totally ordered; every tie in inference or in the
/// improvement problem is broken towards the smallest configuration.
pub trait Domain: Send + Sync {
    type Config: Clone + Debug + Eq + Ord + Hash + Send + Sync + Serialize + DeserializeOwned;

    fn catalog(&self) -> &FeatureCatalog;

    fn check_feasible(&self, x: &Self::Config) -> Result<(), DomainError>;

    /// `phi*(x)` over the whole catalog. `x` must be feasible.
    fn full_features(&self, x: &Self::Config) -> Vec<f64>;

    /// `phi^t(x)` for the given view. `x` must be feasible.
    fn view_features(&self, view: &FeatureView, x: &Self::Config) -> Vec<f64> {
        view.select(&self.full_features(x))
    }

    /// `argmax_x <w, phi^t(x)>` with `w` aligned to `view`.
    fn infer_argmax(
        &self,
        w: &[f64],
        view: &FeatureView,
    ) -> Result<Inference<Self::Config>, DomainError>;

    fn distance(&self, a: &Self::Config, b: &Self::Config) -> f64;

    /// Closest `x' != x` whose utility under the full-catalog weights
    /// `perturbed` strictly exceeds that of `x`. Ties on distance go to the
    /// higher utility, then to the smaller configuration.
    fn min_change_improvement(&self, x: &Self::Config, perturbed: &[f64]) -> Option<Self::Config>;
}

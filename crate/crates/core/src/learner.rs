//! Coactive Critiquing and the plain coactive learning baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consistency::{is_consistent, ConsistencyMethod};
use crate::domain::{Domain, DomainError};
use crate::model::{
    extend_view, feature_delta, perceptron_update, Critique, FeatureView, ModelError, RankingPair,
    WeightVector,
};
use crate::user::{User, UserError};

#[derive(Debug, Error)]
pub enum LoopError {
    #[error("iteration {iteration}: {source}")]
    Domain {
        iteration: usize,
        #[source]
        source: DomainError,
    },
    #[error("iteration {iteration}: {source}")]
    Model {
        iteration: usize,
        #[source]
        source: ModelError,
    },
    #[error("iteration {iteration}: {source}")]
    User {
        iteration: usize,
        #[source]
        source: UserError,
    },
    #[error("the initial view is empty")]
    EmptyView,
    #[error("theta must lie in (0, 1], got {0}")]
    InvalidTheta(f64),
}

/// When to ask the user for a critique.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NeedCritiqueStrategy {
    /// Whenever the collected pairs cannot be ranked in the current view.
    Consistency,
    /// Bernoulli(theta) on every iteration.
    Random {
        theta: f64,
    },
    Never,
    Always,
}

impl NeedCritiqueStrategy {
    pub fn validate(&self) -> Result<(), LoopError> {
        match *self {
            NeedCritiqueStrategy::Random { theta } if !(theta > 0.0 && theta <= 1.0) => {
                Err(LoopError::InvalidTheta(theta))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopOptions {
    pub iterations: usize,
    pub strategy: NeedCritiqueStrategy,
    #[serde(default)]
    pub consistency: ConsistencyMethod,
    /// Seeds the loop's own randomness (the random strategy).
    #[serde(default)]
    pub seed: u64,
}

impl LoopOptions {
    pub fn new(iterations: usize, strategy: NeedCritiqueStrategy) -> Self {
        LoopOptions {
            iterations,
            strategy,
            consistency: ConsistencyMethod::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord<C> {
    /// 1-based iteration number.
    pub t: usize,
    pub suggested: C,
    pub improved: C,
    pub critique: Option<Critique>,
    /// View size after this iteration's critique, if any.
    pub features: usize,
    /// `w^{t+1}`, aligned with the first `features` entries of the view.
    pub weights: Vec<f64>,
    /// Whether `suggested` came from exact inference.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElicitationTrace<C> {
    pub initial_view: FeatureView,
    pub records: Vec<IterationRecord<C>>,
    pub final_view: FeatureView,
    pub final_weights: Vec<f64>,
    /// Iteration at which the user returned the suggestion unchanged.
    pub satisfied_at: Option<usize>,
    /// The suggestion that satisfied the user.
    pub final_suggestion: Option<C>,
}

impl<C> ElicitationTrace<C> {
    /// The view in force during the update of `record`.
    pub fn view_at(&self, record: &IterationRecord<C>) -> FeatureView {
        self.final_view.prefix(record.features)
    }

    /// `w^t` for the record with index `i` in `records`.
    pub fn weights_before(&self, i: usize) -> Vec<f64> {
        if i == 0 {
            vec![0.0; self.initial_view.len()]
        } else {
            self.records[i - 1].weights.clone()
        }
    }

    /// The suggestion shown at iteration `t` (1-based), if the run got there.
    pub fn suggestion_at(&self, t: usize) -> Option<&C> {
        match self.records.get(t.checked_sub(1)?) {
            Some(r) => Some(&r.suggested),
            None if Some(t) == self.satisfied_at => self.final_suggestion.as_ref(),
            None => None,
        }
    }
}

/// Whether to ask for a critique this iteration.
pub fn need_critique<D: Domain>(
    strategy: NeedCritiqueStrategy,
    domain: &D,
    pairs: &[RankingPair<D::Config>],
    view: &FeatureView,
    method: ConsistencyMethod,
    rng: &mut impl Rng,
) -> Result<bool, DomainError> {
    Ok(match strategy {
        NeedCritiqueStrategy::Consistency => !is_consistent(domain, pairs, view, method)?,
        NeedCritiqueStrategy::Random { theta } => rng.gen_bool(theta),
        NeedCritiqueStrategy::Never => false,
        NeedCritiqueStrategy::Always => true,
    })
}

/// Coactive Critiquing.
///
/// Starts from `w = 0` on `initial_view`. Each iteration suggests the
/// argmax, records the user's improvement, asks for a critique when the
/// strategy says so, and applies the perceptron update in the (possibly
/// extended) view. Stops early when the user returns the suggestion
/// unchanged; that last pair is not recorded.
pub fn cc_loop<D: Domain, U: User<D>>(
    domain: &D,
    initial_view: &FeatureView,
    user: &mut U,
    options: &LoopOptions,
) -> Result<ElicitationTrace<D::Config>, LoopError> {
    if initial_view.is_empty() {
        return Err(LoopError::EmptyView);
    }
    options.strategy.validate()?;
    let m = domain.catalog().len();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut view = initial_view.clone();
    let mut w = WeightVector::zeros(view.len());
    let mut pairs: Vec<RankingPair<D::Config>> = Vec::new();
    let mut records = Vec::new();
    let mut satisfied_at = None;
    let mut final_suggestion = None;

    for t in 1..=options.iterations {
        let dom = |source| LoopError::Domain {
            iteration: t,
            source,
        };
        let inference = domain.infer_argmax(w.as_slice(), &view).map_err(dom)?;
        let x = inference.config;
        let improved = user.query_improvement(domain, &x);
        if improved == x {
            satisfied_at = Some(t);
            final_suggestion = Some(x);
            break;
        }
        domain.check_feasible(&improved).map_err(dom)?;
        pairs.push(RankingPair {
            suggested: x.clone(),
            improved: improved.clone(),
            iteration: t,
        });

        let mut critique = None;
        if need_critique(
            options.strategy,
            domain,
            &pairs,
            &view,
            options.consistency,
            &mut rng,
        )
        .map_err(dom)?
        {
            match user.query_critique(domain, &view, &x, &improved) {
                Ok(c) => {
                    let (v, next) =
                        extend_view(&view, &w, &c, m).map_err(|source| LoopError::Model {
                            iteration: t,
                            source,
                        })?;
                    view = v;
                    w = next;
                    critique = Some(c);
                }
                Err(UserError::CatalogExhausted) => {}
                Err(source) => {
                    return Err(LoopError::User {
                        iteration: t,
                        source,
                    })
                }
            }
        }

        let delta = feature_delta(domain, &view, &improved, &x).map_err(dom)?;
        w = perceptron_update(&w, &delta);
        records.push(IterationRecord {
            t,
            suggested: x,
            improved,
            critique,
            features: view.len(),
            weights: w.as_slice().to_vec(),
            exact: inference.exact,
        });
    }

    Ok(ElicitationTrace {
        initial_view: initial_view.clone(),
        records,
        final_view: view,
        final_weights: w.into_vec(),
        satisfied_at,
        final_suggestion,
    })
}

/// Coactive learning on a fixed view.
pub fn cl_loop<D: Domain, U: User<D>>(
    domain: &D,
    view: &FeatureView,
    user: &mut U,
    iterations: usize,
) -> Result<ElicitationTrace<D::Config>, LoopError> {
    cc_loop(
        domain,
        view,
        user,
        &LoopOptions::new(iterations, NeedCritiqueStrategy::Never),
    )
}

/// `ceil(p * m)` distinct catalog indices drawn uniformly, in draw order.
pub fn sample_subspace(
    catalog_len: usize,
    fraction: f64,
    rng: &mut impl Rng,
) -> Result<FeatureView, ModelError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(ModelError::InvalidFraction(fraction));
    }
    let k = ((fraction * catalog_len as f64).ceil() as usize).min(catalog_len);
    let picked = rand::seq::index::sample(rng, catalog_len, k).into_vec();
    FeatureView::new(picked, catalog_len)
}

/// Random initial view of `k` features.
pub fn random_view(
    catalog_len: usize,
    k: usize,
    rng: &mut impl Rng,
) -> Result<FeatureView, ModelError> {
    let picked = rand::seq::index::sample(rng, catalog_len, k.min(catalog_len)).into_vec();
    FeatureView::new(picked, catalog_len)
}

//! Users answering improvement and critique queries.

use std::collections::VecDeque;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::domain::{Domain, DomainError};
use crate::model::{dot, Critique, FeatureView};

pub const DEFAULT_NOISE_SIGMA: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UserError {
    #[error("no critique available: the view already covers the whole catalog")]
    CatalogExhausted,
    #[error("scripted user ran out of {0} answers")]
    ScriptExhausted(&'static str),
}

/// The two oracles of the elicitation loop.
pub trait User<D: Domain> {
    /// An improvement of `x`, or `x` itself when the user is satisfied.
    fn query_improvement(&mut self, domain: &D, x: &D::Config) -> D::Config;

    /// A feature outside `view` that explains why `improved` beats
    /// `suggested`.
    fn query_critique(
        &mut self,
        domain: &D,
        view: &FeatureView,
        suggested: &D::Config,
        improved: &D::Config,
    ) -> Result<Critique, UserError>;
}

/// A user with hidden linear utility `w*` over the full catalog.
///
/// Improvements are minimal changes that raise the utility under
/// `w* + eps`, with fresh Gaussian `eps` on every query. Critiques pick an
/// unacquired feature with probability proportional to its clamped
/// contribution `max(0, w*_i (phi_i(improved) - phi_i(suggested)))`.
#[derive(Clone, Debug)]
pub struct SimulatedUser<C> {
    w_star: Vec<f64>,
    sigma: f64,
    rng: ChaCha8Rng,
    x_star: C,
    best: f64,
}

impl<C: Clone> SimulatedUser<C> {
    /// Draws `w*` i.i.d. standard normal from `seed` and solves for `x*`.
    pub fn sample<D: Domain<Config = C>>(
        domain: &D,
        sigma: f64,
        seed: u64,
    ) -> Result<Self, DomainError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w_star: Vec<f64> = (0..domain.catalog().len())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        Self::with_rng(domain, w_star, sigma, rng)
    }

    pub fn with_weights<D: Domain<Config = C>>(
        domain: &D,
        w_star: Vec<f64>,
        sigma: f64,
        seed: u64,
    ) -> Result<Self, DomainError> {
        Self::with_rng(domain, w_star, sigma, ChaCha8Rng::seed_from_u64(seed))
    }

    fn with_rng<D: Domain<Config = C>>(
        domain: &D,
        w_star: Vec<f64>,
        sigma: f64,
        rng: ChaCha8Rng,
    ) -> Result<Self, DomainError> {
        let m = domain.catalog().len();
        if w_star.len() != m {
            return Err(DomainError::DimensionMismatch {
                weights: w_star.len(),
                view: m,
            });
        }
        let x_star = domain.infer_argmax(&w_star, &FeatureView::full(m))?.config;
        let best = dot(&w_star, &domain.full_features(&x_star));
        Ok(SimulatedUser {
            w_star,
            sigma,
            rng,
            x_star,
            best,
        })
    }

    pub fn w_star(&self) -> &[f64] {
        &self.w_star
    }

    pub fn x_star(&self) -> &C {
        &self.x_star
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Restarts the noise stream, leaving `w*` and `x*` untouched.
    pub fn reseed(&mut self, seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    pub fn true_utility<D: Domain<Config = C>>(&self, domain: &D, x: &C) -> f64 {
        dot(&self.w_star, &domain.full_features(x))
    }

    pub fn best_utility(&self) -> f64 {
        self.best
    }

    /// `u*(x*) - u*(x)`.
    pub fn loss<D: Domain<Config = C>>(&self, domain: &D, x: &C) -> f64 {
        self.best - self.true_utility(domain, x)
    }

    /// The weights a single improvement query works with.
    pub fn perturbed_weights(&mut self) -> Vec<f64> {
        let sigma = self.sigma;
        let rng = &mut self.rng;
        self.w_star
            .iter()
            .map(|w| {
                let e: f64 = StandardNormal.sample(rng);
                w + sigma * e
            })
            .collect()
    }
}

impl<D: Domain> User<D> for SimulatedUser<D::Config> {
    fn query_improvement(&mut self, domain: &D, x: &D::Config) -> D::Config {
        let perturbed = self.perturbed_weights();
        domain
            .min_change_improvement(x, &perturbed)
            .unwrap_or_else(|| x.clone())
    }

    fn query_critique(
        &mut self,
        domain: &D,
        view: &FeatureView,
        suggested: &D::Config,
        improved: &D::Config,
    ) -> Result<Critique, UserError> {
        let before = domain.full_features(suggested);
        let after = domain.full_features(improved);
        let candidates: Vec<(usize, f64)> = (0..self.w_star.len())
            .filter(|&i| !view.contains(i))
            .map(|i| (i, self.w_star[i] * (after[i] - before[i])))
            .collect();
        let index = pick_critique(&candidates, &mut self.rng)?;
        Ok(Critique::catalog(index))
    }
}

/// Samples a candidate index proportionally to `max(c, 0)`. When no
/// contribution is positive the largest one wins, first index on ties.
pub fn pick_critique(
    candidates: &[(usize, f64)],
    rng: &mut impl rand::Rng,
) -> Result<usize, UserError> {
    if candidates.is_empty() {
        return Err(UserError::CatalogExhausted);
    }
    match WeightedIndex::new(candidates.iter().map(|&(_, c)| c.max(0.0))) {
        Ok(dist) => Ok(candidates[dist.sample(rng)].0),
        Err(_) => {
            let mut best = candidates[0];
            for &(i, c) in &candidates[1..] {
                if c > best.1 {
                    best = (i, c);
                }
            }
            Ok(best.0)
        }
    }
}

/// Replays recorded answers; used to rerun human sessions offline.
#[derive(Clone, Debug, Default)]
pub struct ScriptedUser<C> {
    improvements: VecDeque<C>,
    critiques: VecDeque<Critique>,
}

impl<C> ScriptedUser<C> {
    pub fn new(improvements: Vec<C>, critiques: Vec<Critique>) -> Self {
        ScriptedUser {
            improvements: improvements.into(),
            critiques: critiques.into(),
        }
    }
}

impl<D: Domain> User<D> for ScriptedUser<D::Config> {
    /// Falls back to satisfaction once the script runs dry.
    fn query_improvement(&mut self, _domain: &D, x: &D::Config) -> D::Config {
        self.improvements.pop_front().unwrap_or_else(|| x.clone())
    }

    fn query_critique(
        &mut self,
        _domain: &D,
        _view: &FeatureView,
        _suggested: &D::Config,
        _improved: &D::Config,
    ) -> Result<Critique, UserError> {
        self.critiques
            .pop_front()
            .ok_or(UserError::ScriptExhausted("critique"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_positive_candidate_always_wins() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let i = pick_critique(&[(2, -1.0), (5, 0.4), (7, 0.0)], &mut rng).unwrap();
            assert_eq!(i, 5);
        }
    }

    #[test]
    fn non_positive_contributions_fall_back_to_largest() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(pick_critique(&[(1, 0.0), (4, 0.0)], &mut rng).unwrap(), 1);
        assert_eq!(
            pick_critique(&[(1, -2.0), (4, -0.5), (6, -0.5)], &mut rng).unwrap(),
            4
        );
    }

    #[test]
    fn empty_candidates_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            pick_critique(&[], &mut rng),
            Err(UserError::CatalogExhausted)
        );
    }
}

//! Regret, slack and missing-gain bookkeeping for finished runs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::Domain;
use crate::learner::ElicitationTrace;
use crate::model::{dot, norm_sq, TOLERANCE};

/// Tolerance of the `<w*, w^{T+1}>` identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegretError {
    #[error("alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("w* has {got} entries, the catalog has {expected}")]
    WeightLength { got: usize, expected: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationTerms {
    pub t: usize,
    /// `u*(x*) - u*(x^t)`.
    pub loss: f64,
    /// `u*(xbar^t) - u*(x^t)`.
    pub gain: f64,
    /// `alpha * loss - gain`.
    pub slack: f64,
    /// Part of the gain carried by features outside the view.
    pub missing_gain: f64,
    pub weight_norm: f64,
    pub features: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub alpha: f64,
    pub iterations: Vec<IterationTerms>,
    /// Average loss over the recorded iterations.
    pub average_regret: f64,
    pub bound_rhs: f64,
    pub radius: f64,
    pub w_star_norm: f64,
}

impl RegretReport {
    pub fn bound_holds(&self) -> bool {
        self.average_regret <= self.bound_rhs + TOLERANCE
    }
}

/// Per-iteration loss, slack and missing gain, and the regret bound
/// `2 R |w*| / (alpha sqrt T) + sum(slack + missing) / (alpha T)`.
pub fn regret_accounting<D: Domain>(
    domain: &D,
    trace: &ElicitationTrace<D::Config>,
    w_star: &[f64],
    x_star: &D::Config,
    alpha: f64,
) -> Result<RegretReport, RegretError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(RegretError::InvalidAlpha(alpha));
    }
    let m = domain.catalog().len();
    if w_star.len() != m {
        return Err(RegretError::WeightLength {
            got: w_star.len(),
            expected: m,
        });
    }
    let u = |x: &D::Config| dot(w_star, &domain.full_features(x));
    let best = u(x_star);
    let iterations: Vec<IterationTerms> = trace
        .records
        .iter()
        .map(|r| {
            let before = domain.full_features(&r.suggested);
            let after = domain.full_features(&r.improved);
            let loss = best - dot(w_star, &before);
            let gain = dot(w_star, &after) - dot(w_star, &before);
            let mut seen = 0.0;
            for &i in trace.view_at(r).indices() {
                seen += w_star[i] * (after[i] - before[i]);
            }
            IterationTerms {
                t: r.t,
                loss,
                gain,
                slack: alpha * loss - gain,
                missing_gain: gain - seen,
                weight_norm: norm_sq(&r.weights).sqrt(),
                features: r.features,
            }
        })
        .collect();
    let radius = domain.catalog().norm_bound();
    let w_star_norm = norm_sq(w_star).sqrt();
    let (average_regret, bound_rhs) = if iterations.is_empty() {
        (0.0, 0.0)
    } else {
        let t = iterations.len() as f64;
        let avg = iterations.iter().map(|i| i.loss).sum::<f64>() / t;
        let extra: f64 = iterations.iter().map(|i| i.slack + i.missing_gain).sum();
        (
            avg,
            2.0 * radius * w_star_norm / (alpha * t.sqrt()) + extra / (alpha * t),
        )
    };
    Ok(RegretReport {
        alpha,
        iterations,
        average_regret,
        bound_rhs,
        radius,
        w_star_norm,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum StepViolation {
    /// `|w^{t+1}|^2 > |w^t|^2 + 4 R^2`.
    NormGrowth {
        t: usize,
        before: f64,
        after: f64,
        limit: f64,
    },
    /// `<w^t, phi(xbar) - phi(x)> > 0`.
    Optimality { t: usize, value: f64, exact: bool },
    /// `<w*, w^{T+1}> != sum(gain) - sum(missing)`.
    Identity { lhs: f64, rhs: f64 },
}

impl StepViolation {
    /// Optimality failures of inexact searches are expected.
    pub fn is_fatal(&self) -> bool {
        !matches!(self, StepViolation::Optimality { exact: false, .. })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepChecks {
    pub violations: Vec<StepViolation>,
}

impl StepChecks {
    pub fn passed(&self) -> bool {
        self.violations.iter().all(|v| !v.is_fatal())
    }
}

/// Checks the three per-run steps behind the regret bound.
pub fn step_checks<D: Domain>(
    domain: &D,
    trace: &ElicitationTrace<D::Config>,
    w_star: &[f64],
    report: &RegretReport,
) -> StepChecks {
    let r2 = report.radius * report.radius;
    let mut violations = Vec::new();
    for (i, r) in trace.records.iter().enumerate() {
        let w = trace.weights_before(i);
        let before = norm_sq(&w);
        let after = norm_sq(&r.weights);
        let limit = before + 4.0 * r2;
        if after > limit + TOLERANCE * limit.max(1.0) {
            violations.push(StepViolation::NormGrowth {
                t: r.t,
                before,
                after,
                limit,
            });
        }
        let view = trace.view_at(r);
        let delta: Vec<f64> = view
            .select(&domain.full_features(&r.improved))
            .iter()
            .zip(view.select(&domain.full_features(&r.suggested)))
            .map(|(a, b)| a - b)
            .collect();
        let value = dot(&w, &delta);
        if value > TOLERANCE * (1.0 + norm_sq(&w).sqrt()) {
            let v = StepViolation::Optimality {
                t: r.t,
                value,
                exact: r.exact,
            };
            if !r.exact {
                log::warn!(
                    "inexact inference at iteration {}: <w, delta> = {value}",
                    r.t
                );
            }
            violations.push(v);
        }
    }
    let scattered = trace.final_view.scatter(&trace.final_weights, w_star.len());
    let lhs = dot(w_star, &scattered);
    let rhs: f64 = report
        .iterations
        .iter()
        .map(|i| i.gain - i.missing_gain)
        .sum();
    if (lhs - rhs).abs() > IDENTITY_TOLERANCE {
        violations.push(StepViolation::Identity { lhs, rhs });
    }
    StepChecks { violations }
}

//! Deciding whether some weight vector strictly ranks every collected pair.
//!
//! A dataset of feature deltas `d_j = phi(improved_j) - phi(suggested_j)`
//! is consistent iff there is `w` with `<w, d_j> > 0` for all `j`. By
//! positive scaling this is the same as `<w, d_j> >= 1`, except for
//! zero deltas, which no `w` can rank and which make the dataset
//! inconsistent outright.

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, DomainError};
use crate::model::{dot, feature_delta, FeatureView, RankingPair, TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ConsistencyMethod {
    /// Margin perceptron on `<w, d> >= 1`, declared inconsistent when it
    /// has not converged after `max_epochs` passes.
    MarginPerceptron { max_epochs: usize },
    /// Exact phase-one simplex on the alternative system
    /// `sum_j l_j d_j = 0, sum_j l_j = 1, l >= 0` (Gordan).
    Simplex,
}

impl Default for ConsistencyMethod {
    fn default() -> Self {
        ConsistencyMethod::MarginPerceptron { max_epochs: 1000 }
    }
}

impl ConsistencyMethod {
    pub fn is_consistent(&self, deltas: &[Vec<f64>]) -> bool {
        if deltas
            .iter()
            .any(|d| d.iter().all(|v| v.abs() <= TOLERANCE))
        {
            return false;
        }
        if deltas.is_empty() {
            return true;
        }
        match *self {
            ConsistencyMethod::MarginPerceptron { max_epochs } => {
                margin_perceptron(deltas, max_epochs)
            }
            ConsistencyMethod::Simplex => !gordan_alternative_feasible(deltas),
        }
    }
}

/// Consistency of the collected pairs in the current view.
pub fn is_consistent<D: Domain>(
    domain: &D,
    pairs: &[RankingPair<D::Config>],
    view: &FeatureView,
    method: ConsistencyMethod,
) -> Result<bool, DomainError> {
    let deltas = pairs
        .iter()
        .map(|p| feature_delta(domain, view, &p.improved, &p.suggested))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(method.is_consistent(&deltas))
}

fn margin_perceptron(deltas: &[Vec<f64>], max_epochs: usize) -> bool {
    let dim = deltas.iter().map(Vec::len).max().unwrap_or(0);
    let mut w = vec![0.0; dim];
    for _ in 0..max_epochs {
        let mut clean = true;
        for d in deltas {
            if dot(&w, d) < 1.0 {
                for (wi, di) in w.iter_mut().zip(d) {
                    *wi += di;
                }
                clean = false;
            }
        }
        if clean {
            return true;
        }
    }
    false
}

/// True iff there is `l >= 0` with `sum l = 1` and `sum_j l_j d_j = 0`.
fn gordan_alternative_feasible(deltas: &[Vec<f64>]) -> bool {
    let n = deltas.len();
    let dim = deltas.iter().map(Vec::len).max().unwrap_or(0);
    let rows = dim + 1;
    // Columns: n lambdas, `rows` artificials, rhs.
    let cols = n + rows + 1;
    let mut t = vec![vec![0.0; cols]; rows];
    for (j, d) in deltas.iter().enumerate() {
        for (i, &v) in d.iter().enumerate() {
            t[i][j] = v;
        }
        t[dim][j] = 1.0;
    }
    t[dim][cols - 1] = 1.0;
    for (i, row) in t.iter_mut().enumerate() {
        row[n + i] = 1.0;
    }
    let mut basis: Vec<usize> = (n..n + rows).collect();

    // Phase-one objective: minimize the sum of artificials, i.e. reduced
    // costs are minus the column sums over artificial rows.
    let mut cost = vec![0.0; cols];
    for row in &t {
        for (c, v) in row.iter().enumerate() {
            if c < n || c == cols - 1 {
                cost[c] -= v;
            }
        }
    }

    let eps = 1e-10;
    for _ in 0..10_000 {
        // Bland's rule: smallest index with negative reduced cost.
        let Some(enter) = (0..cols - 1).find(|&c| cost[c] < -eps) else {
            break;
        };
        let leave = (0..rows).filter(|&r| t[r][enter] > eps).min_by(|&a, &b| {
            let ra = t[a][cols - 1] / t[a][enter];
            let rb = t[b][cols - 1] / t[b][enter];
            ra.partial_cmp(&rb).unwrap().then(basis[a].cmp(&basis[b]))
        });
        let Some(leave) = leave else {
            break;
        };
        let pivot = t[leave][enter];
        for v in t[leave].iter_mut() {
            *v /= pivot;
        }
        let pivot_row = t[leave].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != leave {
                let f = row[enter];
                if f != 0.0 {
                    for (v, p) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * p;
                    }
                }
            }
        }
        let f = cost[enter];
        for (v, p) in cost.iter_mut().zip(&pivot_row) {
            *v -= f * p;
        }
        basis[leave] = enter;
    }
    // -cost[rhs] is the remaining sum of artificials.
    -cost[cols - 1] <= 1e-9
}

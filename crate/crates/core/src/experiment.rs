//! Simulated-user experiments: many runs of each method, aggregated per
//! iteration.
//!
//! Seeds are derived from the master seed with SplitMix64. Each derivation
//! step mixes the parent seed with a stream id, where string stream ids are
//! first hashed with 64-bit FNV-1a:
//!
//! - domain instance: `split(master, "domain")` unless the config pins it;
//! - user `u` (true weights): `split(split(master, "user"), u)`;
//! - run `r` of method `label` for user `u`:
//!   `split(split(split(master, label), u), r)`, from which the noise stream,
//!   the initial view or subspace and the loop randomness are split off.
//!
//! Users therefore do not depend on which methods are configured, and a
//! method's runs do not depend on the other methods.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consistency::ConsistencyMethod;
use crate::domain::{Domain, DomainError};
use crate::learner::{cc_loop, random_view, sample_subspace, LoopOptions, NeedCritiqueStrategy};
use crate::model::FeatureView;
use crate::rectangles::RectanglesDomain;
use crate::regret::{regret_accounting, step_checks, RegretReport, StepChecks};
use crate::trip::{SearchOptions, TripData, TripDataError, TripDomain};
use crate::user::{SimulatedUser, DEFAULT_NOISE_SIGMA};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    TripData(#[from] TripDataError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn split_seed(parent: u64, stream: u64) -> u64 {
    splitmix64(parent ^ splitmix64(stream))
}

pub fn user_seed(master: u64, user: usize) -> u64 {
    split_seed(split_seed(master, fnv1a("user")), user as u64)
}

pub fn run_seed(master: u64, label: &str, user: usize, repeat: usize) -> u64 {
    split_seed(
        split_seed(split_seed(master, fnv1a(label)), user as u64),
        repeat as u64,
    )
}

#[derive(Clone, Debug, PartialEq)]
pub enum MethodKind {
    Critiquing(NeedCritiqueStrategy),
    /// Coactive learning on a random subspace holding this fraction of the
    /// catalog.
    Learning {
        fraction: f64,
    },
}

/// A method label such as `cc:consistency`, `cc:random(0.5)` or `cl:0.8`.
#[derive(Clone, Debug, PartialEq)]
pub struct Method {
    pub label: String,
    pub kind: MethodKind,
}

impl FromStr for Method {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExperimentError::Config(format!("unknown method {s:?}"));
        let (family, arg) = s.split_once(':').ok_or_else(bad)?;
        let kind = match family {
            "cc" => {
                let strategy = match arg {
                    "consistency" => NeedCritiqueStrategy::Consistency,
                    "always" => NeedCritiqueStrategy::Always,
                    "never" => NeedCritiqueStrategy::Never,
                    _ => {
                        let theta = arg
                            .strip_prefix("random(")
                            .and_then(|a| a.strip_suffix(')'))
                            .and_then(|a| a.trim().parse::<f64>().ok())
                            .ok_or_else(bad)?;
                        if !(theta > 0.0 && theta <= 1.0) {
                            return Err(ExperimentError::Config(format!(
                                "{s}: theta must lie in (0, 1]"
                            )));
                        }
                        NeedCritiqueStrategy::Random { theta }
                    }
                };
                MethodKind::Critiquing(strategy)
            }
            "cl" => {
                let fraction: f64 = arg.trim().parse().map_err(|_| bad())?;
                if !(fraction > 0.0 && fraction <= 1.0) {
                    return Err(ExperimentError::Config(format!(
                        "{s}: fraction must lie in (0, 1]"
                    )));
                }
                MethodKind::Learning { fraction }
            }
            _ => return Err(bad()),
        };
        Ok(Method {
            label: s.to_string(),
            kind,
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Rectangles {
        #[serde(default = "default_side")]
        width: u32,
        #[serde(default = "default_side")]
        height: u32,
        #[serde(default = "default_rectangles")]
        rectangles: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
    Trip {
        #[serde(default = "default_horizon")]
        horizon: usize,
        #[serde(default)]
        seed: Option<u64>,
        /// Load cities and offerings from CSV instead of generating them.
        #[serde(default)]
        data_dir: Option<PathBuf>,
        #[serde(default)]
        search: SearchOptions,
    },
}

fn default_side() -> u32 {
    100
}

fn default_rectangles() -> usize {
    50
}

fn default_horizon() -> usize {
    6
}

/// Features known before the first critique.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialView {
    /// Uniformly drawn features, fresh per run.
    Random {
        count: usize,
    },
    /// The trip domain's always-known linear features.
    Base,
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub domain: DomainSpec,
    pub methods: Vec<Method>,
    #[serde(default = "default_users")]
    pub n_users: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_sigma")]
    pub noise_sigma: f64,
    #[serde(default = "default_repeats")]
    pub cl_subspace_repeats: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Defaults to two random features on rectangles and the base
    /// features on trips.
    #[serde(default)]
    pub initial_view: Option<InitialView>,
    #[serde(default)]
    pub consistency: ConsistencyMethod,
}

fn default_users() -> usize {
    20
}

fn default_iterations() -> usize {
    100
}

fn default_sigma() -> f64 {
    DEFAULT_NOISE_SIGMA
}

fn default_repeats() -> usize {
    5
}

fn default_alpha() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn new(domain: DomainSpec, methods: Vec<Method>) -> Self {
        ExperimentConfig {
            domain,
            methods,
            n_users: default_users(),
            iterations: default_iterations(),
            noise_sigma: default_sigma(),
            cl_subspace_repeats: default_repeats(),
            master_seed: 0,
            alpha: default_alpha(),
            initial_view: None,
            consistency: ConsistencyMethod::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|source| ExperimentError::Json {
                path: path.to_path_buf(),
                source,
            })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let fail = |m: &str| Err(ExperimentError::Config(m.to_string()));
        if self.methods.is_empty() {
            return fail("no methods configured");
        }
        let mut labels: Vec<&str> = self.methods.iter().map(|m| m.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return fail("duplicate method labels");
        }
        if self.n_users == 0 {
            return fail("n_users must be positive");
        }
        if self.cl_subspace_repeats == 0 {
            return fail("cl_subspace_repeats must be positive");
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return fail("noise_sigma must be a non-negative number");
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return fail("alpha must lie in (0, 1]");
        }
        match (&self.domain, self.initial_view) {
            (DomainSpec::Rectangles { .. }, Some(InitialView::Base)) => {
                fail("the base view only exists on trips")
            }
            (_, Some(InitialView::Random { count: 0 })) => {
                fail("the initial view must not be empty")
            }
            (DomainSpec::Trip { horizon: 0, .. }, _) => fail("horizon must be positive"),
            _ => Ok(()),
        }
    }

    pub fn domain_seed(&self) -> u64 {
        let pinned = match &self.domain {
            DomainSpec::Rectangles { seed, .. } | DomainSpec::Trip { seed, .. } => *seed,
        };
        pinned.unwrap_or_else(|| split_seed(self.master_seed, fnv1a("domain")))
    }

    /// Runs per user. A full-catalog subspace is the same on every draw, so
    /// it gets a single run.
    pub fn repeats(&self, method: &Method) -> usize {
        match method.kind {
            MethodKind::Learning { fraction } if fraction >= 1.0 => 1,
            MethodKind::Learning { .. } => self.cl_subspace_repeats,
            MethodKind::Critiquing(_) => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub method: String,
    pub user: usize,
    pub repeat: usize,
    pub seed: u64,
    /// Loss of the suggestion at iterations `1..=T`; after satisfaction the
    /// last suggestion's loss is carried forward.
    pub losses: Vec<f64>,
    /// View size at iterations `1..=T`.
    pub features: Vec<usize>,
    pub satisfied_at: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<RegretReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<StepChecks>,
}

impl RunResult {
    pub fn is_valid(&self) -> bool {
        self.error.is_none() && self.checks.as_ref().is_some_and(StepChecks::passed)
    }

    pub fn bound_holds(&self) -> bool {
        self.report.as_ref().is_some_and(RegretReport::bound_holds)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    pub iteration: usize,
    pub median_loss: f64,
    pub mean_features: f64,
    /// Users whose runs for this method all completed and passed checks.
    pub runs_valid: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub config: ExperimentConfig,
    pub rows: Vec<ResultRow>,
    pub runs: Vec<RunResult>,
}

pub const CSV_HEADER: [&str; 5] = [
    "method",
    "iteration",
    "median_loss",
    "mean_features",
    "runs_valid",
];

impl ResultsTable {
    pub fn all_valid(&self) -> bool {
        self.runs.iter().all(RunResult::is_valid)
    }

    pub fn all_bounds_hold(&self) -> bool {
        self.runs.iter().all(RunResult::bound_holds)
    }

    pub fn rows_for<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.method == method)
    }

    pub fn row(&self, method: &str, iteration: usize) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.iteration == iteration)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.method.clone(),
                r.iteration.to_string(),
                r.median_loss.to_string(),
                r.mean_features.to_string(),
                r.runs_valid.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("results serialize")
    }

    pub fn emit(&self, format: OutputFormat, path: &Path) -> Result<(), ExperimentError> {
        let body = match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        };
        let io = |source| ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut f = std::fs::File::create(path).map_err(io)?;
        f.write_all(body.as_bytes()).map_err(io)?;
        f.flush().map_err(io)
    }

    pub fn load_json(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ExperimentError::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Builds the configured domain instance.
pub enum BuiltDomain {
    Rectangles(RectanglesDomain),
    Trip(TripDomain),
}

pub fn build_domain(config: &ExperimentConfig) -> Result<BuiltDomain, ExperimentError> {
    let seed = config.domain_seed();
    Ok(match &config.domain {
        DomainSpec::Rectangles {
            width,
            height,
            rectangles,
            ..
        } => BuiltDomain::Rectangles(RectanglesDomain::generate(
            *width,
            *height,
            *rectangles,
            seed,
        )?),
        DomainSpec::Trip {
            horizon,
            data_dir,
            search,
            ..
        } => {
            let data = match data_dir {
                Some(dir) => TripData::load_csv(dir)?,
                None => TripData::generate_with_horizon(seed, *horizon),
            };
            BuiltDomain::Trip(TripDomain::new(data)?.with_search(*search))
        }
    })
}

/// Runs every configured method for every user on `workers` threads.
pub fn run_experiment(
    config: &ExperimentConfig,
    workers: usize,
) -> Result<ResultsTable, ExperimentError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    pool.install(|| match build_domain(config)? {
        BuiltDomain::Rectangles(d) => {
            let initial = config
                .initial_view
                .unwrap_or(InitialView::Random { count: 2 });
            run_on(&d, config, initial, None)
        }
        BuiltDomain::Trip(d) => {
            let initial = config.initial_view.unwrap_or(InitialView::Base);
            let base = d.base_view();
            run_on(&d, config, initial, Some(base))
        }
    })
}

/// Runs the experiment on an already built domain.
pub fn run_on<D: Domain>(
    domain: &D,
    config: &ExperimentConfig,
    initial: InitialView,
    base_view: Option<FeatureView>,
) -> Result<ResultsTable, ExperimentError> {
    if initial == InitialView::Base && base_view.is_none() {
        return Err(ExperimentError::Config(
            "this domain has no base view".into(),
        ));
    }
    let users: Vec<SimulatedUser<D::Config>> = (0..config.n_users)
        .into_par_iter()
        .map(|u| {
            SimulatedUser::sample(domain, config.noise_sigma, user_seed(config.master_seed, u))
        })
        .collect::<Result<_, _>>()?;
    log::info!("sampled {} users", users.len());

    let jobs: Vec<(&Method, usize, usize)> = config
        .methods
        .iter()
        .flat_map(|m| {
            (0..config.n_users).flat_map(move |u| (0..config.repeats(m)).map(move |r| (m, u, r)))
        })
        .collect();
    let runs: Vec<RunResult> = jobs
        .par_iter()
        .map(|&(method, u, r)| {
            let seed = run_seed(config.master_seed, &method.label, u, r);
            let run = run_one(
                domain,
                config,
                method,
                &users[u],
                initial,
                base_view.as_ref(),
                seed,
            );
            log::debug!("{} user {u} repeat {r} done", method.label);
            RunResult {
                user: u,
                repeat: r,
                ..run
            }
        })
        .collect();
    let rows = aggregate(config, &runs);
    Ok(ResultsTable {
        config: config.clone(),
        rows,
        runs,
    })
}

fn run_one<D: Domain>(
    domain: &D,
    config: &ExperimentConfig,
    method: &Method,
    prototype: &SimulatedUser<D::Config>,
    initial: InitialView,
    base_view: Option<&FeatureView>,
    seed: u64,
) -> RunResult {
    let mut result = RunResult {
        method: method.label.clone(),
        user: 0,
        repeat: 0,
        seed,
        losses: Vec::new(),
        features: Vec::new(),
        satisfied_at: None,
        error: None,
        report: None,
        checks: None,
    };
    let m = domain.catalog().len();
    let mut user = prototype.clone();
    user.reseed(split_seed(seed, 1));
    let mut view_rng = ChaCha8Rng::seed_from_u64(split_seed(seed, 2));
    let (view, strategy) = match method.kind {
        MethodKind::Learning { fraction } => (
            sample_subspace(m, fraction, &mut view_rng),
            NeedCritiqueStrategy::Never,
        ),
        MethodKind::Critiquing(strategy) => {
            let view = match initial {
                InitialView::Random { count } => random_view(m, count, &mut view_rng),
                InitialView::Base => Ok(base_view.cloned().expect("checked by the caller")),
                InitialView::Full => Ok(FeatureView::full(m)),
            };
            (view, strategy)
        }
    };
    let view = match view {
        Ok(v) => v,
        Err(e) => {
            result.error = Some(e.to_string());
            return result;
        }
    };
    let options = LoopOptions {
        iterations: config.iterations,
        strategy,
        consistency: config.consistency,
        seed: split_seed(seed, 3),
    };
    let trace = match cc_loop(domain, &view, &mut user, &options) {
        Ok(t) => t,
        Err(e) => {
            result.error = Some(e.to_string());
            return result;
        }
    };
    let report = match regret_accounting(domain, &trace, user.w_star(), user.x_star(), config.alpha)
    {
        Ok(r) => r,
        Err(e) => {
            result.error = Some(e.to_string());
            return result;
        }
    };
    let checks = step_checks(domain, &trace, user.w_star(), &report);
    for t in 1..=config.iterations {
        let (loss, features) = match trace.records.get(t - 1) {
            Some(r) => (user.loss(domain, &r.suggested), r.features),
            None => {
                let last = trace
                    .final_suggestion
                    .as_ref()
                    .expect("a short trace ends in satisfaction");
                (user.loss(domain, last), trace.final_view.len())
            }
        };
        result.losses.push(loss);
        result.features.push(features);
    }
    result.satisfied_at = trace.satisfied_at;
    result.report = Some(report);
    result.checks = Some(checks);
    result
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Per method and iteration: the median over users of the loss (averaged
/// over a user's subspace repeats) and the mean view size.
pub fn aggregate(config: &ExperimentConfig, runs: &[RunResult]) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for method in &config.methods {
        let per_user: Vec<Vec<&RunResult>> = (0..config.n_users)
            .map(|u| {
                runs.iter()
                    .filter(|r| r.method == method.label && r.user == u)
                    .collect()
            })
            .collect();
        let valid: Vec<&Vec<&RunResult>> = per_user
            .iter()
            .filter(|rs| !rs.is_empty() && rs.iter().all(|r| r.is_valid()))
            .collect();
        for t in 1..=config.iterations {
            let mut losses: Vec<f64> = valid
                .iter()
                .map(|rs| rs.iter().map(|r| r.losses[t - 1]).sum::<f64>() / rs.len() as f64)
                .collect();
            let features: Vec<f64> = valid
                .iter()
                .map(|rs| {
                    rs.iter().map(|r| r.features[t - 1] as f64).sum::<f64>() / rs.len() as f64
                })
                .collect();
            let mean_features = if features.is_empty() {
                f64::NAN
            } else {
                features.iter().sum::<f64>() / features.len() as f64
            };
            rows.push(ResultRow {
                method: method.label.clone(),
                iteration: t,
                median_loss: median(&mut losses),
                mean_features,
                runs_valid: valid.len(),
            });
        }
    }
    rows
}

/// Re-derives every stored run's regret bound from its per-iteration
/// terms. Returns the runs that fail.
pub fn check_bounds(table: &ResultsTable) -> Vec<String> {
    let mut failures = Vec::new();
    for run in &table.runs {
        let id = format!("{} user {} repeat {}", run.method, run.user, run.repeat);
        let Some(report) = &run.report else {
            failures.push(format!("{id}: no regret report"));
            continue;
        };
        let its = &report.iterations;
        if its.is_empty() {
            continue;
        }
        let t = its.len() as f64;
        let alpha = report.alpha;
        let avg = its.iter().map(|i| i.loss).sum::<f64>() / t;
        let extra: f64 = its.iter().map(|i| i.slack + i.missing_gain).sum();
        let rhs =
            2.0 * report.radius * report.w_star_norm / (alpha * t.sqrt()) + extra / (alpha * t);
        let consistent_terms = its.iter().all(|i| {
            (i.slack - (alpha * i.loss - i.gain)).abs()
                <= 1e-9 * (1.0 + i.loss.abs() + i.gain.abs())
        });
        if !consistent_terms {
            failures.push(format!("{id}: stored slack does not match loss and gain"));
        }
        if avg > rhs + crate::model::TOLERANCE {
            failures.push(format!("{id}: average regret {avg} exceeds bound {rhs}"));
        }
        if !run.is_valid() {
            failures.push(format!("{id}: run invalid"));
        }
    }
    failures
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_labels_parse() {
        let m: Method = "cc:random(0.25)".parse().unwrap();
        assert_eq!(
            m.kind,
            MethodKind::Critiquing(NeedCritiqueStrategy::Random { theta: 0.25 })
        );
        let m: Method = "cl:0.8".parse().unwrap();
        assert_eq!(m.kind, MethodKind::Learning { fraction: 0.8 });
        assert!("cl:0".parse::<Method>().is_err());
        assert!("cc:random(1.5)".parse::<Method>().is_err());
        assert!("xx:1".parse::<Method>().is_err());
    }

    #[test]
    fn median_of_odd_constant_list() {
        assert_eq!(median(&mut [2.0, 2.0, 2.0]), 2.0);
        assert_eq!(median(&mut [3.0, 1.0, 2.0, 10.0]), 2.5);
    }

    #[test]
    fn seeds_are_stable() {
        assert_eq!(fnv1a(""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a("a"), 0xaf63_dc4c_8601_ec8c);
        assert_eq!(splitmix64(0), 0xe220_a839_7b1d_cdaf);
        assert_ne!(user_seed(1, 0), user_seed(1, 1));
        assert_ne!(run_seed(1, "cl:0.2", 0, 0), run_seed(1, "cl:0.2", 0, 1));
    }
}

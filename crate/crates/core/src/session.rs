//! Human elicitation sessions on the trip domain.
//!
//! A session is the critiquing loop cut open at its two user interactions.
//! Status moves `suggesting -> awaiting_improvement -> (awaiting_critique)
//! -> suggesting`, and ends in `done` when the user keeps a suggestion.
//! Sessions persist as one JSON document each, replaced atomically.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consistency::{is_consistent, ConsistencyMethod};
use crate::domain::{Domain, DomainError};
use crate::dsl::{self, DslError};
use crate::learner::{ElicitationTrace, IterationRecord};
use crate::model::{
    extend_view, feature_delta, perceptron_update, utility, Critique, FeatureView, RankingPair,
    WeightVector,
};
use crate::trip::{Route, Season, TripData, TripDataError, TripDomain, TripFeature};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Suggesting,
    AwaitingImprovement,
    AwaitingCritique,
    Done,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Suggesting => "suggesting",
            Status::AwaitingImprovement => "awaiting_improvement",
            Status::AwaitingCritique => "awaiting_critique",
            Status::Done => "done",
        }
    }
}

/// What the client should do after submitting an improvement or critique.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Next {
    CritiqueNeeded,
    SuggestionReady,
    Done,
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("operation not allowed while the session is {}", .0.name())]
    WrongStatus(Status),
    #[error("route is infeasible")]
    Infeasible(Vec<String>),
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error("feature '{0}' is already part of the model")]
    DuplicateCritique(String),
    #[error("domain error: {0}")]
    Domain(DomainError),
    #[error("invalid trip data: {0}")]
    TripData(#[from] TripDataError),
}

impl From<DomainError> for SessionError {
    fn from(e: DomainError) -> Self {
        match e {
            DomainError::Infeasible(p) => SessionError::Infeasible(p),
            other => SessionError::Domain(other),
        }
    }
}

/// Domain of a new session. Trip data is generated from `seed` unless
/// given inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SessionDomainSpec {
    Trip {
        #[serde(default = "default_horizon")]
        horizon: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        season: Option<Season>,
        #[serde(default)]
        data: Option<TripData>,
    },
}

fn default_horizon() -> usize {
    6
}

impl SessionDomainSpec {
    pub fn build(&self) -> Result<TripDomain, SessionError> {
        let SessionDomainSpec::Trip {
            horizon,
            seed,
            season,
            data,
        } = self;
        let data = match data {
            Some(d) => d.clone(),
            None => TripData::generate_with_horizon(*seed, *horizon),
        };
        Ok(TripDomain::with_season(
            data,
            season.unwrap_or(Season::Winter),
        )?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub status: Status,
    pub domain: TripDomain,
    pub consistency: ConsistencyMethod,
    pub initial_view: FeatureView,
    pub view: FeatureView,
    pub weights: Vec<f64>,
    pub pairs: Vec<RankingPair<Route>>,
    /// Number of suggestions made so far.
    pub iteration: usize,
    pub suggestion: Option<Route>,
    /// Improvement waiting for a critique.
    pub pending: Option<Route>,
    suggestion_exact: bool,
    pub records: Vec<IterationRecord<Route>>,
    pub satisfied_at: Option<usize>,
}

/// What a critique would add, without applying it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Preview {
    pub feature: String,
    pub on_suggestion: Option<f64>,
    pub on_improvement: Option<f64>,
    pub duplicate: bool,
}

impl Session {
    /// Starts from `w = 0` over the base features.
    pub fn new(id: impl Into<String>, domain: TripDomain, consistency: ConsistencyMethod) -> Self {
        let view = domain.base_view();
        Session {
            id: id.into(),
            status: Status::Suggesting,
            consistency,
            initial_view: view.clone(),
            weights: vec![0.0; view.len()],
            view,
            domain,
            pairs: Vec::new(),
            iteration: 0,
            suggestion: None,
            pending: None,
            suggestion_exact: true,
            records: Vec::new(),
            satisfied_at: None,
        }
    }

    /// Infers the next suggestion. Asking again before answering returns
    /// the same route.
    pub fn suggest(&mut self) -> Result<Route, SessionError> {
        match self.status {
            Status::AwaitingImprovement => {
                return Ok(self.suggestion.clone().expect("awaiting an improvement"))
            }
            Status::Suggesting => {}
            s => return Err(SessionError::WrongStatus(s)),
        }
        let inference = self.domain.infer_argmax(&self.weights, &self.view)?;
        self.iteration += 1;
        self.suggestion = Some(inference.config.clone());
        self.suggestion_exact = inference.exact;
        self.status = Status::AwaitingImprovement;
        Ok(inference.config)
    }

    pub fn submit_improvement(&mut self, improved: Route) -> Result<Next, SessionError> {
        if self.status != Status::AwaitingImprovement {
            return Err(SessionError::WrongStatus(self.status));
        }
        self.domain.check_feasible(&improved)?;
        let x = self.suggestion.clone().expect("awaiting an improvement");
        if improved == x {
            self.status = Status::Done;
            self.satisfied_at = Some(self.iteration);
            return Ok(Next::Done);
        }
        self.pairs.push(RankingPair {
            suggested: x,
            improved: improved.clone(),
            iteration: self.iteration,
        });
        if is_consistent(&self.domain, &self.pairs, &self.view, self.consistency)? {
            self.update(improved, None)?;
            Ok(Next::SuggestionReady)
        } else {
            self.pending = Some(improved);
            self.status = Status::AwaitingCritique;
            Ok(Next::CritiqueNeeded)
        }
    }

    pub fn preview(&self, expression: &str) -> Result<Preview, SessionError> {
        let feature = dsl::compile(expression, &self.domain)?;
        let value = |r: &Route| feature.value(&self.domain, &self.domain.summary(r));
        let duplicate = self
            .domain
            .find_feature(&feature)
            .is_some_and(|i| self.view.contains(i));
        Ok(Preview {
            feature: feature.name(),
            on_suggestion: self.suggestion.as_ref().map(value),
            on_improvement: self.pending.as_ref().map(value),
            duplicate,
        })
    }

    /// Adds the critique's feature to the view, then applies the pending
    /// update in the extended view. Returns the feature's catalog index.
    pub fn submit_critique(&mut self, expression: &str) -> Result<usize, SessionError> {
        if self.status != Status::AwaitingCritique {
            return Err(SessionError::WrongStatus(self.status));
        }
        let feature = dsl::compile(expression, &self.domain)?;
        let index = match self.domain.find_feature(&feature) {
            Some(i) if self.view.contains(i) => {
                return Err(SessionError::DuplicateCritique(feature.name()))
            }
            Some(i) => i,
            None => self.domain.push_feature(feature),
        };
        let critique = Critique {
            catalog_index: index,
            expression: Some(expression.to_string()),
        };
        let w = WeightVector::from_vec(std::mem::take(&mut self.weights));
        let (view, w) = extend_view(&self.view, &w, &critique, self.domain.catalog().len())
            .expect("index is in the catalog and not in the view");
        self.view = view;
        self.weights = w.into_vec();
        let improved = self.pending.take().expect("awaiting a critique");
        self.update(improved, Some(critique))?;
        Ok(index)
    }

    fn update(&mut self, improved: Route, critique: Option<Critique>) -> Result<(), SessionError> {
        let x = self.suggestion.take().expect("a suggestion is outstanding");
        let delta = feature_delta(&self.domain, &self.view, &improved, &x)?;
        let w = perceptron_update(
            &WeightVector::from_vec(std::mem::take(&mut self.weights)),
            &delta,
        );
        self.weights = w.into_vec();
        self.records.push(IterationRecord {
            t: self.iteration,
            suggested: x,
            improved,
            critique,
            features: self.view.len(),
            weights: self.weights.clone(),
            exact: self.suggestion_exact,
        });
        self.status = Status::Suggesting;
        Ok(())
    }

    /// Utility of `route` under the current model.
    pub fn utility(&self, route: &Route) -> Result<f64, SessionError> {
        let w = WeightVector::from_vec(self.weights.clone());
        Ok(utility(&self.domain, &w, &self.view, route)?)
    }

    pub fn view_features(&self) -> Vec<(usize, &TripFeature)> {
        self.view
            .indices()
            .iter()
            .map(|&i| (i, &self.domain.features()[i]))
            .collect()
    }

    /// The session in the same shape as a simulated run.
    pub fn trace(&self) -> ElicitationTrace<Route> {
        ElicitationTrace {
            initial_view: self.initial_view.clone(),
            records: self.records.clone(),
            final_view: self.view.clone(),
            final_weights: self.weights.clone(),
            satisfied_at: self.satisfied_at,
            final_suggestion: self.satisfied_at.and(self.suggestion.clone()),
        }
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("session {0} not found")]
    NotFound(String),
    #[error("session {id} is unreadable: {reason}")]
    Corrupt { id: String, reason: String },
    #[error("invalid session id '{0}'")]
    InvalidId(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// One JSON file per session under a data directory.
#[derive(Clone, Debug)]
pub struct SessionStore {
    dir: PathBuf,
}

impl SessionStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| StoreError::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(SessionStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, id: &str) -> Result<PathBuf, StoreError> {
        let ok = !id.is_empty()
            && id.len() <= 64
            && id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
        if !ok {
            return Err(StoreError::InvalidId(id.to_string()));
        }
        Ok(self.dir.join(format!("{id}.json")))
    }

    /// Writes to a temporary file and renames it over the old document.
    pub fn save(&self, session: &Session) -> Result<(), StoreError> {
        let path = self.path(&session.id)?;
        let tmp = self.dir.join(format!(".{}.json.tmp", session.id));
        let io_err = |source| StoreError::Io {
            path: tmp.clone(),
            source,
        };
        let json = serde_json::to_vec_pretty(session).expect("sessions serialize");
        let mut file = fs::File::create(&tmp).map_err(io_err)?;
        file.write_all(&json).map_err(io_err)?;
        file.sync_all().map_err(io_err)?;
        fs::rename(&tmp, &path).map_err(|source| StoreError::Io { path, source })
    }

    pub fn load(&self, id: &str) -> Result<Session, StoreError> {
        let path = self.path(id)?;
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::NotFound(id.to_string()))
            }
            Err(source) => return Err(StoreError::Io { path, source }),
        };
        let session: Session = serde_json::from_slice(&bytes).map_err(|e| StoreError::Corrupt {
            id: id.to_string(),
            reason: e.to_string(),
        })?;
        if session.id != id {
            return Err(StoreError::Corrupt {
                id: id.to_string(),
                reason: format!("document holds session {}", session.id),
            });
        }
        Ok(session)
    }

    /// Ids of every stored document, readable or not, sorted.
    pub fn list(&self) -> Result<Vec<String>, StoreError> {
        let entries = fs::read_dir(&self.dir).map_err(|source| StoreError::Io {
            path: self.dir.clone(),
            source,
        })?;
        let mut ids: Vec<String> = entries
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().into_string().ok()?;
                let id = name.strip_suffix(".json")?;
                (!id.starts_with('.')).then(|| id.to_string())
            })
            .collect();
        ids.sort();
        Ok(ids)
    }
}

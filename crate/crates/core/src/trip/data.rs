//! Raw trip-planning data: cities, activity offerings and trip metadata,
//! with a seeded generator and a CSV reader/writer.
//!
//! The on-disk layout is three files in one directory:
//!
//! * `cities.csv`: `id,name,region,cost,x,y`
//! * `activities.csv`: `city_id,activity_id,offering` (offering is 0 or 1)
//! * `meta.csv`: `horizon,seed`

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const NUM_ACTIVITIES: usize = 15;
pub const DEFAULT_HORIZON: usize = 10;

/// Activity types and whether they take place indoors.
pub const ACTIVITIES: [(&str, bool); NUM_ACTIVITIES] = [
    ("museum", true),
    ("theatre", true),
    ("spa", true),
    ("shopping", true),
    ("fine_dining", true),
    ("healthcare", true),
    ("luxury_resort", true),
    ("wine_tasting", true),
    ("hiking", false),
    ("skiing", false),
    ("lake", false),
    ("cycling", false),
    ("climbing", false),
    ("historic_sites", false),
    ("festivals", false),
];

const CITY_NAMES: [&str; 10] = [
    "Trento",
    "Rovereto",
    "Riva del Garda",
    "Arco",
    "Pergine",
    "Levico",
    "Cavalese",
    "Predazzo",
    "Cles",
    "Madonna di Campiglio",
];

const REGION_NAMES: [&str; 4] = ["Alto Garda", "Val di Fiemme", "Val di Non", "Valsugana"];

#[derive(Debug, Error)]
pub enum TripDataError {
    #[error("{file}: row {row}, column {column}: {message}")]
    Parse {
        file: String,
        row: usize,
        column: String,
        message: String,
    },
    #[error("invalid trip data: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct City {
    pub id: usize,
    pub name: String,
    pub region: String,
    pub cost: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripData {
    pub cities: Vec<City>,
    /// `offerings[city][activity]`.
    pub offerings: Vec<Vec<bool>>,
    pub horizon: usize,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct ActivityRow {
    city_id: usize,
    activity_id: usize,
    offering: u8,
}

#[derive(Serialize, Deserialize)]
struct MetaRow {
    horizon: usize,
    seed: u64,
}

impl TripData {
    /// Ten cities spread over four regions, fifteen activity types.
    pub fn generate(seed: u64) -> TripData {
        Self::generate_with_horizon(seed, DEFAULT_HORIZON)
    }

    pub fn generate_with_horizon(seed: u64, horizon: usize) -> TripData {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers: Vec<(f64, f64)> = REGION_NAMES
            .iter()
            .map(|_| (rng.gen_range(15.0..85.0), rng.gen_range(15.0..85.0)))
            .collect();

        // Every region gets at least one city.
        let mut regions: Vec<usize> = (0..REGION_NAMES.len()).collect();
        regions.shuffle(&mut rng);
        while regions.len() < CITY_NAMES.len() {
            regions.push(rng.gen_range(0..REGION_NAMES.len()));
        }

        let round1 = |v: f64| (v * 10.0).round() / 10.0;
        let cities: Vec<City> = CITY_NAMES
            .iter()
            .zip(&regions)
            .enumerate()
            .map(|(id, (name, &r))| {
                let (cx, cy) = centers[r];
                City {
                    id,
                    name: name.to_string(),
                    region: REGION_NAMES[r].to_string(),
                    cost: rng.gen_range(40..=220) as f64,
                    x: round1((cx + rng.gen_range(-12.0..12.0)).clamp(0.0, 100.0)),
                    y: round1((cy + rng.gen_range(-12.0..12.0)).clamp(0.0, 100.0)),
                }
            })
            .collect();

        let mut offerings: Vec<Vec<bool>> = (0..cities.len())
            .map(|_| (0..NUM_ACTIVITIES).map(|_| rng.gen_bool(0.35)).collect())
            .collect();
        for row in offerings.iter_mut() {
            if !row.iter().any(|&o| o) {
                row[rng.gen_range(0..NUM_ACTIVITIES)] = true;
            }
        }
        for a in 0..NUM_ACTIVITIES {
            if !offerings.iter().any(|row| row[a]) {
                let c = rng.gen_range(0..cities.len());
                offerings[c][a] = true;
            }
        }

        TripData {
            cities,
            offerings,
            horizon,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), TripDataError> {
        let mut problems = Vec::new();
        if self.cities.is_empty() {
            problems.push("at least one city is required".to_string());
        }
        if self.horizon == 0 {
            problems.push("horizon must be positive".to_string());
        }
        for (i, c) in self.cities.iter().enumerate() {
            if c.id != i {
                problems.push(format!(
                    "city ids must be 0..n in order; found {} at row {}",
                    c.id, i
                ));
            }
            if !c.cost.is_finite() || c.cost < 0.0 {
                problems.push(format!("city {}: cost must be a non-negative number", c.id));
            }
            if !c.x.is_finite() || !c.y.is_finite() {
                problems.push(format!("city {}: coordinates must be finite", c.id));
            }
            if c.region.trim().is_empty() {
                problems.push(format!("city {}: empty region", c.id));
            }
        }
        if self.offerings.len() != self.cities.len()
            || self.offerings.iter().any(|r| r.len() != NUM_ACTIVITIES)
        {
            problems.push(format!(
                "offerings must cover every (city, activity) pair: {} cities x {} activities",
                self.cities.len(),
                NUM_ACTIVITIES
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(TripDataError::Invalid(problems))
        }
    }

    pub fn write_csv(&self, dir: &Path) -> Result<(), TripDataError> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let cities = dir.join("cities.csv");
        let mut w = csv::Writer::from_path(&cities).map_err(|e| csv_io(&cities, e))?;
        for c in &self.cities {
            w.serialize(c).map_err(|e| csv_io(&cities, e))?;
        }
        w.flush().map_err(|e| io_err(&cities, e))?;

        let activities = dir.join("activities.csv");
        let mut w = csv::Writer::from_path(&activities).map_err(|e| csv_io(&activities, e))?;
        for (c, row) in self.offerings.iter().enumerate() {
            for (a, &offered) in row.iter().enumerate() {
                w.serialize(ActivityRow {
                    city_id: c,
                    activity_id: a,
                    offering: offered as u8,
                })
                .map_err(|e| csv_io(&activities, e))?;
            }
        }
        w.flush().map_err(|e| io_err(&activities, e))?;

        let meta = dir.join("meta.csv");
        let mut w = csv::Writer::from_path(&meta).map_err(|e| csv_io(&meta, e))?;
        w.serialize(MetaRow {
            horizon: self.horizon,
            seed: self.seed,
        })
        .map_err(|e| csv_io(&meta, e))?;
        w.flush().map_err(|e| io_err(&meta, e))?;
        Ok(())
    }

    pub fn load_csv(dir: &Path) -> Result<TripData, TripDataError> {
        let cities: Vec<City> = read_rows(&dir.join("cities.csv"))?;
        let rows: Vec<ActivityRow> = read_rows(&dir.join("activities.csv"))?;
        let meta: Vec<MetaRow> = read_rows(&dir.join("meta.csv"))?;

        let mut offerings = vec![vec![None; NUM_ACTIVITIES]; cities.len()];
        let mut problems = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.city_id >= cities.len() || row.activity_id >= NUM_ACTIVITIES {
                problems.push(format!(
                    "activities.csv row {}: unknown city {} or activity {}",
                    i + 2,
                    row.city_id,
                    row.activity_id
                ));
                continue;
            }
            if row.offering > 1 {
                problems.push(format!(
                    "activities.csv row {}: offering must be 0 or 1",
                    i + 2
                ));
            }
            let slot = &mut offerings[row.city_id][row.activity_id];
            if slot.replace(row.offering == 1).is_some() {
                problems.push(format!(
                    "activities.csv row {}: duplicate pair ({}, {})",
                    i + 2,
                    row.city_id,
                    row.activity_id
                ));
            }
        }
        for (c, row) in offerings.iter().enumerate() {
            for (a, o) in row.iter().enumerate() {
                if o.is_none() {
                    problems.push(format!("activities.csv: missing pair ({c}, {a})"));
                }
            }
        }
        if meta.len() != 1 {
            problems.push(format!(
                "meta.csv must contain exactly one row, found {}",
                meta.len()
            ));
        }
        if !problems.is_empty() {
            return Err(TripDataError::Invalid(problems));
        }
        let data = TripData {
            cities,
            offerings: offerings
                .into_iter()
                .map(|r| r.into_iter().map(|o| o.unwrap_or(false)).collect())
                .collect(),
            horizon: meta[0].horizon,
            seed: meta[0].seed,
        };
        data.validate()?;
        Ok(data)
    }
}

fn io_err(path: &Path, source: std::io::Error) -> TripDataError {
    TripDataError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_io(path: &Path, e: csv::Error) -> TripDataError {
    TripDataError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e.to_string()),
    }
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, TripDataError> {
    let file = path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => io_err(path, source),
        other => TripDataError::Parse {
            file: file.clone(),
            row: 0,
            column: String::new(),
            message: format!("{other:?}"),
        },
    })?;
    let headers = reader.headers().cloned().unwrap_or_default();
    let mut out = Vec::new();
    for record in reader.deserialize::<T>() {
        match record {
            Ok(r) => out.push(r),
            Err(e) => {
                let row = e.position().map_or(0, |p| p.line() as usize);
                let (column, message) = match e.kind() {
                    csv::ErrorKind::Deserialize { err, .. } => (
                        err.field()
                            .and_then(|f| headers.get(f as usize))
                            .unwrap_or("")
                            .to_string(),
                        err.kind().to_string(),
                    ),
                    other => (String::new(), format!("{other:?}")),
                };
                return Err(TripDataError::Parse {
                    file,
                    row,
                    column,
                    message,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_deterministic_and_complete() {
        let a = TripData::generate(42);
        let b = TripData::generate(42);
        assert_eq!(a, b);
        assert_ne!(a, TripData::generate(43));
        assert_eq!(a.cities.len(), 10);
        assert_eq!(a.offerings[0].len(), NUM_ACTIVITIES);
        assert_eq!(a.horizon, DEFAULT_HORIZON);
        a.validate().unwrap();
        for act in 0..NUM_ACTIVITIES {
            assert!(a.offerings.iter().any(|r| r[act]));
        }
        let regions: std::collections::BTreeSet<_> = a.cities.iter().map(|c| &c.region).collect();
        assert_eq!(regions.len(), 4);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let data = TripData::generate_with_horizon(9, 6);
        data.write_csv(dir.path()).unwrap();
        let back = TripData::load_csv(dir.path()).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn malformed_csv_reports_row_and_column() {
        let dir = tempfile::tempdir().unwrap();
        TripData::generate(1).write_csv(dir.path()).unwrap();
        let path = dir.path().join("cities.csv");
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[3] = "2,Riva,Alto Garda,cheap,1.0,2.0".into();
        std::fs::write(&path, lines.join("\n")).unwrap();
        match TripData::load_csv(dir.path()) {
            Err(TripDataError::Parse { row, column, .. }) => {
                assert_eq!(row, 4);
                assert_eq!(column, "cost");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_offering_pair_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        TripData::generate(1).write_csv(dir.path()).unwrap();
        let path = dir.path().join("activities.csv");
        let text = std::fs::read_to_string(&path).unwrap();
        let kept: Vec<&str> = text.lines().filter(|l| !l.starts_with("3,4,")).collect();
        std::fs::write(&path, kept.join("\n")).unwrap();
        assert!(matches!(
            TripData::load_csv(dir.path()),
            Err(TripDataError::Invalid(_))
        ));
    }

    #[test]
    fn missing_directory_is_io_error() {
        assert!(matches!(
            TripData::load_csv(Path::new("/nonexistent/trip")),
            Err(TripDataError::Io { .. })
        ));
    }
}

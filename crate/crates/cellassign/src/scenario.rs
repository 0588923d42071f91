//! Service-area layout: stations, phones, and per-station capacities.
//!
//! A [`Scenario`] is the immutable input to everything downstream: station
//! and phone positions inside a rectangular area, plus how many phones each
//! station may serve. Phone ids and station ids are dense indices starting
//! at 0 and are used directly as row/column indices in the SINR matrix.

use crate::radio::{AntennaPattern, BeamKind};
use crate::seeding::mix_seed;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use thiserror::Error;

/// Attempts allowed per clustered phone before giving up. See [`generate_biased`].
pub const REJECTION_BUDGET: usize = 1000;

/// Rectangular service area `[0, width] x [0, height]` in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub width: f64,
    pub height: f64,
}

impl Area {
    /// Closed-boundary containment test.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && x <= self.width && y >= 0.0 && y <= self.height
    }
}

/// A base station: position plus transmit antenna pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Station {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub pattern: AntennaPattern,
}

/// A mobile phone at a fixed position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phone {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

/// A complete problem instance.
///
/// `capacities[a]` is the number of phones station `a` must serve; the
/// capacities always sum to the number of phones, so every feasible
/// assignment saturates every station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub area: Area,
    pub stations: Vec<Station>,
    pub phones: Vec<Phone>,
    pub capacities: Vec<usize>,
    #[serde(rename = "seed")]
    pub rng_seed: u64,
}

/// What to do when the phone count does not divide evenly across stations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RemainderPolicy {
    /// Refuse the instance (the benchmark configurations always divide evenly).
    Reject,
    /// Give stations `0..n % m` one extra phone each.
    Distribute,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{n} phones cannot be split evenly across {m} stations")]
    NonDivisibleN { n: usize, m: usize },
    #[error("area must have positive finite width and height")]
    EmptyArea,
    #[error("need at least two stations, got {found}")]
    TooFewStations { found: usize },
    #[error("need at least one phone")]
    NoPhones,
    #[error("hot station {hot} out of range for {m} stations")]
    HotStationOutOfRange { hot: usize, m: usize },
    #[error("hot fraction must be in (0, 1], got {value}")]
    BadHotFraction { value: f64 },
    #[error(
        "could not place phone {phone} nearest to station {hot} within {attempts} attempts; \
         the cluster spread may be too wide for the station layout"
    )]
    RejectionBudgetExceeded {
        phone: usize,
        hot: usize,
        attempts: usize,
    },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// A single validation failure. A scenario is well formed iff
/// [`validate`](Scenario::validate) returns an empty list.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    BadArea,
    TooFewStations { found: usize },
    StationIdOutOfOrder { index: usize, id: usize },
    PhoneIdOutOfOrder { index: usize, id: usize },
    StationOutOfArea { id: usize },
    PhoneOutOfArea { id: usize },
    CapacityCountMismatch { stations: usize, capacities: usize },
    CapacitySumMismatch { phones: usize, total: usize },
    InvalidPattern { station: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadArea => write!(f, "area is empty or non-finite"),
            Violation::TooFewStations { found } => {
                write!(f, "need at least two stations, got {found}")
            }
            Violation::StationIdOutOfOrder { index, id } => {
                write!(f, "station at index {index} has id {id}, expected {index}")
            }
            Violation::PhoneIdOutOfOrder { index, id } => {
                write!(f, "phone at index {index} has id {id}, expected {index}")
            }
            Violation::StationOutOfArea { id } => write!(f, "station {id} lies outside the area"),
            Violation::PhoneOutOfArea { id } => write!(f, "phone {id} lies outside the area"),
            Violation::CapacityCountMismatch {
                stations,
                capacities,
            } => write!(f, "{capacities} capacities for {stations} stations"),
            Violation::CapacitySumMismatch { phones, total } => {
                write!(f, "capacities sum to {total} but there are {phones} phones")
            }
            Violation::InvalidPattern { station } => {
                write!(f, "station {station} has an invalid antenna pattern")
            }
        }
    }
}

/// Equal-split capacities: every station gets `n / m`, and under
/// [`RemainderPolicy::Distribute`] the first `n % m` stations get one more.
pub fn capacities_for(
    n: usize,
    m: usize,
    policy: RemainderPolicy,
) -> Result<Vec<usize>, ScenarioError> {
    let rem = n % m;
    if rem != 0 && policy == RemainderPolicy::Reject {
        return Err(ScenarioError::NonDivisibleN { n, m });
    }
    Ok((0..m)
        .map(|a| n / m + usize::from(a < rem))
        .collect())
}

/// Index of the station nearest to `(x, y)`, lowest id on ties.
///
/// Distance is the Euclidean distance (after `sqrt`), matching the distance
/// the power model sees, so "nearest" and "strongest isotropic signal"
/// agree wherever path loss is the only difference between stations.
pub fn nearest_station(stations: &[Station], x: f64, y: f64) -> usize {
    assert!(!stations.is_empty(), "nearest_station on empty slice");
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (a, s) in stations.iter().enumerate() {
        let d = (x - s.x).hypot(y - s.y);
        if d < best_d {
            best = a;
            best_d = d;
        }
    }
    best
}

fn check_common(
    num_phones: usize,
    stations: &[Station],
    area: Area,
) -> Result<(), ScenarioError> {
    if !(area.width > 0.0 && area.height > 0.0 && area.width.is_finite() && area.height.is_finite())
    {
        return Err(ScenarioError::EmptyArea);
    }
    if stations.len() < 2 {
        return Err(ScenarioError::TooFewStations {
            found: stations.len(),
        });
    }
    if num_phones == 0 {
        return Err(ScenarioError::NoPhones);
    }
    Ok(())
}

/// Phones i.i.d. uniform over the area. Rejects when `num_phones` is not a
/// multiple of the station count; use [`generate_uniform_with`] to distribute
/// the remainder instead.
pub fn generate_uniform(
    num_phones: usize,
    stations: Vec<Station>,
    area: Area,
    seed: u64,
) -> Result<Scenario, ScenarioError> {
    generate_uniform_with(num_phones, stations, area, seed, RemainderPolicy::Reject)
}

pub fn generate_uniform_with(
    num_phones: usize,
    stations: Vec<Station>,
    area: Area,
    seed: u64,
    policy: RemainderPolicy,
) -> Result<Scenario, ScenarioError> {
    check_common(num_phones, &stations, area)?;
    let capacities = capacities_for(num_phones, stations.len(), policy)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phones = (0..num_phones)
        .map(|id| Phone {
            id,
            x: rng.random_range(0.0..area.width),
            y: rng.random_range(0.0..area.height),
        })
        .collect();
    Ok(Scenario {
        area,
        stations,
        phones,
        capacities,
        rng_seed: seed,
    })
}

/// Phones clustered around one "hot" station.
///
/// Exactly `ceil(hot_fraction * num_phones)` phones (ids `0..k`) are drawn
/// from an isotropic Gaussian centred on the hot station, with standard
/// deviation a quarter of the smallest pairwise station distance; a draw is
/// kept only if it lands inside the area *and* its nearest station is the
/// hot one, so the hot count is exact by construction. Each clustered phone
/// gets [`REJECTION_BUDGET`] attempts before the whole generation fails.
/// The remaining phones are uniform over the area (and may, by chance, also
/// land nearest to the hot station).
pub fn generate_biased(
    num_phones: usize,
    stations: Vec<Station>,
    area: Area,
    hot_station: usize,
    hot_fraction: f64,
    seed: u64,
) -> Result<Scenario, ScenarioError> {
    generate_biased_with(
        num_phones,
        stations,
        area,
        hot_station,
        hot_fraction,
        seed,
        RemainderPolicy::Reject,
    )
}

pub fn generate_biased_with(
    num_phones: usize,
    stations: Vec<Station>,
    area: Area,
    hot_station: usize,
    hot_fraction: f64,
    seed: u64,
    policy: RemainderPolicy,
) -> Result<Scenario, ScenarioError> {
    check_common(num_phones, &stations, area)?;
    if hot_station >= stations.len() {
        return Err(ScenarioError::HotStationOutOfRange {
            hot: hot_station,
            m: stations.len(),
        });
    }
    if !(hot_fraction > 0.0 && hot_fraction <= 1.0) {
        return Err(ScenarioError::BadHotFraction {
            value: hot_fraction,
        });
    }
    let capacities = capacities_for(num_phones, stations.len(), policy)?;

    let mut min_dist = f64::INFINITY;
    for (a, sa) in stations.iter().enumerate() {
        for sb in &stations[a + 1..] {
            min_dist = min_dist.min((sa.x - sb.x).hypot(sa.y - sb.y));
        }
    }
    let sigma = min_dist / 4.0;
    let normal = Normal::new(0.0, sigma).expect("finite non-negative sigma");

    let num_hot = (hot_fraction * num_phones as f64).ceil() as usize;
    let hot = &stations[hot_station];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phones = Vec::with_capacity(num_phones);
    for id in 0..num_hot {
        let mut placed = false;
        for _ in 0..REJECTION_BUDGET {
            let x = hot.x + normal.sample(&mut rng);
            let y = hot.y + normal.sample(&mut rng);
            if area.contains(x, y) && nearest_station(&stations, x, y) == hot_station {
                phones.push(Phone { id, x, y });
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(ScenarioError::RejectionBudgetExceeded {
                phone: id,
                hot: hot_station,
                attempts: REJECTION_BUDGET,
            });
        }
    }
    for id in num_hot..num_phones {
        phones.push(Phone {
            id,
            x: rng.random_range(0.0..area.width),
            y: rng.random_range(0.0..area.height),
        });
    }
    Ok(Scenario {
        area,
        stations,
        phones,
        capacities,
        rng_seed: seed,
    })
}

/// `m` stations uniform over the area. Gaussian-beam stations point a single
/// beam at the area centre so every station illuminates the interior.
pub fn random_stations(m: usize, area: &Area, beam: BeamKind, seed: u64) -> Vec<Station> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[seed, 0x57A7]));
    (0..m)
        .map(|id| {
            let x = rng.random_range(0.0..area.width);
            let y = rng.random_range(0.0..area.height);
            let pattern = match beam {
                BeamKind::Isotropic => AntennaPattern::Isotropic,
                BeamKind::Gaussian => {
                    let az = (area.height / 2.0 - y)
                        .atan2(area.width / 2.0 - x)
                        .to_degrees();
                    AntennaPattern::default_gaussian(vec![az])
                }
            };
            Station { id, x, y, pattern }
        })
        .collect()
}

impl Scenario {
    pub fn num_phones(&self) -> usize {
        self.phones.len()
    }

    pub fn num_stations(&self) -> usize {
        self.stations.len()
    }

    /// All structural violations, empty when the scenario is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let area_ok = self.area.width > 0.0
            && self.area.height > 0.0
            && self.area.width.is_finite()
            && self.area.height.is_finite();
        if !area_ok {
            v.push(Violation::BadArea);
        }
        if self.stations.len() < 2 {
            v.push(Violation::TooFewStations {
                found: self.stations.len(),
            });
        }
        for (index, s) in self.stations.iter().enumerate() {
            if s.id != index {
                v.push(Violation::StationIdOutOfOrder { index, id: s.id });
            }
            if area_ok && !self.area.contains(s.x, s.y) {
                v.push(Violation::StationOutOfArea { id: s.id });
            }
            if !s.pattern.is_valid() {
                v.push(Violation::InvalidPattern { station: s.id });
            }
        }
        for (index, p) in self.phones.iter().enumerate() {
            if p.id != index {
                v.push(Violation::PhoneIdOutOfOrder { index, id: p.id });
            }
            if area_ok && !self.area.contains(p.x, p.y) {
                v.push(Violation::PhoneOutOfArea { id: p.id });
            }
        }
        if self.capacities.len() != self.stations.len() {
            v.push(Violation::CapacityCountMismatch {
                stations: self.stations.len(),
                capacities: self.capacities.len(),
            });
        }
        let total: usize = self.capacities.iter().sum();
        if total != self.phones.len() {
            v.push(Violation::CapacitySumMismatch {
                phones: self.phones.len(),
                total,
            });
        }
        v
    }

    pub fn to_json_string(&self) -> Result<String, ScenarioError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
        let mut out = self.to_json_string()?;
        out.push('\n');
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

//! Node-level demand: pickup/drop-off probability masses, the complement-based
//! O-D imbalance family, Hellinger distance and Poisson request streams.

use std::io;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::roadnet::NodeId;

pub const DEFAULT_MATCH_TOLERANCE_S: f64 = 60.0;
pub const DEFAULT_PICKUP_TOLERANCE_S: f64 = 300.0;

const MASS_TOLERANCE: f64 = 1e-9;
const RESAMPLE_LIMIT: usize = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum DemandError {
    #[error("all counts are zero")]
    AllZeroCounts,
    #[error("mass is uniform; its complement cannot be normalized")]
    UniformInput,
    #[error("gamma {0} outside [0, 1]")]
    GammaOutOfRange(f64),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("mass must be non-negative and sum to 1 (sum = {0})")]
    InvalidMass(f64),
    #[error("arrival period {index} invalid (duration {duration_s} s, rate {rate_per_hour}/h)")]
    InvalidPeriod {
        index: usize,
        duration_s: f64,
        rate_per_hour: f64,
    },
}

/// A probability mass over graph nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct NodeMass(Vec<f64>);

impl NodeMass {
    pub fn new(values: Vec<f64>) -> Result<Self, DemandError> {
        let total: f64 = values.iter().sum();
        if values.is_empty()
            || values.iter().any(|&v| !(v >= 0.0))
            || (total - 1.0).abs() > MASS_TOLERANCE
        {
            return Err(DemandError::InvalidMass(total));
        }
        Ok(Self(values))
    }

    /// Scales non-negative weights to sum to one.
    pub fn normalize(weights: Vec<f64>) -> Result<Self, DemandError> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&v| !(v >= 0.0)) || !(total > 0.0) || !total.is_finite() {
            return Err(DemandError::InvalidMass(total));
        }
        Ok(Self(weights.into_iter().map(|v| v / total).collect()))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn point(n: usize, node: NodeId) -> Self {
        let mut v = vec![0.0; n];
        v[node] = 1.0;
        Self(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn mass_from_counts(counts: &[u64]) -> Result<NodeMass, DemandError> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(DemandError::AllZeroCounts);
    }
    Ok(NodeMass(
        counts.iter().map(|&c| c as f64 / total as f64).collect(),
    ))
}

/// `normalize(max(p) − p)`: heaviest where `p` is lightest.
pub fn complement_mass(p: &NodeMass) -> Result<NodeMass, DemandError> {
    let max = p.0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = p.0.iter().map(|&v| max - v).collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(DemandError::UniformInput);
    }
    Ok(NodeMass(raw.into_iter().map(|v| v / total).collect()))
}

/// `γ·p_d + (1 − γ)·p̃_o`.
pub fn synthesize_destination(
    p_d: &NodeMass,
    p_o_complement: &NodeMass,
    gamma: f64,
) -> Result<NodeMass, DemandError> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(DemandError::GammaOutOfRange(gamma));
    }
    if p_d.len() != p_o_complement.len() {
        return Err(DemandError::LengthMismatch(p_d.len(), p_o_complement.len()));
    }
    // endpoints are returned verbatim so γ ∈ {0, 1} reproduce the inputs bit for bit
    if gamma == 1.0 {
        return Ok(p_d.clone());
    }
    if gamma == 0.0 {
        return Ok(p_o_complement.clone());
    }
    Ok(NodeMass(
        p_d.0
            .iter()
            .zip(&p_o_complement.0)
            .map(|(&d, &c)| gamma * d + (1.0 - gamma) * c)
            .collect(),
    ))
}

/// Discrete Hellinger distance `‖√p − √q‖₂ / √2`, in `[0, 1]`.
pub fn hellinger(p: &NodeMass, q: &NodeMass) -> Result<f64, DemandError> {
    if p.len() != q.len() {
        return Err(DemandError::LengthMismatch(p.len(), q.len()));
    }
    let sq: f64 =
        p.0.iter()
            .zip(&q.0)
            .map(|(&a, &b)| {
                let d = a.sqrt() - b.sqrt();
                d * d
            })
            .sum();
    Ok((sq / 2.0).sqrt().min(1.0))
}

/// Piecewise-constant arrival rates, one entry per consecutive period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArrivalProfile {
    /// `(duration_s, rate_per_hour)` pairs.
    pub periods: Vec<(f64, f64)>,
}

impl ArrivalProfile {
    pub fn new(periods: Vec<(f64, f64)>) -> Result<Self, DemandError> {
        let profile = Self { periods };
        profile.validate()?;
        Ok(profile)
    }

    /// Three one-hour periods at `low`, `2·low`, `low` requests per hour.
    pub fn low_high_low(low_per_hour: f64) -> Self {
        Self {
            periods: vec![
                (3600.0, low_per_hour),
                (3600.0, 2.0 * low_per_hour),
                (3600.0, low_per_hour),
            ],
        }
    }

    pub fn validate(&self) -> Result<(), DemandError> {
        for (index, &(duration_s, rate_per_hour)) in self.periods.iter().enumerate() {
            if !(duration_s > 0.0) || !(rate_per_hour >= 0.0) || !rate_per_hour.is_finite() {
                return Err(DemandError::InvalidPeriod {
                    index,
                    duration_s,
                    rate_per_hour,
                });
            }
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.periods.iter().map(|p| p.0).sum()
    }

    pub fn expected_count(&self) -> f64 {
        self.periods.iter().map(|&(d, r)| d * r / 3600.0).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequestStatus {
    Pending,
    Matched,
    PickedUp,
    Completed,
    Cancelled,
}

impl RequestStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pending => "pending",
            Self::Matched => "matched",
            Self::PickedUp => "picked_up",
            Self::Completed => "completed",
            Self::Cancelled => "cancelled",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: usize,
    pub origin: NodeId,
    pub destination: NodeId,
    /// Issue time, seconds.
    pub t0: f64,
    pub match_tolerance: f64,
    pub pickup_tolerance: f64,
    pub status: RequestStatus,
    pub match_time: Option<f64>,
    pub pickup_time: Option<f64>,
    pub dropoff_time: Option<f64>,
}

impl Request {
    pub fn new(id: usize, origin: NodeId, destination: NodeId, t0: f64) -> Self {
        Self {
            id,
            origin,
            destination,
            t0,
            match_tolerance: DEFAULT_MATCH_TOLERANCE_S,
            pickup_tolerance: DEFAULT_PICKUP_TOLERANCE_S,
            status: RequestStatus::Pending,
            match_time: None,
            pickup_time: None,
            dropoff_time: None,
        }
    }

    pub fn wait(&self) -> Option<f64> {
        self.pickup_time.map(|tp| tp - self.t0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RequestOptions {
    pub match_tolerance: f64,
    pub pickup_tolerance: f64,
    pub allow_self_trips: bool,
}

impl Default for RequestOptions {
    fn default() -> Self {
        Self {
            match_tolerance: DEFAULT_MATCH_TOLERANCE_S,
            pickup_tolerance: DEFAULT_PICKUP_TOLERANCE_S,
            allow_self_trips: false,
        }
    }
}

/// Seconds from `start` until the integrated rate reaches `hazard`, crossing
/// period boundaries as needed. `None` once the profile is exhausted.
fn next_arrival(profile: &ArrivalProfile, start: f64, mut hazard: f64) -> Option<f64> {
    let mut period_start = 0.0;
    for &(duration, rate_per_hour) in &profile.periods {
        let period_end = period_start + duration;
        if period_end > start {
            let from = start.max(period_start);
            let rate = rate_per_hour / 3600.0;
            let available = rate * (period_end - from);
            if rate > 0.0 && hazard <= available {
                return Some(from + hazard / rate);
            }
            hazard -= available;
        }
        period_start = period_end;
    }
    None
}

/// Poisson request stream with piecewise-constant rates. Origins and
/// destinations are drawn independently; a destination equal to its origin is
/// redrawn unless self trips are allowed.
pub fn generate_requests(
    profile: &ArrivalProfile,
    origin_mass: &NodeMass,
    destination_mass: &NodeMass,
    seed: u64,
    options: RequestOptions,
) -> Result<Vec<Request>, DemandError> {
    profile.validate()?;
    if origin_mass.len() != destination_mass.len() {
        return Err(DemandError::LengthMismatch(
            origin_mass.len(),
            destination_mass.len(),
        ));
    }
    let origins = WeightedIndex::new(origin_mass.values())
        .map_err(|_| DemandError::InvalidMass(origin_mass.values().iter().sum()))?;
    let destinations = WeightedIndex::new(destination_mass.values())
        .map_err(|_| DemandError::InvalidMass(destination_mass.values().iter().sum()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut requests = Vec::new();
    let mut t = 0.0;
    loop {
        let hazard: f64 = Exp1.sample(&mut rng);
        let Some(next) = next_arrival(profile, t, hazard) else {
            break;
        };
        t = next;
        let origin = origins.sample(&mut rng);
        let mut destination = destinations.sample(&mut rng);
        if !options.allow_self_trips {
            let mut attempts = 0;
            while destination == origin && attempts < RESAMPLE_LIMIT {
                destination = destinations.sample(&mut rng);
                attempts += 1;
            }
        }
        let mut request = Request::new(requests.len(), origin, destination, t);
        request.match_tolerance = options.match_tolerance;
        request.pickup_tolerance = options.pickup_tolerance;
        requests.push(request);
    }
    Ok(requests)
}

#[derive(Debug, Serialize, Deserialize)]
struct RequestRow {
    id: usize,
    t0_s: f64,
    origin: NodeId,
    destination: NodeId,
}

/// Writes `id,t0_s,origin,destination` rows.
pub fn write_requests_csv<W: io::Write>(requests: &[Request], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in requests {
        w.serialize(RequestRow {
            id: r.id,
            t0_s: r.t0,
            origin: r.origin,
            destination: r.destination,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_requests_csv`] back as fresh pending requests.
pub fn read_requests_csv<R: io::Read>(
    input: R,
    options: RequestOptions,
) -> csv::Result<Vec<Request>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in r.deserialize() {
        let row: RequestRow = row?;
        let mut req = Request::new(row.id, row.origin, row.destination, row.t0_s);
        req.match_tolerance = options.match_tolerance;
        req.pickup_tolerance = options.pickup_tolerance;
        out.push(req);
    }
    Ok(out)
}

//! Private cars driven by passengers whose requests were cancelled. Each one
//! adds to the network accumulation while it is on the road.

use serde::{Deserialize, Serialize};

use crate::demand::Request;
use crate::roadnet::DistanceOracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrivateTripMode {
    /// A private car leaves the network once its trip is driven.
    #[default]
    RemoveOnArrival,
    /// Every cancellation adds a car for the rest of the run.
    Permanent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrivateTrip {
    pub request: usize,
    pub entered_at: f64,
    pub remaining_m: f64,
}

#[derive(Debug, Clone, Default)]
pub struct TrafficRegistry {
    mode: PrivateTripMode,
    active: Vec<PrivateTrip>,
    permanent: usize,
}

impl TrafficRegistry {
    pub fn new(mode: PrivateTripMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    /// Registers the private trip of a cancelled request.
    pub fn apply_cancellation(&mut self, request: &Request, now: f64, oracle: &DistanceOracle) {
        match self.mode {
            PrivateTripMode::Permanent => self.permanent += 1,
            PrivateTripMode::RemoveOnArrival => {
                let length = oracle.dist(request.origin, request.destination);
                if length > 0.0 {
                    self.active.push(PrivateTrip {
                        request: request.id,
                        entered_at: now,
                        remaining_m: length,
                    });
                }
            }
        }
    }

    /// Vehicles currently added to the accumulation.
    pub fn count(&self) -> usize {
        self.active.len() + self.permanent
    }

    pub fn trips(&self) -> &[PrivateTrip] {
        &self.active
    }

    /// Drives every active private trip `speed·dt` meters; finished trips leave.
    pub fn advance(&mut self, speed: f64, dt: f64) {
        let step = speed * dt;
        for trip in &mut self.active {
            trip.remaining_m -= step;
        }
        self.active.retain(|t| t.remaining_m > 0.0);
    }
}

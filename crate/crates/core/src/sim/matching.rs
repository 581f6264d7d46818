//! First-come-first-served matching of pending requests to idle vehicles.

use crate::demand::Request;
use crate::roadnet::DistanceOracle;

use super::vehicle::Vehicle;

/// Clock time at which `vehicle` would reach `request`'s origin at `speed`.
/// Infinite when the network is at a standstill.
pub fn estimate_pickup(
    vehicle: &Vehicle,
    request: &Request,
    oracle: &DistanceOracle,
    speed: f64,
    now: f64,
) -> f64 {
    if speed <= 0.0 {
        return f64::INFINITY;
    }
    now + vehicle.distance_to(oracle, request.origin) / speed
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatchOutcome {
    /// `(request index, vehicle index)` in matching order.
    pub matches: Vec<(usize, usize)>,
    /// Request indices whose matching patience ran out.
    pub cancellations: Vec<usize>,
}

/// One matching pass. `pending` holds request indices in issue order. Each
/// request, in turn, is offered the nearest idle vehicle (shortest-path
/// distance, ties to the smaller vehicle index); it is matched when the
/// estimated pickup falls within its pickup tolerance. A request whose
/// matching window has closed is cancelled instead.
pub fn match_tick(
    pending: &[usize],
    requests: &[Request],
    vehicles: &[Vehicle],
    now: f64,
    oracle: &DistanceOracle,
    speed: f64,
) -> MatchOutcome {
    let mut available: Vec<bool> = vehicles.iter().map(Vehicle::is_idle).collect();
    let mut out = MatchOutcome::default();
    for &ri in pending {
        let req = &requests[ri];
        if now >= req.t0 + req.match_tolerance {
            out.cancellations.push(ri);
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for (vi, veh) in vehicles.iter().enumerate() {
            if !available[vi] {
                continue;
            }
            let d = veh.distance_to(oracle, req.origin);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((vi, d));
            }
        }
        let Some((vi, _)) = best else {
            continue;
        };
        let eta = estimate_pickup(&vehicles[vi], req, oracle, speed, now);
        if eta - req.t0 <= req.pickup_tolerance {
            available[vi] = false;
            out.matches.push((ri, vi));
        }
    }
    out
}

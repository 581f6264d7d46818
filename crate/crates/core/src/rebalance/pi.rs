//! Fleet-size adaptation: a PI loop deciding how many idle vehicles hold.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PiGains {
    pub kp: f64,
    pub ki: f64,
    pub y_ref: f64,
    /// At or below this output every idle vehicle holds.
    pub y_hold: f64,
}

impl Default for PiGains {
    fn default() -> Self {
        Self {
            kp: 0.2,
            ki: 0.4,
            y_ref: 60.0,
            y_hold: 90.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiState {
    pub gains: PiGains,
    /// Running sum of the error.
    pub integral: f64,
    /// Continuous hold-count command.
    pub u_not: f64,
}

impl PiState {
    pub fn new(gains: PiGains) -> Self {
        Self {
            gains,
            integral: 0.0,
            u_not: 0.0,
        }
    }
}

/// How many idle vehicles should hold until the next fleet-size update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoldCommand {
    All,
    Count(usize),
}

impl HoldCommand {
    pub fn count(self, n_idle: usize) -> usize {
        match self {
            Self::All => n_idle,
            Self::Count(k) => k.min(n_idle),
        }
    }
}

/// Service-level output `√(t̄_w·(n_AV − n̄_idle))`.
pub fn service_output(mean_wait: f64, mean_idle: f64, fleet: usize) -> f64 {
    (mean_wait.max(0.0) * (fleet as f64 - mean_idle).max(0.0)).sqrt()
}

/// One fleet-size update from the trailing-window mean wait and mean idle count.
pub fn pi_update(
    state: &PiState,
    mean_wait: f64,
    mean_idle: f64,
    fleet: usize,
    idle_now: usize,
) -> (PiState, HoldCommand) {
    let y = service_output(mean_wait, mean_idle, fleet);
    if y <= state.gains.y_hold {
        return (*state, HoldCommand::All);
    }
    let err = state.gains.y_ref - y;
    let integral = state.integral + err;
    let delta = state.gains.kp * err + state.gains.ki * integral;
    let u_not = (state.u_not + delta).clamp(0.0, idle_now as f64);
    let next = PiState {
        gains: state.gains,
        integral,
        u_not,
    };
    (next, HoldCommand::Count(u_not.floor() as usize))
}

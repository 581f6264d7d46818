use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demand::{DEFAULT_MATCH_TOLERANCE_S, DEFAULT_PICKUP_TOLERANCE_S};

use super::mfd::MfdParams;
use super::traffic::PrivateTripMode;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{field} must be positive and finite, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("{field} must be non-negative and finite, got {value}")]
    Negative { field: &'static str, value: f64 },
    #[error("periods must satisfy tick <= controller period <= fleet period ({tick} / {controller} / {fleet})")]
    PeriodOrder {
        tick: f64,
        controller: f64,
        fleet: f64,
    },
    #[error("{field} = {value} is not an integer multiple of the tick {tick}")]
    NotMultiple {
        field: &'static str,
        value: f64,
        tick: f64,
    },
}

/// Where vehicles start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Uniformly random nodes.
    #[default]
    Uniform,
    /// Nodes drawn from the destination mass.
    Destination,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// Simulation tick, seconds.
    pub tick_s: f64,
    /// Rebalancing controller period, seconds.
    pub controller_period_s: f64,
    /// Fleet-size update period, seconds.
    pub fleet_period_s: f64,
    pub horizon_s: f64,
    /// Penalty factor on the pickup tolerance for cancelled requests.
    pub beta: f64,
    pub match_tolerance_s: f64,
    pub pickup_tolerance_s: f64,
    /// Background accumulation on the network besides the fleet.
    pub base_accumulation: f64,
    pub mfd: MfdParams,
    pub seed: u64,
    pub placement: Placement,
    pub private_trips: PrivateTripMode,
    /// Time-series sampling interval, seconds.
    pub sample_every_s: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            tick_s: 1.0,
            controller_period_s: 10.0,
            fleet_period_s: 300.0,
            horizon_s: 3.0 * 3600.0,
            beta: 1.5,
            match_tolerance_s: DEFAULT_MATCH_TOLERANCE_S,
            pickup_tolerance_s: DEFAULT_PICKUP_TOLERANCE_S,
            base_accumulation: 0.0,
            mfd: MfdParams::default(),
            seed: 1,
            placement: Placement::Uniform,
            private_trips: PrivateTripMode::RemoveOnArrival,
            sample_every_s: 60.0,
        }
    }
}

fn ticks_in(field: &'static str, value: f64, tick: f64) -> Result<u64, ConfigError> {
    let ratio = value / tick;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
        return Err(ConfigError::NotMultiple { field, value, tick });
    }
    Ok(n as u64)
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (field, value) in [
            ("tick_s", self.tick_s),
            ("controller_period_s", self.controller_period_s),
            ("fleet_period_s", self.fleet_period_s),
            ("sample_every_s", self.sample_every_s),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ConfigError::NonPositive { field, value });
            }
        }
        for (field, value) in [
            ("horizon_s", self.horizon_s),
            ("beta", self.beta),
            ("match_tolerance_s", self.match_tolerance_s),
            ("pickup_tolerance_s", self.pickup_tolerance_s),
            ("base_accumulation", self.base_accumulation),
        ] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(ConfigError::Negative { field, value });
            }
        }
        if !(self.tick_s <= self.controller_period_s
            && self.controller_period_s <= self.fleet_period_s)
        {
            return Err(ConfigError::PeriodOrder {
                tick: self.tick_s,
                controller: self.controller_period_s,
                fleet: self.fleet_period_s,
            });
        }
        self.controller_ticks()?;
        self.fleet_ticks()?;
        self.sample_ticks()?;
        Ok(())
    }

    pub fn controller_ticks(&self) -> Result<u64, ConfigError> {
        ticks_in("controller_period_s", self.controller_period_s, self.tick_s)
    }

    pub fn fleet_ticks(&self) -> Result<u64, ConfigError> {
        ticks_in("fleet_period_s", self.fleet_period_s, self.tick_s)
    }

    pub fn sample_ticks(&self) -> Result<u64, ConfigError> {
        ticks_in("sample_every_s", self.sample_every_s, self.tick_s)
    }

    /// Number of ticks covering the horizon.
    pub fn horizon_ticks(&self) -> u64 {
        (self.horizon_s / self.tick_s - 1e-9).ceil().max(0.0) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = SimConfig::default();
        c.validate().unwrap();
        assert_eq!(c.controller_ticks().unwrap(), 10);
        assert_eq!(c.fleet_ticks().unwrap(), 300);
        assert_eq!(c.horizon_ticks(), 10800);
    }

    #[test]
    fn rejects_bad_periods() {
        let c = SimConfig {
            controller_period_s: 400.0,
            ..SimConfig::default()
        };
        assert!(matches!(c.validate(), Err(ConfigError::PeriodOrder { .. })));
        let c = SimConfig {
            tick_s: 3.0,
            ..SimConfig::default()
        };
        assert!(matches!(c.validate(), Err(ConfigError::NotMultiple { .. })));
        let c = SimConfig {
            tick_s: 0.0,
            ..SimConfig::default()
        };
        assert!(matches!(c.validate(), Err(ConfigError::NonPositive { .. })));
    }

    #[test]
    fn fractional_tick() {
        let c = SimConfig {
            tick_s: 0.5,
            sample_every_s: 60.0,
            horizon_s: 10.25,
            ..SimConfig::default()
        };
        c.validate().unwrap();
        assert_eq!(c.controller_ticks().unwrap(), 20);
        assert_eq!(c.horizon_ticks(), 21);
    }
}

//! Network-wide speed from vehicle accumulation (macroscopic fundamental diagram).

use serde::{Deserialize, Serialize};

/// Piecewise speed law: exponential decay up to `breakpoint`, then a linear
/// ramp from `knee_speed` down to zero at `jam`, zero beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MfdParams {
    /// Free-flow speed, m/s.
    pub free_speed: f64,
    /// Exponential decay per vehicle.
    pub decay: f64,
    pub breakpoint: f64,
    pub jam: f64,
    /// Speed at the start of the linear branch, m/s.
    pub knee_speed: f64,
    /// Linear-branch slope in m/s per vehicle. `None` picks the slope that
    /// reaches zero exactly at `jam`.
    pub slope: Option<f64>,
}

impl Default for MfdParams {
    fn default() -> Self {
        Self {
            free_speed: 36.0,
            decay: 29.0 / 72000.0,
            breakpoint: 4320.0,
            jam: 7200.0,
            knee_speed: 6.31,
            slope: None,
        }
    }
}

impl MfdParams {
    pub fn speed(&self, m: f64) -> f64 {
        let m = m.max(0.0);
        if m <= self.breakpoint {
            self.free_speed * (-self.decay * m).exp()
        } else if m <= self.jam {
            let v = match self.slope {
                Some(slope) => self.knee_speed - slope * (m - self.breakpoint),
                None => self.knee_speed * (self.jam - m) / (self.jam - self.breakpoint),
            };
            v.max(0.0)
        } else {
            0.0
        }
    }

    /// Accumulation at which the exponential branch yields `speed`.
    pub fn accumulation_for(&self, speed: f64) -> f64 {
        (self.free_speed / speed).ln() / self.decay
    }
}

pub fn mfd_speed(m: f64) -> f64 {
    MfdParams::default().speed(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_values() {
        assert_eq!(mfd_speed(0.0), 36.0);
        assert!((mfd_speed(4320.0) - 36.0 * (-1.74f64).exp()).abs() < 1e-12);
        assert!((mfd_speed(4320.0) - 6.3187).abs() < 1e-4);
        assert_eq!(mfd_speed(8000.0), 0.0);
        assert_eq!(mfd_speed(7200.0), 0.0);
        assert!((mfd_speed(5760.0) - 6.31 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn literal_slope_override_clamps() {
        let p = MfdParams {
            slope: Some(2.33),
            ..MfdParams::default()
        };
        assert!((p.speed(4321.0) - 3.98).abs() < 1e-12);
        assert_eq!(p.speed(4323.0), 0.0);
    }

    #[test]
    fn inverse_of_exponential_branch() {
        let p = MfdParams::default();
        let m = p.accumulation_for(8.0);
        assert!((p.speed(m) - 8.0).abs() < 1e-12);
    }
}

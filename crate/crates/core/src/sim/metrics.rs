//! End-of-run performance metrics and the per-sample time series.

use serde::Serialize;

use crate::demand::{Request, RequestStatus};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimMetrics {
    /// Requests issued within the horizon.
    pub n_req: usize,
    /// Requests picked up within the horizon.
    pub n_order: usize,
    pub n_completed: usize,
    pub n_cancelled: usize,
    /// Issued but neither picked up nor cancelled at the horizon.
    pub n_in_flight: usize,
    /// `n_order / n_req · 100`; reported as 100 for a run without requests.
    pub completion_rate: f64,
    /// Set when `n_req` is zero and the completion rate is vacuous.
    pub no_requests: bool,
    /// Mean wait until pickup over orders, seconds; `None` without orders.
    pub mean_wait_s: Option<f64>,
    /// Waits plus `β·t_ptol` per cancellation, over all requests, seconds.
    pub mean_system_time_s: Option<f64>,
    pub rebalance_km: f64,
    pub service_km: f64,
    pub beta: f64,
}

impl SimMetrics {
    pub fn wait_or_nan(&self) -> f64 {
        self.mean_wait_s.unwrap_or(f64::NAN)
    }

    pub fn system_time_or_nan(&self) -> f64 {
        self.mean_system_time_s.unwrap_or(f64::NAN)
    }
}

/// Aggregates issued requests (in issue order) into the run metrics.
pub fn metrics_finalize(
    issued: &[Request],
    beta: f64,
    rebalance_m: f64,
    service_m: f64,
) -> SimMetrics {
    let n_req = issued.len();
    let mut n_order = 0;
    let mut n_completed = 0;
    let mut n_cancelled = 0;
    let mut wait_sum = 0.0;
    let mut penalty_sum = 0.0;
    for r in issued {
        match r.status {
            RequestStatus::PickedUp | RequestStatus::Completed => {
                n_order += 1;
                wait_sum += r.wait().expect("picked-up requests carry a pickup time");
                if r.status == RequestStatus::Completed {
                    n_completed += 1;
                }
            }
            RequestStatus::Cancelled => {
                n_cancelled += 1;
                penalty_sum += beta * r.pickup_tolerance;
            }
            RequestStatus::Pending | RequestStatus::Matched => {}
        }
    }
    let completion_rate = if n_req == 0 {
        100.0
    } else {
        n_order as f64 / n_req as f64 * 100.0
    };
    SimMetrics {
        n_req,
        n_order,
        n_completed,
        n_cancelled,
        n_in_flight: n_req - n_order - n_cancelled,
        completion_rate,
        no_requests: n_req == 0,
        mean_wait_s: (n_order > 0).then(|| wait_sum / n_order as f64),
        mean_system_time_s: (n_req > 0).then(|| (wait_sum + penalty_sum) / n_req as f64),
        rebalance_km: rebalance_m / 1000.0,
        service_km: service_m / 1000.0,
        beta,
    }
}

/// One row of `timeseries.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeseriesRow {
    pub t_s: f64,
    pub n_idle_active: usize,
    pub n_idle_held: usize,
    pub n_assigned: usize,
    pub n_carrying: usize,
    pub m: f64,
    pub cum_rebalance_km: f64,
    pub cum_cancelled: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn picked(id: usize, wait: f64) -> Request {
        let mut r = Request::new(id, 0, 1, 10.0);
        r.status = RequestStatus::Completed;
        r.pickup_time = Some(10.0 + wait);
        r
    }

    fn cancelled(id: usize) -> Request {
        let mut r = Request::new(id, 0, 1, 0.0);
        r.status = RequestStatus::Cancelled;
        r
    }

    #[test]
    fn two_orders() {
        let m = metrics_finalize(&[picked(0, 100.0), picked(1, 200.0)], 1.5, 0.0, 0.0);
        assert_eq!(m.mean_wait_s, Some(150.0));
        assert_eq!(m.completion_rate, 100.0);
    }

    #[test]
    fn cancellation_penalty() {
        let m = metrics_finalize(&[picked(0, 100.0), cancelled(1)], 1.5, 0.0, 0.0);
        assert_eq!(m.mean_system_time_s, Some(275.0));
        assert_eq!(m.completion_rate, 50.0);
        assert_eq!(m.mean_wait_s, Some(100.0));
    }

    #[test]
    fn empty_and_order_free_runs() {
        let m = metrics_finalize(&[], 1.5, 0.0, 0.0);
        assert_eq!(m.completion_rate, 100.0);
        assert!(m.no_requests);
        assert_eq!(m.mean_wait_s, None);
        assert_eq!(m.mean_system_time_s, None);

        let m = metrics_finalize(&[cancelled(0)], 1.5, 0.0, 0.0);
        assert_eq!(m.mean_wait_s, None);
        assert_eq!(m.mean_system_time_s, Some(450.0));
        assert!(m.wait_or_nan().is_nan());
    }

    #[test]
    fn in_flight_requests_are_neither_orders_nor_penalized() {
        let mut matched = Request::new(2, 0, 1, 0.0);
        matched.status = RequestStatus::Matched;
        let m = metrics_finalize(
            &[picked(0, 50.0), matched, Request::new(3, 0, 1, 0.0)],
            1.5,
            0.0,
            0.0,
        );
        assert_eq!(m.n_req, 3);
        assert_eq!(m.n_order, 1);
        assert_eq!(m.n_in_flight, 2);
        assert_eq!(m.mean_system_time_s, Some(50.0 / 3.0));
    }
}

//! Rectangular minimum-cost assignment (Hungarian method with potentials) and
//! the LP rebalancing baseline built on it.

use crate::roadnet::{DistanceOracle, NodeId};

use super::{Directive, IdleVehicle, RebalanceDecision};

/// Optimal assignment for a dense `rows × cols` cost matrix. Returns, for each
/// row, the assigned column; exactly `min(rows, cols)` rows are assigned.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<Option<usize>> {
    let rows = cost.len();
    let cols = cost.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return vec![None; rows];
    }
    if rows > cols {
        let transposed: Vec<Vec<f64>> = (0..cols)
            .map(|j| (0..rows).map(|i| cost[i][j]).collect())
            .collect();
        let by_col = min_cost_assignment(&transposed);
        let mut out = vec![None; rows];
        for (j, i) in by_col.into_iter().enumerate() {
            if let Some(i) = i {
                out[i] = Some(j);
            }
        }
        return out;
    }

    // 1-based shortest augmenting path formulation; rows ≤ cols
    let n = rows;
    let m = cols;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![None; n];
    for j in 1..=m {
        if owner[j] != 0 {
            out[owner[j] - 1] = Some(j - 1);
        }
    }
    out
}

/// Sum of the chosen entries, accumulated in row order.
pub fn assignment_cost(cost: &[Vec<f64>], assignment: &[Option<usize>]) -> f64 {
    assignment
        .iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| cost[i][j]))
        .sum()
}

/// Travel-time matrix from idle vehicles to pending request origins.
pub fn travel_times(
    idle: &[IdleVehicle],
    origins: &[NodeId],
    oracle: &DistanceOracle,
    speed: f64,
) -> Vec<Vec<f64>> {
    // with zero speed every time is infinite; distances give the same ranking
    let scale = if speed > 0.0 { speed } else { 1.0 };
    idle.iter()
        .map(|veh| {
            origins
                .iter()
                .map(|&o| veh.distance_to(oracle, o) / scale)
                .collect()
        })
        .collect()
}

/// Sends idle vehicles to pending request origins so that total travel time
/// is minimal over all matchings of size `min(#idle, #pending)`. Vehicles
/// without a partner hold.
pub fn lp_rebalance(
    idle: &[IdleVehicle],
    pending_origins: &[NodeId],
    oracle: &DistanceOracle,
    speed: f64,
) -> RebalanceDecision {
    let cost = travel_times(idle, pending_origins, oracle, speed);
    let assignment = min_cost_assignment(&cost);
    RebalanceDecision {
        directives: idle
            .iter()
            .zip(assignment)
            .map(|(veh, col)| {
                let d = match col {
                    Some(j) => Directive::MoveTo(pending_origins[j]),
                    None => Directive::Hold,
                };
                (veh.id, d)
            })
            .collect(),
    }
}

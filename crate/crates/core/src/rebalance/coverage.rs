//! Coverage-control targets for idle vehicles, on the pixel plane and on the
//! road graph, plus the hold scores used to pick vehicles that stay put.

use std::collections::HashMap;

use crate::plane::{
    plane_voronoi, polar_moment, r_limited_cell, voronoi_cell, weighted_centroid, GridField,
    PlaneError, PlaneVoronoi,
};
use crate::roadnet::{
    graph_centroid, graph_coverage_cost, graph_voronoi, r_limited_graph_cell, DistanceOracle,
    GraphVoronoi, NodeId, RoadGraph,
};

use super::{Directive, IdleVehicle, RebalanceDecision};

/// Planar Voronoi partition of the current idle fleet, reused for targets and
/// hold scores within one controller tick.
#[derive(Debug, Clone)]
pub struct PlanarSnapshot {
    pub assignment: PlaneVoronoi,
    pub positions: Vec<crate::Point>,
}

impl PlanarSnapshot {
    pub fn new(field: &GridField, idle: &[IdleVehicle]) -> Result<Self, PlaneError> {
        let positions: Vec<_> = idle.iter().map(|v| v.location).collect();
        let assignment = plane_voronoi(field, &positions)?;
        Ok(Self {
            assignment,
            positions,
        })
    }

    /// `J(W_i, x_i) / J(V_i, x_i)`, zero when the full cell has no moment.
    pub fn hold_score(&self, field: &GridField, i: usize, r: f64) -> f64 {
        let x = self.positions[i];
        let limited = polar_moment(&r_limited_cell(&self.assignment, field, i, x, r), field, x);
        let full = polar_moment(&voronoi_cell(&self.assignment, i, x), field, x);
        if full > 0.0 {
            limited / full
        } else {
            0.0
        }
    }
}

/// CVR: every idle vehicle heads for the road node nearest the mass centroid
/// of its r-limited Voronoi cell. Held and active idle vehicles alike act as
/// generators. A vehicle whose cell has no mass keeps its previous destination.
pub fn cvr_targets(
    idle: &[IdleVehicle],
    field: &GridField,
    r: f64,
    graph: &RoadGraph,
) -> Result<(RebalanceDecision, PlanarSnapshot), PlaneError> {
    let snapshot = PlanarSnapshot::new(field, idle)?;
    let directives = idle
        .iter()
        .enumerate()
        .map(|(i, veh)| {
            let cell = r_limited_cell(&snapshot.assignment, field, i, veh.location, r);
            let d = match weighted_centroid(&cell, field) {
                Ok(c) => Directive::MoveTo(graph.nearest_node(c)),
                Err(_) => keep_previous(veh),
            };
            (veh.id, d)
        })
        .collect();
    Ok((RebalanceDecision { directives }, snapshot))
}

fn keep_previous(veh: &IdleVehicle) -> Directive {
    veh.destination.map_or(Directive::Hold, Directive::MoveTo)
}

/// Graph Voronoi partition of the idle fleet. Vehicles sharing a node share a
/// generator; the first one listed owns the cell.
#[derive(Debug, Clone)]
pub struct GraphSnapshot {
    pub voronoi: GraphVoronoi,
    /// Index into the idle slice of the vehicle that owns each generator node.
    pub owner_of: HashMap<NodeId, usize>,
}

impl GraphSnapshot {
    pub fn new(oracle: &DistanceOracle, idle: &[IdleVehicle]) -> Option<Self> {
        let mut owner_of = HashMap::new();
        let mut generators = Vec::new();
        for (i, veh) in idle.iter().enumerate() {
            if let std::collections::hash_map::Entry::Vacant(e) = owner_of.entry(veh.node) {
                e.insert(i);
                generators.push(veh.node);
            }
        }
        let voronoi = graph_voronoi(oracle, &generators).ok()?;
        Some(Self { voronoi, owner_of })
    }

    fn owns(&self, i: usize, veh: &IdleVehicle) -> bool {
        self.owner_of.get(&veh.node) == Some(&i)
    }

    /// `J^G(W^G, x) / J^G(V^G, x)` for the vehicle at index `i`; zero for a
    /// vehicle that does not own a cell or whose full cell has no moment.
    pub fn hold_score(
        &self,
        oracle: &DistanceOracle,
        mass: &[f64],
        idle: &[IdleVehicle],
        i: usize,
        r_g: f64,
    ) -> f64 {
        let veh = &idle[i];
        if !self.owns(i, veh) {
            return 0.0;
        }
        let full = self.voronoi.cell(veh.node);
        let limited: Vec<NodeId> = full
            .iter()
            .copied()
            .filter(|&q| oracle.dist(veh.node, q) <= r_g)
            .collect();
        let jv = graph_coverage_cost(&full, mass, oracle, veh.node);
        let jw = graph_coverage_cost(&limited, mass, oracle, veh.node);
        if jv > 0.0 {
            jw / jv
        } else {
            0.0
        }
    }
}

/// CVR-graph: every idle vehicle heads for the graph centroid of its
/// r_g-limited graph Voronoi cell. Mid-edge vehicles count as standing on the
/// edge's forward node. A vehicle left without a cell holds.
pub fn cvr_graph_targets(
    idle: &[IdleVehicle],
    mass: &[f64],
    oracle: &DistanceOracle,
    r_g: f64,
) -> (RebalanceDecision, Option<GraphSnapshot>) {
    let Some(snapshot) = GraphSnapshot::new(oracle, idle) else {
        return (RebalanceDecision::default(), None);
    };
    let directives = idle
        .iter()
        .enumerate()
        .map(|(i, veh)| {
            let d = if snapshot.owns(i, veh) {
                r_limited_graph_cell(&snapshot.voronoi, oracle, veh.node, r_g)
                    .and_then(|cell| graph_centroid(&cell, mass, oracle))
                    .map_or(Directive::Hold, Directive::MoveTo)
            } else {
                Directive::Hold
            };
            (veh.id, d)
        })
        .collect();
    (RebalanceDecision { directives }, Some(snapshot))
}

/// Ids of the `k` vehicles with the largest scores; ties go to the smaller id.
pub fn top_scores(scored: &[(usize, f64)], k: usize) -> Vec<usize> {
    let mut order: Vec<(usize, f64)> = scored.to_vec();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut held: Vec<usize> = order.into_iter().take(k).map(|(id, _)| id).collect();
    held.sort_unstable();
    held
}

/// `⌊n_idle·α⌋`, guarded against products like `100 × 0.29` landing just
/// below an integer.
pub fn alpha_hold_count(n_idle: usize, alpha: f64) -> usize {
    ((n_idle as f64 * alpha.clamp(0.0, 1.0)) + 1e-9).floor() as usize
}

/// CVR-α hold set: the `⌊n_idle·α⌋` highest-scoring idle vehicles.
pub fn select_holds_alpha(scored: &[(usize, f64)], alpha: f64) -> Vec<usize> {
    top_scores(scored, alpha_hold_count(scored.len(), alpha))
}

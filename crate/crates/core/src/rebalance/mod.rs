//! Idle-vehicle rebalancing controllers.
//!
//! Every controller maps a snapshot of the idle fleet to exactly one
//! [`Directive`] per idle vehicle. Only [`Controller`] carries state (the PI
//! loop of CVR-PI); everything else arrives by argument.

pub mod assignment;
pub mod coverage;
pub mod pi;

use serde::{Deserialize, Serialize};

use crate::plane::GridField;
use crate::roadnet::{DistanceOracle, NodeId, Point, RoadGraph};

pub use assignment::{lp_rebalance, min_cost_assignment};
pub use coverage::{
    cvr_graph_targets, cvr_targets, select_holds_alpha, top_scores, GraphSnapshot, PlanarSnapshot,
};
pub use pi::{pi_update, HoldCommand, PiGains, PiState};

pub const DEFAULT_RADIUS_M: f64 = 1000.0;

/// What an idle vehicle should do until the next controller tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Directive {
    /// Stop where it is.
    Hold,
    /// Drive to this node along the shortest path.
    MoveTo(NodeId),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RebalanceDecision {
    /// `(vehicle id, directive)` in the order the idle vehicles were given.
    pub directives: Vec<(usize, Directive)>,
}

impl RebalanceDecision {
    pub fn held(&self) -> impl Iterator<Item = usize> + '_ {
        self.directives
            .iter()
            .filter(|(_, d)| *d == Directive::Hold)
            .map(|&(id, _)| id)
    }
}

/// What a controller sees of one idle vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdleVehicle {
    pub id: usize,
    /// Planar position, meters.
    pub location: Point,
    /// The node the vehicle stands on, or the forward endpoint of its edge.
    pub node: NodeId,
    /// Remaining distance to `node` (zero when standing on it).
    pub to_node: f64,
    /// Current rebalancing destination, if any.
    pub destination: Option<NodeId>,
}

impl IdleVehicle {
    pub fn at_node(id: usize, node: NodeId, location: Point) -> Self {
        Self {
            id,
            location,
            node,
            to_node: 0.0,
            destination: None,
        }
    }

    pub fn distance_to(&self, oracle: &DistanceOracle, target: NodeId) -> f64 {
        self.to_node + oracle.dist(self.node, target)
    }
}

/// Every idle vehicle holds.
pub fn do_nothing(idle: &[IdleVehicle]) -> RebalanceDecision {
    RebalanceDecision {
        directives: idle.iter().map(|v| (v.id, Directive::Hold)).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoldScoreKind {
    /// `J(W_i, x_i) / J(V_i, x_i)` on the pixel plane.
    #[default]
    Planar,
    /// The same ratio with graph cells and shortest-path distances.
    Graph,
}

/// Source of move targets for the hold-selecting controllers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    #[default]
    Planar,
    Graph,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControllerKind {
    DoNothing,
    Cvr,
    CvrGraph,
    CvrAlpha { alpha: f64 },
    CvrPi(PiGains),
    Lp,
}

impl ControllerKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::DoNothing => "do_nothing",
            Self::Cvr => "cvr",
            Self::CvrGraph => "cvr_graph",
            Self::CvrAlpha { .. } => "cvr_alpha",
            Self::CvrPi(_) => "cvr_pi",
            Self::Lp => "lp",
        }
    }

    pub fn uses_fleet_update(&self) -> bool {
        matches!(self, Self::CvrPi(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerSpec {
    pub kind: ControllerKind,
    /// Planar coverage radius, meters.
    pub r: f64,
    /// Graph coverage radius, meters.
    pub r_graph: f64,
    pub targets: TargetKind,
    pub hold_score: HoldScoreKind,
    /// A new destination replaces the current one only if the two nodes are at
    /// least this far apart (Euclidean, meters). Zero retargets every tick.
    pub min_retarget_gain_m: f64,
}

impl ControllerSpec {
    pub fn new(kind: ControllerKind) -> Self {
        Self {
            kind,
            r: DEFAULT_RADIUS_M,
            r_graph: std::f64::consts::SQRT_2 * DEFAULT_RADIUS_M,
            targets: TargetKind::Planar,
            hold_score: HoldScoreKind::Planar,
            min_retarget_gain_m: 0.0,
        }
    }
}

/// Read-only world data a controller may consult.
#[derive(Debug, Clone, Copy)]
pub struct RebalanceContext<'a> {
    pub graph: &'a RoadGraph,
    pub oracle: &'a DistanceOracle,
    pub field: &'a GridField,
    /// Node-level demand mass (the graph density).
    pub node_mass: &'a [f64],
    /// Current network speed, m/s.
    pub speed: f64,
    /// Origins of unmatched requests, in issue order.
    pub pending_origins: &'a [NodeId],
}

/// A configured controller, including the PI loop state for CVR-PI.
#[derive(Debug, Clone)]
pub struct Controller {
    spec: ControllerSpec,
    pi: Option<PiState>,
    hold: HoldCommand,
}

impl Controller {
    pub fn new(spec: ControllerSpec) -> Self {
        let pi = match spec.kind {
            ControllerKind::CvrPi(gains) => Some(PiState::new(gains)),
            _ => None,
        };
        Self {
            spec,
            pi,
            // u_not starts at zero: nobody holds before the first update
            hold: HoldCommand::Count(0),
        }
    }

    pub fn spec(&self) -> &ControllerSpec {
        &self.spec
    }

    pub fn pi_state(&self) -> Option<&PiState> {
        self.pi.as_ref()
    }

    pub fn hold_command(&self) -> HoldCommand {
        self.hold
    }

    /// Fleet-size update from trailing-window statistics. No-op for
    /// controllers without a PI loop.
    pub fn fleet_update(&mut self, mean_wait: f64, mean_idle: f64, fleet: usize, idle_now: usize) {
        if let Some(state) = &self.pi {
            let (next, cmd) = pi_update(state, mean_wait, mean_idle, fleet, idle_now);
            self.pi = Some(next);
            self.hold = cmd;
        }
    }

    pub fn decide(&self, idle: &[IdleVehicle], ctx: &RebalanceContext<'_>) -> RebalanceDecision {
        if idle.is_empty() {
            return RebalanceDecision::default();
        }
        let spec = &self.spec;
        let decision = match spec.kind {
            ControllerKind::DoNothing => do_nothing(idle),
            ControllerKind::Lp => lp_rebalance(idle, ctx.pending_origins, ctx.oracle, ctx.speed),
            ControllerKind::Cvr => self.planar(idle, ctx).0,
            ControllerKind::CvrGraph => {
                cvr_graph_targets(idle, ctx.node_mass, ctx.oracle, spec.r_graph).0
            }
            ControllerKind::CvrAlpha { alpha } => {
                let k = coverage::alpha_hold_count(idle.len(), alpha);
                self.with_holds(idle, ctx, k)
            }
            ControllerKind::CvrPi(_) => self.with_holds(idle, ctx, self.hold.count(idle.len())),
        };
        self.apply_retarget_gain(idle, ctx.graph, decision)
    }

    fn planar(
        &self,
        idle: &[IdleVehicle],
        ctx: &RebalanceContext<'_>,
    ) -> (RebalanceDecision, Option<PlanarSnapshot>) {
        match cvr_targets(idle, ctx.field, self.spec.r, ctx.graph) {
            Ok((d, snap)) => (d, Some(snap)),
            Err(_) => (do_nothing(idle), None),
        }
    }

    /// Coverage targets with the `k` highest hold scores overridden to hold.
    fn with_holds(
        &self,
        idle: &[IdleVehicle],
        ctx: &RebalanceContext<'_>,
        k: usize,
    ) -> RebalanceDecision {
        let spec = &self.spec;
        let (mut decision, planar, graph) = match spec.targets {
            TargetKind::Planar => {
                let (d, snap) = self.planar(idle, ctx);
                (d, snap, None)
            }
            TargetKind::Graph => {
                let (d, snap) = cvr_graph_targets(idle, ctx.node_mass, ctx.oracle, spec.r_graph);
                (d, None, snap)
            }
        };
        if k == 0 {
            return decision;
        }
        let scored: Vec<(usize, f64)> = match spec.hold_score {
            HoldScoreKind::Planar => {
                let snap = match planar {
                    Some(s) => s,
                    None => match PlanarSnapshot::new(ctx.field, idle) {
                        Ok(s) => s,
                        Err(_) => return do_nothing(idle),
                    },
                };
                (0..idle.len())
                    .map(|i| (idle[i].id, snap.hold_score(ctx.field, i, spec.r)))
                    .collect()
            }
            HoldScoreKind::Graph => {
                let Some(snap) = graph.or_else(|| GraphSnapshot::new(ctx.oracle, idle)) else {
                    return do_nothing(idle);
                };
                (0..idle.len())
                    .map(|i| {
                        let s = snap.hold_score(ctx.oracle, ctx.node_mass, idle, i, spec.r_graph);
                        (idle[i].id, s)
                    })
                    .collect()
            }
        };
        let held = top_scores(&scored, k);
        for (id, d) in &mut decision.directives {
            if held.binary_search(id).is_ok() {
                *d = Directive::Hold;
            }
        }
        decision
    }

    fn apply_retarget_gain(
        &self,
        idle: &[IdleVehicle],
        graph: &RoadGraph,
        mut decision: RebalanceDecision,
    ) -> RebalanceDecision {
        let gain = self.spec.min_retarget_gain_m;
        if gain <= 0.0 {
            return decision;
        }
        for (veh, (_, d)) in idle.iter().zip(&mut decision.directives) {
            if let (Directive::MoveTo(new), Some(old)) = (*d, veh.destination) {
                if new != old && graph.coord(new).dist(graph.coord(old)) < gain {
                    *d = Directive::MoveTo(old);
                }
            }
        }
        decision
    }
}

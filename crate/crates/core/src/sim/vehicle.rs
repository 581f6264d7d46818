//! Fleet vehicles: position on the road graph, occupancy state and odometers.

use serde::Serialize;

use crate::rebalance::IdleVehicle;
use crate::roadnet::{DistanceOracle, NodeId, Point, RoadGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "state", content = "request")]
pub enum VehicleState {
    Idle,
    /// Driving to pick up this request.
    Assigned(usize),
    /// Carrying the passenger of this request.
    Carrying(usize),
}

impl VehicleState {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Idle => "idle",
            Self::Assigned(_) => "passenger_assigned",
            Self::Carrying(_) => "passenger_carrying",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Node(NodeId),
    /// `offset` meters from `from` along the edge toward `to`.
    Edge {
        from: NodeId,
        to: NodeId,
        offset: f64,
        length: f64,
    },
}

/// Result of moving a vehicle for one tick.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Movement {
    /// Meters driven.
    pub moved: f64,
    /// Set when the vehicle reached its target; meters driven before arriving.
    pub arrived_after: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vehicle {
    pub id: usize,
    pub location: Location,
    pub state: VehicleState,
    /// Node the vehicle is currently driving to.
    pub target: Option<NodeId>,
    /// Last rebalancing destination handed out by the controller.
    pub rebalance_destination: Option<NodeId>,
    pub held: bool,
    pub service_m: f64,
    pub rebalance_m: f64,
}

impl Vehicle {
    pub fn at_node(id: usize, node: NodeId) -> Self {
        Self {
            id,
            location: Location::Node(node),
            state: VehicleState::Idle,
            target: None,
            rebalance_destination: None,
            held: false,
            service_m: 0.0,
            rebalance_m: 0.0,
        }
    }

    pub fn is_idle(&self) -> bool {
        self.state == VehicleState::Idle
    }

    /// Current node, or the forward endpoint when mid-edge.
    pub fn forward_node(&self) -> NodeId {
        match self.location {
            Location::Node(n) => n,
            Location::Edge { to, .. } => to,
        }
    }

    pub fn to_forward_node(&self) -> f64 {
        match self.location {
            Location::Node(_) => 0.0,
            Location::Edge { offset, length, .. } => length - offset,
        }
    }

    /// Shortest-path distance to `node`. Mid-edge vehicles keep their heading
    /// and pass through the forward endpoint.
    pub fn distance_to(&self, oracle: &DistanceOracle, node: NodeId) -> f64 {
        self.to_forward_node() + oracle.dist(self.forward_node(), node)
    }

    pub fn planar(&self, graph: &RoadGraph) -> Point {
        match self.location {
            Location::Node(n) => graph.coord(n),
            Location::Edge {
                from,
                to,
                offset,
                length,
            } => graph.coord(from).lerp(graph.coord(to), offset / length),
        }
    }

    pub fn idle_view(&self, graph: &RoadGraph) -> IdleVehicle {
        IdleVehicle {
            id: self.id,
            location: self.planar(graph),
            node: self.forward_node(),
            to_node: self.to_forward_node(),
            destination: self.rebalance_destination,
        }
    }

    pub fn total_odometer(&self) -> f64 {
        self.service_m + self.rebalance_m
    }

    /// Drives up to `budget` meters toward `target` along next hops. Stops on
    /// arrival; an already-arrived vehicle reports arrival after zero meters.
    pub fn drive(&mut self, budget: f64, graph: &RoadGraph, oracle: &DistanceOracle) -> Movement {
        let Some(target) = self.target else {
            return Movement::default();
        };
        if self.held {
            return Movement::default();
        }
        let mut left = budget;
        let mut moved = 0.0;
        loop {
            match self.location {
                Location::Node(n) => {
                    if n == target {
                        return Movement {
                            moved,
                            arrived_after: Some(moved),
                        };
                    }
                    if left <= 0.0 {
                        break;
                    }
                    let to = oracle.next_hop(n, target);
                    let length = graph.edge_length(n, to).expect("next hop is adjacent");
                    self.location = Location::Edge {
                        from: n,
                        to,
                        offset: 0.0,
                        length,
                    };
                }
                Location::Edge {
                    from,
                    to,
                    offset,
                    length,
                } => {
                    let remaining = length - offset;
                    if left >= remaining {
                        left -= remaining;
                        moved += remaining;
                        self.location = Location::Node(to);
                    } else {
                        if left > 0.0 {
                            self.location = Location::Edge {
                                from,
                                to,
                                offset: offset + left,
                                length,
                            };
                            moved += left;
                        }
                        break;
                    }
                }
            }
        }
        Movement {
            moved,
            arrived_after: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize, len: f64) -> (RoadGraph, DistanceOracle) {
        let nodes: Vec<_> = (0..n)
            .map(|i| (i, Point::new(i as f64 * len, 0.0)))
            .collect();
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, len)).collect();
        let g = RoadGraph::new(&nodes, &edges).unwrap();
        let o = DistanceOracle::floyd_warshall(&g);
        (g, o)
    }

    #[test]
    fn drives_across_nodes_and_arrives() {
        let (g, o) = line(4, 10.0);
        let mut v = Vehicle::at_node(0, 0);
        v.target = Some(3);
        let m = v.drive(15.0, &g, &o);
        assert_eq!(m.moved, 15.0);
        assert_eq!(m.arrived_after, None);
        assert_eq!(
            v.location,
            Location::Edge {
                from: 1,
                to: 2,
                offset: 5.0,
                length: 10.0
            }
        );
        assert_eq!(v.planar(&g), Point::new(15.0, 0.0));
        assert_eq!(v.distance_to(&o, 3), 15.0);
        assert_eq!(v.distance_to(&o, 0), 5.0 + 20.0);

        let m = v.drive(100.0, &g, &o);
        assert_eq!(m.moved, 15.0);
        assert_eq!(m.arrived_after, Some(15.0));
        assert_eq!(v.location, Location::Node(3));
    }

    #[test]
    fn held_or_untargeted_stays() {
        let (g, o) = line(3, 10.0);
        let mut v = Vehicle::at_node(0, 0);
        assert_eq!(v.drive(5.0, &g, &o), Movement::default());
        v.target = Some(2);
        v.held = true;
        assert_eq!(v.drive(5.0, &g, &o), Movement::default());
        assert_eq!(v.location, Location::Node(0));
    }

    #[test]
    fn zero_budget_at_target_still_arrives() {
        let (g, o) = line(3, 10.0);
        let mut v = Vehicle::at_node(0, 1);
        v.target = Some(1);
        assert_eq!(v.drive(0.0, &g, &o).arrived_after, Some(0.0));
    }
}

//! Discrete-time fleet simulator.
//!
//! Each tick injects due requests, matches them first-come-first-served,
//! runs the rebalancing controller on its own period, and moves every vehicle
//! at the network speed given by the current accumulation.

pub mod config;
pub mod matching;
pub mod metrics;
pub mod mfd;
pub mod output;
pub mod traffic;
pub mod vehicle;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::demand::{Request, RequestStatus};
use crate::plane::GridField;
use crate::rebalance::{Controller, ControllerSpec, Directive, RebalanceContext};
use crate::roadnet::{DistanceOracle, NodeId, RoadGraph};

pub use config::{ConfigError, Placement, SimConfig};
pub use matching::{estimate_pickup, match_tick, MatchOutcome};
pub use metrics::{metrics_finalize, SimMetrics, TimeseriesRow};
pub use mfd::{mfd_speed, MfdParams};
pub use traffic::{PrivateTrip, PrivateTripMode, TrafficRegistry};
pub use vehicle::{Location, Movement, Vehicle, VehicleState};

/// Stream of the placement generator; requests use their own seed.
const PLACEMENT_STREAM: u64 = 1;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("requests must be sorted by issue time (request {0} is out of order)")]
    UnsortedRequests(usize),
    #[error("request {request} references node {node} outside the graph")]
    UnknownNode { request: usize, node: NodeId },
    #[error("placement mass has {got} entries for {expected} nodes")]
    PlacementMass { expected: usize, got: usize },
}

/// Static inputs shared by every run on the same network and demand.
#[derive(Debug, Clone)]
pub struct World {
    pub graph: RoadGraph,
    pub oracle: DistanceOracle,
    /// Coverage density on the pixel plane.
    pub field: GridField,
    /// Coverage density on the graph nodes.
    pub node_mass: Vec<f64>,
    /// Node weights for [`Placement::Destination`].
    pub placement_mass: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatchEvent {
    pub tick: u64,
    pub request: usize,
    pub t0: f64,
    pub vehicle: usize,
}

/// Everything a finished run produces.
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub metrics: SimMetrics,
    pub timeseries: Vec<TimeseriesRow>,
    /// Requests issued within the horizon, with their final status.
    pub requests: Vec<Request>,
    pub match_log: Vec<MatchEvent>,
    pub vehicles: Vec<Vehicle>,
}

#[derive(Debug, Clone, Default)]
struct Window {
    wait_sum: f64,
    pickups: usize,
    idle_sum: f64,
    ticks: usize,
}

impl Window {
    fn mean_wait(&self) -> f64 {
        if self.pickups == 0 {
            0.0
        } else {
            self.wait_sum / self.pickups as f64
        }
    }

    fn mean_idle(&self) -> f64 {
        if self.ticks == 0 {
            0.0
        } else {
            self.idle_sum / self.ticks as f64
        }
    }
}

pub struct Simulation<'w> {
    world: &'w World,
    config: SimConfig,
    controller: Controller,
    requests: Vec<Request>,
    issued: usize,
    injected: usize,
    pending: Vec<usize>,
    vehicles: Vec<Vehicle>,
    traffic: TrafficRegistry,
    tick: u64,
    controller_ticks: u64,
    fleet_ticks: u64,
    sample_ticks: u64,
    horizon_ticks: u64,
    window: Window,
    cancelled: usize,
    timeseries: Vec<TimeseriesRow>,
    match_log: Vec<MatchEvent>,
}

fn initial_nodes(
    world: &World,
    fleet: usize,
    placement: Placement,
    seed: u64,
) -> Result<Vec<NodeId>, SimError> {
    let n = world.graph.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(PLACEMENT_STREAM);
    match placement {
        Placement::Uniform => Ok((0..fleet).map(|_| rng.random_range(0..n)).collect()),
        Placement::Destination => {
            if world.placement_mass.len() != n {
                return Err(SimError::PlacementMass {
                    expected: n,
                    got: world.placement_mass.len(),
                });
            }
            let dist =
                WeightedIndex::new(&world.placement_mass).map_err(|_| SimError::PlacementMass {
                    expected: n,
                    got: world.placement_mass.len(),
                })?;
            Ok((0..fleet).map(|_| dist.sample(&mut rng)).collect())
        }
    }
}

impl<'w> Simulation<'w> {
    /// Sets up a run. `requests` must be sorted by issue time; only those
    /// issued before the horizon take part.
    pub fn new(
        world: &'w World,
        config: SimConfig,
        controller: ControllerSpec,
        fleet: usize,
        mut requests: Vec<Request>,
    ) -> Result<Self, SimError> {
        config.validate()?;
        let n = world.graph.len();
        for (i, pair) in requests.windows(2).enumerate() {
            if pair[1].t0 < pair[0].t0 {
                return Err(SimError::UnsortedRequests(i + 1));
            }
        }
        for r in &requests {
            for node in [r.origin, r.destination] {
                if node >= n {
                    return Err(SimError::UnknownNode {
                        request: r.id,
                        node,
                    });
                }
            }
        }
        requests.retain(|r| r.t0 < config.horizon_s);
        let vehicles = initial_nodes(world, fleet, config.placement, config.seed)?
            .into_iter()
            .enumerate()
            .map(|(id, node)| Vehicle::at_node(id, node))
            .collect();
        Ok(Self {
            world,
            config,
            controller: Controller::new(controller),
            issued: requests.len(),
            requests,
            injected: 0,
            pending: Vec::new(),
            vehicles,
            traffic: TrafficRegistry::new(config.private_trips),
            tick: 0,
            controller_ticks: config.controller_ticks()?,
            fleet_ticks: config.fleet_ticks()?,
            sample_ticks: config.sample_ticks()?,
            horizon_ticks: config.horizon_ticks(),
            window: Window::default(),
            cancelled: 0,
            timeseries: Vec::new(),
            match_log: Vec::new(),
        })
    }

    pub fn clock(&self) -> f64 {
        self.tick as f64 * self.config.tick_s
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn is_finished(&self) -> bool {
        self.tick >= self.horizon_ticks
    }

    pub fn world(&self) -> &World {
        self.world
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn controller(&self) -> &Controller {
        &self.controller
    }

    pub fn vehicles(&self) -> &[Vehicle] {
        &self.vehicles
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn pending(&self) -> &[usize] {
        &self.pending
    }

    pub fn traffic(&self) -> &TrafficRegistry {
        &self.traffic
    }

    pub fn timeseries(&self) -> &[TimeseriesRow] {
        &self.timeseries
    }

    pub fn match_log(&self) -> &[MatchEvent] {
        &self.match_log
    }

    /// Vehicles on the network: background, fleet and private trips.
    pub fn accumulation(&self) -> f64 {
        self.config.base_accumulation + self.vehicles.len() as f64 + self.traffic.count() as f64
    }

    pub fn speed(&self) -> f64 {
        self.config.mfd.speed(self.accumulation())
    }

    pub fn rebalance_m(&self) -> f64 {
        self.vehicles.iter().map(|v| v.rebalance_m).sum()
    }

    pub fn service_m(&self) -> f64 {
        self.vehicles.iter().map(|v| v.service_m).sum()
    }

    fn sample(&mut self) {
        let mut row = TimeseriesRow {
            t_s: self.clock(),
            n_idle_active: 0,
            n_idle_held: 0,
            n_assigned: 0,
            n_carrying: 0,
            m: self.accumulation(),
            cum_rebalance_km: self.rebalance_m() / 1000.0,
            cum_cancelled: self.cancelled,
        };
        for v in &self.vehicles {
            match v.state {
                VehicleState::Idle if v.held => row.n_idle_held += 1,
                VehicleState::Idle => row.n_idle_active += 1,
                VehicleState::Assigned(_) => row.n_assigned += 1,
                VehicleState::Carrying(_) => row.n_carrying += 1,
            }
        }
        self.timeseries.push(row);
    }

    /// Advances one tick. Does nothing once the horizon is reached.
    pub fn step(&mut self) {
        if self.is_finished() {
            return;
        }
        if self.tick.is_multiple_of(self.sample_ticks) {
            self.sample();
        }
        let now = self.clock();

        while self.injected < self.issued && self.requests[self.injected].t0 <= now {
            self.pending.push(self.injected);
            self.injected += 1;
        }

        let speed = self.speed();
        self.match_requests(now, speed);

        let idle_now = self.vehicles.iter().filter(|v| v.is_idle()).count();
        self.window.idle_sum += idle_now as f64;
        self.window.ticks += 1;

        if self.tick.is_multiple_of(self.controller_ticks) {
            self.rebalance(speed);
        }
        if self.controller.spec().kind.uses_fleet_update()
            && self.tick > 0
            && self.tick.is_multiple_of(self.fleet_ticks)
        {
            let w = std::mem::take(&mut self.window);
            self.controller.fleet_update(
                w.mean_wait(),
                w.mean_idle(),
                self.vehicles.len(),
                idle_now,
            );
        }

        self.advance(now, speed);
        self.traffic.advance(speed, self.config.tick_s);
        self.tick += 1;
        if self.is_finished() {
            self.sample();
        }
    }

    fn match_requests(&mut self, now: f64, speed: f64) {
        if self.pending.is_empty() {
            return;
        }
        let outcome = match_tick(
            &self.pending,
            &self.requests,
            &self.vehicles,
            now,
            &self.world.oracle,
            speed,
        );
        for &(ri, vi) in &outcome.matches {
            let req = &mut self.requests[ri];
            req.status = RequestStatus::Matched;
            req.match_time = Some(now);
            let v = &mut self.vehicles[vi];
            v.state = VehicleState::Assigned(ri);
            v.target = Some(req.origin);
            v.held = false;
            v.rebalance_destination = None;
            self.match_log.push(MatchEvent {
                tick: self.tick,
                request: ri,
                t0: req.t0,
                vehicle: vi,
            });
        }
        for &ri in &outcome.cancellations {
            let req = &mut self.requests[ri];
            req.status = RequestStatus::Cancelled;
            self.traffic
                .apply_cancellation(req, now, &self.world.oracle);
            self.cancelled += 1;
        }
        let requests = &self.requests;
        self.pending
            .retain(|&ri| requests[ri].status == RequestStatus::Pending);
    }

    fn rebalance(&mut self, speed: f64) {
        let graph = &self.world.graph;
        let idle: Vec<_> = self
            .vehicles
            .iter()
            .filter(|v| v.is_idle())
            .map(|v| v.idle_view(graph))
            .collect();
        if idle.is_empty() {
            return;
        }
        let origins: Vec<NodeId> = self
            .pending
            .iter()
            .map(|&ri| self.requests[ri].origin)
            .collect();
        let ctx = RebalanceContext {
            graph,
            oracle: &self.world.oracle,
            field: &self.world.field,
            node_mass: &self.world.node_mass,
            speed,
            pending_origins: &origins,
        };
        let decision = self.controller.decide(&idle, &ctx);
        for (id, directive) in decision.directives {
            let v = &mut self.vehicles[id];
            match directive {
                Directive::Hold => {
                    v.held = true;
                    v.target = None;
                }
                Directive::MoveTo(node) => {
                    v.held = false;
                    v.rebalance_destination = Some(node);
                    v.target = Some(node);
                }
            }
        }
    }

    fn advance(&mut self, now: f64, speed: f64) {
        let budget = speed * self.config.tick_s;
        let graph = &self.world.graph;
        let oracle = &self.world.oracle;
        for v in &mut self.vehicles {
            let was_idle = v.is_idle();
            let mv = v.drive(budget, graph, oracle);
            if was_idle {
                v.rebalance_m += mv.moved;
            } else {
                v.service_m += mv.moved;
            }
            let Some(after) = mv.arrived_after else {
                continue;
            };
            let at = if speed > 0.0 {
                now + after / speed
            } else {
                now
            };
            match v.state {
                VehicleState::Assigned(ri) => {
                    let req = &mut self.requests[ri];
                    req.status = RequestStatus::PickedUp;
                    req.pickup_time = Some(at);
                    self.window.wait_sum += at - req.t0;
                    self.window.pickups += 1;
                    v.state = VehicleState::Carrying(ri);
                    v.target = Some(req.destination);
                }
                VehicleState::Carrying(ri) => {
                    let req = &mut self.requests[ri];
                    req.status = RequestStatus::Completed;
                    req.dropoff_time = Some(at);
                    v.state = VehicleState::Idle;
                    v.target = None;
                }
                VehicleState::Idle => v.target = None,
            }
        }
    }

    /// Steps until the clock reaches `t` or the horizon.
    pub fn run_until(&mut self, t: f64) {
        while !self.is_finished() && self.clock() < t {
            self.step();
        }
    }

    pub fn metrics(&self) -> SimMetrics {
        metrics_finalize(
            &self.requests,
            self.config.beta,
            self.rebalance_m(),
            self.service_m(),
        )
    }

    pub fn run(mut self) -> SimOutput {
        while !self.is_finished() {
            self.step();
        }
        if self.timeseries.is_empty() {
            self.sample();
        }
        self.finish()
    }

    pub fn finish(self) -> SimOutput {
        SimOutput {
            metrics: self.metrics(),
            timeseries: self.timeseries,
            requests: self.requests,
            match_log: self.match_log,
            vehicles: self.vehicles,
        }
    }
}

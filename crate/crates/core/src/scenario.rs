//! JSON scenario files and the builders that turn them into a runnable world.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demand::{
    complement_mass, generate_requests, mass_from_counts, synthesize_destination, ArrivalProfile,
    DemandError, NodeMass, Request, RequestOptions,
};
use crate::plane::{
    rasterize_mixture, rasterize_node_mass, BoundingBox, GaussianComponent, Mixture, PlaneError,
    DEFAULT_RESOLUTION_M,
};
use crate::rebalance::{
    ControllerKind, ControllerSpec, HoldScoreKind, PiGains, TargetKind, DEFAULT_RADIUS_M,
};
use crate::roadnet::{DistanceOracle, RoadGraph, RoadnetError};
use crate::sim::{SimConfig, SimError, SimOutput, Simulation, World};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl ScenarioError {
    fn field(field: impl Into<String>, message: impl ToString) -> Self {
        Self::Field {
            field: field.into(),
            message: message.to_string(),
        }
    }

    /// Dotted path of the offending scenario field, when known.
    pub fn field_name(&self) -> Option<&str> {
        match self {
            Self::Field { field, .. } => Some(field),
            Self::UnknownParameter(_) => Some("param"),
            Self::Sim(_) => Some("sim"),
            Self::Io { .. } | Self::Parse(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    /// Path to a graph JSON, relative to the scenario file.
    File(PathBuf),
    Grid {
        k: usize,
        spacing_m: f64,
    },
}

/// A spatial demand distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MassSpec {
    Uniform,
    /// Gaussian mixture in planar meters.
    Mixture(Vec<GaussianComponent>),
    /// Trip counts per node.
    Counts(Vec<u64>),
    /// Probability per node.
    Mass(Vec<f64>),
}

fn default_gamma() -> f64 {
    1.0
}

fn default_resolution() -> f64 {
    DEFAULT_RESOLUTION_M
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandSpec {
    pub origin: MassSpec,
    pub destination: MassSpec,
    /// Blend between the destination mass (1) and the origin complement (0).
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    /// `[duration_s, requests_per_hour]` periods.
    pub profile: ArrivalProfile,
    #[serde(default = "default_resolution")]
    pub resolution_m: f64,
    /// Coverage box; defaults to the node extent grown by half a pixel.
    #[serde(default)]
    pub bbox: Option<BoundingBox>,
    #[serde(default)]
    pub allow_self_trips: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FleetSpec {
    pub n_av: usize,
    #[serde(default)]
    pub placement: crate::sim::Placement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSection {
    /// `do_nothing`, `cvr`, `cvr_graph`, `cvr_alpha`, `cvr_pi` or `lp`.
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ki: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_ref: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_hold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_graph: Option<f64>,
    #[serde(default)]
    pub hold_score: HoldScoreKind,
    #[serde(default)]
    pub targets: TargetKind,
    #[serde(default)]
    pub min_retarget_gain_m: f64,
}

impl ControllerSection {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_string(),
            alpha: None,
            kp: None,
            ki: None,
            y_ref: None,
            y_hold: None,
            r: None,
            r_graph: None,
            hold_score: HoldScoreKind::default(),
            targets: TargetKind::default(),
            min_retarget_gain_m: 0.0,
        }
    }

    pub fn spec(&self) -> Result<ControllerSpec, ScenarioError> {
        let misplaced = |field: &str, owner: &str| {
            ScenarioError::field(
                format!("controller.{field}"),
                format!("only applies to {owner}, not {}", self.name),
            )
        };
        if self.alpha.is_some() && self.name != "cvr_alpha" {
            return Err(misplaced("alpha", "cvr_alpha"));
        }
        if self.name != "cvr_pi" {
            for (field, value) in [
                ("kp", self.kp),
                ("ki", self.ki),
                ("y_ref", self.y_ref),
                ("y_hold", self.y_hold),
            ] {
                if value.is_some() {
                    return Err(misplaced(field, "cvr_pi"));
                }
            }
        }
        let kind = match self.name.as_str() {
            "do_nothing" => ControllerKind::DoNothing,
            "cvr" => ControllerKind::Cvr,
            "cvr_graph" => ControllerKind::CvrGraph,
            "lp" => ControllerKind::Lp,
            "cvr_alpha" => {
                let alpha = self.alpha.ok_or_else(|| {
                    ScenarioError::field("controller.alpha", "required for cvr_alpha")
                })?;
                if !(0.0..=1.0).contains(&alpha) {
                    return Err(ScenarioError::field(
                        "controller.alpha",
                        format!("{alpha} outside [0, 1]"),
                    ));
                }
                ControllerKind::CvrAlpha { alpha }
            }
            "cvr_pi" => {
                let d = PiGains::default();
                ControllerKind::CvrPi(PiGains {
                    kp: self.kp.unwrap_or(d.kp),
                    ki: self.ki.unwrap_or(d.ki),
                    y_ref: self.y_ref.unwrap_or(d.y_ref),
                    y_hold: self.y_hold.unwrap_or(d.y_hold),
                })
            }
            other => {
                return Err(ScenarioError::field(
                    "controller.name",
                    format!("unknown controller `{other}`"),
                ))
            }
        };
        let mut spec = ControllerSpec::new(kind);
        let r = self.r.unwrap_or(DEFAULT_RADIUS_M);
        if !(r > 0.0) {
            return Err(ScenarioError::field(
                "controller.r",
                format!("{r} must be positive"),
            ));
        }
        spec.r = r;
        spec.r_graph = self.r_graph.unwrap_or(std::f64::consts::SQRT_2 * r);
        if !(spec.r_graph >= 0.0) {
            return Err(ScenarioError::field(
                "controller.r_graph",
                format!("{} must be non-negative", spec.r_graph),
            ));
        }
        spec.hold_score = self.hold_score;
        spec.targets = self.targets;
        spec.min_retarget_gain_m = self.min_retarget_gain_m;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub graph: GraphSpec,
    pub demand: DemandSpec,
    pub fleet: FleetSpec,
    pub controller: ControllerSection,
    #[serde(default)]
    pub sim: SimConfig,
    /// Artifact directory, relative to the working directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Directory that relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Parameters addressable by sweeps.
pub const SWEEP_PARAMETERS: &[&str] = &[
    "gamma",
    "n_av",
    "dt_controller",
    "dt_fleet",
    "alpha",
    "y_ref",
    "y_hold",
    "kp",
    "ki",
    "r",
    "beta",
    "base_accumulation",
];

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut scenario = Self::from_json(&text)?;
        scenario.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Overrides one sweepable parameter.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<(), ScenarioError> {
        match name {
            "gamma" => self.demand.gamma = value,
            "n_av" => {
                if !(value >= 0.0) || value.fract() != 0.0 {
                    return Err(ScenarioError::field(
                        "fleet.n_av",
                        format!("{value} is not a count"),
                    ));
                }
                self.fleet.n_av = value as usize;
            }
            "dt_controller" => self.sim.controller_period_s = value,
            "dt_fleet" => self.sim.fleet_period_s = value,
            "alpha" => self.controller.alpha = Some(value),
            "y_ref" => self.controller.y_ref = Some(value),
            "y_hold" => self.controller.y_hold = Some(value),
            "kp" => self.controller.kp = Some(value),
            "ki" => self.controller.ki = Some(value),
            "r" => self.controller.r = Some(value),
            "beta" => self.sim.beta = value,
            "base_accumulation" => self.sim.base_accumulation = value,
            other => return Err(ScenarioError::UnknownParameter(other.to_string())),
        }
        Ok(())
    }

    fn build_graph(&self) -> Result<RoadGraph, ScenarioError> {
        match &self.graph {
            GraphSpec::File(file) => {
                let path = self.base_dir.join(file);
                if !path.is_file() {
                    return Err(ScenarioError::field(
                        "graph.file",
                        format!("{} not found", path.display()),
                    ));
                }
                RoadGraph::load(&path).map_err(|e| ScenarioError::field("graph.file", e))
            }
            GraphSpec::Grid { k, spacing_m } => {
                if *k < 2 {
                    return Err(ScenarioError::field("graph.grid.k", "must be at least 2"));
                }
                RoadGraph::grid(*k, *spacing_m)
                    .map_err(|e: RoadnetError| ScenarioError::field("graph.grid", e))
            }
        }
    }

    /// Builds the network, demand masses and coverage field.
    pub fn prepare(&self) -> Result<Prepared, ScenarioError> {
        let graph = self.build_graph()?;
        let d = &self.demand;
        d.profile
            .validate()
            .map_err(|e| ScenarioError::field("demand.profile", e))?;
        if !(d.resolution_m > 0.0) {
            return Err(ScenarioError::field(
                "demand.resolution_m",
                format!("{} must be positive", d.resolution_m),
            ));
        }
        let bbox = d
            .bbox
            .unwrap_or_else(|| BoundingBox::around(&graph, d.resolution_m / 2.0));

        let origin = node_mass(&d.origin, &graph).map_err(|e| e.at("demand.origin"))?;
        let dest = node_mass(&d.destination, &graph).map_err(|e| e.at("demand.destination"))?;
        let destination = if d.gamma == 1.0 {
            dest
        } else {
            let complement =
                complement_mass(&origin).map_err(|e| ScenarioError::field("demand.origin", e))?;
            synthesize_destination(&dest, &complement, d.gamma)
                .map_err(|e| ScenarioError::field("demand.gamma", e))?
        };

        let field = match &d.origin {
            MassSpec::Mixture(components) => rasterize_mixture(bbox, d.resolution_m, components),
            _ => rasterize_node_mass(bbox, d.resolution_m, &graph, origin.values()),
        }
        .map_err(|e: PlaneError| ScenarioError::field("demand", e))?;

        let controller = self.controller.spec()?;
        self.sim
            .validate()
            .map_err(|e| ScenarioError::field("sim", e))?;

        let oracle = DistanceOracle::floyd_warshall(&graph);
        let world = World {
            node_mass: origin.values().to_vec(),
            placement_mass: destination.values().to_vec(),
            graph,
            oracle,
            field,
        };
        Ok(Prepared {
            world,
            origin,
            destination,
            profile: d.profile.clone(),
            request_options: RequestOptions {
                match_tolerance: self.sim.match_tolerance_s,
                pickup_tolerance: self.sim.pickup_tolerance_s,
                allow_self_trips: d.allow_self_trips,
            },
            sim: self.sim,
            controller,
            n_av: self.fleet.n_av,
        })
    }
}

struct MassError(String);

impl MassError {
    fn at(self, field: &str) -> ScenarioError {
        ScenarioError::field(field, self.0)
    }
}

impl From<DemandError> for MassError {
    fn from(e: DemandError) -> Self {
        Self(e.to_string())
    }
}

fn node_mass(spec: &MassSpec, graph: &RoadGraph) -> Result<NodeMass, MassError> {
    let check_len = |n: usize| {
        if n == graph.len() {
            Ok(())
        } else {
            Err(MassError(format!("{n} entries for {} nodes", graph.len())))
        }
    };
    Ok(match spec {
        MassSpec::Uniform => NodeMass::uniform(graph.len()),
        MassSpec::Counts(c) => {
            check_len(c.len())?;
            mass_from_counts(c)?
        }
        MassSpec::Mass(m) => {
            check_len(m.len())?;
            NodeMass::new(m.clone())?
        }
        MassSpec::Mixture(components) => {
            let mixture = Mixture::new(components).map_err(|e| MassError(e.to_string()))?;
            let raw = graph.coords().iter().map(|&p| mixture.density(p)).collect();
            NodeMass::normalize(raw)?
        }
    })
}

/// A scenario resolved into its world plus everything needed to run it.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub world: World,
    pub origin: NodeMass,
    pub destination: NodeMass,
    pub profile: ArrivalProfile,
    pub request_options: RequestOptions,
    pub sim: SimConfig,
    pub controller: ControllerSpec,
    pub n_av: usize,
}

impl Prepared {
    pub fn requests(&self, seed: u64) -> Vec<Request> {
        generate_requests(
            &self.profile,
            &self.origin,
            &self.destination,
            seed,
            self.request_options,
        )
        .expect("demand validated while preparing")
    }

    /// A fresh simulation with the configured seed.
    pub fn simulation(&self) -> Result<Simulation<'_>, ScenarioError> {
        let requests = self.requests(self.sim.seed);
        Ok(Simulation::new(
            &self.world,
            self.sim,
            self.controller,
            self.n_av,
            requests,
        )?)
    }

    pub fn run(&self) -> Result<SimOutput, ScenarioError> {
        Ok(self.simulation()?.run())
    }

    /// Runs with another seed, controller or configuration.
    pub fn run_with(
        &self,
        controller: ControllerSpec,
        sim: SimConfig,
    ) -> Result<SimOutput, ScenarioError> {
        let requests = self.requests(sim.seed);
        Ok(Simulation::new(&self.world, sim, controller, self.n_av, requests)?.run())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "graph": {"grid": {"k": 4, "spacing_m": 200}},
        "demand": {
            "origin": "uniform",
            "destination": {"counts": [1,0,0,0, 0,0,0,0, 0,0,0,0, 0,0,0,3]},
            "profile": [[600, 60]]
        },
        "fleet": {"n_av": 3},
        "controller": {"name": "cvr"},
        "sim": {"horizon_s": 600, "seed": 7}
    }"#;

    #[test]
    fn minimal_scenario_runs() {
        let s = Scenario::from_json(MINIMAL).unwrap();
        let p = s.prepare().unwrap();
        assert_eq!(p.world.graph.len(), 16);
        assert_eq!(p.destination.values()[15], 0.75);
        let out = p.run().unwrap();
        assert_eq!(out.vehicles.len(), 3);
        assert!(out.metrics.n_req > 0);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = MINIMAL.replace("\"n_av\": 3", "\"n_av\": 3, \"colour\": 1");
        assert!(matches!(
            Scenario::from_json(&text),
            Err(ScenarioError::Parse(_))
        ));
        let text = MINIMAL.replace("\"seed\": 7", "\"seed\": 7, \"dt\": 1");
        assert!(Scenario::from_json(&text).is_err());
    }

    #[test]
    fn missing_graph_file_names_field() {
        let text = MINIMAL.replace(
            r#"{"grid": {"k": 4, "spacing_m": 200}}"#,
            r#"{"file": "/nonexistent/graph.json"}"#,
        );
        let err = Scenario::from_json(&text).unwrap().prepare().unwrap_err();
        assert_eq!(err.field_name(), Some("graph.file"));
    }

    #[test]
    fn controller_names() {
        let mut c = ControllerSection::named("cvr_alpha");
        assert_eq!(c.spec().unwrap_err().field_name(), Some("controller.alpha"));
        c.alpha = Some(0.4);
        assert_eq!(
            c.spec().unwrap().kind,
            ControllerKind::CvrAlpha { alpha: 0.4 }
        );
        let c = ControllerSection::named("cvr_pi");
        assert_eq!(
            c.spec().unwrap().kind,
            ControllerKind::CvrPi(PiGains::default())
        );
        assert!(ControllerSection::named("greedy").spec().is_err());
    }

    #[test]
    fn sweep_parameters_are_settable() {
        let mut s = Scenario::from_json(MINIMAL).unwrap();
        for name in SWEEP_PARAMETERS {
            s.set_param(name, 1.0).unwrap();
        }
        assert_eq!(s.fleet.n_av, 1);
        // gains of another controller are rejected rather than ignored
        assert_eq!(
            s.controller.spec().unwrap_err().field_name(),
            Some("controller.alpha")
        );
        s.controller.alpha = None;
        assert_eq!(
            s.controller.spec().unwrap_err().field_name(),
            Some("controller.kp")
        );
        assert!(matches!(
            s.set_param("colour", 1.0),
            Err(ScenarioError::UnknownParameter(_))
        ));
    }
}

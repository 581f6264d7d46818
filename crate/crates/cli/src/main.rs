#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use amod_core::roadnet::RoadGraph;
use amod_core::scenario::{Scenario, ScenarioError};
use amod_core::sim::output::write_artifacts;

mod inspect;
mod sweep;

#[derive(Parser)]
#[command(
    name = "amod",
    version,
    about = "AMoD fleet simulator with coverage-control rebalancing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write metrics.json, timeseries.csv and requests.csv.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat a scenario over parameter values and seeds.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// One of gamma, n_av, dt_controller, dt_fleet, alpha, y_ref, y_hold, kp, ki, r, beta, base_accumulation.
        #[arg(long)]
        param: String,
        /// Comma-separated values, or an inclusive range `start:stop:step`.
        #[arg(long)]
        values: String,
        #[arg(long, default_value_t = 1)]
        reps: u64,
        /// First seed; defaults to the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// CSV path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a k×k lattice road network.
    GenGrid {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        spacing: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dump vehicles and the Voronoi partition at clock `t`.
    Inspect {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "inspect")]
        out: PathBuf,
    },
}

#[derive(Debug, Serialize)]
struct CliError {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<String>,
    #[serde(skip)]
    code: u8,
}

impl CliError {
    fn invalid(field: impl Into<String>, error: impl ToString) -> Self {
        Self {
            error: error.to_string(),
            field: Some(field.into()),
            code: 2,
        }
    }

    fn io(path: &Path, error: impl ToString) -> Self {
        Self {
            error: format!("{}: {}", path.display(), error.to_string()),
            field: None,
            code: 1,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        let field = match &e {
            ScenarioError::Io { .. } => Some("scenario".to_string()),
            other => other.field_name().map(str::to_string),
        };
        Self {
            error: e.to_string(),
            field,
            code: 2,
        }
    }
}

fn load(path: &Path, seed: Option<u64>) -> Result<Scenario, CliError> {
    let mut scenario = Scenario::load(path)?;
    if let Some(seed) = seed {
        scenario.sim.seed = seed;
    }
    Ok(scenario)
}

fn run(scenario: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<(), CliError> {
    let scenario = load(scenario, seed)?;
    let prepared = scenario.prepare()?;
    let output = prepared.run()?;
    let dir = out
        .or_else(|| scenario.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    write_artifacts(&dir, &output, &scenario.controller.name, scenario.sim.seed)
        .map_err(|e| CliError::io(&dir, e))?;
    Ok(())
}

fn gen_grid(k: usize, spacing: f64, out: &Path) -> Result<(), CliError> {
    if k < 2 {
        return Err(CliError::invalid("k", "must be at least 2"));
    }
    let graph = RoadGraph::grid(k, spacing).map_err(|e| CliError::invalid("spacing", e))?;
    let text = serde_json::to_string(&graph.to_file()).expect("graph serializes");
    fs::write(out, text + "\n").map_err(|e| CliError::io(out, e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scenario,
            seed,
            out,
        } => run(&scenario, seed, out),
        Command::Sweep {
            scenario,
            param,
            values,
            reps,
            seed,
            out,
        } => sweep::cmd_sweep(&scenario, &param, &values, reps, seed, out.as_deref()),
        Command::GenGrid { k, spacing, out } => gen_grid(k, spacing, &out),
        Command::Inspect {
            scenario,
            t,
            seed,
            out,
        } => inspect::cmd_inspect(&scenario, t, seed, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e).expect("error serializes"));
            ExitCode::from(e.code)
        }
    }
}

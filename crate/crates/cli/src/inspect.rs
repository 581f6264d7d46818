use std::fs;
use std::path::Path;

use serde::Serialize;

use amod_core::plane::plane_voronoi;
use amod_core::rebalance::ControllerKind;
use amod_core::roadnet::graph_voronoi;
use amod_core::sim::Simulation;

use crate::{load, CliError};

#[derive(Serialize)]
struct VehicleRow {
    id: usize,
    x_m: f64,
    y_m: f64,
    node: usize,
    state: &'static str,
    held: bool,
    destination: Option<usize>,
    target: Option<usize>,
}

#[derive(Serialize)]
struct PixelRow {
    pixel_x: usize,
    pixel_y: usize,
    generator_index: usize,
    vehicle: usize,
}

#[derive(Serialize)]
struct NodeRow {
    node: usize,
    generator_node: usize,
    vehicle: usize,
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn write_partition(sim: &Simulation<'_>, path: &Path) -> Result<(), CliError> {
    let world = sim.world();
    let idle: Vec<_> = sim.vehicles().iter().filter(|v| v.is_idle()).collect();
    if matches!(sim.controller().spec().kind, ControllerKind::CvrGraph) {
        let mut nodes: Vec<(usize, usize)> = Vec::new();
        for v in &idle {
            let n = v.forward_node();
            if !nodes.iter().any(|&(m, _)| m == n) {
                nodes.push((n, v.id));
            }
        }
        let generators: Vec<usize> = nodes.iter().map(|&(n, _)| n).collect();
        let rows = match graph_voronoi(&world.oracle, &generators) {
            Ok(vor) => (0..world.graph.len())
                .map(|q| {
                    let g = vor.owner(q);
                    let vehicle = nodes.iter().find(|&&(n, _)| n == g).expect("generator").1;
                    NodeRow {
                        node: q,
                        generator_node: g,
                        vehicle,
                    }
                })
                .collect(),
            Err(_) => Vec::new(),
        };
        return write_csv(path, rows);
    }
    let positions: Vec<_> = idle.iter().map(|v| v.planar(&world.graph)).collect();
    let rows = match plane_voronoi(&world.field, &positions) {
        Ok(vor) => {
            let grid = world.field.grid();
            vor.owners()
                .enumerate()
                .map(|(p, g)| {
                    let (pixel_x, pixel_y) = grid.coords(p);
                    PixelRow {
                        pixel_x,
                        pixel_y,
                        generator_index: g,
                        vehicle: idle[g].id,
                    }
                })
                .collect()
        }
        Err(_) => Vec::new(),
    };
    write_csv(path, rows)
}

pub fn cmd_inspect(scenario: &Path, t: f64, seed: Option<u64>, out: &Path) -> Result<(), CliError> {
    let scenario = load(scenario, seed)?;
    if !(t >= 0.0) || t > scenario.sim.horizon_s {
        return Err(CliError::invalid(
            "t",
            format!("{t} outside [0, {}]", scenario.sim.horizon_s),
        ));
    }
    let prepared = scenario.prepare()?;
    let mut sim = prepared.simulation()?;
    sim.run_until(t);
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let graph = &sim.world().graph;
    let rows = sim.vehicles().iter().map(|v| {
        let p = v.planar(graph);
        VehicleRow {
            id: v.id,
            x_m: p.x,
            y_m: p.y,
            node: v.forward_node(),
            state: v.state.as_str(),
            held: v.held,
            destination: v.rebalance_destination,
            target: v.target,
        }
    });
    write_csv(&out.join("vehicles.csv"), rows)?;
    write_partition(&sim, &out.join("partition.csv"))
}

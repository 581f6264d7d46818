use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;

use amod_core::scenario::{Prepared, SWEEP_PARAMETERS};
use amod_core::sim::SimMetrics;
use amod_core::stats::{mean, min_max_normalize, percentile};

use crate::{load, CliError};

const PERCENTILES: [f64; 4] = [25.0, 50.0, 75.0, 90.0];

type Extract = fn(&SimMetrics) -> f64;

const COLUMNS: [(&str, Extract); 5] = [
    ("completion_rate", |m| m.completion_rate),
    ("mean_wait_s", SimMetrics::wait_or_nan),
    ("mean_system_time_s", SimMetrics::system_time_or_nan),
    ("rebalance_km", |m| m.rebalance_km),
    ("n_req", |m| m.n_req as f64),
];

pub fn parse_values(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::invalid("values", format!("cannot parse `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let [start, stop, step] = [parts[0], parts[1], parts[2]].map(|p| p.trim().parse::<f64>());
        let (start, stop, step) = (
            start.map_err(|_| bad())?,
            stop.map_err(|_| bad())?,
            step.map_err(|_| bad())?,
        );
        if !(step > 0.0) || stop < start {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    spec.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}

fn thread_count() -> usize {
    std::env::var("AMOD_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

fn fmt(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => v.to_string(),
        _ => String::new(),
    }
}

pub fn cmd_sweep(
    scenario: &Path,
    param: &str,
    values: &str,
    reps: u64,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if !SWEEP_PARAMETERS.contains(&param) {
        return Err(CliError::invalid(
            "param",
            format!("unknown parameter `{param}`"),
        ));
    }
    if reps == 0 {
        return Err(CliError::invalid("reps", "must be at least 1"));
    }
    let values = parse_values(values)?;
    let base = load(scenario, seed)?;
    let first_seed = base.sim.seed;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .expect("thread pool");
    let results: Vec<Vec<SimMetrics>> = pool.install(|| {
        let prepared: Vec<Prepared> = values
            .par_iter()
            .map(|&v| {
                let mut s = base.clone();
                s.set_param(param, v)?;
                Ok(s.prepare()?)
            })
            .collect::<Result<_, CliError>>()?;
        let jobs: Vec<(usize, u64)> = (0..values.len())
            .flat_map(|i| (0..reps).map(move |r| (i, first_seed + r)))
            .collect();
        let runs: Vec<SimMetrics> = jobs
            .par_iter()
            .map(|&(i, seed)| {
                let p = &prepared[i];
                let mut sim = p.sim;
                sim.seed = seed;
                Ok(p.run_with(p.controller, sim)?.metrics)
            })
            .collect::<Result<_, CliError>>()?;
        Ok::<_, CliError>(
            runs.chunks(reps as usize)
                .map(<[SimMetrics]>::to_vec)
                .collect(),
        )
    })?;

    let mut header = vec!["param".to_string(), "value".to_string(), "reps".to_string()];
    for (name, _) in COLUMNS {
        header.push(format!("{name}_mean"));
        for q in PERCENTILES {
            header.push(format!("{name}_p{q}"));
        }
    }
    header.push("theta".to_string());

    let means = |col: Extract| -> Vec<f64> {
        results
            .iter()
            .map(|runs| {
                let xs: Vec<f64> = runs.iter().map(col).filter(|x| !x.is_nan()).collect();
                mean(&xs).unwrap_or(f64::NAN)
            })
            .collect()
    };
    let sys = min_max_normalize(&means(SimMetrics::system_time_or_nan));
    let reb = min_max_normalize(&means(|m| m.rebalance_km));

    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(io::BufWriter::new(
            fs::File::create(path).map_err(|e| CliError::io(path, e))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let csv_err = |e: csv::Error| CliError::io(out.unwrap_or(Path::new("stdout")), e);
    w.write_record(&header).map_err(csv_err)?;
    for (i, runs) in results.iter().enumerate() {
        let mut row = vec![param.to_string(), values[i].to_string(), reps.to_string()];
        for (_, col) in COLUMNS {
            let xs: Vec<f64> = runs.iter().map(col).filter(|x| !x.is_nan()).collect();
            row.push(fmt(mean(&xs)));
            for q in PERCENTILES {
                row.push(fmt(percentile(&xs, q)));
            }
        }
        row.push(fmt(Some(sys[i] + reb[i])));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| CliError::io(out.unwrap_or(Path::new("stdout")), e))?;
    Ok(())
}

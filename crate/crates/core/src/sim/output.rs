//! Run artifacts: `metrics.json`, `timeseries.csv` and `requests.csv`.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use super::metrics::{SimMetrics, TimeseriesRow};
use super::SimOutput;
use crate::demand::Request;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("writing {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("writing {path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("serializing metrics: {0}")]
    Json(#[from] serde_json::Error),
}

/// `metrics.json` contents: the run label plus every metric.
#[derive(Debug, Serialize)]
pub struct MetricsReport<'a> {
    pub controller: &'a str,
    pub seed: u64,
    pub n_av: usize,
    #[serde(flatten)]
    pub metrics: &'a SimMetrics,
}

#[derive(Debug, Serialize)]
struct AuditRow {
    id: usize,
    t0: f64,
    origin: usize,
    destination: usize,
    match_t: Option<f64>,
    pickup_t: Option<f64>,
    dropoff_t: Option<f64>,
    status: &'static str,
}

pub fn metrics_json(report: &MetricsReport<'_>) -> Result<String, serde_json::Error> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn write_timeseries<W: io::Write>(rows: &[TimeseriesRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_request_audit<W: io::Write>(requests: &[Request], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in requests {
        w.serialize(AuditRow {
            id: r.id,
            t0: r.t0,
            origin: r.origin,
            destination: r.destination,
            match_t: r.match_time,
            pickup_t: r.pickup_time,
            dropoff_t: r.dropoff_time,
            status: r.status.as_str(),
        })?;
    }
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<fs::File, OutputError> {
    fs::File::create(path).map_err(|source| OutputError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes the three run artifacts into `dir`, creating it if needed.
pub fn write_artifacts(
    dir: &Path,
    output: &SimOutput,
    controller: &str,
    seed: u64,
) -> Result<(), OutputError> {
    fs::create_dir_all(dir).map_err(|source| OutputError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let report = MetricsReport {
        controller,
        seed,
        n_av: output.vehicles.len(),
        metrics: &output.metrics,
    };
    let path = dir.join("metrics.json");
    fs::write(&path, metrics_json(&report)?).map_err(|source| OutputError::Io {
        path: path.display().to_string(),
        source,
    })?;

    let path = dir.join("timeseries.csv");
    write_timeseries(&output.timeseries, io::BufWriter::new(create(&path)?)).map_err(|source| {
        OutputError::Csv {
            path: path.display().to_string(),
            source,
        }
    })?;

    let path = dir.join("requests.csv");
    write_request_audit(&output.requests, io::BufWriter::new(create(&path)?)).map_err(
        |source| OutputError::Csv {
            path: path.display().to_string(),
            source,
        },
    )?;
    Ok(())
}

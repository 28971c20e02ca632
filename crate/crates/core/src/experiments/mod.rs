//! Monte Carlo reproduction of the ASCE-versus-training-length experiments.
//!
//! A [`ScenarioConfig`] fixes the network, the sparsity model, the SNR
//! assignments and the algorithms to compare. [`run_scenario`] sweeps the
//! training length, drawing fresh supports, coefficients, pilots and noise
//! for every trial from a seed derived from `(master_seed, T, trial)`, and
//! feeds identical data to every algorithm.

mod config;
mod harness;
mod metrics;

use std::io::Write;
use std::path::Path;

pub use config::{Algorithm, ScenarioConfig, SnrProfile, SnrSpec};
pub use harness::{run_scenario, substream_seed, write_traces, AlgorithmRun, Scenario, TrialData};
pub use metrics::{asce, nmse, relative_error, support_hit_ratio, MetricsReport, MetricsRow};

use crate::{Error, Result};

/// CSV header, in column order.
pub const CSV_HEADER: [&str; 8] = ["scenario", "algorithm", "T", "snr_tag", "asce", "nmse", "bits", "trials"];

/// Writes the report as CSV with [`CSV_HEADER`] columns.
pub fn write_csv<W: Write>(report: &MetricsReport, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in &report.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// [`write_csv`] to a file.
pub fn emit_csv(report: &MetricsReport, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_owned(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    write_csv(report, std::io::BufWriter::new(file)).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => io_err(source),
        other => Error::Parse {
            path: path.to_owned(),
            message: format!("{other:?}"),
        },
    })
}

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use crate::observables::ObservableKind;
use crate::trainer::{format_f64, read_records, CONVERGENCE_THRESHOLD};

use super::config::NoiseSetting;
use super::runner::{RunRecord, RunStatus};
use super::ExperimentError;

/// Aggregate over the seeds of one (qubits, observable, noise, P) setting.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub qubits: usize,
    pub observable: ObservableKind,
    pub noise: NoiseSetting,
    pub p: f64,
    /// Successful runs; failed runs are counted separately.
    pub runs: usize,
    pub failures: usize,
    pub mean_final_cost: f64,
    pub convergence_fraction: f64,
    pub mean_decrease: f64,
}

/// Groups records by setting, in order of first appearance.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<SummaryRow>, ExperimentError> {
    if records.is_empty() {
        return Err(ExperimentError::Execution("no run records to summarize".into()));
    }
    let mut rows: Vec<(SummaryRow, f64, f64, usize)> = Vec::new();
    for r in records {
        let c = &r.cell;
        let idx = match rows.iter().position(|(row, ..)| {
            row.qubits == c.qubits && row.observable == c.observable && row.noise == c.noise && row.p == c.p
        }) {
            Some(i) => i,
            None => {
                rows.push((
                    SummaryRow {
                        qubits: c.qubits,
                        observable: c.observable,
                        noise: c.noise,
                        p: c.p,
                        runs: 0,
                        failures: 0,
                        mean_final_cost: f64::NAN,
                        convergence_fraction: f64::NAN,
                        mean_decrease: f64::NAN,
                    },
                    0.0,
                    0.0,
                    0,
                ));
                rows.len() - 1
            }
        };
        let (row, cost_sum, decrease_sum, converged) = &mut rows[idx];
        match (&r.status, r.final_cost, r.initial_cost) {
            (RunStatus::Success, Some(f), Some(i)) => {
                row.runs += 1;
                *cost_sum += f;
                *decrease_sum += i - f;
                if f <= CONVERGENCE_THRESHOLD {
                    *converged += 1;
                }
            }
            _ => row.failures += 1,
        }
    }
    Ok(rows
        .into_iter()
        .map(|(mut row, cost_sum, decrease_sum, converged)| {
            if row.runs > 0 {
                let k = row.runs as f64;
                row.mean_final_cost = cost_sum / k;
                row.mean_decrease = decrease_sum / k;
                row.convergence_fraction = converged as f64 / k;
            }
            row
        })
        .collect())
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], mut w: W) -> std::io::Result<()> {
    writeln!(
        w,
        "qubits,observable,noise,p,runs,failures,mean_final_cost,convergence_fraction,mean_decrease"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.qubits,
            r.observable,
            r.noise,
            r.p,
            r.runs,
            r.failures,
            format_f64(r.mean_final_cost),
            format_f64(r.convergence_fraction),
            format_f64(r.mean_decrease),
        )?;
    }
    Ok(())
}

/// Fixed-width text table for terminals.
pub fn render_table(rows: &[SummaryRow]) -> String {
    let mut s = format!(
        "{:>6}  {:<10} {:<18} {:>4} {:>5} {:>11} {:>10} {:>13}\n",
        "qubits", "observable", "noise", "p", "runs", "final cost", "converged", "mean decrease"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:>6}  {:<10} {:<18} {:>4} {:>5} {:>11.4} {:>10.2} {:>13.4}",
            r.qubits,
            r.observable.name(),
            r.noise.name(),
            r.p,
            r.runs,
            r.mean_final_cost,
            r.convergence_fraction,
            r.mean_decrease,
        );
    }
    s
}

#[derive(Deserialize)]
struct ManifestRecords {
    records: Vec<RunRecord>,
}

/// Reads the records of a training run directory's `manifest.json`.
pub fn read_manifest_records(dir: &Path) -> Result<Vec<RunRecord>, ExperimentError> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(|e| ExperimentError::io(&path, e))?;
    let m: ManifestRecords = serde_json::from_str(&text).map_err(|e| {
        ExperimentError::Execution(format!("{}: not a training manifest: {e}", path.display()))
    })?;
    Ok(m.records)
}

/// Summarizes a training run directory and writes `summary.csv` into it.
/// Each successful record is checked against its trace file.
pub fn summarize_dir(dir: &Path) -> Result<Vec<SummaryRow>, ExperimentError> {
    let records = read_manifest_records(dir)?;
    for r in records.iter().filter(|r| r.status == RunStatus::Success) {
        let Some(rel) = &r.trace_path else {
            return Err(ExperimentError::Execution(format!(
                "{}: successful record without a trace",
                r.cell.dir_name()
            )));
        };
        let path = dir.join(rel);
        let file = fs::File::open(&path).map_err(|e| ExperimentError::io(&path, e))?;
        let trace = read_records(file)?;
        let last = trace.last().map(|t| t.cost);
        if last != r.final_cost || r.converged != last.map(|c| c <= CONVERGENCE_THRESHOLD) {
            return Err(ExperimentError::Execution(format!(
                "{}: manifest disagrees with trace",
                path.display()
            )));
        }
    }
    let rows = summarize(&records)?;
    let path = dir.join("summary.csv");
    let mut bytes = Vec::new();
    write_summary_csv(&rows, &mut bytes).map_err(|e| ExperimentError::io(&path, e))?;
    fs::write(&path, bytes).map_err(|e| ExperimentError::io(&path, e))?;
    Ok(rows)
}

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{build_ansatz, Ansatz, NoisePolicy};
use crate::landscape::{flatness, scan};
use crate::noise::{completeness_defect, KrausChannel, NoiseKind, CPTP_TOL};
use crate::observables::ObservableKind;
use crate::trainer::{
    bp_variance_probe_at, format_f64, train, CostSpec, TrainOptions, CONVERGENCE_THRESHOLD,
};

use super::config::{ExperimentConfig, Mode, NoiseSetting};
use super::ExperimentError;

/// `0.0, 0.1, …, 1.0`.
pub const VALIDATION_PROBABILITIES: [f64; 11] =
    [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// One training run of the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub qubits: usize,
    pub observable: ObservableKind,
    #[serde(with = "noise_name")]
    pub noise: NoiseSetting,
    pub p: f64,
    pub seed: u64,
}

mod noise_name {
    use super::NoiseSetting;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &NoiseSetting, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(n.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<NoiseSetting, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Cell {
    /// Directory name `<n>q_<obs>_<noise>_p<P>_s<seed>`.
    pub fn dir_name(&self) -> String {
        format!("{}_s{}", setting_name(self.qubits, self.observable, self.noise, self.p), self.seed)
    }
}

fn setting_name(n: usize, obs: ObservableKind, noise: NoiseSetting, p: f64) -> String {
    format!("{n}q_{obs}_{noise}_p{p}")
}

/// Distinct noise settings of the grid in enumeration order. Probability 0
/// and the `none` type collapse into a single noiseless entry, listed first.
pub fn noise_cells(config: &ExperimentConfig) -> Vec<(NoiseSetting, f64)> {
    let mut cells = Vec::new();
    let ideal = config.noise_types.contains(&NoiseSetting::None)
        || config.probabilities.iter().any(|&p| p == 0.0);
    if ideal {
        cells.push((NoiseSetting::None, 0.0));
    }
    for &setting in &config.noise_types {
        if setting == NoiseSetting::None {
            continue;
        }
        for &p in &config.probabilities {
            if p != 0.0 && !cells.contains(&(setting, p)) {
                cells.push((setting, p));
            }
        }
    }
    cells
}

/// Every training cell, in the order results are reported.
pub fn train_cells(config: &ExperimentConfig) -> Vec<Cell> {
    let noise = noise_cells(config);
    let mut cells = Vec::new();
    for &qubits in &config.qubit_counts {
        for &observable in &config.observables {
            for &(setting, p) in &noise {
                for &seed in &config.seeds {
                    cells.push(Cell {
                        qubits,
                        observable,
                        noise: setting,
                        p,
                        seed,
                    });
                }
            }
        }
    }
    cells
}

fn circuit(
    config: &ExperimentConfig,
    qubits: usize,
    noise: NoiseSetting,
    p: f64,
) -> crate::Result<(Ansatz, Option<KrausChannel>)> {
    match noise {
        NoiseSetting::None => Ok((build_ansatz(qubits, config.layers, NoisePolicy::None)?, None)),
        NoiseSetting::Channel(kind) => Ok((
            build_ansatz(qubits, config.layers, config.noise_policy)?,
            Some(kind.channel(p)?),
        )),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Success,
    Failure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub cell: Cell,
    pub status: RunStatus,
    /// Relative to the output directory.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub initial_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub final_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    /// Wall-clock time; kept out of the manifest so it stays reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapeRecord {
    pub qubits: usize,
    pub observable: ObservableKind,
    #[serde(with = "noise_name")]
    pub noise: NoiseSetting,
    pub p: f64,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub flatness: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpRecord {
    pub qubits: usize,
    pub observable: ObservableKind,
    #[serde(with = "noise_name")]
    pub noise: NoiseSetting,
    pub p: f64,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub variance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// Contents of `manifest.json`.
#[derive(Debug, Serialize)]
pub struct Manifest<'a, R> {
    pub version: &'static str,
    pub mode: Mode,
    pub config: &'a ExperimentConfig,
    pub cells: usize,
    pub succeeded: usize,
    pub failed: usize,
    pub records: &'a [R],
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, ExperimentError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ExperimentError::Execution(format!("cannot start worker pool: {e}")))
}

fn create_dir(path: &Path) -> Result<(), ExperimentError> {
    fs::create_dir_all(path).map_err(|e| ExperimentError::io(path, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ExperimentError> {
    fs::write(path, bytes).map_err(|e| ExperimentError::io(path, e))
}

fn write_manifest<R: Serialize>(
    out: &Path,
    mode: Mode,
    config: &ExperimentConfig,
    records: &[R],
    ok: impl Fn(&R) -> bool,
) -> Result<(), ExperimentError> {
    let succeeded = records.iter().filter(|r| ok(r)).count();
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        mode,
        config,
        cells: records.len(),
        succeeded,
        failed: records.len() - succeeded,
        records,
    };
    let mut json = serde_json::to_vec_pretty(&manifest)
        .map_err(|e| ExperimentError::Execution(format!("cannot encode manifest: {e}")))?;
    json.push(b'\n');
    write_file(&out.join("manifest.json"), &json)
}

fn run_cell(config: &ExperimentConfig, cell: &Cell, out: &Path) -> Result<RunRecord, ExperimentError> {
    let start = Instant::now();
    let options = TrainOptions {
        iterations: config.iterations,
        learning_rate: config.learning_rate,
    };
    let outcome = circuit(config, cell.qubits, cell.noise, cell.p).and_then(|(ansatz, channel)| {
        let spec = CostSpec::for_kind(cell.observable, cell.qubits)?;
        train(&ansatz, &spec, channel.as_ref(), cell.seed, &options)
    });
    let mut record = RunRecord {
        cell: *cell,
        status: RunStatus::Failure,
        trace_path: None,
        initial_cost: None,
        final_cost: None,
        converged: None,
        error: None,
        seconds: 0.0,
    };
    match outcome {
        Ok(trace) => {
            let dir = out.join(cell.dir_name());
            create_dir(&dir)?;
            let mut bytes = Vec::new();
            trace.write_csv(&mut bytes)?;
            write_file(&dir.join("trace.csv"), &bytes)?;
            record.status = RunStatus::Success;
            record.trace_path = Some(format!("{}/trace.csv", cell.dir_name()));
            record.initial_cost = Some(trace.initial_cost());
            record.final_cost = Some(trace.final_cost());
            record.converged = Some(trace.final_cost() <= CONVERGENCE_THRESHOLD);
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record.seconds = start.elapsed().as_secs_f64();
    Ok(record)
}

/// Trains every cell of the grid into `out`, writing one trace per cell,
/// `manifest.json` and `timings.json`. Failed cells are recorded, not fatal.
pub fn run_train(
    config: &ExperimentConfig,
    out: &Path,
    jobs: usize,
) -> Result<Vec<RunRecord>, ExperimentError> {
    create_dir(out)?;
    let cells = train_cells(config);
    let records = pool(jobs)?.install(|| {
        cells
            .par_iter()
            .map(|cell| run_cell(config, cell, out))
            .collect::<Result<Vec<_>, _>>()
    })?;
    write_manifest(out, Mode::Train, config, &records, |r| r.status == RunStatus::Success)?;

    let timings: Vec<serde_json::Value> = records
        .iter()
        .map(|r| serde_json::json!({ "cell": r.cell.dir_name(), "seconds": r.seconds }))
        .collect();
    let json = serde_json::to_vec_pretty(&timings)
        .map_err(|e| ExperimentError::Execution(format!("cannot encode timings: {e}")))?;
    write_file(&out.join("timings.json"), &json)?;
    Ok(records)
}

fn setting_cells(config: &ExperimentConfig) -> Vec<(usize, ObservableKind, NoiseSetting, f64)> {
    let noise = noise_cells(config);
    let mut cells = Vec::new();
    for &n in &config.qubit_counts {
        for &obs in &config.observables {
            for &(setting, p) in &noise {
                cells.push((n, obs, setting, p));
            }
        }
    }
    cells
}

/// Scans one landscape per (qubits, observable, noise, P) setting.
pub fn run_landscape(
    config: &ExperimentConfig,
    out: &Path,
    jobs: usize,
) -> Result<Vec<LandscapeRecord>, ExperimentError> {
    create_dir(out)?;
    let ls = &config.landscape;
    let records = pool(jobs)?.install(|| {
        setting_cells(config)
            .into_iter()
            .map(|(qubits, observable, noise, p)| {
                let grid = circuit(config, qubits, noise, p).and_then(|(ansatz, channel)| {
                    let spec = CostSpec::for_kind(observable, qubits)?;
                    scan(
                        &ansatz,
                        &spec,
                        channel.as_ref(),
                        ls.axis1,
                        ls.axis2,
                        ls.range,
                        ls.resolution,
                        ls.base_seed,
                    )
                });
                let mut record = LandscapeRecord {
                    qubits,
                    observable,
                    noise,
                    p,
                    status: RunStatus::Failure,
                    grid_path: None,
                    flatness: None,
                    error: None,
                };
                match grid {
                    Ok(grid) => {
                        let name = setting_name(qubits, observable, noise, p);
                        let dir = out.join(&name);
                        create_dir(&dir)?;
                        let mut bytes = Vec::new();
                        grid.write_csv(&mut bytes)?;
                        write_file(&dir.join("landscape.csv"), &bytes)?;
                        record.status = RunStatus::Success;
                        record.grid_path = Some(format!("{name}/landscape.csv"));
                        record.flatness = Some(flatness(&grid));
                    }
                    Err(e) => record.error = Some(e.to_string()),
                }
                Ok(record)
            })
            .collect::<Result<Vec<_>, ExperimentError>>()
    })?;
    write_manifest(out, Mode::Landscape, config, &records, |r| r.status == RunStatus::Success)?;
    Ok(records)
}

/// Gradient-variance probe per setting; writes `bp_variance.csv` and the
/// manifest.
pub fn run_bp_variance(
    config: &ExperimentConfig,
    out: &Path,
    jobs: usize,
) -> Result<Vec<BpRecord>, ExperimentError> {
    create_dir(out)?;
    let bp = &config.bp_variance;
    let cells = setting_cells(config);
    let records: Vec<BpRecord> = pool(jobs)?.install(|| {
        cells
            .par_iter()
            .map(|&(qubits, observable, noise, p)| {
                let variance = circuit(config, qubits, noise, p).and_then(|(ansatz, channel)| {
                    let spec = CostSpec::for_kind(observable, qubits)?;
                    bp_variance_probe_at(
                        &ansatz,
                        &spec,
                        channel.as_ref(),
                        bp.samples,
                        bp.seed,
                        bp.param_index,
                    )
                });
                let (status, variance, error) = match variance {
                    Ok(v) => (RunStatus::Success, Some(v), None),
                    Err(e) => (RunStatus::Failure, None, Some(e.to_string())),
                };
                BpRecord {
                    qubits,
                    observable,
                    noise,
                    p,
                    status,
                    variance,
                    error,
                }
            })
            .collect()
    });

    let mut csv = String::from("qubits,observable,noise,p,samples,param_index,variance\n");
    for r in records.iter().filter(|r| r.status == RunStatus::Success) {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.qubits,
            r.observable,
            r.noise,
            r.p,
            bp.samples,
            bp.param_index,
            format_f64(r.variance.unwrap_or(f64::NAN)),
        ));
    }
    write_file(&out.join("bp_variance.csv"), csv.as_bytes())?;
    write_manifest(out, Mode::BpVariance, config, &records, |r| r.status == RunStatus::Success)?;
    Ok(records)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationRow {
    pub kind: NoiseKind,
    pub probability: f64,
    /// Largest entry of `|Σ K†K - I|`.
    pub defect: f64,
    pub passed: bool,
}

/// Completeness check of every channel at [`VALIDATION_PROBABILITIES`].
pub fn validate_channels() -> crate::Result<Vec<ValidationRow>> {
    let mut rows = Vec::new();
    for kind in NoiseKind::ALL {
        for p in VALIDATION_PROBABILITIES {
            let defect = completeness_defect(&kind.channel(p)?)?;
            rows.push(ValidationRow {
                kind,
                probability: p,
                defect,
                passed: defect <= CPTP_TOL,
            });
        }
    }
    Ok(rows)
}

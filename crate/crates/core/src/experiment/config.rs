use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ansatz::{NoisePolicy, DEFAULT_LAYERS};
use crate::landscape::{DEFAULT_AXES, DEFAULT_RANGE, DEFAULT_RESOLUTION};
use crate::noise::{NoiseKind, PROBABILITY_GRID};
use crate::observables::ObservableKind;
use crate::state::MAX_QUBITS;
use crate::trainer::{DEFAULT_ITERATIONS, DEFAULT_LEARNING_RATE, DEFAULT_PROBE_SAMPLES};

use super::ExperimentError;

/// Environment variable whose integer value is added to every seed.
pub const SEED_OFFSET_VAR: &str = "NRQNN_SEED_OFFSET";

pub const DEFAULT_QUBITS: [usize; 4] = [4, 6, 8, 10];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Train,
    Landscape,
    BpVariance,
    Validate,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Train => "train",
            Mode::Landscape => "landscape",
            Mode::BpVariance => "bp_variance",
            Mode::Validate => "validate",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One entry of `noise_types`: a named channel or the noiseless setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NoiseSetting {
    None,
    Channel(NoiseKind),
}

impl NoiseSetting {
    pub fn name(self) -> &'static str {
        match self {
            NoiseSetting::None => "none",
            NoiseSetting::Channel(k) => k.name(),
        }
    }
}

impl fmt::Display for NoiseSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoiseSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "none" {
            return Ok(NoiseSetting::None);
        }
        s.parse::<NoiseKind>()
            .map(NoiseSetting::Channel)
            .map_err(|_| {
                format!("unknown noise type {s:?} (expected none, amplitude_damping, phase_damping or phase_flip)")
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LandscapeSettings {
    pub axis1: usize,
    pub axis2: usize,
    pub resolution: usize,
    pub range: (f64, f64),
    pub base_seed: u64,
}

impl Default for LandscapeSettings {
    fn default() -> Self {
        Self {
            axis1: DEFAULT_AXES.0,
            axis2: DEFAULT_AXES.1,
            resolution: DEFAULT_RESOLUTION,
            range: DEFAULT_RANGE,
            base_seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BpSettings {
    pub samples: usize,
    pub param_index: usize,
    pub seed: u64,
}

impl Default for BpSettings {
    fn default() -> Self {
        Self {
            samples: DEFAULT_PROBE_SAMPLES,
            param_index: 0,
            seed: 0,
        }
    }
}

/// A validated experiment configuration with defaults filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub qubit_counts: Vec<usize>,
    pub layers: usize,
    pub observables: Vec<ObservableKind>,
    #[serde(serialize_with = "names")]
    pub noise_types: Vec<NoiseSetting>,
    pub probabilities: Vec<f64>,
    /// Already shifted by the seed offset.
    pub seeds: Vec<u64>,
    pub iterations: usize,
    pub learning_rate: f64,
    pub noise_policy: NoisePolicy,
    pub mode: Option<Mode>,
    pub landscape: LandscapeSettings,
    pub bp_variance: BpSettings,
}

fn names<S: serde::Serializer>(v: &[NoiseSetting], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|n| n.name()))
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            qubit_counts: DEFAULT_QUBITS.to_vec(),
            layers: DEFAULT_LAYERS,
            observables: ObservableKind::ALL.to_vec(),
            noise_types: NoiseKind::ALL.iter().map(|&k| NoiseSetting::Channel(k)).collect(),
            probabilities: PROBABILITY_GRID.to_vec(),
            seeds: (0..10).collect(),
            iterations: DEFAULT_ITERATIONS,
            learning_rate: DEFAULT_LEARNING_RATE,
            noise_policy: NoisePolicy::PerGate,
            mode: None,
            landscape: LandscapeSettings::default(),
            bp_variance: BpSettings::default(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(alias = "qubit_counts")]
    qubits: Option<Vec<usize>>,
    layers: Option<usize>,
    observables: Option<Vec<String>>,
    noise_types: Option<Vec<String>>,
    probabilities: Option<Vec<f64>>,
    seeds: Option<Vec<u64>>,
    iterations: Option<usize>,
    learning_rate: Option<f64>,
    noise_policy: Option<String>,
    mode: Option<Mode>,
    landscape: Option<RawLandscape>,
    bp_variance: Option<RawBp>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLandscape {
    axis1: Option<usize>,
    axis2: Option<usize>,
    resolution: Option<usize>,
    range: Option<(f64, f64)>,
    base_seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBp {
    samples: Option<usize>,
    param_index: Option<usize>,
    seed: Option<u64>,
}

fn config_err(path: &str, msg: impl fmt::Display) -> ExperimentError {
    ExperimentError::Config(format!("{path}: {msg}"))
}

fn non_empty<T>(key: &str, v: &[T]) -> Result<(), ExperimentError> {
    if v.is_empty() {
        Err(config_err(key, "must not be empty"))
    } else {
        Ok(())
    }
}

fn parse_names<T: FromStr>(key: &str, raw: &[String]) -> Result<Vec<T>, ExperimentError>
where
    T::Err: fmt::Display,
{
    raw.iter()
        .enumerate()
        .map(|(i, s)| s.parse().map_err(|e| config_err(&format!("{key}[{i}]"), e)))
        .collect()
}

/// Reads the seed offset from the environment; unset means 0.
pub fn seed_offset_from_env() -> Result<i64, ExperimentError> {
    match std::env::var(SEED_OFFSET_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| {
            ExperimentError::Config(format!("{SEED_OFFSET_VAR}={v:?} is not an integer"))
        }),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(ExperimentError::Config(format!("{SEED_OFFSET_VAR}: {e}"))),
    }
}

fn shift(seed: u64, offset: i64) -> u64 {
    seed.wrapping_add(offset as u64)
}

/// Parses JSON config text; blank text means all defaults.
pub fn parse_config(text: &str, seed_offset: i64) -> Result<ExperimentConfig, ExperimentError> {
    let raw: RawConfig = if text.trim().is_empty() {
        RawConfig::default()
    } else {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { "<root>".to_string() } else { path };
            config_err(&path, e.into_inner())
        })?
    };

    let mut cfg = ExperimentConfig::default();
    if let Some(q) = raw.qubits {
        non_empty("qubits", &q)?;
        for (i, &n) in q.iter().enumerate() {
            if !(2..=MAX_QUBITS).contains(&n) {
                return Err(config_err(
                    &format!("qubits[{i}]"),
                    format!("{n} is outside 2..={MAX_QUBITS}"),
                ));
            }
        }
        cfg.qubit_counts = q;
    }
    if let Some(l) = raw.layers {
        if l == 0 {
            return Err(config_err("layers", "must be at least 1"));
        }
        cfg.layers = l;
    }
    if let Some(o) = raw.observables {
        non_empty("observables", &o)?;
        cfg.observables = parse_names("observables", &o)?;
    }
    if let Some(nt) = raw.noise_types {
        non_empty("noise_types", &nt)?;
        cfg.noise_types = parse_names("noise_types", &nt)?;
    }
    if let Some(ps) = raw.probabilities {
        non_empty("probabilities", &ps)?;
        for (i, &p) in ps.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return Err(config_err(
                    &format!("probabilities[{i}]"),
                    format!("{p} is outside [0, 1]"),
                ));
            }
        }
        cfg.probabilities = ps;
    }
    if let Some(s) = raw.seeds {
        non_empty("seeds", &s)?;
        cfg.seeds = s;
    }
    if let Some(it) = raw.iterations {
        if it == 0 {
            return Err(config_err("iterations", "must be at least 1"));
        }
        cfg.iterations = it;
    }
    if let Some(lr) = raw.learning_rate {
        if !(lr > 0.0 && lr.is_finite()) {
            return Err(config_err("learning_rate", format!("{lr} must be positive")));
        }
        cfg.learning_rate = lr;
    }
    if let Some(p) = raw.noise_policy {
        cfg.noise_policy = p.parse().map_err(|e| config_err("noise_policy", e))?;
    }
    cfg.mode = raw.mode;
    if let Some(l) = raw.landscape {
        let d = &mut cfg.landscape;
        d.axis1 = l.axis1.unwrap_or(d.axis1);
        d.axis2 = l.axis2.unwrap_or(d.axis2);
        d.resolution = l.resolution.unwrap_or(d.resolution);
        d.range = l.range.unwrap_or(d.range);
        d.base_seed = l.base_seed.unwrap_or(d.base_seed);
        if d.resolution < 2 {
            return Err(config_err("landscape.resolution", "must be at least 2"));
        }
        if d.axis1 == d.axis2 {
            return Err(config_err("landscape.axis2", "must differ from axis1"));
        }
        if !(d.range.0.is_finite() && d.range.1.is_finite() && d.range.0 < d.range.1) {
            return Err(config_err("landscape.range", "must be an increasing finite pair"));
        }
    }
    if let Some(b) = raw.bp_variance {
        let d = &mut cfg.bp_variance;
        d.samples = b.samples.unwrap_or(d.samples);
        d.param_index = b.param_index.unwrap_or(d.param_index);
        d.seed = b.seed.unwrap_or(d.seed);
        if d.samples < 2 {
            return Err(config_err("bp_variance.samples", "must be at least 2"));
        }
    }

    for s in &mut cfg.seeds {
        *s = shift(*s, seed_offset);
    }
    cfg.landscape.base_seed = shift(cfg.landscape.base_seed, seed_offset);
    cfg.bp_variance.seed = shift(cfg.bp_variance.seed, seed_offset);
    Ok(cfg)
}

/// Loads and validates a JSON config file, applying the environment's seed
/// offset.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text, seed_offset_from_env()?)
}

//! Two-parameter cost-landscape scans.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;

use crate::ansatz::{random_parameters, Ansatz, ParameterVector, Program};
use crate::error::{Error, Result};
use crate::noise::KrausChannel;
use crate::trainer::{cost, format_f64, CostSpec};

pub const DEFAULT_RESOLUTION: usize = 50;
pub const DEFAULT_AXES: (usize, usize) = (0, 1);
pub const DEFAULT_RANGE: (f64, f64) = (-PI, PI);

/// Costs on a square grid over two parameters, all others held fixed.
#[derive(Clone, Debug, PartialEq)]
pub struct LandscapeGrid {
    pub axis1_index: usize,
    pub axis2_index: usize,
    /// Grid coordinates shared by both axes, in radians.
    pub axis_values: Vec<f64>,
    /// Row-major: `costs[i * resolution + j]` is the cost at
    /// `(axis_values[i], axis_values[j])`.
    pub costs: Vec<f64>,
    pub base_params: ParameterVector,
    pub fingerprint: String,
}

impl LandscapeGrid {
    pub fn resolution(&self) -> usize {
        self.axis_values.len()
    }

    pub fn cost_at(&self, i: usize, j: usize) -> f64 {
        self.costs[i * self.resolution() + j]
    }

    /// Writes `axis1,axis2,cost` rows, axis 1 varying slowest.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Invalid(format!("failed to write landscape: {e}"));
        w.write_record(["axis1", "axis2", "cost"]).map_err(io)?;
        let r = self.resolution();
        for i in 0..r {
            for j in 0..r {
                w.write_record([
                    format_f64(self.axis_values[i]),
                    format_f64(self.axis_values[j]),
                    format_f64(self.cost_at(i, j)),
                ])
                .map_err(io)?;
            }
        }
        w.flush()
            .map_err(|e| Error::Invalid(format!("failed to write landscape: {e}")))
    }
}

/// `resolution` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, resolution: usize) -> Vec<f64> {
    let step = (hi - lo) / (resolution - 1) as f64;
    (0..resolution)
        .map(|k| if k + 1 == resolution { hi } else { lo + step * k as f64 })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn scan(
    ansatz: &Ansatz,
    spec: &CostSpec,
    channel: Option<&KrausChannel>,
    axis1: usize,
    axis2: usize,
    range: (f64, f64),
    resolution: usize,
    base_seed: u64,
) -> Result<LandscapeGrid> {
    let num_params = ansatz.num_parameters();
    if axis1 == axis2 {
        return Err(Error::Invalid(format!("both axes are parameter {axis1}")));
    }
    if axis1 >= num_params || axis2 >= num_params {
        return Err(Error::Invalid(format!(
            "axes ({axis1}, {axis2}) out of range for {num_params} parameters"
        )));
    }
    if resolution < 2 {
        return Err(Error::Invalid(format!("resolution {resolution} is below 2")));
    }
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Invalid(format!("bad scan range [{lo}, {hi}]")));
    }
    if spec.num_qubits() != ansatz.num_qubits() {
        return Err(Error::Observable(format!(
            "{}-qubit cost for a {}-qubit circuit",
            spec.num_qubits(),
            ansatz.num_qubits()
        )));
    }

    let program = Program::compile(ansatz, channel)?;
    let base = random_parameters(ansatz.num_qubits(), ansatz.num_layers(), base_seed);
    let axis_values = linspace(lo, hi, resolution);
    let costs = (0..resolution * resolution)
        .into_par_iter()
        .map(|k| {
            let mut p = base.clone();
            p.as_mut_slice()[axis1] = axis_values[k / resolution];
            p.as_mut_slice()[axis2] = axis_values[k % resolution];
            cost(&program.run(&p)?, spec)
        })
        .collect::<Result<Vec<f64>>>()?;

    let (noise, p) = match channel {
        Some(ch) => (ch.name(), ch.probability()),
        None => ("none", 0.0),
    };
    let fingerprint = format!(
        "qubits={};layers={};observable={};noise={};p={};policy={};axes={},{};range={},{};resolution={};seed={}",
        ansatz.num_qubits(),
        ansatz.num_layers(),
        spec.observable().kind(),
        noise,
        p,
        ansatz.noise_policy(),
        axis1,
        axis2,
        lo,
        hi,
        resolution,
        base_seed,
    );
    Ok(LandscapeGrid {
        axis1_index: axis1,
        axis2_index: axis2,
        axis_values,
        costs,
        base_params: base,
        fingerprint,
    })
}

/// `max(costs) - min(costs)`.
pub fn flatness(grid: &LandscapeGrid) -> f64 {
    let max = grid.costs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = grid.costs.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

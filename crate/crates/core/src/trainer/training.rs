use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::ansatz::{random_parameters, Ansatz, ParameterVector};
use crate::error::{Error, Result};
use crate::noise::KrausChannel;

use super::adam::{AdamState, DEFAULT_LEARNING_RATE};
use super::cost::CostSpec;
use super::gradient::cost_and_gradient;

pub const DEFAULT_ITERATIONS: usize = 50;

/// Final cost at or below which a run counts as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 0.1;

/// Total cost decrease at or below which a run counts as not having trained.
pub const NO_TRAINING_DECREASE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainOptions {
    pub iterations: usize,
    pub learning_rate: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            iterations: DEFAULT_ITERATIONS,
            learning_rate: DEFAULT_LEARNING_RATE,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub cost: f64,
    /// Euclidean norm of the gradient at this iteration's parameters.
    #[serde(rename = "grad_l2")]
    pub gradient_l2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingTrace {
    pub fingerprint: String,
    /// `iterations + 1` entries; entry 0 is the initial point.
    pub records: Vec<IterationRecord>,
    pub final_params: ParameterVector,
}

impl TrainingTrace {
    pub fn initial_cost(&self) -> f64 {
        self.records[0].cost
    }

    pub fn final_cost(&self) -> f64 {
        self.records.last().expect("trace has records").cost
    }

    pub fn costs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.cost).collect()
    }

    /// `initial - final`; negative when training made things worse.
    pub fn total_decrease(&self) -> f64 {
        self.initial_cost() - self.final_cost()
    }

    pub fn converged(&self) -> bool {
        self.final_cost() <= CONVERGENCE_THRESHOLD
    }

    /// Writes `iteration,cost,grad_l2` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_records(&self.records, writer)
    }
}

/// Formats a float with 17 significant digits, which round-trips exactly.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_records<W: Write>(records: &[IterationRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| Error::Invalid(format!("failed to write trace: {e}"));
    w.write_record(["iteration", "cost", "grad_l2"]).map_err(io)?;
    for r in records {
        w.write_record([
            r.iteration.to_string(),
            format_f64(r.cost),
            format_f64(r.gradient_l2),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Invalid(format!("failed to write trace: {e}")))
}

/// Parses a trace CSV written by [`TrainingTrace::write_csv`].
pub fn read_records<R: Read>(reader: R) -> Result<Vec<IterationRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r
        .headers()
        .map_err(|e| Error::Invalid(format!("unreadable trace header: {e}")))?;
    if headers != vec!["iteration", "cost", "grad_l2"] {
        return Err(Error::Invalid(format!("unexpected trace header {headers:?}")));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Invalid(format!("bad trace row: {e}"))))
        .collect()
}

/// A compact description of one training configuration.
pub fn fingerprint(
    ansatz: &Ansatz,
    spec: &CostSpec,
    channel: Option<&KrausChannel>,
    seed: u64,
    options: &TrainOptions,
) -> String {
    let (noise, p) = match channel {
        Some(ch) => (ch.name(), ch.probability()),
        None => ("none", 0.0),
    };
    format!(
        "qubits={};layers={};observable={};noise={};p={};policy={};seed={};iterations={};lr={}",
        ansatz.num_qubits(),
        ansatz.num_layers(),
        spec.observable().kind(),
        noise,
        p,
        ansatz.noise_policy(),
        seed,
        options.iterations,
        options.learning_rate,
    )
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|g| g * g).sum::<f64>().sqrt()
}

/// Trains from `random_parameters(seed)` with shift-rule gradients and Adam.
pub fn train(
    ansatz: &Ansatz,
    spec: &CostSpec,
    channel: Option<&KrausChannel>,
    seed: u64,
    options: &TrainOptions,
) -> Result<TrainingTrace> {
    if options.iterations == 0 {
        return Err(Error::Invalid("training needs at least one iteration".into()));
    }
    let mut params = random_parameters(ansatz.num_qubits(), ansatz.num_layers(), seed);
    train_from(ansatz, spec, channel, &mut params, options).map(|records| TrainingTrace {
        fingerprint: fingerprint(ansatz, spec, channel, seed, options),
        records,
        final_params: params,
    })
}

/// Runs the optimisation loop from caller-supplied starting parameters,
/// leaving the final parameters in `params`.
pub fn train_from(
    ansatz: &Ansatz,
    spec: &CostSpec,
    channel: Option<&KrausChannel>,
    params: &mut ParameterVector,
    options: &TrainOptions,
) -> Result<Vec<IterationRecord>> {
    let mut adam = AdamState::new(params.len(), options.learning_rate);
    let mut records = Vec::with_capacity(options.iterations + 1);
    for iteration in 0..=options.iterations {
        let cg = cost_and_gradient(ansatz, params, spec, channel)?;
        if !cg.cost.is_finite() || cg.gradient.iter().any(|g| !g.is_finite()) {
            return Err(Error::Invalid(format!(
                "non-finite cost or gradient at iteration {iteration}"
            )));
        }
        records.push(IterationRecord {
            iteration,
            cost: cg.cost,
            gradient_l2: l2(&cg.gradient),
        });
        if iteration < options.iterations {
            adam.step(params, &cg.gradient)?;
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_ansatz, NoisePolicy};
    use crate::observables::ObservableKind;

    #[test]
    fn one_iteration_gives_two_records() {
        let a = build_ansatz(2, 1, NoisePolicy::None).unwrap();
        let spec = CostSpec::for_kind(ObservableKind::PauliZ, 2).unwrap();
        let opts = TrainOptions {
            iterations: 1,
            ..TrainOptions::default()
        };
        let trace = train(&a, &spec, None, 3, &opts).unwrap();
        assert_eq!(trace.records.len(), 2);
        assert_eq!(trace.records[1].iteration, 1);
    }

    #[test]
    fn zero_iterations_rejected() {
        let a = build_ansatz(2, 1, NoisePolicy::None).unwrap();
        let spec = CostSpec::for_kind(ObservableKind::PauliZ, 2).unwrap();
        let opts = TrainOptions {
            iterations: 0,
            ..TrainOptions::default()
        };
        assert!(train(&a, &spec, None, 3, &opts).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let records = vec![
            IterationRecord {
                iteration: 0,
                cost: 0.1 + 0.2,
                gradient_l2: 1.0 / 3.0,
            },
            IterationRecord {
                iteration: 1,
                cost: 5e-324,
                gradient_l2: 0.0,
            },
        ];
        let mut buf = Vec::new();
        write_records(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("iteration,cost,grad_l2\n0,3.0000000000000004e-1,"));
        assert_eq!(read_records(buf.as_slice()).unwrap(), records);
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(read_records("a,b,c\n1,2,3\n".as_bytes()).is_err());
    }

    #[test]
    fn fingerprint_mentions_configuration() {
        let a = build_ansatz(4, 2, NoisePolicy::PerGate).unwrap();
        let spec = CostSpec::for_kind(ObservableKind::CustomHermitian, 4).unwrap();
        let ch = crate::noise::phase_flip(0.3).unwrap();
        let f = fingerprint(&a, &spec, Some(&ch), 7, &TrainOptions::default());
        assert_eq!(
            f,
            "qubits=4;layers=2;observable=hermitian;noise=phase_flip;p=0.3;policy=per_gate;seed=7;iterations=50;lr=0.1"
        );
    }
}

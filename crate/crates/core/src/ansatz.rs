//! The layered hardware-efficient circuit: per layer, `Rx` then `Ry` on every
//! qubit, followed by a ladder of nearest-neighbour `CZ` gates.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{self, Superop};
use crate::linalg::{c, ComplexMatrix, I, ONE};
use crate::noise::KrausChannel;
use crate::state::{DensityMatrix, MAX_QUBITS};

/// Layers used throughout the experiments.
pub const DEFAULT_LAYERS: usize = 2;

const CZ_DIAG: [num_complex::Complex64; 4] = [ONE, ONE, ONE, num_complex::Complex64::new(-1.0, 0.0)];

/// Where noise channels are inserted into the circuit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisePolicy {
    /// After every gate, on each qubit the gate touched.
    #[default]
    PerGate,
    /// Once per qubit at the end of every layer.
    PerLayer,
    None,
}

impl NoisePolicy {
    pub fn name(self) -> &'static str {
        match self {
            NoisePolicy::PerGate => "per_gate",
            NoisePolicy::PerLayer => "per_layer",
            NoisePolicy::None => "none",
        }
    }
}

impl fmt::Display for NoisePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NoisePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [NoisePolicy::PerGate, NoisePolicy::PerLayer, NoisePolicy::None]
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown noise policy {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RotationAxis {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateSpec {
    Rx { qubit: usize, param: usize },
    Ry { qubit: usize, param: usize },
    /// Always a nearest-neighbour pair `(j, j + 1)`.
    Cz { upper: usize, lower: usize },
}

impl GateSpec {
    pub fn is_parameterized(&self) -> bool {
        !matches!(self, GateSpec::Cz { .. })
    }

    pub fn param_index(&self) -> Option<usize> {
        match *self {
            GateSpec::Rx { param, .. } | GateSpec::Ry { param, .. } => Some(param),
            GateSpec::Cz { .. } => None,
        }
    }
}

/// Flat index of the angle for qubit `qubit` in layer `layer`; `gate` is 0
/// for the `Rx` angle and 1 for the `Ry` angle.
#[inline]
pub fn param_index(num_qubits: usize, layer: usize, qubit: usize, gate: usize) -> usize {
    layer * 2 * num_qubits + 2 * qubit + gate
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ansatz {
    num_qubits: usize,
    num_layers: usize,
    gates: Vec<GateSpec>,
    noise_policy: NoisePolicy,
}

impl Ansatz {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_layers(&self) -> usize {
        self.num_layers
    }

    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    pub fn noise_policy(&self) -> NoisePolicy {
        self.noise_policy
    }

    pub fn num_parameters(&self) -> usize {
        2 * self.num_qubits * self.num_layers
    }

    pub fn single_qubit_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_parameterized()).count()
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates.len() - self.single_qubit_gate_count()
    }

    /// The same circuit with another noise policy.
    pub fn with_noise_policy(&self, noise_policy: NoisePolicy) -> Ansatz {
        Ansatz {
            noise_policy,
            ..self.clone()
        }
    }

    fn gates_per_layer(&self) -> usize {
        2 * self.num_qubits + self.num_qubits - 1
    }
}

/// Builds the `n`-qubit, `L`-layer circuit.
pub fn build_ansatz(num_qubits: usize, num_layers: usize, noise_policy: NoisePolicy) -> Result<Ansatz> {
    if num_qubits < 2 {
        return Err(Error::Ansatz(format!(
            "{num_qubits} qubit(s) leave no neighbouring pair to entangle"
        )));
    }
    if num_qubits > MAX_QUBITS {
        return Err(Error::QubitCount(num_qubits));
    }
    if num_layers == 0 {
        return Err(Error::Ansatz("at least one layer is required".into()));
    }
    let mut gates = Vec::with_capacity(num_layers * (3 * num_qubits - 1));
    for layer in 0..num_layers {
        for qubit in 0..num_qubits {
            gates.push(GateSpec::Rx {
                qubit,
                param: param_index(num_qubits, layer, qubit, 0),
            });
            gates.push(GateSpec::Ry {
                qubit,
                param: param_index(num_qubits, layer, qubit, 1),
            });
        }
        for upper in 0..num_qubits - 1 {
            gates.push(GateSpec::Cz {
                upper,
                lower: upper + 1,
            });
        }
    }
    Ok(Ansatz {
        num_qubits,
        num_layers,
        gates,
        noise_policy,
    })
}

/// Rotation angles in radians, laid out as [`param_index`] describes.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// A copy with `delta` added to one coordinate.
    pub fn shifted(&self, index: usize, delta: f64) -> Self {
        let mut out = self.clone();
        out.0[index] += delta;
        out
    }
}

impl From<Vec<f64>> for ParameterVector {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

/// `2·n·L` angles drawn i.i.d. uniform on the open interval `(-π, π)`.
///
/// The stream is ChaCha8 keyed by `seed`, so equal seeds give bit-identical
/// vectors on every platform.
pub fn random_parameters(num_qubits: usize, num_layers: usize, seed: u64) -> ParameterVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new(-PI, PI);
    let values = (0..2 * num_qubits * num_layers)
        .map(|_| loop {
            // Uniform::new is half-open; reject the lower endpoint.
            let v = dist.sample(&mut rng);
            if v > -PI {
                break v;
            }
        })
        .collect();
    ParameterVector(values)
}

/// `Rx(θ) = exp(-iθX/2)` or `Ry(θ) = exp(-iθY/2)`.
pub fn rotation_matrix(axis: RotationAxis, angle: f64) -> ComplexMatrix {
    let (s, co) = (angle / 2.0).sin_cos();
    match axis {
        RotationAxis::X => ComplexMatrix::from_rows([[c(co), -I * s], [-I * s, c(co)]]),
        RotationAxis::Y => ComplexMatrix::from_rows([[c(co), c(-s)], [c(s), c(co)]]),
    }
}

/// One kernel invocation of a compiled circuit.
#[derive(Clone, Debug)]
pub(crate) enum Step {
    /// A rotation followed by an optional fused channel on the same qubit.
    Rotation {
        qubit: usize,
        axis: RotationAxis,
        param: usize,
        post: Option<Superop>,
    },
    Channel { qubit: usize, superop: Superop },
    Cz { upper: usize, lower: usize },
}

impl Step {
    /// Forward superoperator of a rotation step at `angle`.
    pub(crate) fn rotation_superop(axis: RotationAxis, angle: f64, post: Option<&Superop>) -> Superop {
        let gate = Superop::from_unitary(&rotation_matrix(axis, angle));
        match post {
            Some(p) => p.after(&gate),
            None => gate,
        }
    }
}

/// A circuit lowered to kernel steps for one noise setting.
#[derive(Clone, Debug)]
pub(crate) struct Program {
    pub num_qubits: usize,
    pub num_params: usize,
    pub steps: Vec<Step>,
}

impl Program {
    pub(crate) fn compile(ansatz: &Ansatz, channel: Option<&KrausChannel>) -> Result<Program> {
        let noise = match (ansatz.noise_policy, channel) {
            (NoisePolicy::None, None) => None,
            (NoisePolicy::None, Some(ch)) => {
                return Err(Error::NoiseMismatch(format!(
                    "{} channel given for a noiseless circuit",
                    ch.name()
                )))
            }
            (policy, None) => {
                return Err(Error::NoiseMismatch(format!(
                    "noise policy {policy} requires a channel"
                )))
            }
            (_, Some(ch)) => {
                ch.validate()?;
                Some(ch.superop())
            }
        };

        let per_gate = matches!(ansatz.noise_policy, NoisePolicy::PerGate);
        let per_layer = matches!(ansatz.noise_policy, NoisePolicy::PerLayer);
        let mut steps = Vec::new();
        for (k, gate) in ansatz.gates.iter().enumerate() {
            match *gate {
                GateSpec::Rx { qubit, param } | GateSpec::Ry { qubit, param } => {
                    let axis = if matches!(gate, GateSpec::Rx { .. }) {
                        RotationAxis::X
                    } else {
                        RotationAxis::Y
                    };
                    steps.push(Step::Rotation {
                        qubit,
                        axis,
                        param,
                        post: noise.filter(|_| per_gate),
                    });
                }
                GateSpec::Cz { upper, lower } => {
                    steps.push(Step::Cz { upper, lower });
                    if let (true, Some(s)) = (per_gate, noise) {
                        steps.push(Step::Channel { qubit: upper, superop: s });
                        steps.push(Step::Channel { qubit: lower, superop: s });
                    }
                }
            }
            let layer_done = (k + 1) % ansatz.gates_per_layer() == 0;
            if let (true, true, Some(s)) = (per_layer, layer_done, noise) {
                for qubit in 0..ansatz.num_qubits {
                    steps.push(Step::Channel { qubit, superop: s });
                }
            }
        }
        Ok(Program {
            num_qubits: ansatz.num_qubits,
            num_params: ansatz.num_parameters(),
            steps,
        })
    }

    pub(crate) fn check_params(&self, params: &ParameterVector) -> Result<()> {
        if params.len() != self.num_params {
            return Err(Error::ParameterCount {
                expected: self.num_params,
                got: params.len(),
            });
        }
        if params.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("parameters must be finite".into()));
        }
        Ok(())
    }

    /// Applies one step to a raw density-matrix buffer.
    #[inline]
    pub(crate) fn apply_step(&self, data: &mut [num_complex::Complex64], step: &Step, params: &[f64]) {
        let n = self.num_qubits;
        match step {
            Step::Rotation {
                qubit,
                axis,
                param,
                post,
            } => {
                let s = Step::rotation_superop(*axis, params[*param], post.as_ref());
                kernel::apply_superop(data, n, *qubit, &s);
            }
            Step::Channel { qubit, superop } => kernel::apply_superop(data, n, *qubit, superop),
            Step::Cz { upper, lower } => kernel::apply_diagonal_2q(data, n, *upper, *lower, &CZ_DIAG),
        }
    }

    /// Heisenberg-picture counterpart of [`Program::apply_step`].
    #[inline]
    pub(crate) fn apply_step_adjoint(
        &self,
        data: &mut [num_complex::Complex64],
        step: &Step,
        params: &[f64],
    ) {
        let n = self.num_qubits;
        match step {
            Step::Rotation {
                qubit,
                axis,
                param,
                post,
            } => {
                let s = Step::rotation_superop(*axis, params[*param], post.as_ref());
                kernel::apply_superop(data, n, *qubit, &s.adjoint());
            }
            Step::Channel { qubit, superop } => {
                kernel::apply_superop(data, n, *qubit, &superop.adjoint())
            }
            // CZ is real, diagonal and self-inverse.
            Step::Cz { upper, lower } => kernel::apply_diagonal_2q(data, n, *upper, *lower, &CZ_DIAG),
        }
    }

    pub(crate) fn run(&self, params: &ParameterVector) -> Result<DensityMatrix> {
        self.check_params(params)?;
        let mut rho = DensityMatrix::ground_state(self.num_qubits)?;
        for step in &self.steps {
            self.apply_step(rho.data_mut(), step, params.as_slice());
        }
        debug_assert!((rho.trace().re - 1.0).abs() <= 1e-9);
        Ok(rho)
    }
}

/// Runs the circuit from `|0…0⟩` and returns the final density matrix.
///
/// `channel` must be present exactly when the ansatz has a noise policy other
/// than [`NoisePolicy::None`].
pub fn evolve(
    ansatz: &Ansatz,
    params: &ParameterVector,
    channel: Option<&KrausChannel>,
) -> Result<DensityMatrix> {
    Program::compile(ansatz, channel)?.run(params)
}

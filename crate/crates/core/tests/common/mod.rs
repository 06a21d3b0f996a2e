//! Dense reference simulators built only from `kron` and `matmul`.
#![allow(dead_code)]

use num_complex::Complex64;
use vqc_noise::ansatz::{rotation_matrix, Ansatz, GateSpec, NoisePolicy, ParameterVector, RotationAxis};
use vqc_noise::linalg::{adjoint, kron, matmul, ComplexMatrix};
use vqc_noise::noise::KrausChannel;
use vqc_noise::state::{DensityMatrix, QubitIndex, StateVector};

pub fn embed(u: &ComplexMatrix, q: usize, n: usize) -> ComplexMatrix {
    let left = ComplexMatrix::identity(1 << q);
    let right = ComplexMatrix::identity(1 << (n - q - 1));
    kron(&kron(&left, u), &right)
}

pub fn dense_cz(a: usize, b: usize, n: usize) -> ComplexMatrix {
    let (ma, mb) = (1 << (n - 1 - a), 1 << (n - 1 - b));
    let d: Vec<f64> = (0..1usize << n)
        .map(|r| if r & ma != 0 && r & mb != 0 { -1.0 } else { 1.0 })
        .collect();
    ComplexMatrix::diag_real(&d)
}

fn conj(u: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    matmul(&matmul(u, rho).unwrap(), &adjoint(u)).unwrap()
}

fn dense_channel(rho: &ComplexMatrix, ch: &KrausChannel, q: usize, n: usize) -> ComplexMatrix {
    let dim = 1 << n;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for k in ch.operators() {
        out = out.add(&conj(&embed(k, q, n), rho));
    }
    out
}

fn gate_matrix(g: &GateSpec, params: &[f64], n: usize) -> (ComplexMatrix, Vec<usize>) {
    match *g {
        GateSpec::Rx { qubit, param } => (
            embed(&rotation_matrix(RotationAxis::X, params[param]), qubit, n),
            vec![qubit],
        ),
        GateSpec::Ry { qubit, param } => (
            embed(&rotation_matrix(RotationAxis::Y, params[param]), qubit, n),
            vec![qubit],
        ),
        GateSpec::Cz { upper, lower } => (dense_cz(upper, lower, n), vec![upper, lower]),
    }
}

/// Reference evolution: dense unitaries and dense Kraus sums.
pub fn dense_evolve(a: &Ansatz, p: &ParameterVector, ch: Option<&KrausChannel>) -> ComplexMatrix {
    let n = a.num_qubits();
    let dim = 1 << n;
    let mut rho = ComplexMatrix::zeros(dim, dim);
    rho[(0, 0)] = Complex64::new(1.0, 0.0);
    let per_layer = a.gates().len() / a.num_layers();
    for (k, g) in a.gates().iter().enumerate() {
        let (u, touched) = gate_matrix(g, p.as_slice(), n);
        rho = conj(&u, &rho);
        match (a.noise_policy(), ch) {
            (NoisePolicy::PerGate, Some(ch)) => {
                for q in touched {
                    rho = dense_channel(&rho, ch, q, n);
                }
            }
            (NoisePolicy::PerLayer, Some(ch)) if (k + 1) % per_layer == 0 => {
                for q in 0..n {
                    rho = dense_channel(&rho, ch, q, n);
                }
            }
            _ => {}
        }
    }
    rho
}

/// Noise-free statevector evolution, returned as `|ψ⟩⟨ψ|`.
pub fn statevector_evolve(a: &Ansatz, p: &ParameterVector) -> DensityMatrix {
    let n = a.num_qubits();
    let mut psi = StateVector::zero_state(n).unwrap();
    let q = |i| QubitIndex::new(i, n).unwrap();
    for g in a.gates() {
        match *g {
            GateSpec::Rx { qubit, param } => psi
                .apply(&rotation_matrix(RotationAxis::X, p.as_slice()[param]), &[q(qubit)])
                .unwrap(),
            GateSpec::Ry { qubit, param } => psi
                .apply(&rotation_matrix(RotationAxis::Y, p.as_slice()[param]), &[q(qubit)])
                .unwrap(),
            GateSpec::Cz { upper, lower } => {
                let cz = ComplexMatrix::diag_real(&[1.0, 1.0, 1.0, -1.0]);
                psi.apply(&cz, &[q(upper), q(lower)]).unwrap()
            }
        }
    }
    DensityMatrix::from_statevector(&psi)
}

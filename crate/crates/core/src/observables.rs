//! Measurement observables and exact expectation values.
//!
//! A Pauli observable stands for the family "P on qubit i, identity
//! elsewhere". The custom Hermitian observable is the diagonal projector whose
//! first half of diagonal entries are 1, which under the MSB-first basis
//! ordering is `|0⟩⟨0|` on qubit 0 tensored with the identity.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::qubit_mask;
use crate::linalg::{ComplexMatrix, I, ONE, ZERO};
use crate::state::{DensityMatrix, QubitIndex, MAX_QUBITS, MIN_QUBITS};

const IMAG_RESIDUE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    PauliX,
    PauliY,
    PauliZ,
    #[serde(rename = "hermitian")]
    CustomHermitian,
}

impl ObservableKind {
    pub const ALL: [ObservableKind; 4] = [
        ObservableKind::PauliX,
        ObservableKind::PauliY,
        ObservableKind::PauliZ,
        ObservableKind::CustomHermitian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObservableKind::PauliX => "pauli_x",
            ObservableKind::PauliY => "pauli_y",
            ObservableKind::PauliZ => "pauli_z",
            ObservableKind::CustomHermitian => "hermitian",
        }
    }

    pub fn is_pauli(self) -> bool {
        !matches!(self, ObservableKind::CustomHermitian)
    }
}

impl fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObservableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ObservableKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown observable {s:?}")))
    }
}

/// An observable kind bound to a register size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Observable {
    kind: ObservableKind,
    num_qubits: usize,
}

impl Observable {
    pub fn new(kind: ObservableKind, num_qubits: usize) -> Result<Self> {
        if !(MIN_QUBITS..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCount(num_qubits));
        }
        Ok(Self { kind, num_qubits })
    }

    pub fn kind(&self) -> ObservableKind {
        self.kind
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }
}

/// The 2×2 Pauli matrix for a Pauli kind.
pub fn pauli_matrix(kind: ObservableKind) -> Result<ComplexMatrix> {
    Ok(match kind {
        ObservableKind::PauliX => ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]]),
        ObservableKind::PauliY => ComplexMatrix::from_rows([[ZERO, -I], [I, ZERO]]),
        ObservableKind::PauliZ => ComplexMatrix::diag_real(&[1.0, -1.0]),
        ObservableKind::CustomHermitian => {
            return Err(Error::Observable(
                "the custom Hermitian observable has no 2x2 Pauli form".into(),
            ))
        }
    })
}

/// The `2^n × 2^n` diagonal matrix with ones on the first `2^(n-1)` diagonal
/// entries and zeros elsewhere.
pub fn build_custom_hermitian(num_qubits: usize) -> Result<ComplexMatrix> {
    if !(MIN_QUBITS..=MAX_QUBITS).contains(&num_qubits) {
        return Err(Error::QubitCount(num_qubits));
    }
    let dim = 1usize << num_qubits;
    let diag: Vec<f64> = (0..dim).map(|k| if k < dim / 2 { 1.0 } else { 0.0 }).collect();
    Ok(ComplexMatrix::diag_real(&diag))
}

/// The full `2^n × 2^n` operator of `kind` (on qubit `q` for Pauli kinds).
/// Intended for reference checks and for building cost operators.
pub fn embedded_operator(
    kind: ObservableKind,
    num_qubits: usize,
    q: Option<QubitIndex>,
) -> Result<ComplexMatrix> {
    if !kind.is_pauli() {
        return build_custom_hermitian(num_qubits);
    }
    let q = require_qubit(q, num_qubits)?;
    let p = pauli_matrix(kind)?;
    let dim = 1usize << num_qubits;
    let mask = qubit_mask(num_qubits, q);
    let mut out = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        let a = usize::from(r & mask != 0);
        for b in 0..2 {
            let col = (r & !mask) | if b == 1 { mask } else { 0 };
            out[(r, col)] = p[(a, b)];
        }
    }
    Ok(out)
}

fn require_qubit(q: Option<QubitIndex>, num_qubits: usize) -> Result<usize> {
    let q = q.ok_or_else(|| Error::Observable("Pauli expectation needs a target qubit".into()))?;
    if q.get() >= num_qubits {
        return Err(Error::QubitOutOfRange {
            index: q.get(),
            num_qubits,
        });
    }
    Ok(q.get())
}

/// `Tr(ρ O)` for the observable, evaluated without building `O`.
///
/// `q` selects the measured qubit for Pauli kinds and is ignored for the
/// custom Hermitian observable.
pub fn expectation(rho: &DensityMatrix, obs: &Observable, q: Option<QubitIndex>) -> Result<f64> {
    let n = rho.num_qubits();
    if obs.num_qubits != n {
        return Err(Error::Observable(format!(
            "{}-qubit observable on a {n}-qubit state",
            obs.num_qubits
        )));
    }
    let dim = rho.dim();
    let m = rho.matrix();

    if obs.kind == ObservableKind::CustomHermitian {
        return Ok((0..dim / 2).map(|k| m[(k, k)].re).sum());
    }

    let q = require_qubit(q, n)?;
    let mask = qubit_mask(n, q);
    let value: Complex64 = match obs.kind {
        ObservableKind::PauliZ => (0..dim)
            .map(|k| if k & mask == 0 { m[(k, k)] } else { -m[(k, k)] })
            .sum(),
        // Tr(ρX) = Σ_{r: bit clear} ρ[r][r'] + ρ[r'][r]
        ObservableKind::PauliX => (0..dim)
            .filter(|k| k & mask == 0)
            .map(|r| m[(r, r | mask)] + m[(r | mask, r)])
            .sum(),
        // Tr(ρY) = Σ_{r: bit clear} i ρ[r][r'] - i ρ[r'][r]
        ObservableKind::PauliY => (0..dim)
            .filter(|k| k & mask == 0)
            .map(|r| I * m[(r, r | mask)] - I * m[(r | mask, r)])
            .sum(),
        ObservableKind::CustomHermitian => unreachable!(),
    };
    if value.im.abs() > IMAG_RESIDUE_TOL {
        return Err(Error::Observable(format!(
            "expectation has imaginary residue {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Probability that qubit 0 reads `|0⟩`; equals `⟨H⟩`.
pub fn qubit0_ground_probability(rho: &DensityMatrix) -> f64 {
    let dim = rho.dim();
    (0..dim / 2).map(|k| rho.matrix()[(k, k)].re).sum()
}

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix};
use crate::observables::{self, embedded_operator, Observable, ObservableKind};
use crate::state::{DensityMatrix, QubitIndex};

/// How an observable's expectations are turned into a scalar cost.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostReduction {
    /// `1 - mean_i (1 + ⟨P_i⟩) / 2` over all qubits.
    MeanQubitProb0,
    /// `1 - ⟨H⟩`.
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostSpec {
    observable: Observable,
    reduction: CostReduction,
}

impl CostSpec {
    /// The cost for an observable; Pauli kinds average over qubits, the
    /// custom Hermitian observable is used directly.
    pub fn new(observable: Observable) -> Self {
        let reduction = if observable.kind().is_pauli() {
            CostReduction::MeanQubitProb0
        } else {
            CostReduction::Direct
        };
        Self {
            observable,
            reduction,
        }
    }

    pub fn for_kind(kind: ObservableKind, num_qubits: usize) -> Result<Self> {
        Ok(Self::new(Observable::new(kind, num_qubits)?))
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn reduction(&self) -> CostReduction {
        self.reduction
    }

    pub fn num_qubits(&self) -> usize {
        self.observable.num_qubits()
    }

    /// The Hermitian operator `O` with `cost(ρ) = Tr(ρ O)`.
    pub fn operator(&self) -> Result<ComplexMatrix> {
        let n = self.num_qubits();
        let dim = 1usize << n;
        match self.reduction {
            CostReduction::Direct => {
                let h = observables::build_custom_hermitian(n)?;
                Ok(ComplexMatrix::identity(dim).add(&h.scale(c(-1.0))))
            }
            CostReduction::MeanQubitProb0 => {
                // 1 - (1/n) Σ (1 + P_i)/2 = I/2 - (1/2n) Σ P_i
                let mut op = ComplexMatrix::identity(dim).scale(c(0.5));
                let weight = c(-0.5 / n as f64);
                for q in 0..n {
                    let p = embedded_operator(self.observable.kind(), n, Some(QubitIndex::new(q, n)?))?;
                    op = op.add(&p.scale(weight));
                }
                Ok(op)
            }
        }
    }
}

/// Cost of a state: 0 when the target is reached, within `[0, 1]` always.
pub fn cost(rho: &DensityMatrix, spec: &CostSpec) -> Result<f64> {
    let n = rho.num_qubits();
    if spec.num_qubits() != n {
        return Err(Error::Observable(format!(
            "{}-qubit cost on a {n}-qubit state",
            spec.num_qubits()
        )));
    }
    match spec.reduction {
        CostReduction::Direct => {
            Ok(1.0 - observables::expectation(rho, &spec.observable, None)?)
        }
        CostReduction::MeanQubitProb0 => {
            let mut total = 0.0;
            for q in 0..n {
                let e = observables::expectation(rho, &spec.observable, Some(QubitIndex::new(q, n)?))?;
                total += (1.0 + e) / 2.0;
            }
            Ok(1.0 - total / n as f64)
        }
    }
}

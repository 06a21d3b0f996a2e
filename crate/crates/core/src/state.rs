//! Pure and mixed register states.
//!
//! Basis ordering: qubit 0 is the most significant bit of a computational
//! basis index, `b = Σ qᵢ · 2^(n-1-i)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{self, Superop};
use crate::linalg::{self, ComplexMatrix, ONE, ZERO};
use crate::noise::KrausChannel;

pub const MIN_QUBITS: usize = 1;
pub const MAX_QUBITS: usize = 12;

const UNITARY_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;
const VALIDATION_TOL: f64 = 1e-9;

fn check_qubit_count(n: usize) -> Result<()> {
    if (MIN_QUBITS..=MAX_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::QubitCount(n))
    }
}

/// A qubit position in an `n`-qubit register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitIndex(usize);

impl QubitIndex {
    pub fn new(index: usize, num_qubits: usize) -> Result<Self> {
        if index < num_qubits {
            Ok(Self(index))
        } else {
            Err(Error::QubitOutOfRange { index, num_qubits })
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }
}

/// Normalised amplitudes of an `n`-qubit pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::Shape(format!("{len} amplitudes is not a qubit register")));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_qubit_count(num_qubits)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// `|0…0⟩`.
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[0] = ONE;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Applies `u` to `qubits`, with `qubits[0]` as the high-order index of
    /// `u`.
    pub fn apply(&mut self, u: &ComplexMatrix, qubits: &[QubitIndex]) -> Result<()> {
        let raw = validate_targets(qubits, self.num_qubits)?;
        let dim = 1usize << raw.len();
        if u.rows() != dim || u.cols() != dim {
            return Err(Error::Shape(format!(
                "{}x{} operator on {} qubit(s)",
                u.rows(),
                u.cols(),
                raw.len()
            )));
        }
        if !u.is_unitary(UNITARY_TOL) {
            return Err(Error::NotUnitary { tol: UNITARY_TOL });
        }
        kernel::apply_vector(&mut self.amplitudes, self.num_qubits, &raw, u);
        Ok(())
    }
}

fn validate_targets(qubits: &[QubitIndex], num_qubits: usize) -> Result<Vec<usize>> {
    let mut raw = Vec::with_capacity(qubits.len());
    for q in qubits {
        if q.0 >= num_qubits {
            return Err(Error::QubitOutOfRange {
                index: q.0,
                num_qubits,
            });
        }
        if raw.contains(&q.0) {
            return Err(Error::RepeatedQubit(q.0));
        }
        raw.push(q.0);
    }
    Ok(raw)
}

/// The density matrix of an `n`-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// `|0…0⟩⟨0…0|`.
    pub fn ground_state(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1 << num_qubits;
        let mut matrix = ComplexMatrix::zeros(dim, dim);
        matrix[(0, 0)] = ONE;
        Ok(Self { num_qubits, matrix })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_statevector(psi: &StateVector) -> Self {
        let dim = psi.amplitudes.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in &psi.amplitudes {
            data.extend(psi.amplitudes.iter().map(|b| a * b.conj()));
        }
        Self {
            num_qubits: psi.num_qubits,
            matrix: ComplexMatrix::from_raw(dim, dim, data),
        }
    }

    /// Wraps a matrix after checking it is Hermitian with unit trace (both
    /// to within 1e-9). Positivity is not checked.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.rows();
        if !matrix.is_square() || !dim.is_power_of_two() || dim < 2 {
            return Err(Error::Shape(format!(
                "{}x{} is not a register density matrix",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        check_qubit_count(num_qubits)?;
        if !linalg::is_hermitian(&matrix, VALIDATION_TOL)? {
            return Err(Error::Invalid("density matrix is not Hermitian".into()));
        }
        let tr = linalg::trace(&matrix)?;
        if (tr - ONE).norm() > VALIDATION_TOL {
            return Err(Error::Invalid(format!("density matrix has trace {tr}")));
        }
        Ok(Self { num_qubits, matrix })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        self.matrix.as_mut_slice()
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.matrix).expect("density matrices are square")
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_rc|² for Hermitian ρ.
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Real diagonal, i.e. the computational-basis populations.
    pub fn populations(&self) -> Vec<f64> {
        let dim = self.dim();
        (0..dim).map(|k| self.matrix[(k, k)].re).collect()
    }

    /// Largest entry of `|ρ - ρ†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.max_abs_diff(&linalg::adjoint(&self.matrix))
    }

    fn qubit(&self, q: QubitIndex) -> Result<usize> {
        if q.0 < self.num_qubits {
            Ok(q.0)
        } else {
            Err(Error::QubitOutOfRange {
                index: q.0,
                num_qubits: self.num_qubits,
            })
        }
    }

    fn debug_validate(&self) {
        if cfg!(debug_assertions) {
            let tr = self.trace();
            debug_assert!((tr - ONE).norm() <= VALIDATION_TOL, "trace drifted to {tr}");
            debug_assert!(
                self.hermiticity_defect() <= VALIDATION_TOL,
                "state lost Hermiticity"
            );
        }
    }

    /// `ρ ↦ U_q ρ U_q†` for a 2×2 unitary `u`.
    pub fn apply_single_qubit_unitary(&mut self, u: &ComplexMatrix, q: QubitIndex) -> Result<()> {
        let q = self.qubit(q)?;
        if (u.rows(), u.cols()) != (2, 2) {
            return Err(Error::Shape(format!("{}x{} single-qubit gate", u.rows(), u.cols())));
        }
        if !u.is_unitary(UNITARY_TOL) {
            return Err(Error::NotUnitary { tol: UNITARY_TOL });
        }
        let n = self.num_qubits;
        kernel::apply_superop(self.data_mut(), n, q, &Superop::from_unitary(u));
        self.debug_validate();
        Ok(())
    }

    /// Conjugation by a 4×4 unitary on `(q1, q2)`, with `q1` as the
    /// high-order index of `u`.
    pub fn apply_two_qubit_unitary(
        &mut self,
        u: &ComplexMatrix,
        q1: QubitIndex,
        q2: QubitIndex,
    ) -> Result<()> {
        let (a, b) = (self.qubit(q1)?, self.qubit(q2)?);
        if a == b {
            return Err(Error::RepeatedQubit(a));
        }
        if (u.rows(), u.cols()) != (4, 4) {
            return Err(Error::Shape(format!("{}x{} two-qubit gate", u.rows(), u.cols())));
        }
        if !u.is_unitary(UNITARY_TOL) {
            return Err(Error::NotUnitary { tol: UNITARY_TOL });
        }
        let n = self.num_qubits;
        if u.is_diagonal() {
            let d = [u[(0, 0)], u[(1, 1)], u[(2, 2)], u[(3, 3)]];
            kernel::apply_diagonal_2q(self.data_mut(), n, a, b, &d);
        } else {
            kernel::conjugate_rows_cols(self.data_mut(), n, &[a, b], u);
        }
        self.debug_validate();
        Ok(())
    }

    /// `ρ ↦ Σᵢ (Kᵢ)_q ρ (Kᵢ)_q†`.
    pub fn apply_kraus(&mut self, channel: &KrausChannel, q: QubitIndex) -> Result<()> {
        let q = self.qubit(q)?;
        channel.validate()?;
        let n = self.num_qubits;
        kernel::apply_superop(self.data_mut(), n, q, &channel.superop());
        self.debug_validate();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, matmul, I};
    use crate::noise;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn q(i: usize) -> QubitIndex {
        QubitIndex(i)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]])
    }

    fn cz() -> ComplexMatrix {
        ComplexMatrix::diag_real(&[1.0, 1.0, 1.0, -1.0])
    }

    fn rx(theta: f64) -> ComplexMatrix {
        let (s, co) = (theta / 2.0).sin_cos();
        ComplexMatrix::from_rows([[c(co), -I * s], [-I * s, c(co)]])
    }

    fn plus() -> DensityMatrix {
        let psi = StateVector::new(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap();
        DensityMatrix::from_statevector(&psi)
    }

    #[test]
    fn ground_state_examples() {
        let g1 = DensityMatrix::ground_state(1).unwrap();
        assert_eq!(g1.matrix(), &ComplexMatrix::diag_real(&[1.0, 0.0]));
        let g2 = DensityMatrix::ground_state(2).unwrap();
        assert_eq!(g2.matrix(), &ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(DensityMatrix::ground_state(10).unwrap().trace(), ONE);
        assert!(matches!(DensityMatrix::ground_state(0), Err(Error::QubitCount(0))));
        assert!(matches!(DensityMatrix::ground_state(13), Err(Error::QubitCount(13))));
    }

    #[test]
    fn single_qubit_unitary_examples() {
        let mut rho = DensityMatrix::ground_state(1).unwrap();
        rho.apply_single_qubit_unitary(&pauli_x(), q(0)).unwrap();
        assert_eq!(rho.matrix(), &ComplexMatrix::diag_real(&[0.0, 1.0]));

        let before = plus();
        let mut after = before.clone();
        after
            .apply_single_qubit_unitary(&ComplexMatrix::identity(2), q(0))
            .unwrap();
        assert_eq!(after, before);

        let mut flipped = DensityMatrix::ground_state(1).unwrap();
        flipped.apply_single_qubit_unitary(&rx(PI), q(0)).unwrap();
        let target = ComplexMatrix::diag_real(&[0.0, 1.0]);
        assert!(flipped.matrix().max_abs_diff(&target) < 1e-12);
    }

    #[test]
    fn single_qubit_unitary_errors() {
        let mut rho = DensityMatrix::ground_state(2).unwrap();
        let not_unitary = ComplexMatrix::diag_real(&[1.0, 0.5]);
        assert!(matches!(
            rho.apply_single_qubit_unitary(&not_unitary, q(0)),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!(
            rho.apply_single_qubit_unitary(&pauli_x(), q(2)),
            Err(Error::QubitOutOfRange { index: 2, num_qubits: 2 })
        ));
    }

    #[test]
    fn cz_examples() {
        let mut g = DensityMatrix::ground_state(2).unwrap();
        g.apply_two_qubit_unitary(&cz(), q(0), q(1)).unwrap();
        assert_eq!(g, DensityMatrix::ground_state(2).unwrap());

        // (|10⟩ + |11⟩)/√2: coherence between indices 2 and 3.
        let psi = StateVector::new(vec![ZERO, ZERO, c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap();
        let rho = DensityMatrix::from_statevector(&psi);
        let mut once = rho.clone();
        once.apply_two_qubit_unitary(&cz(), q(0), q(1)).unwrap();
        assert!((once.matrix()[(2, 3)] - c(-0.5)).norm() < 1e-15);
        assert!((once.matrix()[(3, 2)] - c(-0.5)).norm() < 1e-15);
        assert!((once.matrix()[(3, 3)] - c(0.5)).norm() < 1e-15);

        let mut twice = once.clone();
        twice.apply_two_qubit_unitary(&cz(), q(0), q(1)).unwrap();
        assert!(twice.matrix().max_abs_diff(rho.matrix()) < 1e-12);
    }

    #[test]
    fn two_qubit_errors() {
        let mut rho = DensityMatrix::ground_state(3).unwrap();
        assert!(matches!(
            rho.apply_two_qubit_unitary(&cz(), q(1), q(1)),
            Err(Error::RepeatedQubit(1))
        ));
        let bad = ComplexMatrix::diag_real(&[1.0, 1.0, 1.0, 2.0]);
        assert!(matches!(
            rho.apply_two_qubit_unitary(&bad, q(0), q(1)),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn kraus_examples() {
        let mut excited = DensityMatrix::from_matrix(ComplexMatrix::diag_real(&[0.0, 1.0])).unwrap();
        excited
            .apply_kraus(&noise::amplitude_damping(1.0).unwrap(), q(0))
            .unwrap();
        assert!(excited.matrix().max_abs_diff(&ComplexMatrix::diag_real(&[1.0, 0.0])) < 1e-12);

        let diag = DensityMatrix::from_matrix(ComplexMatrix::diag_real(&[0.3, 0.7])).unwrap();
        let mut dephased = diag.clone();
        dephased
            .apply_kraus(&noise::phase_damping(0.42).unwrap(), q(0))
            .unwrap();
        assert!(dephased.matrix().max_abs_diff(diag.matrix()) < 1e-12);

        let mut flipped = plus();
        flipped.apply_kraus(&noise::phase_flip(0.5).unwrap(), q(0)).unwrap();
        let half = ComplexMatrix::diag_real(&[0.5, 0.5]);
        assert!(flipped.matrix().max_abs_diff(&half) < 1e-12);
    }

    #[test]
    fn from_statevector_examples() {
        let zero = StateVector::zero_state(1).unwrap();
        assert_eq!(
            DensityMatrix::from_statevector(&zero).matrix(),
            &ComplexMatrix::diag_real(&[1.0, 0.0])
        );
        let p = plus();
        for z in p.matrix().as_slice() {
            assert!((z - c(0.5)).norm() < 1e-15);
        }
        let psi = StateVector::new(vec![c(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        let rho = DensityMatrix::from_statevector(&psi);
        assert_eq!(rho.hermiticity_defect(), 0.0);
        assert!((rho.purity() - 1.0).abs() < 1e-10);
        assert!(matches!(
            StateVector::new(vec![c(1.0), c(1.0)]),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn statevector_examples() {
        let mut psi = StateVector::zero_state(1).unwrap();
        psi.apply(&pauli_x(), &[q(0)]).unwrap();
        assert_eq!(psi.amplitudes(), &[ZERO, ONE]);

        let half = PI / 4.0;
        let ry = ComplexMatrix::from_rows([
            [c(half.cos()), c(-half.sin())],
            [c(half.sin()), c(half.cos())],
        ]);
        let mut psi = StateVector::zero_state(1).unwrap();
        psi.apply(&ry, &[q(0)]).unwrap();
        assert!((psi.amplitudes()[0] - c(half.cos())).norm() < 1e-15);
        assert!((psi.amplitudes()[1] - c(half.sin())).norm() < 1e-15);

        let psi0 = StateVector::new(vec![c(0.6), ZERO, ZERO, Complex64::new(0.0, 0.8)]).unwrap();
        let mut psi1 = psi0.clone();
        psi1.apply(&ComplexMatrix::identity(4), &[q(1), q(0)]).unwrap();
        assert_eq!(psi0, psi1);

        assert!(psi1.apply(&ComplexMatrix::identity(2), &[q(0), q(1)]).is_err());
        assert!(matches!(
            psi1.apply(&cz(), &[q(0), q(0)]),
            Err(Error::RepeatedQubit(0))
        ));
    }

    #[test]
    fn vector_and_density_paths_agree_on_entangling_gate() {
        let mut psi = StateVector::zero_state(3).unwrap();
        let mut rho = DensityMatrix::ground_state(3).unwrap();
        let h = ComplexMatrix::from_rows([
            [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)],
            [c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)],
        ]);
        let cnot = matmul(
            &matmul(
                &crate::linalg::kron(&ComplexMatrix::identity(2), &h),
                &cz(),
            )
            .unwrap(),
            &crate::linalg::kron(&ComplexMatrix::identity(2), &h),
        )
        .unwrap();
        for (u, qs) in [(&h, vec![0usize]), (&cnot, vec![0, 2]), (&rx(0.7), vec![1])] {
            let targets: Vec<QubitIndex> = qs.iter().map(|&i| q(i)).collect();
            psi.apply(u, &targets).unwrap();
            if qs.len() == 1 {
                rho.apply_single_qubit_unitary(u, targets[0]).unwrap();
            } else {
                rho.apply_two_qubit_unitary(u, targets[0], targets[1]).unwrap();
            }
        }
        let oracle = DensityMatrix::from_statevector(&psi);
        assert!(rho.matrix().max_abs_diff(oracle.matrix()) < 1e-12);
    }

    #[test]
    fn from_matrix_validation() {
        assert!(DensityMatrix::from_matrix(ComplexMatrix::diag_real(&[0.5, 0.6])).is_err());
        let non_herm = ComplexMatrix::from_rows([[c(0.5), c(0.1)], [c(0.2), c(0.5)]]);
        assert!(DensityMatrix::from_matrix(non_herm).is_err());
        assert!(DensityMatrix::from_matrix(ComplexMatrix::identity(3)).is_err());
    }
}

//! Index-arithmetic kernels over row-major `2^n × 2^n` buffers.
//!
//! Qubit `q` of an `n`-qubit register owns bit `n - 1 - q` of a basis index,
//! so qubit 0 is the most significant bit. None of these kernels materialise
//! an embedded `2^n × 2^n` operator.

use num_complex::Complex64;

use crate::linalg::{ComplexMatrix, ONE, ZERO};

/// Bit mask of qubit `q` in an `n`-qubit basis index.
#[inline]
pub(crate) fn qubit_mask(num_qubits: usize, q: usize) -> usize {
    1 << (num_qubits - 1 - q)
}

/// Calls `f(i0)` for every index in `0..dim` whose `mask` bit is clear.
#[inline]
fn for_each_low(dim: usize, mask: usize, mut f: impl FnMut(usize)) {
    let mut hi = 0;
    while hi < dim {
        for lo in 0..mask {
            f(hi + lo);
        }
        hi += 2 * mask;
    }
}

/// A single-qubit linear map on 2×2 operator blocks, as a 4×4 matrix acting
/// on the row-major vectorisation `(B00, B01, B10, B11)`.
///
/// For Kraus operators `{K}` the forward map `B ↦ Σ K B K†` has entries
/// `S[(a,b),(a',b')] = Σ K[a][a'] conj(K[b][b'])`. Its Hilbert-Schmidt
/// adjoint (the Heisenberg picture `O ↦ Σ K† O K`) is the conjugate transpose
/// of that 4×4 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Superop(pub [[Complex64; 4]; 4]);

impl Superop {
    pub fn from_kraus<'a>(ops: impl IntoIterator<Item = &'a ComplexMatrix>) -> Self {
        let mut m = [[ZERO; 4]; 4];
        for k in ops {
            debug_assert_eq!((k.rows(), k.cols()), (2, 2));
            for a in 0..2 {
                for b in 0..2 {
                    for a2 in 0..2 {
                        for b2 in 0..2 {
                            m[2 * a + b][2 * a2 + b2] += k[(a, a2)] * k[(b, b2)].conj();
                        }
                    }
                }
            }
        }
        Superop(m)
    }

    pub fn from_unitary(u: &ComplexMatrix) -> Self {
        Self::from_kraus(std::iter::once(u))
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &Superop) -> Superop {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                *out = (0..4).map(|k| self.0[i][k] * first.0[k][j]).sum();
            }
        }
        Superop(m)
    }

    pub fn adjoint(&self) -> Superop {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, out) in row.iter_mut().enumerate() {
                *out = self.0[j][i].conj();
            }
        }
        Superop(m)
    }

    fn diagonal(&self) -> Option<[Complex64; 4]> {
        for i in 0..4 {
            for j in 0..4 {
                if i != j && self.0[i][j] != ZERO {
                    return None;
                }
            }
        }
        Some([self.0[0][0], self.0[1][1], self.0[2][2], self.0[3][3]])
    }

    /// `Σ S ⊙ M`, the contraction with an environment tensor from
    /// [`block_environment`].
    pub fn contract(&self, env: &[[Complex64; 4]; 4]) -> Complex64 {
        let mut acc = ZERO;
        for i in 0..4 {
            for j in 0..4 {
                acc += self.0[i][j] * env[i][j];
            }
        }
        acc
    }
}

/// Applies a single-qubit superoperator to qubit `q` of the matrix in place.
pub(crate) fn apply_superop(data: &mut [Complex64], num_qubits: usize, q: usize, s: &Superop) {
    let dim = 1usize << num_qubits;
    debug_assert_eq!(data.len(), dim * dim);
    let mask = qubit_mask(num_qubits, q);

    if let Some(d) = s.diagonal() {
        for r in 0..dim {
            let a = usize::from(r & mask != 0);
            let row = &mut data[r * dim..(r + 1) * dim];
            let (same, flip) = (d[2 * a], d[2 * a + 1]);
            for_each_low(dim, mask, |c0| {
                row[c0] *= same;
                row[c0 | mask] *= flip;
            });
        }
        return;
    }

    let m = &s.0;
    for_each_low(dim, mask, |r0| {
        let r1 = r0 | mask;
        let (head, tail) = data.split_at_mut(r1 * dim);
        let row0 = &mut head[r0 * dim..(r0 + 1) * dim];
        let row1 = &mut tail[..dim];
        for_each_low(dim, mask, |c0| {
            let c1 = c0 | mask;
            let b = [row0[c0], row0[c1], row1[c0], row1[c1]];
            let mut out = [ZERO; 4];
            for (o, coeffs) in out.iter_mut().zip(m) {
                *o = coeffs[0] * b[0] + coeffs[1] * b[1] + coeffs[2] * b[2] + coeffs[3] * b[3];
            }
            row0[c0] = out[0];
            row0[c1] = out[1];
            row1[c0] = out[2];
            row1[c1] = out[3];
        });
    });
}

/// Conjugation by a diagonal two-qubit unitary `diag(d)` on `(q1, q2)`, with
/// `q1` the high-order index of `d`.
pub(crate) fn apply_diagonal_2q(
    data: &mut [Complex64],
    num_qubits: usize,
    q1: usize,
    q2: usize,
    d: &[Complex64; 4],
) {
    let dim = 1usize << num_qubits;
    let (m1, m2) = (qubit_mask(num_qubits, q1), qubit_mask(num_qubits, q2));
    let idx = |k: usize| 2 * usize::from(k & m1 != 0) + usize::from(k & m2 != 0);
    let col_phase: Vec<Complex64> = (0..dim).map(|c| d[idx(c)].conj()).collect();
    for r in 0..dim {
        let left = d[idx(r)];
        let row = &mut data[r * dim..(r + 1) * dim];
        if left == ONE {
            for (z, &p) in row.iter_mut().zip(&col_phase) {
                if p != ONE {
                    *z *= p;
                }
            }
        } else {
            for (z, &p) in row.iter_mut().zip(&col_phase) {
                *z *= left * p;
            }
        }
    }
}

/// Basis offsets of the `2^k` indices spanned by `qubits`, with `qubits[0]`
/// as the most significant position of the local index.
fn local_offsets(num_qubits: usize, qubits: &[usize]) -> Vec<usize> {
    let k = qubits.len();
    (0..1usize << k)
        .map(|local| {
            qubits
                .iter()
                .enumerate()
                .filter(|&(pos, _)| local & (1 << (k - 1 - pos)) != 0)
                .map(|(_, &q)| qubit_mask(num_qubits, q))
                .sum()
        })
        .collect()
}

/// Basis indices with every bit of `qubits` clear.
fn group_bases(num_qubits: usize, qubits: &[usize]) -> impl Iterator<Item = usize> {
    let all: usize = qubits.iter().map(|&q| qubit_mask(num_qubits, q)).sum();
    (0..1usize << num_qubits).filter(move |i| i & all == 0)
}

/// `v ↦ (u on qubits) v` for a state vector.
pub(crate) fn apply_vector(
    amps: &mut [Complex64],
    num_qubits: usize,
    qubits: &[usize],
    u: &ComplexMatrix,
) {
    let offsets = local_offsets(num_qubits, qubits);
    let k = offsets.len();
    let mut gathered = vec![ZERO; k];
    for base in group_bases(num_qubits, qubits) {
        for (g, off) in gathered.iter_mut().zip(&offsets) {
            *g = amps[base + off];
        }
        for (i, off) in offsets.iter().enumerate() {
            amps[base + off] = (0..k).map(|j| u[(i, j)] * gathered[j]).sum();
        }
    }
}

/// `ρ ↦ U ρ U†` with `U` acting on `qubits`, done as a row pass then a column
/// pass.
pub(crate) fn conjugate_rows_cols(
    data: &mut [Complex64],
    num_qubits: usize,
    qubits: &[usize],
    u: &ComplexMatrix,
) {
    let dim = 1usize << num_qubits;
    let offsets = local_offsets(num_qubits, qubits);
    let k = offsets.len();

    // U ρ: mix whole rows.
    let mut rows: Vec<Vec<Complex64>> = vec![vec![ZERO; dim]; k];
    for base in group_bases(num_qubits, qubits) {
        for (buf, off) in rows.iter_mut().zip(&offsets) {
            let r = base + off;
            buf.copy_from_slice(&data[r * dim..(r + 1) * dim]);
        }
        for (i, off) in offsets.iter().enumerate() {
            let r = base + off;
            let out = &mut data[r * dim..(r + 1) * dim];
            out.fill(ZERO);
            for (j, src) in rows.iter().enumerate() {
                let w = u[(i, j)];
                if w == ZERO {
                    continue;
                }
                for (o, &s) in out.iter_mut().zip(src) {
                    *o += w * s;
                }
            }
        }
    }

    // (Uρ) U†: mix columns within each row.
    let bases: Vec<usize> = group_bases(num_qubits, qubits).collect();
    let mut gathered = vec![ZERO; k];
    for r in 0..dim {
        let row = &mut data[r * dim..(r + 1) * dim];
        for &base in &bases {
            for (g, off) in gathered.iter_mut().zip(&offsets) {
                *g = row[base + off];
            }
            for (i, off) in offsets.iter().enumerate() {
                row[base + off] = (0..k).map(|j| gathered[j] * u[(i, j)].conj()).sum();
            }
        }
    }
}

/// Environment tensor of qubit `q` for the pair `(o, rho)`:
/// `M[(a,b),(a',b')] = Σ conj(o[(r̄,a),(c̄,b)]) · rho[(r̄,a'),(c̄,b')]`.
///
/// For Hermitian `o`, `Tr(o · S(rho)) = Σ S ⊙ M` for any single-qubit
/// superoperator `S` on `q`.
pub(crate) fn block_environment(
    o: &[Complex64],
    rho: &[Complex64],
    num_qubits: usize,
    q: usize,
) -> [[Complex64; 4]; 4] {
    let dim = 1usize << num_qubits;
    let mask = qubit_mask(num_qubits, q);
    let mut env = [[ZERO; 4]; 4];
    for_each_low(dim, mask, |r0| {
        let r1 = r0 | mask;
        let (o0, o1) = (&o[r0 * dim..(r0 + 1) * dim], &o[r1 * dim..(r1 + 1) * dim]);
        let (p0, p1) = (&rho[r0 * dim..(r0 + 1) * dim], &rho[r1 * dim..(r1 + 1) * dim]);
        for_each_low(dim, mask, |c0| {
            let c1 = c0 | mask;
            let ob = [o0[c0].conj(), o0[c1].conj(), o1[c0].conj(), o1[c1].conj()];
            let pb = [p0[c0], p0[c1], p1[c0], p1[c1]];
            for (row, &ov) in env.iter_mut().zip(&ob) {
                for (e, &pv) in row.iter_mut().zip(&pb) {
                    *e += ov * pv;
                }
            }
        });
    });
    env
}

/// `Re Tr(o · rho)` for Hermitian `o`.
pub(crate) fn hs_inner(o: &[Complex64], rho: &[Complex64]) -> f64 {
    o.iter()
        .zip(rho)
        .map(|(a, b)| a.re * b.re + a.im * b.im)
        .sum()
}

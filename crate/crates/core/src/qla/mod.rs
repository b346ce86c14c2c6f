// Copyright 2026 The ghzdist developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Exact complex linear algebra on multiqubit state spaces.
//!
//! Conventions used throughout the crate:
//! * qubit 0 is the **most significant bit** of an amplitude index, so for
//!   three qubits the basis state |011⟩ sits at index `0b011 = 3`;
//! * a [`QubitSubset`] is a bitmask over qubit indices (bit `q` set means
//!   qubit `q` belongs to the subset);
//! * operators on a subset index their rows/columns by the subset's qubits
//!   in ascending qubit order, lowest qubit index most significant.
//!
//! All values are immutable after construction and all operations are pure.

pub mod cmatrix;

pub use cmatrix::{CMatrix, C64};

use crate::error::{Error, Result};

/// Tolerance for normalization and orthogonality checks.
pub const NORM_TOL: f64 = 1e-9;
/// Eigenvalue floor below which a nominally PSD operator is rejected.
pub const EIG_FLOOR: f64 = -1e-8;
/// Probability below which a measurement branch is considered unreachable.
pub const ZERO_BRANCH_TOL: f64 = 1e-14;

/// A set of qubit indices, stored as a bitmask (bit `q` ⇔ qubit `q`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitSubset {
    mask: u32,
}

impl std::fmt::Debug for QubitSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "QubitSubset{:?}", self.indices())
    }
}

impl QubitSubset {
    pub fn from_mask(mask: u32) -> Self {
        QubitSubset { mask }
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        let mut mask = 0u32;
        for &q in indices {
            assert!(q < 32, "qubit index out of range");
            mask |= 1 << q;
        }
        QubitSubset { mask }
    }

    pub fn single(q: usize) -> Self {
        QubitSubset::from_indices(&[q])
    }

    /// All qubits of an `n`-qubit system.
    pub fn full(n: usize) -> Self {
        QubitSubset {
            mask: ((1u64 << n) - 1) as u32,
        }
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn complement(&self, n: usize) -> Self {
        QubitSubset {
            mask: QubitSubset::full(n).mask & !self.mask,
        }
    }

    pub fn contains(&self, q: usize) -> bool {
        q < 32 && self.mask & (1 << q) != 0
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_subset_of(&self, other: &QubitSubset) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn intersects(&self, other: &QubitSubset) -> bool {
        self.mask & other.mask != 0
    }

    pub fn union(&self, other: &QubitSubset) -> Self {
        QubitSubset {
            mask: self.mask | other.mask,
        }
    }

    /// Qubit indices in ascending order.
    pub fn indices(&self) -> Vec<usize> {
        (0..32).filter(|q| self.contains(*q)).collect()
    }

    /// Mask over amplitude-index bits for an `n`-qubit register
    /// (qubit `q` occupies amplitude bit `n-1-q`).
    pub fn amp_mask(&self, n: usize) -> usize {
        let mut m = 0usize;
        for q in self.indices() {
            assert!(q < n, "qubit index {q} out of range for {n} qubits");
            m |= 1 << (n - 1 - q);
        }
        m
    }
}

/// Scatter table: `table[x]` is the amplitude-index contribution of writing
/// the bits of `x` (MSB first) onto the subset's qubit positions.
fn scatter_table(subset: &QubitSubset, n: usize) -> Vec<usize> {
    let qubits = subset.indices();
    let k = qubits.len();
    let positions: Vec<usize> = qubits.iter().map(|&q| n - 1 - q).collect();
    let mut table = vec![0usize; 1 << k];
    for (x, slot) in table.iter_mut().enumerate() {
        let mut acc = 0usize;
        for (i, &pos) in positions.iter().enumerate() {
            if (x >> (k - 1 - i)) & 1 == 1 {
                acc |= 1 << pos;
            }
        }
        *slot = acc;
    }
    table
}

/// Pure state of `num_qubits` qubits as a dense amplitude vector.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl std::fmt::Debug for StateVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StateVector({} qubits)", self.num_qubits)
    }
}

impl StateVector {
    /// |b⟩ for a computational basis index `b`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Self {
        assert!(num_qubits >= 1);
        let dim = 1usize << num_qubits;
        assert!(index < dim, "basis index out of range");
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        StateVector { num_qubits, amps }
    }

    pub fn from_amplitudes(num_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if num_qubits < 1 {
            return Err(Error::invalid("a state needs at least one qubit"));
        }
        if amps.len() != 1 << num_qubits {
            return Err(Error::invalid(format!(
                "amplitude vector has length {}, expected {}",
                amps.len(),
                1usize << num_qubits
            )));
        }
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.num_qubits, other.num_qubits);
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, factor: C64) -> StateVector {
        StateVector {
            num_qubits: self.num_qubits,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Apply an operator living on `subset` (identity elsewhere).
    pub fn apply_local(&self, subset: &QubitSubset, op: &CMatrix) -> StateVector {
        let n = self.num_qubits;
        let k = subset.len();
        assert!(subset.is_subset_of(&QubitSubset::full(n)));
        assert_eq!(op.rows(), 1 << k, "operator dimension mismatch");
        assert!(op.is_square());

        let sub_table = scatter_table(subset, n);
        let env_table = scatter_table(&subset.complement(n), n);
        let dim_sub = 1usize << k;

        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        let mut gathered = vec![C64::new(0.0, 0.0); dim_sub];
        for &env in &env_table {
            for (x, g) in gathered.iter_mut().enumerate() {
                *g = self.amps[env | sub_table[x]];
            }
            for r in 0..dim_sub {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..dim_sub {
                    acc += op[(r, c)] * gathered[c];
                }
                out[env | sub_table[r]] = acc;
            }
        }
        StateVector {
            num_qubits: n,
            amps: out,
        }
    }
}

/// Kronecker product; the result carries `a`'s qubits first (most
/// significant), then `b`'s.
pub fn tensor(a: &StateVector, b: &StateVector) -> StateVector {
    debug_assert!(a.is_normalized() && b.is_normalized());
    let nb = b.num_qubits;
    let mut amps = vec![C64::new(0.0, 0.0); a.dim() * b.dim()];
    for (i, &ai) in a.amps.iter().enumerate() {
        for (j, &bj) in b.amps.iter().enumerate() {
            amps[(i << nb) | j] = ai * bj;
        }
    }
    StateVector {
        num_qubits: a.num_qubits + nb,
        amps,
    }
}

/// Density operator on `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    num_qubits: usize,
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn from_state(state: &StateVector) -> Self {
        DensityOperator {
            num_qubits: state.num_qubits,
            matrix: CMatrix::outer(state.amplitudes()),
        }
    }

    /// Validating constructor: Hermitian within 1e-9, unit trace within
    /// 1e-9, eigenvalues above the PSD floor.
    pub fn from_matrix(num_qubits: usize, matrix: CMatrix) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::invalid(format!(
                "matrix is {}x{}, expected {dim}x{dim}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_hermitian_within(NORM_TOL) {
            return Err(Error::invalid("density operator must be Hermitian"));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::invalid(format!(
                "density operator must have unit trace, got {tr}"
            )));
        }
        let eigs = matrix.eigvalsh();
        if let Some(&min) = eigs.first() {
            if min < EIG_FLOOR {
                return Err(Error::NumericalDomain(format!(
                    "density operator has eigenvalue {min} below the PSD floor"
                )));
            }
        }
        Ok(DensityOperator { num_qubits, matrix })
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let matrix = CMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0));
        DensityOperator { num_qubits, matrix }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Trace out every qubit not in `keep`.
    pub fn partial_trace(&self, keep: &QubitSubset) -> Result<DensityOperator> {
        let n = self.num_qubits;
        if keep.is_empty() {
            return Err(Error::invalid("partial trace must keep at least one qubit"));
        }
        if !keep.is_subset_of(&QubitSubset::full(n)) {
            return Err(Error::invalid(
                "keep set references qubits outside the state",
            ));
        }
        if keep.len() == n {
            return Err(Error::invalid(
                "partial trace must trace out at least one qubit",
            ));
        }
        let keep_table = scatter_table(keep, n);
        let env_table = scatter_table(&keep.complement(n), n);
        let dim_out = keep_table.len();
        let mut out = CMatrix::zeros(dim_out, dim_out);
        for (i, &oi) in keep_table.iter().enumerate() {
            for (j, &oj) in keep_table.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for &e in &env_table {
                    acc += self.matrix[(oi | e, oj | e)];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(DensityOperator {
            num_qubits: keep.len(),
            matrix: out,
        })
    }

    /// Partial transpose over `side`. The result is Hermitian but in
    /// general not PSD, so it is returned as a bare matrix.
    pub fn partial_transpose(&self, side: &QubitSubset) -> Result<CMatrix> {
        partial_transpose_matrix(&self.matrix, side, self.num_qubits)
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> Result<f64> {
        let eigs = self.matrix.eigvalsh();
        entropy_of_spectrum(&eigs)
    }
}

/// Partial transpose of an arbitrary `2^n`-dimensional matrix over `side`.
/// Exact entry permutation; applying it twice returns the input bitwise.
pub fn partial_transpose_matrix(
    matrix: &CMatrix,
    side: &QubitSubset,
    num_qubits: usize,
) -> Result<CMatrix> {
    let dim = 1usize << num_qubits;
    if matrix.rows() != dim || matrix.cols() != dim {
        return Err(Error::invalid(
            "matrix dimension does not match qubit count",
        ));
    }
    if side.is_empty() || side.len() >= num_qubits {
        return Err(Error::invalid(
            "partial transpose side must be a nonempty proper subset",
        ));
    }
    if !side.is_subset_of(&QubitSubset::full(num_qubits)) {
        return Err(Error::invalid(
            "side references qubits outside the register",
        ));
    }
    let s = side.amp_mask(num_qubits);
    let full = dim - 1;
    let keep = full & !s;
    let mut out = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let ti = (i & keep) | (j & s);
            let tj = (j & keep) | (i & s);
            out[(ti, tj)] = matrix[(i, j)];
        }
    }
    Ok(out)
}

/// −Σ λ log₂ λ with 0·log 0 := 0; rejects spectra dipping below the PSD
/// floor.
pub fn entropy_of_spectrum(eigs: &[f64]) -> Result<f64> {
    let mut h = 0.0;
    for &lam in eigs {
        if lam < EIG_FLOOR {
            return Err(Error::NumericalDomain(format!(
                "eigenvalue {lam} below PSD floor in entropy"
            )));
        }
        if lam > 0.0 {
            h -= lam * lam.log2();
        }
    }
    Ok(h)
}

/// One branch of a projective measurement: its probability, and the
/// renormalized post-measurement state (absent on zero-probability
/// branches).
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    pub probability: f64,
    pub state: Option<StateVector>,
}

/// Apply a complete projective measurement given by `operators` on
/// `subset`. Operators must satisfy Σ K†K = 1 on the subset within 1e-9.
pub fn measure_projective(
    state: &StateVector,
    subset: &QubitSubset,
    operators: &[CMatrix],
) -> Result<Vec<MeasurementOutcome>> {
    let dim_sub = 1usize << subset.len();
    if operators.is_empty() {
        return Err(Error::invalid("measurement needs at least one operator"));
    }
    if !subset.is_subset_of(&QubitSubset::full(state.num_qubits())) || subset.is_empty() {
        return Err(Error::invalid("measurement subset invalid for this state"));
    }
    let mut sum = CMatrix::zeros(dim_sub, dim_sub);
    for op in operators {
        if op.rows() != dim_sub || op.cols() != dim_sub {
            return Err(Error::invalid(format!(
                "operator is {}x{}, expected {dim_sub}x{dim_sub}",
                op.rows(),
                op.cols()
            )));
        }
        sum = sum.add(&op.adjoint().matmul(op));
    }
    if sum.sub(&CMatrix::identity(dim_sub)).max_abs() > NORM_TOL {
        return Err(Error::invalid(
            "measurement operators do not resolve the identity",
        ));
    }

    let mut outcomes = Vec::with_capacity(operators.len());
    for op in operators {
        let branch = state.apply_local(subset, op);
        let p = branch.norm_sqr();
        if p <= ZERO_BRANCH_TOL {
            outcomes.push(MeasurementOutcome {
                probability: 0.0,
                state: None,
            });
        } else {
            let renorm = C64::new(1.0 / p.sqrt(), 0.0);
            outcomes.push(MeasurementOutcome {
                probability: p,
                state: Some(branch.scaled(renorm)),
            });
        }
    }
    Ok(outcomes)
}

/// Computational-basis projectors |x⟩⟨x| on a `k`-qubit subsystem.
pub fn computational_projectors(k: usize) -> Vec<CMatrix> {
    let dim = 1usize << k;
    (0..dim)
        .map(|x| {
            let mut m = CMatrix::zeros(dim, dim);
            m[(x, x)] = C64::new(1.0, 0.0);
            m
        })
        .collect()
}

//! Dense complex-matrix foundation.
//!
//! Qubits are labelled `1..=n`. Basis states are ordered big-endian: qubit 1
//! is the most significant bit of the basis index (the leftmost Kronecker
//! factor). `σ_z|0> = +|0>`.

use std::fmt;
use std::ops::Mul;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const UNITARY_TOL: f64 = 1e-10;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Value (0 or 1) of qubit `q` (1-based) in basis index `index` of an
/// `n`-qubit register.
#[inline]
pub fn bit_of(index: usize, q: usize, n: usize) -> usize {
    (index >> (n - q)) & 1
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Square complex matrix on an `n`-qubit Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    mat: CMatrix,
}

impl Operator {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { expected: mat.nrows(), found: mat.ncols() });
        }
        qubits_for_dim(mat.nrows())?;
        Ok(Self { mat })
    }

    /// Builds an operator from real row-major entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        Self::new(CMatrix::from_row_iterator(dim, dim, entries.iter().map(|&x| C64::new(x, 0.0))))
    }

    pub fn identity(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Self { mat: CMatrix::identity(d, d) }
    }

    /// Diagonal operator from real diagonal entries.
    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        let mut mat = CMatrix::zeros(d, d);
        for (i, &x) in diag.iter().enumerate() {
            mat[(i, i)] = C64::new(x, 0.0);
        }
        Self::new(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint() }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { mat: &self.mat * factor }
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim();
        max_abs(&(self.mat.adjoint() * &self.mat - CMatrix::identity(d, d)))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_deviation() <= UNITARY_TOL
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs(&(&self.mat - &other.mat))
    }

    /// Largest singular value.
    pub fn operator_norm(&self) -> f64 {
        let gram = self.mat.adjoint() * &self.mat;
        gram.symmetric_eigenvalues().iter().fold(0.0_f64, |m, &e| m.max(e)).max(0.0).sqrt()
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator product dimension mismatch");
        Operator { mat: &self.mat * &rhs.mat }
    }
}

pub fn pauli_x() -> Operator {
    Operator::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

pub fn pauli_y() -> Operator {
    Operator::new(CMatrix::from_row_slice(2, 2, &[ZERO, -C64::i(), C64::i(), ZERO])).unwrap()
}

pub fn pauli_z() -> Operator {
    Operator::diagonal(&[1.0, -1.0]).unwrap()
}

pub fn hadamard() -> Operator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Operator::from_real(2, &[h, h, h, -h]).unwrap()
}

/// `|b><b|` for a single qubit.
pub fn projector(bit: usize) -> Operator {
    if bit == 0 {
        Operator::diagonal(&[1.0, 0.0]).unwrap()
    } else {
        Operator::diagonal(&[0.0, 1.0]).unwrap()
    }
}

/// Two-qubit CNOT, control is the first factor.
pub fn cnot() -> Operator {
    let mut m = vec![0.0; 16];
    for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        m[r * 4 + c] = 1.0;
    }
    Operator::from_real(4, &m).unwrap()
}

/// Three-qubit Toffoli, controls are the first two factors.
pub fn toffoli() -> Operator {
    let mut m = vec![0.0; 64];
    for r in 0..8 {
        let c = if r >= 6 { r ^ 1 } else { r };
        m[r * 8 + c] = 1.0;
    }
    Operator::from_real(8, &m).unwrap()
}

/// Kronecker product; `a` acts on the leading (more significant) qubits.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    Operator { mat: a.mat.kronecker(&b.mat) }
}

fn check_targets(targets: &[usize], n: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t == 0 || t > n {
            return Err(Error::QubitOutOfRange { index: t, n });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateQubit(t));
        }
    }
    Ok(())
}

/// Lifts `gate` onto an `n`-qubit register, acting on `targets` in the given
/// order (first target = most significant bit of the gate's index) and as
/// identity elsewhere.
pub fn embed(gate: &Operator, targets: &[usize], n: usize) -> Result<Operator> {
    check_targets(targets, n)?;
    let expected = 1usize << targets.len();
    if gate.dim() != expected {
        return Err(Error::DimensionMismatch { expected, found: gate.dim() });
    }
    let dim = 1usize << n;
    let k = targets.len();
    let target_mask: usize = targets.iter().map(|&t| 1usize << (n - t)).sum();
    let sub_index = |x: usize| -> usize {
        targets.iter().enumerate().fold(0, |acc, (i, &t)| acc | (bit_of(x, t, n) << (k - 1 - i)))
    };
    let mut mat = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        let sr = sub_index(r);
        for c in 0..dim {
            if (r & !target_mask) != (c & !target_mask) {
                continue;
            }
            mat[(r, c)] = gate.mat[(sr, sub_index(c))];
        }
    }
    Ok(Operator { mat })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateKind {
    /// Trace-one positive semidefinite state.
    State,
    /// Traceless deviation from the identity (NMR pseudo-pure picture).
    Deviation,
}

/// Hermitian operator representing either a physical state or a traceless
/// deviation matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    kind: StateKind,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and (for [`StateKind::State`]) positivity.
    pub fn new(mat: CMatrix, kind: StateKind) -> Result<Self> {
        Operator::new(mat.clone())?;
        let herm = max_abs(&(&mat - mat.adjoint()));
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = mat.trace();
        let expected = match kind {
            StateKind::State => 1.0,
            StateKind::Deviation => 0.0,
        };
        if (tr.re - expected).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} (expected {expected})")));
        }
        let rho = Self { mat, kind };
        if kind == StateKind::State {
            let min = rho.min_eigenvalue();
            if min < -POSITIVITY_TOL {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(rho)
    }

    pub(crate) fn from_parts(mat: CMatrix, kind: StateKind) -> Self {
        Self { mat, kind }
    }

    /// `|ψ><ψ|` for a normalized ket.
    pub fn pure(ket: &[C64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(ket);
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("ket norm {norm}")));
        }
        Self::new(&v * v.adjoint(), StateKind::State)
    }

    /// Computational basis state `|index>` on `n` qubits.
    pub fn basis(n: usize, index: usize) -> Self {
        let d = 1usize << n;
        let mut mat = CMatrix::zeros(d, d);
        mat[(index, index)] = ONE;
        Self { mat, kind: StateKind::State }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let d = 1usize << n;
        Self { mat: CMatrix::identity(d, d) / C64::new(d as f64, 0.0), kind: StateKind::State }
    }

    /// Traceless deviation from an operator (e.g. a Pauli matrix).
    pub fn deviation(op: &Operator) -> Result<Self> {
        Self::new(op.matrix().clone(), StateKind::Deviation)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn element(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        max_abs(&(&self.mat - self.mat.adjoint()))
    }

    /// Spectrum of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs(&(&self.mat - &other.mat))
    }

    /// Kronecker product of states; the result is a deviation if either
    /// factor is.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let kind = if self.kind == StateKind::State && other.kind == StateKind::State {
            StateKind::State
        } else {
            StateKind::Deviation
        };
        Self { mat: self.mat.kronecker(&other.mat), kind }
    }

    /// Applies `f` to every element `(row, col, value)`; used by diagonal
    /// (dephasing) channels.
    pub(crate) fn map_elements(&self, mut f: impl FnMut(usize, usize, C64) -> C64) -> Self {
        let d = self.dim();
        let mat = CMatrix::from_fn(d, d, |r, c| f(r, c, self.mat[(r, c)]));
        Self { mat, kind: self.kind }
    }
}

impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.mat)
    }
}

/// Returns `UρU†`.
pub fn apply_unitary(rho: &DensityMatrix, u: &Operator) -> Result<DensityMatrix> {
    if rho.dim() != u.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: u.dim() });
    }
    let dev = u.unitarity_deviation();
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    let mat = &u.mat * &rho.mat * u.mat.adjoint();
    Ok(DensityMatrix { mat, kind: rho.kind })
}

/// Reduced state on the qubits in `keep` (any order, duplicates ignored);
/// kept qubits retain their relative order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let n = rho.n_qubits();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&q| q == 0 || q > n) {
        return Err(Error::QubitOutOfRange { index: bad, n });
    }
    let traced: Vec<usize> = (1..=n).filter(|q| !kept.contains(q)).collect();
    let k = kept.len();
    let scatter = |sub: usize, qubits: &[usize]| -> usize {
        let m = qubits.len();
        qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &q)| acc | (((sub >> (m - 1 - i)) & 1) << (n - q)))
    };
    let dk = 1usize << k;
    let de = 1usize << traced.len();
    let mut out = CMatrix::zeros(dk, dk);
    for r in 0..dk {
        let rf = scatter(r, &kept);
        for c in 0..dk {
            let cf = scatter(c, &kept);
            let mut acc = ZERO;
            for e in 0..de {
                let ef = scatter(e, &traced);
                acc += rho.mat[(rf | ef, cf | ef)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(DensityMatrix { mat: out, kind: rho.kind })
}

/// `Re tr(a·b)`.
pub fn hs_overlap(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let d = a.dim();
    let mut acc = ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += a.mat[(i, j)] * b.mat[(j, i)];
        }
    }
    if acc.im.abs() > 1e-10 {
        return Err(Error::InvalidState(format!("overlap has imaginary part {:.3e}", acc.im)));
    }
    Ok(acc.re)
}

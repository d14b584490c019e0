//! Test-only helpers: random states/unitaries and brute-force oracles that do
//! not go through the library's channel or embedding code.

#![allow(dead_code)]

use dfsqec::qstate::{CMatrix, DensityMatrix, Operator, StateKind, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// `GG†/tr(GG†)` for a random `d×rank` matrix `G`.
pub fn random_state(n: usize, rank: usize, rng: &mut impl Rng) -> DensityMatrix {
    let d = 1usize << n;
    let g = DMatrix::from_fn(d, rank, |_, _| random_complex(rng));
    let m = &g * g.adjoint();
    let tr = m.trace();
    let mut m = m / tr;
    // exact Hermiticity
    m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    DensityMatrix::new(m, StateKind::State).unwrap()
}

pub fn random_unitary(n: usize, rng: &mut impl Rng) -> Operator {
    let d = 1usize << n;
    let g = DMatrix::from_fn(d, d, |_, _| random_complex(rng));
    Operator::new(g.qr().q()).unwrap()
}

pub fn sz() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)])
}

pub fn id2() -> CMatrix {
    CMatrix::identity(2, 2)
}

/// `Σ_j w_j σ_z^j` by explicit Kronecker products.
pub fn weighted_z_sum(weights: &[f64]) -> CMatrix {
    let n = weights.len();
    let d = 1usize << n;
    let mut acc = CMatrix::zeros(d, d);
    for (j, &w) in weights.iter().enumerate() {
        let mut term = CMatrix::identity(1, 1);
        for k in 0..n {
            let f = if k == j { sz() } else { id2() };
            term = term.kronecker(&f);
        }
        acc += term * C64::new(w, 0.0);
    }
    acc
}

/// Column-stacking Lindbladian superoperator for the given jump operators.
pub fn lindbladian(jumps: &[CMatrix]) -> CMatrix {
    let d = jumps[0].nrows();
    let eye = CMatrix::identity(d, d);
    let mut sup = CMatrix::zeros(d * d, d * d);
    for l in jumps {
        let ldl = l.adjoint() * l;
        let lbar = l.map(|z| z.conj());
        sup += lbar.kronecker(l);
        sup -= eye.kronecker(&ldl) * C64::new(0.5, 0.0);
        sup -= ldl.transpose().kronecker(&eye) * C64::new(0.5, 0.0);
    }
    sup
}

/// `exp(t·𝓛)` applied to `ρ` via the vectorized form.
pub fn lindblad_oracle(rho: &CMatrix, jumps: &[CMatrix], t: f64) -> CMatrix {
    let d = rho.nrows();
    let sup = lindbladian(jumps) * C64::new(t, 0.0);
    let prop = sup.exp();
    let v = nalgebra::DVector::from_column_slice(rho.as_slice());
    let out = prop * v;
    CMatrix::from_column_slice(d, d, out.as_slice())
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Brute-force partial trace by explicit index summation over a 4-qubit
/// register, keeping qubit `keep` (1-based).
pub fn brute_force_reduce_4(rho: &CMatrix, keep: usize) -> CMatrix {
    let mut out = CMatrix::zeros(2, 2);
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for e in 0..8usize {
                // scatter the 3 traced bits around the kept one
                let traced: Vec<usize> = (1..=4).filter(|&q| q != keep).collect();
                let mut row = 0;
                let mut col = 0;
                for q in 1..=4usize {
                    let shift = 4 - q;
                    let (rb, cb) = if q == keep {
                        (a, b)
                    } else {
                        let pos = traced.iter().position(|&t| t == q).unwrap();
                        let bit = (e >> (2 - pos)) & 1;
                        (bit, bit)
                    };
                    row |= rb << shift;
                    col |= cb << shift;
                }
                acc += rho[(row, col)];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

//! Fidelity and polarization metrics, closed-form reference curves and
//! short-time error-rate fitting.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::channels::sinc;
use crate::qstate::{self, hs_overlap, DensityMatrix, Operator};
use crate::{Error, Result};

/// Input axis `u` of the data-qubit deviation `σ_u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn pauli(self) -> Operator {
        match self {
            Axis::X => qstate::pauli_x(),
            Axis::Y => qstate::pauli_y(),
            Axis::Z => qstate::pauli_z(),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(Error::InvalidAxis(other.to_string())),
        }
    }
}

/// Per-sweep-point metrics for the data qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
    pub fe: f64,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    pub p: f64,
    pub fe_analytic: Option<f64>,
}

impl MetricReport {
    /// Metrics from matched input, noisy-output and noise-free-output
    /// triples (ordered x, y, z).
    pub fn from_runs(
        inputs: &[DensityMatrix; 3],
        outputs: &[DensityMatrix; 3],
        references: &[DensityMatrix; 3],
        fe_analytic: Option<f64>,
    ) -> Result<Self> {
        let [cx, cy, cz] = correlations(inputs, outputs)?;
        let (px, py, pz, p) = avg_polarization(outputs, references)?;
        Ok(Self { cx, cy, cz, fe: entanglement_fidelity([cx, cy, cz]), px, py, pz, p, fe_analytic })
    }
}

/// `C_u = tr(ρ_in,u ρ_out,u) / tr(ρ_in,u²)` for u = x, y, z.
pub fn correlations(inputs: &[DensityMatrix; 3], outputs: &[DensityMatrix; 3]) -> Result<[f64; 3]> {
    let mut c = [0.0; 3];
    for (i, axis) in Axis::ALL.iter().enumerate() {
        let norm = hs_overlap(&inputs[i], &inputs[i])?;
        if norm.abs() < 1e-300 {
            return Err(Error::ZeroNorm(axis.as_char()));
        }
        c[i] = hs_overlap(&inputs[i], &outputs[i])? / norm;
    }
    Ok(c)
}

/// Bloch vector `(tr ρσ_x, tr ρσ_y, tr ρσ_z)` of a one-qubit state.
pub fn bloch_vector(rho: &DensityMatrix) -> Result<[f64; 3]> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rho.dim() });
    }
    let mut r = [0.0; 3];
    for axis in Axis::ALL {
        r[axis.index()] = hs_overlap(rho, &DensityMatrix::deviation(&axis.pauli())?)?;
    }
    Ok(r)
}

/// Pure-state route to the correlations: `C_u` is the `u` component of the
/// output Bloch vector for the input `(I + σ_u)/2`, outputs ordered x, y, z.
pub fn correlations_from_bloch(outputs: &[DensityMatrix; 3]) -> Result<[f64; 3]> {
    let mut c = [0.0; 3];
    for axis in Axis::ALL {
        c[axis.index()] = bloch_vector(&outputs[axis.index()])?[axis.index()];
    }
    Ok(c)
}

/// `F_e = (C_x + C_y + C_z + 1)/4`, valid for unital one-qubit channels.
pub fn entanglement_fidelity(c: [f64; 3]) -> f64 {
    (c[0] + c[1] + c[2] + 1.0) / 4.0
}

/// `P_u = tr(ρ_out,u²)/tr(ρ_out,u0²)` and their mean `P`.
pub fn avg_polarization(
    outputs: &[DensityMatrix; 3],
    references: &[DensityMatrix; 3],
) -> Result<(f64, f64, f64, f64)> {
    let mut p = [0.0; 3];
    for (i, axis) in Axis::ALL.iter().enumerate() {
        let purity_ref = hs_overlap(&references[i], &references[i])?;
        if purity_ref.abs() < 1e-300 {
            return Err(Error::ZeroNorm(axis.as_char()));
        }
        p[i] = hs_overlap(&outputs[i], &outputs[i])? / purity_ref;
    }
    Ok((p[0], p[1], p[2], (p[0] + p[1] + p[2]) / 3.0))
}

/// Phase code fidelity for independent Pauli-equivalent dephasing with
/// per-carrier coherence factors `s1, s2, s3`.
pub fn fe_qec_from_coherences(s1: f64, s2: f64, s3: f64) -> f64 {
    0.5 + 0.25 * (s1 + s2 + s3 - s1 * s2 * s3)
}

/// Uncorrected one-qubit fidelity for data coherence factor `s`.
pub fn fe_no_qec_from_coherence(s: f64) -> f64 {
    (2.0 * s + 2.0) / 4.0
}

/// `1/2 + (3 sinc(κ₀/2) − sinc³(κ₀/2))/4`.
pub fn analytic_fe_qec_independent(kappa0: f64) -> f64 {
    let s = sinc(kappa0 / 2.0);
    0.5 + 0.25 * (3.0 * s - s * s * s)
}

/// `1/2 + (2 sinc(κ₀/2) + sinc(κ₃/2) − sinc²(κ₀/2) sinc(κ₃/2))/4`.
pub fn analytic_fe_qec_strong(kappa0: f64, kappa3: f64) -> f64 {
    let s0 = sinc(kappa0 / 2.0);
    let s3 = sinc(kappa3 / 2.0);
    0.5 + 0.25 * (2.0 * s0 + s3 - s0 * s0 * s3)
}

/// `(2 sinc(κ₀/2) + 2)/4`.
pub fn analytic_fe_no_qec(kappa0: f64) -> f64 {
    fe_no_qec_from_coherence(sinc(kappa0 / 2.0))
}

/// Closed-form fidelity curves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Curve {
    QecIndependent,
    QecStrong,
    NoQec,
}

impl FromStr for Curve {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "qec-independent" => Ok(Curve::QecIndependent),
            "qec-strong" => Ok(Curve::QecStrong),
            "no-qec" => Ok(Curve::NoQec),
            other => Err(Error::Config(format!("unknown curve '{other}'"))),
        }
    }
}

/// Markovian counterparts: every `sinc(κ/2)` becomes `exp(−λt)`. `lambda3`
/// is only used by [`Curve::QecStrong`].
pub fn analytic_fe_markov(curve: Curve, lambda0: f64, lambda3: f64, t: f64) -> f64 {
    let s0 = (-lambda0 * t).exp();
    match curve {
        Curve::QecIndependent => fe_qec_from_coherences(s0, s0, s0),
        Curve::QecStrong => fe_qec_from_coherences(s0, s0, (-lambda3 * t).exp()),
        Curve::NoQec => fe_no_qec_from_coherence(s0),
    }
}

/// Short-time expansion `F_e(t) = 1 + Σ_k (1/k!)(t/τ_k)^k` fitted to samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateFit {
    pub orders: Vec<usize>,
    /// `1/|τ_k^k| = k!·|c_k|` per entry of `orders`.
    pub tau_inv_k: Vec<f64>,
    pub lambda_bound: f64,
}

impl ErrorRateFit {
    pub fn rate(&self, order: usize) -> Option<f64> {
        self.orders.iter().position(|&k| k == order).map(|i| self.tau_inv_k[i])
    }

    /// `1/|τ_k^k| ≤ λ^k (1 + 1e-6)` for every fitted order.
    pub fn within_bound(&self) -> bool {
        self.orders
            .iter()
            .zip(&self.tau_inv_k)
            .all(|(&k, &r)| r <= self.lambda_bound.powi(k as i32) * (1.0 + 1e-6))
    }
}

/// Highest polynomial degree used internally; terms above `max_order`
/// absorb higher-order curvature so the reported low orders stay unbiased.
const MAX_FIT_DEGREE: usize = 6;

/// `n` equally spaced times on `[0, 0.1/λ]`.
pub fn error_rate_grid(lambda: f64, n: usize) -> Vec<f64> {
    let t_max = 0.1 / lambda;
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}

/// Least-squares polynomial fit of `1 − F_e(t)` with an intercept; reports
/// `k!|c_k|` for `k = 1..=max_order`.
pub fn fit_error_rates(
    samples: &[(f64, f64)],
    max_order: usize,
    lambda_bound: f64,
) -> Result<ErrorRateFit> {
    if !(1..=3).contains(&max_order) {
        return Err(Error::Config(format!("max_order must be in 1..=3, got {max_order}")));
    }
    let needed = max_order + 2;
    if samples.len() < needed {
        return Err(Error::InsufficientSamples { needed, got: samples.len() });
    }
    let degree = (samples.len() - 2).clamp(max_order, MAX_FIT_DEGREE);
    let t_max = samples.iter().map(|s| s.0.abs()).fold(0.0, f64::max);
    if t_max == 0.0 {
        return Err(Error::Config("samples need at least one nonzero time".into()));
    }
    let rows = samples.len();
    let a = DMatrix::from_fn(rows, degree + 1, |r, c| (samples[r].0 / t_max).powi(c as i32));
    let b = DVector::from_iterator(rows, samples.iter().map(|s| 1.0 - s.1));
    let coef = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::Config(format!("least-squares solve failed: {e}")))?;
    let orders: Vec<usize> = (1..=max_order).collect();
    let mut factorial = 1.0;
    let tau_inv_k = orders
        .iter()
        .map(|&k| {
            factorial *= k as f64;
            factorial * (coef[k] / t_max.powi(k as i32)).abs()
        })
        .collect();
    Ok(ErrorRateFit { orders, tau_inv_k, lambda_bound })
}

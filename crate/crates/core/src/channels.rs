//! Dephasing noise engines and error-model construction.
//!
//! Every generator here is z-type, `W = Σ_j w_j σ_z^j`, so all generators
//! commute and both channel kinds act diagonally on matrix elements in the
//! computational basis. For an element `<m|ρ|m'>` let
//! `Δ = Σ_j w_j (s_j − s'_j)` with `s_j = ±1` the σ_z eigenvalue of qubit `j`.
//!
//! - Incoherent (gradient) dephasing with phase spread `κ` multiplies the
//!   element by `sinc(κΔ/4)`: the exact average of `exp(−iφW/2)` over
//!   `φ ~ U[−κ/2, κ/2]`.
//! - Markovian dephasing with `L = sqrt(λ/2)·W` for time `t` multiplies it
//!   by `exp(−λtΔ²/4)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::qstate::{bit_of, DensityMatrix, Operator, C64};
use crate::{Error, Result};

/// Unnormalized `sin(x)/x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// One z-type error generator `W = Σ_j w_j σ_z^j` with a strength.
///
/// `strength` is the dimensionless phase spread `κ` when used with
/// [`incoherent_dephase`] and the partial rate `λ_μ` when used with
/// [`markov_dephase`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DephasingGenerator {
    weights: Vec<f64>,
    strength: f64,
    label: String,
}

impl DephasingGenerator {
    pub fn new(weights: Vec<f64>, strength: f64, label: impl Into<String>) -> Result<Self> {
        if weights.is_empty() || weights.iter().all(|&w| w == 0.0) {
            return Err(Error::InvalidGenerator("weights are all zero".into()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidGenerator("non-finite weight".into()));
        }
        if !(strength >= 0.0 && strength.is_finite()) {
            return Err(Error::InvalidGenerator(format!("strength {strength} must be finite and >= 0")));
        }
        Ok(Self { weights, strength, label: label.into() })
    }

    /// Generator on an `n`-qubit register from `(qubit, weight)` pairs.
    pub fn on_qubits(
        n: usize,
        terms: &[(usize, f64)],
        strength: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        let mut weights = vec![0.0; n];
        for &(q, w) in terms {
            if q == 0 || q > n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
            weights[q - 1] += w;
        }
        Self::new(weights, strength, label)
    }

    /// Single-qubit generator `σ_z^q`.
    pub fn single(n: usize, qubit: usize, strength: f64, label: impl Into<String>) -> Result<Self> {
        Self::on_qubits(n, &[(qubit, 1.0)], strength, label)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_qubits(&self) -> usize {
        self.weights.len()
    }

    pub fn with_strength(&self, strength: f64) -> Result<Self> {
        Self::new(self.weights.clone(), strength, self.label.clone())
    }

    /// Phase spread (or rate amplitude) seen by a single qubit, `strength·|w_q|`.
    pub fn effective_spread(&self, qubit: usize) -> f64 {
        self.weights.get(qubit.wrapping_sub(1)).map_or(0.0, |w| self.strength * w.abs())
    }

    /// `Δ` for the matrix element `(row, col)`.
    pub fn delta(&self, row: usize, col: usize) -> f64 {
        let n = self.n_qubits();
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(j, &w)| {
                let s = 1.0 - 2.0 * bit_of(row, j + 1, n) as f64;
                let sp = 1.0 - 2.0 * bit_of(col, j + 1, n) as f64;
                w * (s - sp)
            })
            .sum()
    }

    /// The weighted Pauli sum `W`.
    pub fn operator(&self) -> Operator {
        let n = self.n_qubits();
        let diag: Vec<f64> = (0..1usize << n)
            .map(|x| {
                self.weights
                    .iter()
                    .enumerate()
                    .map(|(j, &w)| w * (1.0 - 2.0 * bit_of(x, j + 1, n) as f64))
                    .sum()
            })
            .collect();
        Operator::diagonal(&diag).expect("generator dimension is a power of two")
    }

    /// Lindblad operator `L = sqrt(strength/2)·W`.
    pub fn lindblad_operator(&self) -> Operator {
        self.operator().scale(C64::new((self.strength / 2.0).sqrt(), 0.0))
    }

    /// Partial noise strength `λ_μ = 2|L_μ|²`.
    pub fn partial_strength(&self) -> f64 {
        2.0 * self.lindblad_operator().operator_norm().powi(2)
    }
}

fn check_dim(rho: &DensityMatrix, gen: &DephasingGenerator) -> Result<()> {
    let expected = 1usize << gen.n_qubits();
    if rho.dim() != expected {
        return Err(Error::DimensionMismatch { expected, found: rho.dim() });
    }
    Ok(())
}

/// Exact uniform random-phase average with spread `gen.strength()`.
pub fn incoherent_dephase(rho: &DensityMatrix, gen: &DephasingGenerator) -> Result<DensityMatrix> {
    check_dim(rho, gen)?;
    let kappa = gen.strength();
    Ok(rho.map_elements(|r, c, z| {
        if r == c {
            return z;
        }
        let delta = gen.delta(r, c);
        if delta == 0.0 {
            z
        } else {
            z * sinc(kappa * delta / 4.0)
        }
    }))
}

/// Applies several incoherent generators in sequence.
pub fn incoherent_dephase_all(
    rho: &DensityMatrix,
    gens: &[DephasingGenerator],
) -> Result<DensityMatrix> {
    gens.iter().try_fold(rho.clone(), |acc, g| incoherent_dephase(&acc, g))
}

/// Exact Lindblad evolution for time `t` under commuting z-type generators.
pub fn markov_dephase(
    rho: &DensityMatrix,
    gens: &[DephasingGenerator],
    t: f64,
) -> Result<DensityMatrix> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    for g in gens {
        check_dim(rho, g)?;
    }
    Ok(rho.map_elements(|r, c, z| {
        if r == c {
            return z;
        }
        let exponent: f64 = gens
            .iter()
            .map(|g| {
                let d = g.delta(r, c);
                g.strength() * t * d * d / 4.0
            })
            .sum();
        z * (-exponent).exp()
    }))
}

/// Overall noise strength `λ = Σ_μ |L_μ|² + |Σ_μ L_μ†L_μ|` with `|·|` the
/// operator norm.
pub fn noise_strength(gens: &[DephasingGenerator]) -> Result<f64> {
    let first = gens.first().ok_or(Error::EmptyGenerators)?;
    let n = first.n_qubits();
    let d = 1usize << n;
    let mut sum_norms = 0.0;
    let mut gram = nalgebra::DMatrix::<C64>::zeros(d, d);
    for g in gens {
        if g.n_qubits() != n {
            return Err(Error::DimensionMismatch { expected: n, found: g.n_qubits() });
        }
        let l = g.lindblad_operator();
        sum_norms += l.operator_norm().powi(2);
        gram += l.matrix().adjoint() * l.matrix();
    }
    let gram = Operator::new(gram)?;
    Ok(sum_norms + gram.operator_norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoiseKind {
    /// Incoherent gradient dephasing, sinc attenuation.
    #[serde(rename = "sinc")]
    IncoherentSinc,
    /// Markovian Lindblad dephasing, exponential attenuation.
    #[serde(rename = "exp")]
    MarkovianExp,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::IncoherentSinc => "sinc",
            NoiseKind::MarkovianExp => "exp",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sinc" | "incoherent_sinc" => Ok(NoiseKind::IncoherentSinc),
            "exp" | "markovian_exp" => Ok(NoiseKind::MarkovianExp),
            other => Err(Error::Config(format!("unknown noise kind '{other}'"))),
        }
    }
}

/// How qubit 3's collective and residual noise couple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CouplingCase {
    /// One environment: `L_3 = L_c + L_r` is a single generator.
    #[serde(rename = "a")]
    A,
    /// Two environments: `L_c` and `L_r` are separate generators.
    #[serde(rename = "b")]
    B,
}

impl CouplingCase {
    pub fn as_str(self) -> &'static str {
        match self {
            CouplingCase::A => "a",
            CouplingCase::B => "b",
        }
    }
}

impl fmt::Display for CouplingCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CouplingCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(CouplingCase::A),
            "b" | "B" => Ok(CouplingCase::B),
            other => Err(Error::Config(format!("unknown coupling case '{other}'"))),
        }
    }
}

/// Declarative noise model for one sweep point.
///
/// `kappa0` is the independent spread `κ_0` (incoherent kind) or the
/// independent rate-time product `λ_0 t` (Markovian kind, evolved for unit
/// time). `ratio` is `κ_0/κ_c`; it doubles as the residual-to-collective
/// amplitude ratio `ε`, so in the Markovian kind the collective rate is
/// `λ_0/ratio²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kappa0: f64,
    pub ratio: f64,
    pub coupling_case: CouplingCase,
    pub kind: NoiseKind,
    pub collective: bool,
}

impl NoiseSpec {
    pub fn independent(kappa0: f64, kind: NoiseKind) -> Self {
        Self { kappa0, ratio: 0.5, coupling_case: CouplingCase::A, kind, collective: false }
    }

    pub fn hybrid(kappa0: f64, ratio: f64, coupling_case: CouplingCase, kind: NoiseKind) -> Self {
        Self { kappa0, ratio, coupling_case, kind, collective: true }
    }

    pub fn epsilon(&self) -> f64 {
        self.ratio
    }

    /// Collective strength: `κ_c = κ_0/ratio` (spread) or `λ_0/ratio²` (rate).
    pub fn collective_strength(&self) -> Result<f64> {
        if !(self.ratio > 0.0) {
            return Err(Error::InvalidRatio(self.ratio));
        }
        Ok(match self.kind {
            NoiseKind::IncoherentSinc => self.kappa0 / self.ratio,
            NoiseKind::MarkovianExp => self.kappa0 / (self.ratio * self.ratio),
        })
    }

    /// Same model with zero noise (reference runs).
    pub fn noiseless(&self) -> Self {
        Self { kappa0: 0.0, ..*self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.kappa0 >= 0.0 && self.kappa0.is_finite()) {
            return Err(Error::Config(format!("kappa0 {} must be finite and >= 0", self.kappa0)));
        }
        if self.collective && !(self.ratio > 0.0 && self.ratio.is_finite()) {
            return Err(Error::InvalidRatio(self.ratio));
        }
        Ok(())
    }
}

/// Builds the generator list on an `n`-qubit register (`n` = 3 or 4).
///
/// Independent generators act on qubits 1, 2, 3 with strength `κ_0`. With
/// collective noise, qubit 3 additionally couples (with qubit 4 when
/// `n = 4`) to a collective generator of strength `κ_c`:
/// case a folds both into one generator with weights `(1+ratio)` on qubit 3
/// and `1` on qubit 4 at strength `κ_c`, so qubit 3 alone sees
/// `κ_3 = κ_c + κ_0`; case b keeps `L_c` on (3, 4) and `L_r` on 3 separate.
pub fn build_error_model(spec: &NoiseSpec, n: usize) -> Result<Vec<DephasingGenerator>> {
    if !(3..=4).contains(&n) {
        return Err(Error::Config(format!("error model needs 3 or 4 qubits, got {n}")));
    }
    spec.validate()?;
    let k0 = spec.kappa0;
    let mut gens = vec![
        DephasingGenerator::single(n, 1, k0, "L1")?,
        DephasingGenerator::single(n, 2, k0, "L2")?,
    ];
    if !spec.collective {
        gens.push(DephasingGenerator::single(n, 3, k0, "L3")?);
        return Ok(gens);
    }
    let kc = spec.collective_strength()?;
    let mut collective_terms = vec![(3, 1.0)];
    if n == 4 {
        collective_terms.push((4, 1.0));
    }
    match spec.coupling_case {
        CouplingCase::A => {
            collective_terms[0].1 += spec.ratio;
            gens.push(DephasingGenerator::on_qubits(n, &collective_terms, kc, "L3=Lc+Lr")?);
        }
        CouplingCase::B => {
            gens.push(DephasingGenerator::on_qubits(n, &collective_terms, kc, "Lc")?);
            gens.push(DephasingGenerator::single(n, 3, k0, "Lr")?);
        }
    }
    Ok(gens)
}

/// Applies a generator list with the engine selected by `kind`; Markovian
/// generators evolve for unit time.
pub fn apply_noise(
    rho: &DensityMatrix,
    gens: &[DephasingGenerator],
    kind: NoiseKind,
) -> Result<DensityMatrix> {
    match kind {
        NoiseKind::IncoherentSinc => incoherent_dephase_all(rho, gens),
        NoiseKind::MarkovianExp => markov_dephase(rho, gens, 1.0),
    }
}

/// Physical gradient parameters; only the product `κ = γ·G·t·L` matters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradientSpec {
    pub gamma: f64,
    pub gradient: f64,
    pub duration: f64,
    pub length: f64,
}

impl GradientSpec {
    pub fn kappa(&self) -> f64 {
        self.gamma * self.gradient * self.duration * self.length
    }
}

/// Qubit-3 generators for collective strength `λ_c` and residual ratio
/// `ε = |L_r|/|L_c|`, restricted to the single-qubit sector of qubit 3.
pub fn qubit3_sector_generators(
    lambda_c: f64,
    epsilon: f64,
    case: CouplingCase,
) -> Result<Vec<DephasingGenerator>> {
    match case {
        CouplingCase::A => {
            Ok(vec![DephasingGenerator::new(vec![1.0 + epsilon], lambda_c, "L3=Lc+Lr")?])
        }
        CouplingCase::B => Ok(vec![
            DephasingGenerator::new(vec![1.0], lambda_c, "Lc")?,
            DephasingGenerator::new(vec![1.0], lambda_c * epsilon * epsilon, "Lr")?,
        ]),
    }
}

/// `λ_3(case a) / λ_3(case b)`; equals `(1+ε)²/(1+ε²)`.
pub fn coupling_strength_ratio(epsilon: f64) -> Result<f64> {
    let a = noise_strength(&qubit3_sector_generators(1.0, epsilon, CouplingCase::A)?)?;
    let b = noise_strength(&qubit3_sector_generators(1.0, epsilon, CouplingCase::B)?)?;
    Ok(a / b)
}

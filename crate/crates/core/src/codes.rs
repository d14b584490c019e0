//! Gate library and circuit builders: three-qubit phase code, DFS encoding on
//! qubits 3–4, and the concatenated DFS + phase-code network.
//!
//! Qubit roles in every scenario circuit: 1 is the physical ancilla, 2 the
//! data qubit, 3 the third carrier (a physical qubit, or together with 4 the
//! DFS logical qubit with `|0_L> = |01>`, `|1_L> = |10>`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::{apply_noise, build_error_model, DephasingGenerator, NoiseKind, NoiseSpec};
use crate::qstate::{self, apply_unitary, embed, DensityMatrix, Operator};
use crate::{Error, Result};

/// Physical qubits carrying the DFS logical qubit.
pub const DFS_PAIR: [usize; 2] = [3, 4];

/// A unitary applied to an ordered list of target qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    name: String,
    matrix: Operator,
    targets: Vec<usize>,
}

impl Gate {
    pub fn new(name: impl Into<String>, matrix: Operator, targets: Vec<usize>) -> Result<Self> {
        let expected = 1usize << targets.len();
        if matrix.dim() != expected {
            return Err(Error::DimensionMismatch { expected, found: matrix.dim() });
        }
        for (i, &t) in targets.iter().enumerate() {
            if targets[..i].contains(&t) {
                return Err(Error::DuplicateQubit(t));
            }
        }
        let dev = matrix.unitarity_deviation();
        if dev > qstate::UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { name: name.into(), matrix, targets })
    }

    fn fixed(name: &str, matrix: Operator, targets: Vec<usize>) -> Self {
        Self::new(name, matrix, targets).expect("library gate is well formed")
    }

    pub fn h(q: usize) -> Self {
        Self::fixed("H", qstate::hadamard(), vec![q])
    }

    pub fn x(q: usize) -> Self {
        Self::fixed("X", qstate::pauli_x(), vec![q])
    }

    pub fn z(q: usize) -> Self {
        Self::fixed("Z", qstate::pauli_z(), vec![q])
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self> {
        Self::new("CNOT", qstate::cnot(), vec![control, target])
    }

    pub fn toffoli(c1: usize, c2: usize, target: usize) -> Result<Self> {
        Self::new("TOFFOLI", qstate::toffoli(), vec![c1, c2, target])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn inverse(&self) -> Self {
        let adj = self.matrix.adjoint();
        let name = if adj == self.matrix { self.name.clone() } else { format!("{}†", self.name) };
        Self { name, matrix: adj, targets: self.targets.clone() }
    }

    /// The gate lifted to an `n`-qubit register.
    pub fn embedded(&self, n: usize) -> Result<Operator> {
        embed(&self.matrix, &self.targets, n)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

/// Logical operations on the DFS qubit (physical qubits 3, 4).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogicalGate {
    /// `σ_x³σ_x⁴`, swaps `|01> <-> |10>`.
    XL,
    /// `σ_z³`.
    ZL,
    /// Hadamard on span{|01>, |10>}, identity on span{|00>, |11>}.
    HL,
    /// Physical control, logical target: controlled-`X_L`.
    CnotIntoL { control: usize },
    /// Logical control (read from qubit 3), physical target.
    CnotFromL { target: usize },
}

impl LogicalGate {
    /// Parses `X_L`, `Z_L`, `H_L`, `CNOT_into_L`, `CNOT_from_L`; the CNOT
    /// variants take the physical partner qubit.
    pub fn from_name(name: &str, partner: Option<usize>) -> Result<Self> {
        let need_partner = || partner.ok_or_else(|| Error::UnknownGate(format!("{name} needs a partner qubit")));
        match name {
            "X_L" => Ok(LogicalGate::XL),
            "Z_L" => Ok(LogicalGate::ZL),
            "H_L" => Ok(LogicalGate::HL),
            "CNOT_into_L" => Ok(LogicalGate::CnotIntoL { control: need_partner()? }),
            "CNOT_from_L" => Ok(LogicalGate::CnotFromL { target: need_partner()? }),
            other => Err(Error::UnknownGate(other.to_string())),
        }
    }
}

impl FromStr for LogicalGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_name(s, None)
    }
}

fn x_l_matrix() -> Operator {
    qstate::tensor(&qstate::pauli_x(), &qstate::pauli_x())
}

fn h_l_matrix() -> Operator {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let m = [
        1.0, 0.0, 0.0, 0.0,
        0.0, h,   h,   0.0,
        0.0, h,   -h,  0.0,
        0.0, 0.0, 0.0, 1.0,
    ];
    Operator::from_real(4, &m).unwrap()
}

/// Controlled-`u` with the control as the leading factor.
fn controlled(u: &Operator) -> Operator {
    let d = u.dim();
    let mut m = nalgebra::DMatrix::identity(2 * d, 2 * d);
    m.view_mut((d, d), (d, d)).copy_from(u.matrix());
    Operator::new(m).unwrap()
}

pub fn logical_gate(g: LogicalGate) -> Result<Gate> {
    let [a, b] = DFS_PAIR;
    match g {
        LogicalGate::XL => Gate::new("X_L", x_l_matrix(), vec![a, b]),
        LogicalGate::ZL => Gate::new("Z_L", qstate::pauli_z(), vec![a]),
        LogicalGate::HL => Gate::new("H_L", h_l_matrix(), vec![a, b]),
        LogicalGate::CnotIntoL { control } => {
            Gate::new("CNOT_into_L", controlled(&x_l_matrix()), vec![control, a, b])
        }
        LogicalGate::CnotFromL { target } => Gate::new("CNOT_from_L", qstate::cnot(), vec![a, target]),
    }
}

fn distinct(indices: [usize; 3]) -> Result<()> {
    for i in 0..3 {
        if indices[..i].contains(&indices[i]) {
            return Err(Error::DuplicateQubit(indices[i]));
        }
    }
    Ok(())
}

/// Phase-code encoder: `α|0>+β|1>` on `data` with ancillae in `|0>` becomes
/// `α|+++> + β|−−−>`.
pub fn qec3_encode(data: usize, ancilla_a: usize, ancilla_b: usize) -> Result<Vec<Gate>> {
    distinct([data, ancilla_a, ancilla_b])?;
    Ok(vec![
        Gate::cnot(data, ancilla_a)?,
        Gate::cnot(data, ancilla_b)?,
        Gate::h(data),
        Gate::h(ancilla_a),
        Gate::h(ancilla_b),
    ])
}

/// Inverse encoder followed by a Toffoli (controls: both ancillae) on the
/// data qubit; undoes any single phase flip without measurement.
pub fn qec3_recover(data: usize, ancilla_a: usize, ancilla_b: usize) -> Result<Vec<Gate>> {
    let mut gates = inverse(&qec3_encode(data, ancilla_a, ancilla_b)?);
    gates.push(Gate::toffoli(ancilla_a, ancilla_b, data)?);
    Ok(gates)
}

/// `(α|0>+β|1>)₃|0>₄ -> α|01> + β|10>`.
pub fn dfs_encode() -> Vec<Gate> {
    let [a, b] = DFS_PAIR;
    vec![Gate::x(b), Gate::cnot(a, b).expect("distinct DFS qubits")]
}

pub fn dfs_decode() -> Vec<Gate> {
    inverse(&dfs_encode())
}

/// Reversed sequence of adjoints.
pub fn inverse(fragment: &[Gate]) -> Vec<Gate> {
    fragment.iter().rev().map(Gate::inverse).collect()
}

/// The storage interval: a set of generators applied with one engine.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseMarker {
    pub generators: Vec<DephasingGenerator>,
    pub kind: NoiseKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Gate(Gate),
    Noise(NoiseMarker),
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Gate(g) => write!(f, "{g}"),
            Step::Noise(m) => {
                let sym = match m.kind {
                    NoiseKind::IncoherentSinc => "κ",
                    NoiseKind::MarkovianExp => "λ",
                };
                write!(f, "NOISE")?;
                for (i, g) in m.generators.iter().enumerate() {
                    let sep = if i == 0 { " " } else { "; " };
                    write!(f, "{sep}{} {sym}={}", g.label(), g.strength())?;
                }
                Ok(())
            }
        }
    }
}

/// Ordered list of gates and noise intervals on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    steps: Vec<Step>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, steps: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn push_gate(&mut self, gate: Gate) -> Result<()> {
        if let Some(&bad) = gate.targets().iter().find(|&&t| t == 0 || t > self.n_qubits) {
            return Err(Error::QubitOutOfRange { index: bad, n: self.n_qubits });
        }
        self.steps.push(Step::Gate(gate));
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.push_gate(g))
    }

    pub fn push_noise(&mut self, marker: NoiseMarker) -> Result<()> {
        if let Some(g) = marker.generators.iter().find(|g| g.n_qubits() != self.n_qubits) {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: g.n_qubits() });
        }
        self.steps.push(Step::Noise(marker));
        Ok(())
    }

    pub fn noise_marker_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Noise(_))).count()
    }

    /// Copy of the circuit with each noise marker replaced by `f(marker)`.
    pub fn map_noise(&self, mut f: impl FnMut(&NoiseMarker) -> Vec<Step>) -> Circuit {
        let steps = self
            .steps
            .iter()
            .flat_map(|s| match s {
                Step::Noise(m) => f(m),
                other => vec![other.clone()],
            })
            .collect();
        Circuit { n_qubits: self.n_qubits, steps }
    }

    pub fn run(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.run_with(rho, |_, _, _| {})
    }

    /// Runs the circuit, calling `observe(index, step, state_after_step)`.
    pub fn run_with(
        &self,
        rho: &DensityMatrix,
        mut observe: impl FnMut(usize, &Step, &DensityMatrix),
    ) -> Result<DensityMatrix> {
        if rho.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << self.n_qubits, found: rho.dim() });
        }
        let mut state = rho.clone();
        for (i, step) in self.steps.iter().enumerate() {
            state = match step {
                Step::Gate(g) => apply_unitary(&state, &g.embedded(self.n_qubits)?)?,
                Step::Noise(m) => apply_noise(&state, &m.generators, m.kind)?,
            };
            observe(i, step, &state);
        }
        Ok(state)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            writeln!(f, "{step}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Phase code on qubits 1, 2, 3 with independent noise.
    QecIndependent,
    /// Phase code with additional strong noise on qubit 3.
    QecHybrid,
    /// Data qubit idles through the noise.
    NoQec,
    /// Concatenated DFS + phase code on four qubits.
    DfsQec,
}

impl Scenario {
    pub const ALL: [Scenario; 4] =
        [Scenario::QecIndependent, Scenario::QecHybrid, Scenario::NoQec, Scenario::DfsQec];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::QecIndependent => "qec_independent",
            Scenario::QecHybrid => "qec_hybrid",
            Scenario::NoQec => "no_qec",
            Scenario::DfsQec => "dfs_qec",
        }
    }

    pub fn n_qubits(self) -> usize {
        match self {
            Scenario::DfsQec => 4,
            _ => 3,
        }
    }

    /// Whether the scenario's default noise includes the collective component.
    pub fn default_collective(self) -> bool {
        matches!(self, Scenario::QecHybrid | Scenario::DfsQec)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.as_str() == norm)
            .ok_or_else(|| Error::Config(format!("unknown scenario '{s}'")))
    }
}

pub const DATA_QUBIT: usize = 2;
const ANCILLA: usize = 1;
const CARRIER: usize = 3;

/// Builds the full circuit for one scenario and noise model.
pub fn build_scenario_circuit(scenario: Scenario, spec: &NoiseSpec) -> Result<Circuit> {
    let mismatch = || Error::ScenarioMismatch {
        scenario: format!("{scenario} (collective={})", spec.collective),
        n: scenario.n_qubits(),
    };
    match scenario {
        Scenario::QecIndependent if spec.collective => return Err(mismatch()),
        Scenario::QecHybrid if !spec.collective => return Err(mismatch()),
        _ => {}
    }
    build_circuit_on(scenario, spec, scenario.n_qubits())
}

/// Like [`build_scenario_circuit`] with an explicit register size; the DFS
/// scenario needs four qubits, the others three.
pub fn build_circuit_on(scenario: Scenario, spec: &NoiseSpec, n: usize) -> Result<Circuit> {
    if n != scenario.n_qubits() {
        return Err(Error::ScenarioMismatch { scenario: scenario.to_string(), n });
    }
    let noise = NoiseMarker { generators: build_error_model(spec, n)?, kind: spec.kind };
    let mut c = Circuit::new(n);
    match scenario {
        Scenario::NoQec => c.push_noise(noise)?,
        Scenario::QecIndependent | Scenario::QecHybrid => {
            c.extend(qec3_encode(DATA_QUBIT, ANCILLA, CARRIER)?)?;
            c.push_noise(noise)?;
            c.extend(qec3_recover(DATA_QUBIT, ANCILLA, CARRIER)?)?;
        }
        Scenario::DfsQec => {
            let into_l = logical_gate(LogicalGate::CnotIntoL { control: DATA_QUBIT })?;
            let h_l = logical_gate(LogicalGate::HL)?;
            c.extend(dfs_encode())?;
            c.extend([
                Gate::cnot(DATA_QUBIT, ANCILLA)?,
                into_l.clone(),
                Gate::h(DATA_QUBIT),
                Gate::h(ANCILLA),
                h_l.clone(),
            ])?;
            c.push_noise(noise)?;
            c.extend([
                h_l,
                Gate::h(ANCILLA),
                Gate::h(DATA_QUBIT),
                into_l,
                Gate::cnot(DATA_QUBIT, ANCILLA)?,
                // the logical control is read from qubit 3 (Z_L carrier)
                Gate::toffoli(ANCILLA, DFS_PAIR[0], DATA_QUBIT)?,
            ])?;
            c.extend(dfs_decode())?;
        }
    }
    Ok(c)
}

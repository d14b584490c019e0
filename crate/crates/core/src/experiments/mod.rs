//! Scenario configuration, noise-strength sweeps and output.

mod chart;
mod csv_io;

pub use chart::{emit_chart, render_chart, ChartOptions};
pub use csv_io::{emit_csv, format_sig, read_csv, write_csv, CSV_HEADER};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{
    build_error_model, noise_strength, sinc, CouplingCase, DephasingGenerator, NoiseKind,
    NoiseSpec,
};
use crate::codes::{build_scenario_circuit, Scenario, DATA_QUBIT};
use crate::metrics::{fe_no_qec_from_coherence, fe_qec_from_coherences, Axis, MetricReport};
use crate::qstate::{self, partial_trace, DensityMatrix, Operator, StateKind, C64};
use crate::{Error, Result};

/// `κ₀/2 ∈ [0, 6]` in steps of 0.25, i.e. `κ₀ = 0, 0.5, …, 12`.
pub fn default_grid() -> Vec<f64> {
    (0..=24).map(|i| i as f64 * 0.5).collect()
}

/// Parses `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let num = |s: &str| -> Result<f64> {
        s.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad number '{s}' in grid '{text}'")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || stop < start {
                return Err(Error::Config(format!("grid '{text}' needs step > 0 and stop >= start")));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        [list] if list.trim().is_empty() => Ok(Vec::new()),
        [list] => list.split(',').map(num).collect(),
        _ => Err(Error::Config(format!("grid '{text}' must be start:stop:step or a list"))),
    }
}

fn default_ratio() -> f64 {
    0.5
}

fn default_purity() -> f64 {
    1.0
}

fn default_inputs() -> Vec<Axis> {
    Axis::ALL.to_vec()
}

/// One experiment: scenario, noise engine, sweep grid and model knobs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "ScenarioConfig::default_scenario")]
    pub scenario: Scenario,
    #[serde(default = "ScenarioConfig::default_kind")]
    pub kind: NoiseKind,
    #[serde(default = "default_grid")]
    pub sweep: Vec<f64>,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    #[serde(default = "ScenarioConfig::default_case")]
    pub coupling_case: CouplingCase,
    #[serde(default = "default_purity")]
    pub ancilla_purity: f64,
    #[serde(default = "default_inputs")]
    pub inputs: Vec<Axis>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: Self::default_scenario(),
            kind: Self::default_kind(),
            sweep: default_grid(),
            ratio: default_ratio(),
            coupling_case: Self::default_case(),
            ancilla_purity: default_purity(),
            inputs: default_inputs(),
        }
    }
}

impl ScenarioConfig {
    fn default_scenario() -> Scenario {
        Scenario::QecIndependent
    }

    fn default_kind() -> NoiseKind {
        NoiseKind::IncoherentSinc
    }

    fn default_case() -> CouplingCase {
        CouplingCase::A
    }

    pub fn new(scenario: Scenario, kind: NoiseKind, sweep: Vec<f64>) -> Self {
        Self { scenario, kind, sweep, ..Self::default() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(x) = self.sweep.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
            return Err(Error::Config(format!("sweep value {x} must be finite and >= 0")));
        }
        if self.sweep.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("sweep values must be strictly increasing".into()));
        }
        if !(0.0..=1.0).contains(&self.ancilla_purity) {
            return Err(Error::Config(format!(
                "ancilla_purity {} must lie in [0, 1]",
                self.ancilla_purity
            )));
        }
        if self.inputs.is_empty() {
            return Err(Error::Config("inputs must name at least one axis".into()));
        }
        for (i, a) in self.inputs.iter().enumerate() {
            if self.inputs[..i].contains(a) {
                return Err(Error::Config(format!("duplicate input axis {a}")));
            }
        }
        if !(self.ratio > 0.0 && self.ratio.is_finite()) {
            return Err(Error::InvalidRatio(self.ratio));
        }
        Ok(())
    }

    /// Noise model at sweep value `x`.
    pub fn noise_spec(&self, x: f64) -> NoiseSpec {
        if self.scenario.default_collective() {
            NoiseSpec::hybrid(x, self.ratio, self.coupling_case, self.kind)
        } else {
            NoiseSpec { ratio: self.ratio, coupling_case: self.coupling_case, ..NoiseSpec::independent(x, self.kind) }
        }
    }
}

/// Per-carrier coherence factor: `sinc(κ/2)` or `exp(−λ)`.
fn coherence(kind: NoiseKind, strength: f64) -> f64 {
    match kind {
        NoiseKind::IncoherentSinc => sinc(strength / 2.0),
        NoiseKind::MarkovianExp => (-strength).exp(),
    }
}

/// Closed-form data-qubit fidelity at sweep value `x` with ideal ancillae.
///
/// `dfs_qec` uses the independent-noise phase-code curve: the collective
/// component cancels on the DFS and only `κ₀` reaches the logical carrier.
pub fn analytic_reference(
    scenario: Scenario,
    kind: NoiseKind,
    case: CouplingCase,
    ratio: f64,
    x: f64,
) -> f64 {
    let s0 = coherence(kind, x);
    match scenario {
        Scenario::QecIndependent | Scenario::DfsQec => fe_qec_from_coherences(s0, s0, s0),
        Scenario::NoQec => fe_no_qec_from_coherence(s0),
        Scenario::QecHybrid => {
            let spec = NoiseSpec::hybrid(x, ratio, case, kind);
            let collective = spec.collective_strength().unwrap_or(f64::INFINITY);
            let s3 = match (case, kind) {
                (CouplingCase::A, NoiseKind::IncoherentSinc) => coherence(kind, x + collective),
                (CouplingCase::A, NoiseKind::MarkovianExp) => {
                    coherence(kind, collective * (1.0 + ratio).powi(2))
                }
                (CouplingCase::B, _) => coherence(kind, collective) * s0,
            };
            fe_qec_from_coherences(s0, s0, s3)
        }
    }
}

/// Four-qubit (or three-qubit) pseudo-pure input: `σ_u` on the data qubit,
/// `p|0><0| + (1−p)I/2` on every other qubit.
pub fn prepare_inputs(axis: Axis, ancilla_purity: f64, n_qubits: usize) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&ancilla_purity) {
        return Err(Error::Config(format!("ancilla purity {ancilla_purity} must lie in [0, 1]")));
    }
    if n_qubits < DATA_QUBIT {
        return Err(Error::QubitOutOfRange { index: DATA_QUBIT, n: n_qubits });
    }
    let p = ancilla_purity;
    let ancilla = Operator::diagonal(&[p + (1.0 - p) / 2.0, (1.0 - p) / 2.0])?;
    let mut op: Option<Operator> = None;
    for q in 1..=n_qubits {
        let factor = if q == DATA_QUBIT { axis.pauli() } else { ancilla.clone() };
        op = Some(match op {
            None => factor,
            Some(acc) => qstate::tensor(&acc, &factor),
        });
    }
    DensityMatrix::new(op.expect("at least one qubit").into_matrix(), StateKind::Deviation)
}

/// One sweep point: sweep value, noise model and metrics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub kappa0: f64,
    pub spec: NoiseSpec,
    pub report: MetricReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub rows: Vec<ScenarioRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

fn reduced_outputs(
    config: &ScenarioConfig,
    spec: &NoiseSpec,
) -> Result<Vec<(Axis, DensityMatrix, DensityMatrix)>> {
    let circuit = build_scenario_circuit(config.scenario, spec)?;
    let n = circuit.n_qubits();
    config
        .inputs
        .iter()
        .map(|&axis| {
            let input = prepare_inputs(axis, config.ancilla_purity, n)?;
            let out = partial_trace(&circuit.run(&input)?, &[DATA_QUBIT])?;
            Ok((axis, partial_trace(&input, &[DATA_QUBIT])?, out))
        })
        .collect()
}

/// Metrics at one sweep value.
pub fn evaluate_point(config: &ScenarioConfig, x: f64) -> Result<ScenarioRow> {
    let spec = config.noise_spec(x);
    let noisy = reduced_outputs(config, &spec)?;
    let reference = reduced_outputs(config, &spec.noiseless())?;
    let nan = || DensityMatrix::from_parts(qstate::CMatrix::from_element(2, 2, C64::new(f64::NAN, 0.0)), StateKind::Deviation);
    let mut inputs = [nan(), nan(), nan()];
    let mut outputs = inputs.clone();
    let mut refs = inputs.clone();
    let mut present = [false; 3];
    for ((axis, input, out), (_, _, r)) in noisy.into_iter().zip(reference) {
        let i = axis.index();
        present[i] = true;
        inputs[i] = input;
        outputs[i] = out;
        refs[i] = r;
    }
    let report = if present.iter().all(|&p| p) {
        MetricReport::from_runs(&inputs, &outputs, &refs, None)?
    } else {
        partial_report(&inputs, &outputs, &refs, &present)?
    };
    let fe_analytic = (config.ancilla_purity == 1.0).then(|| {
        analytic_reference(config.scenario, config.kind, config.coupling_case, config.ratio, x)
    });
    Ok(ScenarioRow { kappa0: x, spec, report: MetricReport { fe_analytic, ..report } })
}

/// Metrics when only some axes were run; missing axes (and `F_e`, `P`) are NaN.
fn partial_report(
    inputs: &[DensityMatrix; 3],
    outputs: &[DensityMatrix; 3],
    refs: &[DensityMatrix; 3],
    present: &[bool; 3],
) -> Result<MetricReport> {
    let mut c = [f64::NAN; 3];
    let mut p = [f64::NAN; 3];
    for i in 0..3 {
        if present[i] {
            c[i] = qstate::hs_overlap(&inputs[i], &outputs[i])? / qstate::hs_overlap(&inputs[i], &inputs[i])?;
            p[i] = qstate::hs_overlap(&outputs[i], &outputs[i])? / qstate::hs_overlap(&refs[i], &refs[i])?;
        }
    }
    Ok(MetricReport {
        cx: c[0],
        cy: c[1],
        cz: c[2],
        fe: f64::NAN,
        px: p[0],
        py: p[1],
        pz: p[2],
        p: f64::NAN,
        fe_analytic: None,
    })
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioResult> {
    run_scenario_with(config, Execution::Parallel)
}

/// Runs every sweep point; rows are ordered by sweep index for either
/// execution mode.
pub fn run_scenario_with(config: &ScenarioConfig, execution: Execution) -> Result<ScenarioResult> {
    config.validate()?;
    let rows: Result<Vec<ScenarioRow>> = match execution {
        Execution::Serial => config.sweep.iter().map(|&x| evaluate_point(config, x)).collect(),
        Execution::Parallel => config.sweep.par_iter().map(|&x| evaluate_point(config, x)).collect(),
    };
    Ok(ScenarioResult { config: config.clone(), rows: rows? })
}

/// Imperfect-ancilla run next to its ideal-ancilla reference.
#[derive(Clone, Debug, PartialEq)]
pub struct HumpReport {
    pub result: ScenarioResult,
    pub reference: ScenarioResult,
    /// `F_e` increases somewhere along the grid.
    pub non_monotone: bool,
    /// `F_e − F_e(purity 1)` takes both signs on the grid.
    pub crosses_reference: bool,
}

impl HumpReport {
    pub fn hump(&self) -> bool {
        self.non_monotone || self.crosses_reference
    }
}

const HUMP_TOL: f64 = 1e-12;

/// True when the sequence never increases by more than `1e-12`.
pub fn is_monotone_non_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + HUMP_TOL)
}

/// Runs `qec_independent` with the configured ancilla purity and with
/// perfect ancillae on the same grid.
pub fn hump_demo(config: &ScenarioConfig) -> Result<HumpReport> {
    let cfg = ScenarioConfig { scenario: Scenario::QecIndependent, ..config.clone() };
    let result = run_scenario(&cfg)?;
    let reference = run_scenario(&ScenarioConfig { ancilla_purity: 1.0, ..cfg })?;
    let fe: Vec<f64> = result.rows.iter().map(|r| r.report.fe).collect();
    let diff: Vec<f64> =
        result.rows.iter().zip(&reference.rows).map(|(a, b)| a.report.fe - b.report.fe).collect();
    let above = diff.iter().any(|&d| d > HUMP_TOL);
    let below = diff.iter().any(|&d| d < -HUMP_TOL);
    Ok(HumpReport {
        non_monotone: !is_monotone_non_increasing(&fe),
        crosses_reference: above && below,
        result,
        reference,
    })
}

/// Generators and noise strength for one sweep value, with strengths read
/// as Lindblad rates `λ_μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct StrengthReport {
    pub kappa0: f64,
    pub generators: Vec<DephasingGenerator>,
    pub lambda: f64,
}

pub fn noise_strength_report(config: &ScenarioConfig) -> Result<Vec<StrengthReport>> {
    config.validate()?;
    let markov = ScenarioConfig { kind: NoiseKind::MarkovianExp, ..config.clone() };
    markov
        .sweep
        .iter()
        .map(|&x| {
            let generators = build_error_model(&markov.noise_spec(x), config.scenario.n_qubits())?;
            let lambda = noise_strength(&generators)?;
            Ok(StrengthReport { kappa0: x, generators, lambda })
        })
        .collect()
}

/// Outcome of one analytic-vs-simulated comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

fn curve_check(name: &str, config: &ScenarioConfig, expected: impl Fn(f64) -> f64) -> Result<CheckOutcome> {
    let result = run_scenario(config)?;
    let max_deviation = result
        .rows
        .iter()
        .map(|r| (r.report.fe - expected(r.kappa0)).abs())
        .fold(0.0, f64::max);
    Ok(CheckOutcome { name: name.to_string(), max_deviation, tolerance: 1e-9 })
}

/// Simulated-versus-closed-form equivalence suite on the default grid.
pub fn run_checks() -> Result<Vec<CheckOutcome>> {
    use crate::metrics::{analytic_fe_no_qec, analytic_fe_qec_independent, analytic_fe_qec_strong};
    let sinc_cfg = |scenario| ScenarioConfig::new(scenario, NoiseKind::IncoherentSinc, default_grid());
    let mut out = vec![
        curve_check("qec_independent vs closed form", &sinc_cfg(Scenario::QecIndependent), analytic_fe_qec_independent)?,
        curve_check("qec_hybrid (case a, ratio 0.5) vs closed form", &sinc_cfg(Scenario::QecHybrid), |k| {
            analytic_fe_qec_strong(k, 3.0 * k)
        })?,
        curve_check("no_qec vs closed form", &sinc_cfg(Scenario::NoQec), analytic_fe_no_qec)?,
    ];
    for case in [CouplingCase::A, CouplingCase::B] {
        for ratio in [0.5, 0.25] {
            let cfg = ScenarioConfig { coupling_case: case, ratio, ..sinc_cfg(Scenario::DfsQec) };
            out.push(curve_check(
                &format!("dfs_qec (case {case}, ratio {ratio}) vs independent closed form"),
                &cfg,
                analytic_fe_qec_independent,
            )?);
        }
    }
    for kind in [NoiseKind::IncoherentSinc, NoiseKind::MarkovianExp] {
        for scenario in Scenario::ALL {
            let grid = match kind {
                NoiseKind::IncoherentSinc => default_grid(),
                NoiseKind::MarkovianExp => (0..=20).map(|i| i as f64 * 0.1).collect(),
            };
            let cfg = ScenarioConfig::new(scenario, kind, grid);
            let (case, ratio) = (cfg.coupling_case, cfg.ratio);
            out.push(curve_check(
                &format!("{scenario} ({kind}) vs analytic reference"),
                &cfg,
                |x| analytic_reference(scenario, kind, case, ratio, x),
            )?);
        }
    }
    Ok(out)
}

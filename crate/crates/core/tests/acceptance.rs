//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use common::*;
use dfsqec::channels::{
    build_error_model, coupling_strength_ratio, incoherent_dephase, incoherent_dephase_all, markov_dephase,
    noise_strength, CouplingCase, DephasingGenerator, NoiseKind, NoiseSpec,
};
use dfsqec::codes::{build_scenario_circuit, Gate, Scenario, Step, DATA_QUBIT};
use dfsqec::experiments::{
    default_grid, hump_demo, is_monotone_non_increasing, prepare_inputs, run_scenario, ScenarioConfig,
};
use dfsqec::metrics::{
    analytic_fe_qec_independent, analytic_fe_qec_strong, correlations, entanglement_fidelity, error_rate_grid,
    fit_error_rates, Axis,
};
use dfsqec::qstate::{partial_trace, CMatrix, DensityMatrix, StateKind, C64};
use rand::Rng;
use sha2::{Digest, Sha256};

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn max_fe_deviation(config: &ScenarioConfig, expected: impl Fn(f64) -> f64) -> f64 {
    let result = run_scenario(config).expect("sweep runs");
    result.rows.iter().map(|r| (r.report.fe - expected(r.kappa0)).abs()).fold(0.0, f64::max)
}

fn sinc_config(scenario: Scenario) -> ScenarioConfig {
    ScenarioConfig::new(scenario, NoiseKind::IncoherentSinc, default_grid())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let dev = max_fe_deviation(&sinc_config(Scenario::QecIndependent), analytic_fe_qec_independent);
    let secs = start.elapsed().as_secs_f64();
    ensure(default_grid().len() == 25 && dev <= 1e-9 && secs < 5.0, format!("max deviation {dev:.2e}, {secs:.2} s"))
}

fn criterion_2() -> Outcome {
    let dev = max_fe_deviation(&sinc_config(Scenario::QecHybrid), |k| analytic_fe_qec_strong(k, 3.0 * k));
    ensure(dev <= 1e-9, format!("max deviation {dev:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    for case in [CouplingCase::A, CouplingCase::B] {
        for ratio in [0.5, 0.25] {
            let cfg = ScenarioConfig { ratio, coupling_case: case, ..sinc_config(Scenario::DfsQec) };
            worst = worst.max(max_fe_deviation(&cfg, analytic_fe_qec_independent));
        }
    }
    ensure(worst <= 1e-9, format!("max deviation {worst:.2e} over cases a/b, ratios 0.5/0.25"))
}

fn block_state(rng: &mut impl Rng) -> DensityMatrix {
    let block = random_state(1, 2, rng);
    let mut m = CMatrix::zeros(4, 4);
    for (a, ia) in [(0, 1), (1, 2)] {
        for (b, ib) in [(0, 1), (1, 2)] {
            m[(ia, ib)] = block.element(a, b);
        }
    }
    random_state(2, 4, rng).tensor(&DensityMatrix::new(m, StateKind::State).unwrap())
}

fn criterion_4() -> Outcome {
    let mut rng = rng(4);
    let mut worst: f64 = 0.0;
    for _ in 0..25 {
        let rho = block_state(&mut rng);
        for kappa in [0.1, 1.0, 10.0, 100.0] {
            let lc = DephasingGenerator::on_qubits(4, &[(3, 1.0), (4, 1.0)], kappa, "Lc").unwrap();
            worst = worst.max(incoherent_dephase(&rho, &lc).unwrap().max_abs_diff(&rho));
            worst = worst.max(markov_dephase(&rho, &[lc], 1.0).unwrap().max_abs_diff(&rho));
        }
    }
    ensure(worst <= 1e-14, format!("max deviation {worst:.2e}"))
}

fn fe_with_error(scenario: Scenario, error: Gate) -> f64 {
    let spec = match scenario {
        Scenario::DfsQec => NoiseSpec::hybrid(1.0, 0.5, CouplingCase::A, NoiseKind::IncoherentSinc),
        _ => NoiseSpec::independent(1.0, NoiseKind::IncoherentSinc),
    };
    let circuit = build_scenario_circuit(scenario, &spec).unwrap().map_noise(|_| vec![Step::Gate(error.clone())]);
    let n = circuit.n_qubits();
    let ins = Axis::ALL.map(|a| partial_trace(&prepare_inputs(a, 1.0, n).unwrap(), &[DATA_QUBIT]).unwrap());
    let outs = Axis::ALL
        .map(|a| partial_trace(&circuit.run(&prepare_inputs(a, 1.0, n).unwrap()).unwrap(), &[DATA_QUBIT]).unwrap());
    entanglement_fidelity(correlations(&ins, &outs).unwrap())
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for scenario in [Scenario::QecIndependent, Scenario::DfsQec] {
        // carrier 3 of dfs_qec is the DFS qubit; Z on qubit 3 is its Z_L
        for q in [1, 2, 3] {
            worst = worst.max((fe_with_error(scenario, Gate::z(q)) - 1.0).abs());
            cases += 1;
        }
    }
    ensure(cases == 6 && worst <= 1e-12, format!("{cases} cases, max |Fe − 1| {worst:.2e}"))
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    for eps in [0.1, 0.5, 0.9] {
        let expected = (1.0 + eps) * (1.0 + eps) / (1.0 + eps * eps);
        worst = worst.max((coupling_strength_ratio(eps).unwrap() - expected).abs());
    }
    let at_half = coupling_strength_ratio(0.5).unwrap();
    ensure(worst <= 1e-12 && (at_half - 1.8).abs() <= 1e-12, format!("max deviation {worst:.2e}, ratio(0.5) = {at_half}"))
}

fn markov_rates(scenario: Scenario, lambda0: f64) -> (f64, f64, f64) {
    let lambda = noise_strength(&build_error_model(&NoiseSpec::independent(lambda0, NoiseKind::MarkovianExp), 3).unwrap())
        .unwrap();
    let times = error_rate_grid(lambda, 12);
    let cfg = ScenarioConfig::new(scenario, NoiseKind::MarkovianExp, times.iter().map(|t| lambda0 * t).collect());
    let result = run_scenario(&cfg).unwrap();
    let samples: Vec<(f64, f64)> = times.iter().zip(&result.rows).map(|(&t, r)| (t, r.report.fe)).collect();
    let fit = fit_error_rates(&samples, 3, lambda).unwrap();
    assert!(fit.within_bound());
    (fit.rate(1).unwrap(), fit.rate(2).unwrap(), lambda)
}

fn criterion_7() -> Outcome {
    let lambda0 = 0.2;
    let (q1, q2, _) = markov_rates(Scenario::QecIndependent, lambda0);
    let (n1, _, _) = markov_rates(Scenario::NoQec, lambda0);
    ensure(
        q1.abs() <= 1e-6 && q2 > 1e-6 && (n1 - lambda0 / 2.0).abs() <= 1e-4,
        format!("QEC rates k=1 {q1:.2e}, k=2 {q2:.4}; no-QEC k=1 {n1:.6} (λ₀/2 = {})", lambda0 / 2.0),
    )
}

fn criterion_8() -> Outcome {
    let mut rng = rng(8);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=4);
        let rho = random_state(n, rng.gen_range(1..=1usize << n), &mut rng);
        let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let gens = [DephasingGenerator::new(weights, rng.gen_range(0.01..6.0), "g").unwrap()];
        let mixed = DensityMatrix::maximally_mixed(n);
        let t = rng.gen_range(0.0..2.0);
        for (out, unital) in [
            (incoherent_dephase_all(&rho, &gens).unwrap(), incoherent_dephase_all(&mixed, &gens).unwrap()),
            (markov_dephase(&rho, &gens, t).unwrap(), markov_dephase(&mixed, &gens, t).unwrap()),
        ] {
            let ok = unital.max_abs_diff(&mixed) <= 1e-12
                && (out.trace() - rho.trace()).norm() <= 1e-12
                && out.hermiticity_deviation() <= 1e-12
                && out.min_eigenvalue() >= -1e-9;
            if !ok {
                return Err("randomized channel check failed".into());
            }
        }
    }
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let rho = random_state(2, 4, &mut rng);
        let w = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let (lambda, t) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let gen = DephasingGenerator::new(w.clone(), lambda, "g").unwrap();
        let jump = weighted_z_sum(&w) * C64::new((lambda / 2.0).sqrt(), 0.0);
        let oracle = lindblad_oracle(rho.matrix(), &[jump], t);
        worst = worst.max(max_abs(&(markov_dephase(&rho, &[gen], t).unwrap().matrix() - oracle)));
    }
    ensure(worst <= 1e-9, format!("1000 random instances valid; Lindblad oracle deviation {worst:.2e}"))
}

fn criterion_9() -> Outcome {
    let report = hump_demo(&ScenarioConfig { ancilla_purity: 0.5, ..sinc_config(Scenario::QecIndependent) }).unwrap();
    let fe0 = report.result.rows[0].report.fe;
    let two_pi = 2.0 * std::f64::consts::PI;
    let fine: Vec<f64> = (0..=60).map(|i| two_pi * i as f64 / 60.0).collect();
    let ideal = run_scenario(&ScenarioConfig::new(Scenario::QecIndependent, NoiseKind::IncoherentSinc, fine)).unwrap();
    let ideal_fe: Vec<f64> = ideal.rows.iter().map(|r| r.report.fe).collect();
    let monotone = is_monotone_non_increasing(&ideal_fe);
    ensure(
        report.hump() && fe0 < 1.0 && monotone,
        format!(
            "purity 0.5: Fe(0) = {fe0:.4}, non-monotone {}, crosses purity-1 curve {}; purity 1 monotone on [0, 2π] {monotone}",
            report.non_monotone, report.crosses_reference
        ),
    )
}

fn sweep_hash(dir: &std::path::Path, name: &str, serial: bool) -> Result<String, String> {
    let out = dir.join(name);
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dfsqec"));
    cmd.args(["sweep", "--scenario", "dfs_qec", "--kind", "sinc", "--purity", "0.8", "--out"]).arg(&out);
    if serial {
        cmd.arg("--serial");
    }
    let status = cmd.status().map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("sweep exited with {status}"));
    }
    let bytes = std::fs::read(&out).map_err(|e| e.to_string())?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut hashes = Vec::new();
    for i in 0..3 {
        hashes.push(sweep_hash(dir.path(), &format!("parallel{i}.csv"), false)?);
    }
    hashes.push(sweep_hash(dir.path(), "serial.csv", true)?);
    let same = hashes.iter().all(|h| h == &hashes[0]);
    ensure(same, format!("sha256 {} (3 parallel runs + 1 serial)", &hashes[0][..16]))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("analytic equivalence, independent noise", criterion_1),
        ("analytic equivalence, hybrid noise", criterion_2),
        ("concatenated code cancels collective noise", criterion_3),
        ("DFS block invariant under collective noise", criterion_4),
        ("single phase flips corrected exactly", criterion_5),
        ("case a / case b noise-strength ratio", criterion_6),
        ("Markovian first-order cancellation", criterion_7),
        ("channel validity and Lindblad oracle", criterion_8),
        ("imperfect-ancilla hump", criterion_9),
        ("deterministic sweep output", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

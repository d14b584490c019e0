mod common;

use common::*;
use dfsqec::channels::{
    incoherent_dephase, incoherent_dephase_all, markov_dephase, noise_strength, DephasingGenerator,
};
use dfsqec::codes::{build_scenario_circuit, Scenario};
use dfsqec::channels::{NoiseKind, NoiseSpec};
use dfsqec::experiments::prepare_inputs;
use dfsqec::metrics::{correlations, entanglement_fidelity, error_rate_grid, fit_error_rates, Axis};
use dfsqec::qstate::{partial_trace, CMatrix, DensityMatrix, StateKind, C64};
use rand::Rng;

fn random_generator(n: usize, rng: &mut impl Rng) -> DephasingGenerator {
    loop {
        let w: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.7) { rng.gen_range(-1.5..1.5) } else { 0.0 }).collect();
        if let Ok(g) = DephasingGenerator::new(w, rng.gen_range(0.0..8.0), "g") {
            return g;
        }
    }
}

#[test]
fn randomized_channel_validity() {
    let mut rng = rng(7);
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.gen_range(1..=4);
        let rho = random_state(n, rng.gen_range(1..=1usize << n), &mut rng);
        let gens: Vec<DephasingGenerator> = (0..rng.gen_range(1..=3)).map(|_| random_generator(n, &mut rng)).collect();
        let t = rng.gen_range(0.0..3.0);
        let d = 1usize << n;
        let mixed = DensityMatrix::maximally_mixed(n);
        for (out, unital) in [
            (incoherent_dephase_all(&rho, &gens).unwrap(), incoherent_dephase_all(&mixed, &gens).unwrap()),
            (markov_dephase(&rho, &gens, t).unwrap(), markov_dephase(&mixed, &gens, t).unwrap()),
        ] {
            assert!(unital.max_abs_diff(&mixed) <= 1e-12);
            assert!((out.trace() - rho.trace()).norm() <= 1e-12);
            assert!(out.hermiticity_deviation() <= 1e-12);
            assert!(out.min_eigenvalue() >= -1e-9, "min eigenvalue {}", out.min_eigenvalue());
            assert_eq!(out.dim(), d);
        }
        checked += 1;
    }
}

/// Monte-Carlo average of `U(φ)ρU(φ)†` over `φ ~ U[−κ/2, κ/2]`, with the
/// standard error of each element.
fn phase_average(rho: &CMatrix, weights: &[f64], kappa: f64, samples: usize, rng: &mut impl Rng) -> (CMatrix, CMatrix) {
    let w = weighted_z_sum(weights);
    let d = rho.nrows();
    let mut sum = CMatrix::zeros(d, d);
    let mut sum_sq = CMatrix::zeros(d, d);
    for _ in 0..samples {
        let phi = rng.gen_range(-kappa / 2.0..=kappa / 2.0);
        for r in 0..d {
            for c in 0..d {
                let phase = -phi * (w[(r, r)].re - w[(c, c)].re) / 2.0;
                let v = rho[(r, c)] * C64::from_polar(1.0, phase);
                sum[(r, c)] += v;
                sum_sq[(r, c)] += C64::new(v.re * v.re, v.im * v.im);
            }
        }
    }
    let n = samples as f64;
    let mean = sum.map(|z| z / n);
    let se = CMatrix::from_fn(d, d, |r, c| {
        let m = mean[(r, c)];
        let var_re = (sum_sq[(r, c)].re / n - m.re * m.re).max(0.0);
        let var_im = (sum_sq[(r, c)].im / n - m.im * m.im).max(0.0);
        C64::new((var_re / n).sqrt(), (var_im / n).sqrt())
    });
    (mean, se)
}

#[test]
fn incoherent_matches_monte_carlo_phase_average() {
    let mut rng = rng(11);
    for (n, weights, kappa) in [(2, vec![1.0, 0.0], 2.7), (2, vec![1.0, 1.0], 5.0), (4, vec![0.0, 1.0, 1.5, 1.0], 3.3)] {
        let rho = random_state(n, 2, &mut rng);
        let g = DephasingGenerator::new(weights.clone(), kappa, "g").unwrap();
        let exact = incoherent_dephase(&rho, &g).unwrap();
        let (mean, se) = phase_average(rho.matrix(), &weights, kappa, 100_000, &mut rng);
        for r in 0..rho.dim() {
            for c in 0..rho.dim() {
                let e = exact.element(r, c);
                let m = mean[(r, c)];
                let s = se[(r, c)];
                assert!((e.re - m.re).abs() <= 3.0 * s.re + 1e-12, "re ({r},{c}) n={n}: {} vs {} (se {})", e.re, m.re, s.re);
                assert!((e.im - m.im).abs() <= 3.0 * s.im + 1e-12, "im ({r},{c}) n={n}: {} vs {} (se {})", e.im, m.im, s.im);
            }
        }
    }
}

#[test]
fn full_dephasing_at_pi_matches_sampling() {
    let mut rng = rng(3);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityMatrix::pure(&[C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
    let kappa = 2.0 * std::f64::consts::PI;
    let (mean, se) = phase_average(plus.matrix(), &[1.0], kappa, 100_000, &mut rng);
    let g = DephasingGenerator::single(1, 1, kappa, "L").unwrap();
    let exact = incoherent_dephase(&plus, &g).unwrap();
    assert!(exact.element(0, 1).norm() < 1e-15);
    assert!((mean[(0, 1)].re - exact.element(0, 1).re).abs() <= 3.0 * se[(0, 1)].re);
    assert_eq!(exact.element(0, 0), plus.element(0, 0));
}

#[test]
fn markov_matches_vectorized_lindbladian() {
    let mut rng = rng(5);
    for _ in 0..10 {
        let rho = random_state(2, 4, &mut rng);
        let w1 = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let w2 = vec![1.0, 1.0];
        let (l1, l2) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let t = rng.gen_range(0.0..2.0);
        let gens = [
            DephasingGenerator::new(w1.clone(), l1, "a").unwrap(),
            DephasingGenerator::new(w2.clone(), l2, "b").unwrap(),
        ];
        let jumps = [
            weighted_z_sum(&w1) * C64::new((l1 / 2.0).sqrt(), 0.0),
            weighted_z_sum(&w2) * C64::new((l2 / 2.0).sqrt(), 0.0),
        ];
        let exact = markov_dephase(&rho, &gens, t).unwrap();
        let oracle = lindblad_oracle(rho.matrix(), &jumps, t);
        assert!(max_abs(&(exact.matrix() - oracle)) <= 1e-9);
    }
}

#[test]
fn markov_single_qubit_oracle_value() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityMatrix::pure(&[C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
    let jump = sz() * C64::new((0.5f64).sqrt(), 0.0);
    let oracle = lindblad_oracle(plus.matrix(), &[jump], 1.0);
    let factor = oracle[(0, 1)].re / 0.5;
    assert!((factor - 0.367879).abs() < 1e-6);
    let g = DephasingGenerator::single(1, 1, 1.0, "L").unwrap();
    let out = markov_dephase(&plus, &[g], 1.0).unwrap();
    assert!((out.element(0, 1).re / 0.5 - factor).abs() < 1e-12);
}

#[test]
fn markov_is_a_semigroup_incoherent_is_not() {
    let mut rng = rng(9);
    let rho = random_state(2, 3, &mut rng);
    let g = DephasingGenerator::new(vec![1.0, 0.4], 0.8, "g").unwrap();
    let gens = [g];
    let once = markov_dephase(&rho, &gens, 1.7).unwrap();
    let twice = markov_dephase(&markov_dephase(&rho, &gens, 0.6).unwrap(), &gens, 1.1).unwrap();
    assert!(once.max_abs_diff(&twice) <= 1e-12);

    // two κ=2 applications differ from one κ=4 application
    let half = DephasingGenerator::new(vec![1.0, 0.0], 2.0, "g").unwrap();
    let full = DephasingGenerator::new(vec![1.0, 0.0], 4.0, "g").unwrap();
    let composed = incoherent_dephase(&incoherent_dephase(&rho, &half).unwrap(), &half).unwrap();
    let single = incoherent_dephase(&rho, &full).unwrap();
    assert!(composed.max_abs_diff(&single) > 1e-3);
}

#[test]
fn dfs_block_is_a_fixed_point_of_collective_noise() {
    let mut rng = rng(13);
    for _ in 0..20 {
        // random state on span{|01>, |10>} of qubits 3,4 times a random state of 1,2
        let block = random_state(1, 2, &mut rng);
        let mut m = CMatrix::zeros(4, 4);
        for (a, ia) in [(0, 1), (1, 2)] {
            for (b, ib) in [(0, 1), (1, 2)] {
                m[(ia, ib)] = block.element(a, b);
            }
        }
        let pair = DensityMatrix::new(m, StateKind::State).unwrap();
        let rho = random_state(2, 2, &mut rng).tensor(&pair);
        for kappa in [0.1, 1.0, 10.0, 100.0] {
            let lc = DephasingGenerator::on_qubits(4, &[(3, 1.0), (4, 1.0)], kappa, "Lc").unwrap();
            let inc = incoherent_dephase(&rho, &lc).unwrap();
            let mk = markov_dephase(&rho, &[lc], kappa).unwrap();
            assert!(inc.max_abs_diff(&rho) <= 1e-14);
            assert!(mk.max_abs_diff(&rho) <= 1e-14);
        }
    }
}

#[test]
fn fitted_first_order_rate_is_bounded_by_noise_strength() {
    // single-qubit Markovian dephasing of the data qubit (no_qec circuit,
    // only the data qubit's generator matters for its marginal)
    let lambda0 = 0.3;
    let bound = noise_strength(&[DephasingGenerator::single(1, 1, lambda0, "L").unwrap()]).unwrap();
    assert!((bound - lambda0).abs() < 1e-12);
    let samples: Vec<(f64, f64)> = error_rate_grid(lambda0, 12)
        .into_iter()
        .map(|t| {
            let spec = NoiseSpec::independent(lambda0 * t, NoiseKind::MarkovianExp);
            let circuit = build_scenario_circuit(Scenario::NoQec, &spec).unwrap();
            let ins = Axis::ALL.map(|a| partial_trace(&prepare_inputs(a, 1.0, 3).unwrap(), &[2]).unwrap());
            let outs = Axis::ALL.map(|a| {
                let out = circuit.run(&prepare_inputs(a, 1.0, 3).unwrap()).unwrap();
                partial_trace(&out, &[2]).unwrap()
            });
            (t, entanglement_fidelity(correlations(&ins, &outs).unwrap()))
        })
        .collect();
    let fit = fit_error_rates(&samples, 3, bound).unwrap();
    let rate1 = fit.rate(1).unwrap();
    assert!(rate1 <= bound * (1.0 + 1e-6), "rate {rate1} > λ {bound}");
    assert!((rate1 - lambda0 / 2.0).abs() < 1e-4);
}

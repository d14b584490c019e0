use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use dfsqec::channels::{CouplingCase, NoiseKind};
use dfsqec::codes::Scenario;
use dfsqec::experiments::{
    self, emit_chart, emit_csv, format_sig, parse_grid, read_csv, run_checks, run_scenario_with,
    ChartOptions, Execution, ScenarioConfig,
};
use dfsqec::metrics::{analytic_fe_no_qec, analytic_fe_qec_independent, analytic_fe_qec_strong, Curve};

#[derive(Parser)]
#[command(name = "dfsqec", version, about = "Concatenated DFS + phase-code dephasing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the noise strength for one scenario and write CSV.
    Sweep {
        #[arg(long)]
        scenario: Option<String>,
        /// sinc (incoherent gradients) or exp (Markovian)
        #[arg(long)]
        kind: Option<String>,
        /// start:stop:step (inclusive) or a comma-separated list
        #[arg(long)]
        kappa0: Option<String>,
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long)]
        case: Option<String>,
        #[arg(long)]
        purity: Option<f64>,
        /// JSON config; explicit flags override its fields
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Evaluate sweep points on one thread.
        #[arg(long)]
        serial: bool,
    },
    /// Print a closed-form fidelity curve as CSV.
    Analytic {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        kappa0: String,
        /// κ₀/κ_c for the qec-strong curve (κ₃ = κ₀ + κ₀/ratio)
        #[arg(long, default_value_t = 0.5)]
        ratio: f64,
    },
    /// Print λ and the partial strengths of the error model of a config.
    NoiseStrength {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Render CSV sweeps as an SVG chart.
    Chart {
        #[arg(long = "in", num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also plot the average polarization.
        #[arg(long)]
        polarization: bool,
    },
    /// Compare simulated scenarios against their closed forms.
    Check,
}

fn load_config(path: &PathBuf) -> anyhow::Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ScenarioConfig::from_json(&text)?)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Sweep { scenario, kind, kappa0, ratio, case, purity, config, out, serial } => {
            let mut cfg = match &config {
                Some(path) => load_config(path)?,
                None => ScenarioConfig::default(),
            };
            if let Some(s) = scenario {
                cfg.scenario = s.parse::<Scenario>()?;
            }
            if let Some(k) = kind {
                cfg.kind = k.parse::<NoiseKind>()?;
            }
            if let Some(g) = kappa0 {
                cfg.sweep = parse_grid(&g)?;
            }
            if let Some(r) = ratio {
                cfg.ratio = r;
            }
            if let Some(c) = case {
                cfg.coupling_case = c.parse::<CouplingCase>()?;
            }
            if let Some(p) = purity {
                cfg.ancilla_purity = p;
            }
            let execution = if serial { Execution::Serial } else { Execution::Parallel };
            let result = run_scenario_with(&cfg, execution)?;
            emit_csv(&result, &out).with_context(|| format!("writing {}", out.display()))?;
            Ok(true)
        }
        Command::Analytic { curve, kappa0, ratio } => {
            let curve: Curve = curve.parse()?;
            if !(ratio > 0.0) {
                bail!("ratio must be > 0");
            }
            let grid = parse_grid(&kappa0)?;
            let stdout = io::stdout();
            let mut out = stdout.lock();
            writeln!(out, "kappa0,Fe")?;
            for k in grid {
                let fe = match curve {
                    Curve::QecIndependent => analytic_fe_qec_independent(k),
                    Curve::QecStrong => analytic_fe_qec_strong(k, k + k / ratio),
                    Curve::NoQec => analytic_fe_no_qec(k),
                };
                writeln!(out, "{},{}", format_sig(k, 12), format_sig(fe, 12))?;
            }
            Ok(true)
        }
        Command::NoiseStrength { spec } => {
            let cfg = load_config(&spec)?;
            let stdout = io::stdout();
            let mut out = stdout.lock();
            writeln!(out, "kappa0,generator,partial_strength")?;
            for rep in experiments::noise_strength_report(&cfg)? {
                let x = format_sig(rep.kappa0, 12);
                for g in &rep.generators {
                    writeln!(out, "{x},{},{}", g.label(), format_sig(g.partial_strength(), 12))?;
                }
                writeln!(out, "{x},lambda,{}", format_sig(rep.lambda, 12))?;
            }
            Ok(true)
        }
        Command::Chart { inputs, out, polarization } => {
            let mut results = Vec::new();
            for path in &inputs {
                let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
                results.extend(read_csv(file).with_context(|| format!("reading {}", path.display()))?);
            }
            emit_chart(&results, &out, ChartOptions { polarization })?;
            Ok(true)
        }
        Command::Check => {
            let mut all = true;
            for c in run_checks()? {
                let status = if c.passed() { "PASS" } else { "FAIL" };
                println!("{status} {} (max deviation {:.3e}, tolerance {:.0e})", c.name, c.max_deviation, c.tolerance);
                all &= c.passed();
            }
            Ok(all)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

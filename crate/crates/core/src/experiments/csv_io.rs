use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::channels::{CouplingCase, NoiseKind};
use crate::codes::Scenario;
use crate::metrics::{Axis, MetricReport};
use crate::{Error, Result};

use super::{ScenarioConfig, ScenarioResult, ScenarioRow};

pub const CSV_HEADER: [&str; 15] = [
    "scenario",
    "kind",
    "case",
    "kappa0",
    "ratio",
    "ancilla_purity",
    "Cx",
    "Cy",
    "Cz",
    "Fe",
    "Fe_analytic",
    "Px",
    "Py",
    "Pz",
    "P",
];

/// `%g`-style formatting with `digits` significant digits.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn num(v: f64) -> String {
    format_sig(v, 12)
}

pub fn write_csv<W: Write>(result: &ScenarioResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let cfg = &result.config;
    for row in &result.rows {
        let r = &row.report;
        w.write_record([
            cfg.scenario.as_str().to_string(),
            cfg.kind.as_str().to_string(),
            cfg.coupling_case.as_str().to_string(),
            num(row.kappa0),
            num(cfg.ratio),
            num(cfg.ancilla_purity),
            num(r.cx),
            num(r.cy),
            num(r.cz),
            num(r.fe),
            r.fe_analytic.map(num).unwrap_or_default(),
            num(r.px),
            num(r.py),
            num(r.pz),
            num(r.p),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(result: &ScenarioResult, path: impl AsRef<Path>) -> Result<()> {
    write_csv(result, File::create(path)?)
}

/// Reads CSV produced by [`write_csv`]; consecutive rows sharing scenario,
/// kind, case, ratio and purity form one result.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ScenarioResult>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::Config(format!("unexpected CSV header: {}", header.join(","))));
    }
    let mut results: Vec<ScenarioResult> = Vec::new();
    for record in rdr.records() {
        let rec = record?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let f = |i: usize| -> Result<f64> {
            field(i).parse::<f64>().map_err(|_| Error::Config(format!("bad number '{}' in column {}", field(i), CSV_HEADER[i])))
        };
        let scenario: Scenario = field(0).parse()?;
        let kind: NoiseKind = field(1).parse()?;
        let case: CouplingCase = field(2).parse()?;
        let (x, ratio, purity) = (f(3)?, f(4)?, f(5)?);
        let report = MetricReport {
            cx: f(6)?,
            cy: f(7)?,
            cz: f(8)?,
            fe: f(9)?,
            fe_analytic: if field(10).is_empty() { None } else { Some(f(10)?) },
            px: f(11)?,
            py: f(12)?,
            pz: f(13)?,
            p: f(14)?,
        };
        let same = results.last().is_some_and(|r| {
            let c = &r.config;
            c.scenario == scenario
                && c.kind == kind
                && c.coupling_case == case
                && c.ratio == ratio
                && c.ancilla_purity == purity
        });
        if !same {
            results.push(ScenarioResult {
                config: ScenarioConfig {
                    scenario,
                    kind,
                    sweep: Vec::new(),
                    ratio,
                    coupling_case: case,
                    ancilla_purity: purity,
                    inputs: Axis::ALL.to_vec(),
                },
                rows: Vec::new(),
            });
        }
        let current = results.last_mut().expect("pushed above");
        current.config.sweep.push(x);
        let spec = current.config.noise_spec(x);
        current.rows.push(ScenarioRow { kappa0: x, spec, report });
    }
    Ok(results)
}

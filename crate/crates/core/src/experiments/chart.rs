//! Self-contained SVG chart of `F_e` (and optionally `P`) against `κ₀`.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

use super::{analytic_reference, ScenarioResult};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 190.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;
const CURVE_SAMPLES: usize = 240;

const PALETTE: [&str; 8] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChartOptions {
    /// Also plot the average polarization `P` as square markers.
    pub polarization: bool,
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        MARGIN_LEFT + (x - self.x_min) / (self.x_max - self.x_min) * w
    }

    fn py(&self, y: f64) -> f64 {
        let h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        MARGIN_TOP + (self.y_max - y) / (self.y_max - self.y_min) * h
    }
}

fn legend_labels(results: &[ScenarioResult]) -> Vec<String> {
    results
        .iter()
        .map(|r| {
            let name = r.config.scenario.as_str();
            let clash = results.iter().filter(|o| o.config.scenario == r.config.scenario).count() > 1;
            if clash {
                let c = &r.config;
                format!("{name} ({}, case {}, ratio {}, purity {})", c.kind, c.coupling_case, c.ratio, c.ancilla_purity)
            } else {
                name.to_string()
            }
        })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Analytic curve for a series, if it has a closed form.
fn analytic_curve(result: &ScenarioResult) -> Option<Vec<(f64, f64)>> {
    let c = &result.config;
    if result.rows.iter().all(|r| r.report.fe_analytic.is_none()) {
        return None;
    }
    if c.ancilla_purity != 1.0 {
        let pts = result.rows.iter().filter_map(|r| r.report.fe_analytic.map(|f| (r.kappa0, f))).collect();
        return Some(pts);
    }
    let (lo, hi) = (c.sweep.first().copied()?, c.sweep.last().copied()?);
    Some(
        (0..=CURVE_SAMPLES)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / CURVE_SAMPLES as f64;
                (x, analytic_reference(c.scenario, c.kind, c.coupling_case, c.ratio, x))
            })
            .collect(),
    )
}

pub fn render_chart(results: &[ScenarioResult], options: ChartOptions) -> Result<String> {
    if results.is_empty() {
        return Err(Error::Config("chart needs at least one result".into()));
    }
    let xs = results.iter().flat_map(|r| r.rows.iter().map(|row| row.kappa0));
    let (mut x_min, mut x_max) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if !x_min.is_finite() {
        (x_min, x_max) = (0.0, 1.0);
    }
    if x_max <= x_min {
        x_max = x_min + 1.0;
    }
    let ys = results.iter().flat_map(|r| {
        r.rows.iter().flat_map(move |row| {
            let mut v = vec![row.report.fe];
            v.extend(row.report.fe_analytic);
            if options.polarization {
                v.push(row.report.p);
            }
            v
        })
    });
    let y_lo = ys.clone().filter(|y| y.is_finite()).fold(1.0, f64::min);
    let y_hi = ys.filter(|y| y.is_finite()).fold(1.0, f64::max);
    let frame = Frame {
        x_min,
        x_max,
        y_min: ((y_lo.min(0.25) - 0.05) * 10.0).floor() / 10.0,
        y_max: ((y_hi + 0.05) * 10.0).ceil() / 10.0,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // axes and ticks
    let (x0, x1) = (frame.px(frame.x_min), frame.px(frame.x_max));
    let (y0, y1) = (frame.py(frame.y_min), frame.py(frame.y_max));
    let _ = writeln!(svg, r#"<g class="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(svg, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/>"#);
    let _ = writeln!(svg, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/>"#);
    let _ = writeln!(svg, "</g>");
    for i in 0..=6 {
        let x = frame.x_min + (frame.x_max - frame.x_min) * i as f64 / 6.0;
        let px = frame.px(x);
        let _ = writeln!(
            svg,
            r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 18.0,
            super::format_sig(x, 4)
        );
    }
    let steps = ((frame.y_max - frame.y_min) / 0.1).round() as usize;
    for i in 0..=steps {
        let y = frame.y_min + 0.1 * i as f64;
        let py = frame.py(y);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{y:.1}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">applied noise strength κ₀</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        if options.polarization { "F_e (circles), P (squares)" } else { "entanglement fidelity F_e" }
    );

    let labels = legend_labels(results);
    for (i, (result, label)) in results.iter().zip(&labels).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(svg, r#"<g class="series" data-series="{}">"#, escape(label));
        if let Some(curve) = analytic_curve(result) {
            let points: Vec<String> =
                curve.iter().map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y))).collect();
            let _ = writeln!(
                svg,
                r#"<polyline class="analytic" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                points.join(" ")
            );
        }
        for row in &result.rows {
            if !row.report.fe.is_finite() {
                continue;
            }
            let _ = writeln!(
                svg,
                r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#,
                frame.px(row.kappa0),
                frame.py(row.report.fe)
            );
            if options.polarization && row.report.p.is_finite() {
                let _ = writeln!(
                    svg,
                    r#"<rect class="marker-p" x="{:.2}" y="{:.2}" width="6" height="6" fill="none" stroke="{color}"/>"#,
                    frame.px(row.kappa0) - 3.0,
                    frame.py(row.report.p) - 3.0
                );
            }
        }
        let _ = writeln!(svg, "</g>");

        let ly = MARGIN_TOP + 10.0 + 20.0 * i as f64;
        let lx = WIDTH - MARGIN_RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<circle cx="{lx:.2}" cy="{ly:.2}" r="3.5" fill="{color}"/><text class="legend" x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 10.0,
            ly + 4.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_chart(results: &[ScenarioResult], path: impl AsRef<Path>, options: ChartOptions) -> Result<()> {
    let svg = render_chart(results, options)?;
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::NoiseKind;
    use crate::codes::Scenario;
    use crate::experiments::{default_grid, run_scenario, ScenarioConfig};

    fn result(scenario: Scenario, sweep: Vec<f64>) -> ScenarioResult {
        run_scenario(&ScenarioConfig::new(scenario, NoiseKind::IncoherentSinc, sweep)).unwrap()
    }

    #[test]
    fn one_series_has_one_marker_per_point() {
        let svg = render_chart(&[result(Scenario::QecIndependent, default_grid())], ChartOptions::default()).unwrap();
        assert_eq!(svg.matches(r#"class="marker""#).count(), 25);
        assert_eq!(svg.matches(r#"class="analytic""#).count(), 1);
    }

    #[test]
    fn four_scenarios_four_legend_entries() {
        let all: Vec<ScenarioResult> = Scenario::ALL.iter().map(|&s| result(s, vec![0.0, 2.0, 4.0])).collect();
        let svg = render_chart(&all, ChartOptions { polarization: true }).unwrap();
        assert_eq!(svg.matches(r#"class="legend""#).count(), 4);
        for s in Scenario::ALL {
            assert!(svg.contains(&format!(">{}</text>", s.as_str())));
        }
        assert_eq!(svg.matches(r#"class="marker-p""#).count(), 12);
    }

    #[test]
    fn zero_noise_markers_sit_at_one() {
        let r = result(Scenario::DfsQec, vec![0.0]);
        assert!((r.rows[0].report.fe - 1.0).abs() < 1e-12);
        let svg = render_chart(&[r], ChartOptions::default()).unwrap();
        assert_eq!(svg.matches(r#"class="marker""#).count(), 1);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(render_chart(&[], ChartOptions::default()).is_err());
    }
}

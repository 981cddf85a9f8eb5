//! Static SVG 1.1 charts for sweep records.
//!
//! Each data series is a `<g class="series" data-metric="...">` group so the
//! output can be checked structurally.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use jointgraph_core::classify::Target;

use crate::error::{Error, Result};
use crate::harness::{summarize, Experiment, ExperimentRecord, Metric, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Mean accuracy per seed count with one-standard-deviation bars and
    /// the chance curve.
    Errorbar,
    /// Joint against single-graph error per dimension, one panel per target.
    Lines,
}

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

struct Panel {
    y0: f64,
    x_min: f64,
    x_max: f64,
}

impl Panel {
    fn new(y0: f64, params: impl Iterator<Item = usize>) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in params {
            lo = lo.min(p as f64);
            hi = hi.max(p as f64);
        }
        if lo == hi {
            lo -= 1.0;
            hi += 1.0;
        }
        Panel {
            y0,
            x_min: lo,
            x_max: hi,
        }
    }

    fn x(&self, v: f64) -> f64 {
        LEFT + (v - self.x_min) / (self.x_max - self.x_min) * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        self.y0 + TOP + (1.0 - v.clamp(0.0, 1.0)) * (PANEL_HEIGHT - TOP - BOTTOM)
    }

    fn axes(&self, out: &mut String, title: &str, x_label: &str, y_label: &str) {
        let (xl, xr) = (self.x(self.x_min), self.x(self.x_max));
        let (yb, yt) = (self.y(0.0), self.y(1.0));
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="15">{}</text>"#,
            (xl + xr) / 2.0,
            self.y0 + TOP - 15.0,
            escape(title)
        );
        let _ = writeln!(
            out,
            r#"<path d="M{xl:.1},{yt:.1} V{yb:.1} H{xr:.1}" fill="none" stroke="black"/>"#
        );
        for k in 0..=4 {
            let v = f64::from(k) / 4.0;
            let y = self.y(v);
            let _ = writeln!(
                out,
                r##"<line x1="{:.1}" y1="{y:.1}" x2="{xl:.1}" y2="{y:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end" font-size="11">{v:.2}</text><line x1="{xl:.1}" y1="{y:.1}" x2="{xr:.1}" y2="{y:.1}" stroke="#dddddd"/>"##,
                xl - 5.0,
                xl - 8.0,
                y + 4.0
            );
        }
        for k in 0..=5 {
            let v = self.x_min + (self.x_max - self.x_min) * f64::from(k) / 5.0;
            let x = self.x(v);
            let _ = writeln!(
                out,
                r#"<line x1="{x:.1}" y1="{yb:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/><text x="{x:.1}" y="{:.1}" text-anchor="middle" font-size="11">{}</text>"#,
                yb + 5.0,
                yb + 18.0,
                trim(v)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13">{}</text>"#,
            (xl + xr) / 2.0,
            yb + 38.0,
            escape(x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
            LEFT - 45.0,
            (yb + yt) / 2.0,
            LEFT - 45.0,
            (yb + yt) / 2.0,
            escape(y_label)
        );
    }

    fn legend(&self, out: &mut String, slot: usize, label: &str, color: &str, dash: Option<&str>) {
        let x = WIDTH - RIGHT + 15.0;
        let y = self.y0 + TOP + 10.0 + 20.0 * slot as f64;
        let dash = dash.map_or(String::new(), |d| format!(r#" stroke-dasharray="{d}""#));
        let _ = writeln!(
            out,
            r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.1}" y="{:.1}" font-size="12">{}</text>"#,
            x + 25.0,
            x + 30.0,
            y + 4.0,
            escape(label)
        );
    }

    fn polyline(&self, series: &[&Summary], color: &str, dash: Option<&str>) -> String {
        let pts: Vec<String> = series
            .iter()
            .map(|s| format!("{:.2},{:.2}", self.x(s.parameter as f64), self.y(s.mean)))
            .collect();
        let dash = dash.map_or(String::new(), |d| format!(r#" stroke-dasharray="{d}""#));
        format!(
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#,
            pts.join(" ")
        )
    }
}

fn trim(v: f64) -> String {
    let s = format!("{v:.1}");
    s.strip_suffix(".0").map_or(s.clone(), str::to_string)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn header(out: &mut String, height: f64, title: &str, desc: &str) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, "<desc>{}</desc>", escape(desc));
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

fn series(summaries: &[Summary], metric: Metric, target: Option<Target>) -> Vec<&Summary> {
    summaries
        .iter()
        .filter(|s| s.metric == metric && s.target == target)
        .collect()
}

fn errorbar(records: &[ExperimentRecord]) -> String {
    let summaries = summarize(records);
    let panel = Panel::new(0.0, summaries.iter().map(|s| s.parameter));
    let mut out = String::new();
    header(
        &mut out,
        PANEL_HEIGHT,
        "Matching accuracy by number of seeds",
        "Points are mean matching accuracy per seed count; error bars span plus and minus one standard deviation across replicates. The dashed line is chance accuracy 1/(n-m).",
    );
    panel.axes(
        &mut out,
        "Matching accuracy by number of seeds",
        "seeds m",
        "accuracy",
    );

    let delta = series(&summaries, Metric::Delta, None);
    let _ = writeln!(out, r#"<g class="series" data-metric="delta">"#);
    let color = "#1f4e9c";
    out.push_str(&panel.polyline(&delta, color, None));
    out.push('\n');
    for s in &delta {
        let x = panel.x(s.parameter as f64);
        let (lo, hi) = (panel.y(s.mean - s.std_dev), panel.y(s.mean + s.std_dev));
        let _ = writeln!(
            out,
            r#"<path d="M{x:.2},{lo:.2} V{hi:.2} M{:.2},{lo:.2} H{:.2} M{:.2},{hi:.2} H{:.2}" stroke="{color}" fill="none"/><circle cx="{x:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#,
            x - 4.0,
            x + 4.0,
            x - 4.0,
            x + 4.0,
            panel.y(s.mean)
        );
    }
    let _ = writeln!(out, "</g>");

    let chance = series(&summaries, Metric::Chance, None);
    let _ = writeln!(out, r#"<g class="series" data-metric="chance">"#);
    out.push_str(&panel.polyline(&chance, "#b22222", Some("6 4")));
    let _ = writeln!(out, "\n</g>");

    panel.legend(&mut out, 0, "mean accuracy ±1 sd", color, None);
    panel.legend(&mut out, 1, "chance", "#b22222", Some("6 4"));
    out.push_str("</svg>\n");
    out
}

fn lines(records: &[ExperimentRecord]) -> String {
    let summaries = summarize(records);
    let mut targets: Vec<Target> = summaries.iter().filter_map(|s| s.target).collect();
    targets.sort();
    targets.dedup();
    let height = PANEL_HEIGHT * targets.len().max(1) as f64;
    let mut out = String::new();
    header(
        &mut out,
        height,
        "Classification error by embedding dimension",
        "Leave-one-out error of joint (omnibus) and single-graph embeddings, one panel per target graph.",
    );
    for (k, &t) in targets.iter().enumerate() {
        let panel = Panel::new(
            PANEL_HEIGHT * k as f64,
            summaries
                .iter()
                .filter(|s| s.target == Some(t))
                .map(|s| s.parameter),
        );
        let title = format!("Target {}", t.as_str());
        panel.axes(&mut out, &title, "dimension d", "error");
        for (slot, (metric, color, dash)) in [
            (Metric::JointError, "#1f4e9c", None),
            (Metric::SingleError, "#d2691e", Some("6 4")),
        ]
        .into_iter()
        .enumerate()
        {
            let s = series(&summaries, metric, Some(t));
            let _ = writeln!(
                out,
                r#"<g class="series" data-metric="{}" data-target="{}">"#,
                metric.as_str(),
                t.as_str()
            );
            out.push_str(&panel.polyline(&s, color, dash));
            let _ = writeln!(out, "\n</g>");
            let label = match metric {
                Metric::JointError => "joint",
                _ => "single",
            };
            panel.legend(&mut out, slot, label, color, dash);
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Renders the records as SVG text.
pub fn render_plot(records: &[ExperimentRecord], kind: PlotKind) -> Result<String> {
    let Some(first) = records.first() else {
        return Err(Error::Validation("cannot plot an empty record set".into()));
    };
    if records.iter().any(|r| r.experiment != first.experiment) {
        return Err(Error::Validation(
            "cannot plot records from more than one experiment".into(),
        ));
    }
    match (kind, first.experiment) {
        (PlotKind::Errorbar, Experiment::SgmSweep) => Ok(errorbar(records)),
        (PlotKind::Lines, Experiment::ClassSweep) => Ok(lines(records)),
        (kind, e) => Err(Error::Validation(format!(
            "{kind:?} plots do not apply to {} records",
            e.as_str()
        ))),
    }
}

pub fn emit_plot(records: &[ExperimentRecord], path: &Path, kind: PlotKind) -> Result<()> {
    let svg = render_plot(records, kind)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

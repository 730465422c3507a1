//! Minimal hand-written SVG charts. Each plot gets a CSV of its data next to it.

use std::fmt::Write as _;
use std::path::Path;

use super::stats::{FitKind, FitResult};
use super::{write_atomic, ConvergenceRecord, ExperimentError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Grouped bars, one group per distinct x.
    RatioBars,
    /// Log-log axes with `n^2` and `n^3` reference curves.
    LogLogScatter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesStyle {
    Points,
    Line,
    Dashed,
    Bars,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub style: SeriesStyle,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"];
const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

/// Scatter, line and reference series for one convergence target.
pub fn loglog_series(records: &[ConvergenceRecord], fits: &[FitResult]) -> Vec<Series> {
    let pts: Vec<(f64, f64)> =
        records.iter().filter_map(|r| r.rounds_to_target.map(|k| (r.n as f64, k as f64))).collect();
    let target = records.first().map(|r| r.target).unwrap_or_default();
    let mut out = vec![Series { label: format!("rounds to {target}"), style: SeriesStyle::Points, points: pts.clone() }];
    let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    if lo.is_finite() {
        for fit in fits {
            let name = match fit.which {
                FitKind::AllPoints => "fit all".to_string(),
                FitKind::PerNMax => "fit worst".to_string(),
                FitKind::PerNQuartile(q) => format!("fit Q{q}"),
            };
            out.push(Series {
                label: format!("{name} (c = {:.2})", fit.slope),
                style: SeriesStyle::Line,
                points: vec![(lo, fit.predict(lo)), (hi, fit.predict(hi))],
            });
        }
    }
    out
}

/// Renders `series` to an SVG file at `path` and the raw points to the
/// same path with a `.csv` extension.
pub fn emit_plot(series: &[Series], kind: PlotKind, path: &Path) -> Result<(), ExperimentError> {
    if series.iter().all(|s| s.points.is_empty()) {
        return Err(ExperimentError::Empty("plot without data"));
    }
    let mut all: Vec<Series> = series.iter().filter(|s| !s.points.is_empty()).cloned().collect();
    if kind == PlotKind::LogLogScatter {
        if all.iter().flat_map(|s| &s.points).any(|p| p.0 <= 0.0 || p.1 <= 0.0) {
            return Err(ExperimentError::InvalidSpec("log-log plot needs positive coordinates".into()));
        }
        let (lo, hi) = x_range(&all);
        for (label, exp) in [("n^2", 2), ("n^3", 3)] {
            let points = (0..=20).map(|i| lo + (hi - lo) * i as f64 / 20.0).map(|x| (x, x.powi(exp))).collect();
            all.push(Series { label: label.into(), style: SeriesStyle::Dashed, points });
        }
    }
    let svg = match kind {
        PlotKind::RatioBars => render_bars(&all),
        PlotKind::LogLogScatter => render_loglog(&all),
    };
    write_atomic(path, svg.as_bytes())?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["series", "x", "y"])?;
    for s in &all {
        for &(x, y) in &s.points {
            w.write_record([s.label.as_str(), &x.to_string(), &y.to_string()])?;
        }
    }
    let csv_path = path.with_extension("csv");
    let bytes = w.into_inner().map_err(|e| ExperimentError::Io { path: csv_path.clone(), source: e.into_error() })?;
    write_atomic(&csv_path, &bytes)
}

fn x_range(series: &[Series]) -> (f64, f64) {
    series.iter().flat_map(|s| &s.points).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="18" text-anchor="middle">{}</text>
"#,
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, x_label: &str, y_label: &str) {
    let (x0, y0, x1) = (LEFT, HEIGHT - BOTTOM, WIDTH - RIGHT);
    let _ = writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
    let _ = writeln!(out, r#"<line x1="{x0}" y1="{TOP}" x2="{x0}" y2="{y0}" stroke="black"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 12.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        (TOP + y0) / 2.0,
        (TOP + y0) / 2.0,
        escape(y_label)
    );
}

fn legend(out: &mut String, series: &[Series]) {
    let x = WIDTH - RIGHT + 15.0;
    for (i, s) in series.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let color = PALETTE[i % PALETTE.len()];
        match s.style {
            SeriesStyle::Points => {
                let _ = writeln!(out, r#"<circle cx="{}" cy="{y}" r="4" fill="{color}"/>"#, x + 10.0);
            }
            SeriesStyle::Bars => {
                let _ = writeln!(out, r#"<rect x="{x}" y="{}" width="20" height="10" fill="{color}"/>"#, y - 5.0);
            }
            SeriesStyle::Line | SeriesStyle::Dashed => {
                let dash = if s.style == SeriesStyle::Dashed { r#" stroke-dasharray="5,3""# } else { "" };
                let _ =
                    writeln!(out, r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"{dash}/>"#, x + 20.0);
            }
        }
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, x + 26.0, y + 4.0, escape(&s.label));
    }
}

fn render_loglog(series: &[Series]) -> String {
    let logged: Vec<Vec<(f64, f64)>> =
        series.iter().map(|s| s.points.iter().map(|&(x, y)| (x.log10(), y.log10())).collect()).collect();
    let (mut xlo, mut xhi, mut ylo, mut yhi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in logged.iter().flatten() {
        xlo = xlo.min(x);
        xhi = xhi.max(x);
        ylo = ylo.min(y);
        yhi = yhi.max(y);
    }
    let pad = |lo: f64, hi: f64| if hi - lo < 1e-9 { (lo - 0.5, hi + 0.5) } else { (lo - 0.05 * (hi - lo), hi + 0.05 * (hi - lo)) };
    let (xlo, xhi) = pad(xlo, xhi);
    let (ylo, yhi) = pad(ylo, yhi);
    let sx = |x: f64| LEFT + (x - xlo) / (xhi - xlo) * (WIDTH - LEFT - RIGHT);
    let sy = |y: f64| HEIGHT - BOTTOM - (y - ylo) / (yhi - ylo) * (HEIGHT - TOP - BOTTOM);

    let mut out = String::new();
    header(&mut out, "rounds to target vs n (log-log)");
    axes(&mut out, "n", "rounds");
    for i in 0..=4 {
        let v = xlo + (xhi - xlo) * i as f64 / 4.0;
        let _ = writeln!(out, r#"<text x="{:.1}" y="{}" text-anchor="middle">{:.1}</text>"#, sx(v), HEIGHT - BOTTOM + 16.0, 10f64.powf(v));
        let w = ylo + (yhi - ylo) * i as f64 / 4.0;
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}" text-anchor="end">{:.0}</text>"#, LEFT - 6.0, sy(w) + 4.0, 10f64.powf(w));
    }
    for (i, (s, pts)) in series.iter().zip(&logged).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        match s.style {
            SeriesStyle::Points | SeriesStyle::Bars => {
                for &(x, y) in pts {
                    let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}" fill-opacity="0.7"/>"#, sx(x), sy(y));
                }
            }
            SeriesStyle::Line | SeriesStyle::Dashed => {
                let dash = if s.style == SeriesStyle::Dashed { r#" stroke-dasharray="5,3""# } else { "" };
                let d: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>"#,
                    d.join(" ")
                );
            }
        }
    }
    legend(&mut out, series);
    out.push_str("</svg>\n");
    out
}

fn render_bars(series: &[Series]) -> String {
    let mut xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let ymax = series.iter().flat_map(|s| &s.points).map(|p| p.1).fold(1.0f64, f64::max);
    let ymin = series.iter().flat_map(|s| &s.points).map(|p| p.1).fold(0.0f64, f64::min);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sy = |y: f64| HEIGHT - BOTTOM - (y - ymin) / (ymax - ymin) * plot_h;
    let group_w = plot_w / xs.len() as f64;
    let bar_w = group_w * 0.8 / series.len() as f64;

    let mut out = String::new();
    header(&mut out, "mean ratios at snapshot steps");
    axes(&mut out, "step", "ratio");
    for i in 0..=5 {
        let v = ymin + (ymax - ymin) * i as f64 / 5.0;
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}" text-anchor="end">{v:.2}</text>"#, LEFT - 6.0, sy(v) + 4.0);
    }
    for (g, &x) in xs.iter().enumerate() {
        let gx = LEFT + group_w * g as f64;
        let _ = writeln!(out, r#"<text x="{:.1}" y="{}" text-anchor="middle">{x}</text>"#, gx + group_w / 2.0, HEIGHT - BOTTOM + 16.0);
        for (i, s) in series.iter().enumerate() {
            let Some(&(_, y)) = s.points.iter().find(|p| p.0 == x) else { continue };
            let color = PALETTE[i % PALETTE.len()];
            let (top, bottom) = (sy(y.max(0.0)), sy(y.min(0.0)));
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{top:.2}" width="{bar_w:.2}" height="{:.2}" fill="{color}"/>"#,
                gx + group_w * 0.1 + bar_w * i as f64,
                bottom - top
            );
        }
    }
    legend(&mut out, series);
    out.push_str("</svg>\n");
    out
}

//! Minimal self-contained SVG charts (800x600 viewBox).

use std::fmt::Write as _;

use super::curve::LearningCurve;
use super::report::EvaluationReport;
use crate::regression::FeatureMode;

const W: f64 = 800.0;
const H: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Style {
    Points,
    Line,
    Dashed,
}

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, style: Style) -> Self {
        Self {
            label: label.into(),
            points,
            style,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let pts = series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |a: f64, b: f64| {
        if a == b {
            (a - 0.5, b + 0.5)
        } else {
            let m = 0.05 * (b - a);
            (a - m, b + m)
        }
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    (x0, x1, y0, y1)
}

impl Chart {
    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = bounds(&self.series);
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}" font-family="sans-serif" font-size="13">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="28" text-anchor="middle" font-size="17">{}</text>"#,
            W / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for i in 0..=5 {
            let t = i as f64 / 5.0;
            let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
            let (px, py) = (sx(xv), sy(yv));
            let _ = writeln!(
                s,
                r#"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
                TOP + ph,
                TOP + ph + 5.0,
                TOP + ph + 20.0,
                tick(xv)
            );
            let _ = writeln!(
                s,
                r#"<line x1="{}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 5.0,
                LEFT - 8.0,
                py + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            H - 20.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for (k, series) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let pts: Vec<(f64, f64)> = series
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(x, y)| (sx(x), sy(y)))
                .collect();
            match series.style {
                Style::Points => {
                    for (px, py) in pts {
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{px:.2}" cy="{py:.2}" r="2.5" fill="{color}" fill-opacity="0.6"/>"#
                        );
                    }
                }
                Style::Line | Style::Dashed => {
                    let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                    let dash = if series.style == Style::Dashed {
                        r#" stroke-dasharray="6 4""#
                    } else {
                        ""
                    };
                    let _ = writeln!(
                        s,
                        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                        path.join(" ")
                    );
                }
            }
            if series.label.is_empty() {
                continue;
            }
            let ly = TOP + 15.0 + 18.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/><text x="{}" y="{}">{}</text>"#,
                LEFT + 10.0,
                ly - 9.0,
                LEFT + 25.0,
                ly,
                escape(&series.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e4).contains(&a) {
        format!("{v:.2e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

fn span(pairs: &[(f64, f64)]) -> (f64, f64) {
    pairs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)))
}

/// Prediction against truth with the fitted line and its 95% prediction band.
pub fn scatter_plot(report: &EvaluationReport) -> String {
    let (lo, hi) = span(&report.predictions);
    let xs: Vec<f64> = (0..=50).map(|i| lo + (hi - lo) * i as f64 / 50.0).collect();
    let b = &report.band;
    Chart {
        title: format!("{} {}: r = {:.3}", report.model, report.mode, report.agreement.r),
        x_label: "BBL (umol/L)".into(),
        y_label: "Prediction (umol/L)".into(),
        series: vec![
            Series::new("out-of-fold", report.predictions.clone(), Style::Points),
            Series::new("fit", xs.iter().map(|&x| (x, b.fit(x))).collect(), Style::Line),
            Series::new("95% band", xs.iter().map(|&x| (x, b.at(x).1)).collect(), Style::Dashed),
            Series::new("", xs.iter().map(|&x| (x, b.at(x).0)).collect(), Style::Dashed),
        ],
    }
    .render()
}

pub fn bland_altman_plot(report: &EvaluationReport) -> String {
    let pts: Vec<(f64, f64)> = report.predictions.iter().map(|&(t, p)| ((t + p) / 2.0, p - t)).collect();
    let (lo, hi) = span(&pts);
    let a = &report.agreement;
    let hline = |y: f64| vec![(lo, y), (hi, y)];
    Chart {
        title: format!("Bland-Altman: MD = {:.2}", a.md),
        x_label: "Mean of truth and prediction (umol/L)".into(),
        y_label: "Prediction - truth (umol/L)".into(),
        series: vec![
            Series::new("difference", pts, Style::Points),
            Series::new("MD", hline(a.md), Style::Line),
            Series::new("LOA", hline(a.loa_upper), Style::Dashed),
            Series::new("", hline(a.loa_lower), Style::Dashed),
        ],
    }
    .render()
}

pub fn roc_plot(report: &EvaluationReport) -> String {
    Chart {
        title: format!("ROC at {} umol/L: AUROC = {:.3}", report.roc.threshold, report.roc.auroc),
        x_label: "False positive rate".into(),
        y_label: "True positive rate".into(),
        series: vec![
            Series::new("ROC", report.roc.points.clone(), Style::Line),
            Series::new("chance", vec![(0.0, 0.0), (1.0, 1.0)], Style::Dashed),
        ],
    }
    .render()
}

/// One chart per index (r, md, std_md) with both feature modes.
pub fn curve_plots(curve: &LearningCurve) -> Vec<(&'static str, String)> {
    let series = |mode: FeatureMode, f: fn(&super::curve::CurveMetrics) -> f64| {
        curve
            .points
            .iter()
            .zip(curve.series(mode))
            .map(|(p, m)| (p.fraction * 100.0, f(&m)))
            .collect::<Vec<_>>()
    };
    let indices: [(&'static str, &str, fn(&super::curve::CurveMetrics) -> f64); 3] = [
        ("r", "Pearson r", |m| m.r),
        ("md", "MD (umol/L)", |m| m.md),
        ("std_md", "Std of difference (umol/L)", |m| m.std_md),
    ];
    indices
        .into_iter()
        .map(|(key, label, f)| {
            let chart = Chart {
                title: format!("Learning curve: {label}"),
                x_label: "Data feeding (%)".into(),
                y_label: label.into(),
                series: vec![
                    Series::new("SAL", series(FeatureMode::Sal, f), Style::Line),
                    Series::new("RGBL", series(FeatureMode::Rgbl, f), Style::Line),
                ],
            };
            (key, chart.render())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_fixed_viewbox() {
        let svg = Chart {
            title: "a < b".into(),
            series: vec![Series::new("s", vec![(0.0, 1.0), (1.0, 2.0)], Style::Line)],
            ..Default::default()
        }
        .render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(r#"viewBox="0 0 800 600""#));
        assert!(svg.contains("a &lt; b"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}

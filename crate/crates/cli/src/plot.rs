//! SVG 1.1 rendering of step functions.
//!
//! Each piece `[a, b)` is a horizontal segment with a filled dot at `a` and an open dot at
//! `b`. Coordinates are computed through logarithms of the exact values, so functions with
//! astronomically large breakpoints still render. Output bytes depend only on the input.

use std::fmt::Write;

use dlab_core::numeric::{ln_ratio, ratio_to_f64};
use dlab_core::StepFunction;
use num_rational::BigRational;
use num_traits::Signed;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PlotError {
    #[error("nothing to plot")]
    Empty,
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub label: String,
    pub f: StepFunction,
}

/// Vertical marker at an abscissa.
#[derive(Debug, Clone)]
pub struct VLine {
    pub t: BigRational,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlotOptions {
    pub log_x: bool,
    pub log_y: bool,
    pub width: u32,
    pub height: u32,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self { log_x: true, log_y: true, width: 800, height: 500 }
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const MARGIN: (f64, f64, f64, f64) = (70.0, 20.0, 30.0, 50.0); // left, right, top, bottom
const DOT: f64 = 3.5;

fn coord(x: &BigRational, log: bool) -> f64 {
    if log {
        ln_ratio(x)
    } else {
        ratio_to_f64(x)
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64, px_lo: f64, px_hi: f64) -> Self {
        let (lo, hi) = if hi - lo > 1e-12 { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        let pad = (hi - lo) * 0.04;
        Self { lo: lo - pad, hi: hi + pad, px_lo, px_hi }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    /// Decade ticks in log space, five even ticks otherwise.
    fn ticks(&self, log: bool) -> Vec<(f64, String)> {
        if log {
            let ln10 = std::f64::consts::LN_10;
            let (a, b) = ((self.lo / ln10).ceil() as i64, (self.hi / ln10).floor() as i64);
            let step = ((b - a) / 8 + 1).max(1);
            (a..=b).step_by(step as usize).map(|k| (k as f64 * ln10, format!("1e{k}"))).collect()
        } else {
            (0..=4)
                .map(|i| {
                    let v = self.lo + (self.hi - self.lo) * f64::from(i) / 4.0;
                    (v, fmt_num(v))
                })
                .collect()
        }
    }
}

fn fmt_num(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-3) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders the traces on one canvas with optional vertical markers.
pub fn plot_steps(traces: &[Trace], vlines: &[VLine], opts: PlotOptions) -> Result<String, PlotError> {
    // step functions have positive breakpoints and values, so logarithms are always defined
    if traces.is_empty() {
        return Err(PlotError::Empty);
    }

    let xs = |f: &StepFunction| {
        let end = BigRational::from(f.domain_end().clone());
        let start = BigRational::from(f.start().clone());
        [coord(&start, opts.log_x), coord(&end, opts.log_x)]
    };
    let x_all: Vec<f64> = traces.iter().flat_map(|t| xs(&t.f)).collect();
    let y_all: Vec<f64> = traces.iter().flat_map(|t| t.f.values().iter().map(|v| coord(v, opts.log_y))).collect();
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let (w, h) = (f64::from(opts.width), f64::from(opts.height));
    let (ml, mr, mt, mb) = MARGIN;
    let x_axis = Axis::new(min(&x_all), max(&x_all), ml, w - mr);
    let y_axis = Axis::new(min(&y_all), max(&y_all), h - mb, mt);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        opts.width, opts.height, opts.width, opts.height
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{}" height="{}" fill="white"/>"#, opts.width, opts.height);
    let _ = writeln!(
        svg,
        r#"<rect x="{ml:.2}" y="{mt:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        w - ml - mr,
        h - mt - mb
    );

    let _ = writeln!(svg, r#"<g font-family="sans-serif" font-size="11" fill="black">"#);
    for (v, label) in x_axis.ticks(opts.log_x) {
        let x = x_axis.map(v);
        let _ = writeln!(svg, r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, h - mb, h - mb + 5.0);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#, h - mb + 18.0);
    }
    for (v, label) in y_axis.ticks(opts.log_y) {
        let y = y_axis.map(v);
        let _ = writeln!(svg, r#"<line x1="{:.2}" y1="{y:.2}" x2="{ml:.2}" y2="{y:.2}" stroke="black"/>"#, ml - 5.0);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, ml - 8.0, y + 4.0);
    }
    let scale = |log: bool| if log { "log" } else { "linear" };
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t ({})</text>"#,
        (ml + w - mr) / 2.0,
        h - 10.0,
        scale(opts.log_x)
    );
    let _ = writeln!(svg, "</g>");

    for line in vlines {
        if opts.log_x && !line.t.is_positive() {
            continue;
        }
        let x = x_axis.map(coord(&line.t, opts.log_x));
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{mt:.2}" x2="{x:.2}" y2="{:.2}" stroke="#555555" stroke-dasharray="4 3"/>"##,
            h - mb
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" fill="#555555">{}</text>"##,
            x + 3.0,
            mt + 12.0,
            escape(&line.label)
        );
    }

    for (i, trace) in traces.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(svg, r#"<g stroke="{color}" fill="{color}" stroke-width="1.5">"#);
        for (a, b, v) in trace.f.pieces() {
            let x0 = x_axis.map(coord(&BigRational::from(a.clone()), opts.log_x));
            let x1 = x_axis.map(coord(&BigRational::from(b.clone()), opts.log_x));
            let y = y_axis.map(coord(v, opts.log_y));
            let _ = writeln!(svg, r#"<line x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}"/>"#);
            let _ = writeln!(svg, r#"<circle cx="{x0:.2}" cy="{y:.2}" r="{DOT}"/>"#);
            let _ = writeln!(svg, r#"<circle cx="{x1:.2}" cy="{y:.2}" r="{DOT}" fill="white"/>"#);
        }
        let _ = writeln!(svg, "</g>");
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>"#,
            w - mr - 110.0,
            mt + 16.0 + 14.0 * i as f64,
            escape(&trace.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn constant() -> StepFunction {
        StepFunction::constant(1.into(), BigRational::new(1.into(), 2.into()), 100.into()).unwrap()
    }

    #[test]
    fn single_segment() {
        let svg = plot_steps(&[Trace { label: "c".into(), f: constant() }], &[], PlotOptions::default()).unwrap();
        let segments = svg.lines().filter(|l| l.starts_with("<line") && !l.contains("stroke=")).count();
        assert_eq!(segments, 1);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg.matches("r=\"3.5\" fill=\"white\"/>").count(), 1);
    }

    #[test]
    fn empty_input() {
        assert_eq!(plot_steps(&[], &[], PlotOptions::default()), Err(PlotError::Empty));
    }

    #[test]
    fn deterministic() {
        let traces = [Trace { label: "a<b".into(), f: constant() }];
        let vl = [VLine { t: BigRational::from(BigInt::from(7)), label: "q".into() }];
        let a = plot_steps(&traces, &vl, PlotOptions::default()).unwrap();
        assert_eq!(a, plot_steps(&traces, &vl, PlotOptions::default()).unwrap());
        assert!(a.contains("a&lt;b"));
    }
}

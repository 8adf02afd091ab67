//! Chart-ready views of distributions: density series, quantile-quantile
//! series, CSV export, and self-contained SVG rendering.
//!
//! Rendering is pure string generation with fixed palettes and two-decimal
//! coordinates, so equal inputs produce byte-identical output.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::distribution::{
    transfer_threshold, CloneSizeDistribution, DistributionError,
};
use crate::rational::Rational;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const MARKER_COLOR: &str = "#d62728";

/// A labelled polyline: density share per clone size.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// `(size, weight share)` in ascending size order; shares sum to 1.
    pub points: Vec<(Rational, Rational)>,
}

/// One quantile-quantile sample: the `p`-quantile of both distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QQPoint {
    pub p: Rational,
    pub source: u32,
    pub target: u32,
}

/// A transferred threshold drawn as a marker on the Q-Q chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMarker {
    pub quantile: Rational,
    pub source: u32,
    pub target: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QQSeries {
    pub source_label: String,
    pub target_label: String,
    pub points: Vec<QQPoint>,
    pub marker: Option<TransferMarker>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReportError {
    NoData,
}

impl fmt::Display for ReportError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportError::NoData => write!(f, "nothing to chart: no points in any series"),
        }
    }
}

impl core::error::Error for ReportError {}

/// Chart geometry and axis labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartStyle {
    pub width: u32,
    pub height: u32,
    pub x_label: String,
    pub y_label: String,
}

impl ChartStyle {
    pub fn density() -> ChartStyle {
        ChartStyle {
            width: 640,
            height: 400,
            x_label: String::from("clone size (tokens)"),
            y_label: String::from("share of clone classes"),
        }
    }

    pub fn qq() -> ChartStyle {
        ChartStyle {
            width: 480,
            height: 480,
            x_label: String::from("source quantile (tokens)"),
            y_label: String::from("target quantile (tokens)"),
        }
    }
}

/// Normalized density of a distribution: each support point's share of the
/// total class weight.
pub fn pdf_series(
    dist: &CloneSizeDistribution,
    label: &str,
) -> Result<Series, DistributionError> {
    let w = dist.total_weight();
    if w == 0 {
        return Err(DistributionError::Empty);
    }
    let points = dist
        .totals()
        .iter()
        .map(|(&s, &v)| (Rational::from_integer(s as u64), Rational::new(v, w)))
        .collect();
    Ok(Series {
        label: String::from(label),
        points,
    })
}

/// Evaluates both distributions' quantiles over `grid`, optionally adding
/// a marker for a transferred threshold.
pub fn qq_series(
    source: &CloneSizeDistribution,
    target: &CloneSizeDistribution,
    grid: &[Rational],
    source_label: &str,
    target_label: &str,
    marker_threshold: Option<u32>,
) -> Result<QQSeries, DistributionError> {
    let mut points = Vec::with_capacity(grid.len());
    for &p in grid {
        points.push(QQPoint {
            p,
            source: source.quantile(p)?,
            target: target.quantile(p)?,
        });
    }
    let marker = match marker_threshold {
        Some(t) => {
            let r = transfer_threshold(source, t, target)?;
            Some(TransferMarker {
                quantile: r.source_quantile,
                source: t,
                target: r.target_threshold,
            })
        }
        None => None,
    };
    Ok(QQSeries {
        source_label: String::from(source_label),
        target_label: String::from(target_label),
        points,
        marker,
    })
}

/// The default Q-Q probability grid: 0.500 to 0.995 in steps of 0.005,
/// plus 0.999 for the far tail.
pub fn default_qq_grid() -> Vec<Rational> {
    let mut grid: Vec<Rational> = (100..=199).map(|k| Rational::new(k, 200)).collect();
    grid.push(Rational::new(999, 1000));
    grid
}

/// CSV with a `size,density` header; densities use the shortest decimal
/// form that round-trips.
pub fn series_csv(series: &Series) -> String {
    let mut out = String::from("size,density\n");
    for &(x, y) in &series.points {
        let _ = writeln!(out, "{},{}", x.to_f64(), y.to_f64());
    }
    out
}

/// CSV with a `p,q_source,q_target` header.
pub fn qq_csv(series: &QQSeries) -> String {
    let mut out = String::from("p,q_source,q_target\n");
    for pt in &series.points {
        let _ = writeln!(out, "{},{},{}", pt.p.to_f64(), pt.source, pt.target);
    }
    out
}

/// Maps data coordinates into a fixed pixel frame, y growing upward.
struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Frame {
    fn new(style: &ChartStyle, xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Frame {
        // Degenerate ranges still need a nonzero span to map through.
        let (xmin, xmax) = if xmax > xmin {
            (xmin, xmax)
        } else {
            (xmin, xmin + 1.0)
        };
        let (ymin, ymax) = if ymax > ymin {
            (ymin, ymax)
        } else {
            (ymin, ymin + 1.0)
        };
        Frame {
            x0: 60.0,
            y0: 24.0,
            w: style.width as f64 - 84.0,
            h: style.height as f64 - 72.0,
            xmin,
            xmax,
            ymin,
            ymax,
        }
    }

    fn x(&self, v: f64) -> f64 {
        self.x0 + (v - self.xmin) / (self.xmax - self.xmin) * self.w
    }

    fn y(&self, v: f64) -> f64 {
        self.y0 + self.h - (v - self.ymin) / (self.ymax - self.ymin) * self.h
    }
}

fn fmt_tick(v: f64) -> String {
    let mut s = alloc::format!("{v:.2}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

fn svg_open(out: &mut String, style: &ChartStyle) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"11\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n",
        w = style.width,
        h = style.height,
    );
}

fn svg_axes(out: &mut String, style: &ChartStyle, frame: &Frame) {
    let bottom = frame.y0 + frame.h;
    let right = frame.x0 + frame.w;
    let _ = write!(
        out,
        "<line x1=\"{x0:.2}\" y1=\"{b:.2}\" x2=\"{r:.2}\" y2=\"{b:.2}\" stroke=\"#333333\"/>\n\
         <line x1=\"{x0:.2}\" y1=\"{t:.2}\" x2=\"{x0:.2}\" y2=\"{b:.2}\" stroke=\"#333333\"/>\n",
        x0 = frame.x0,
        b = bottom,
        r = right,
        t = frame.y0,
    );
    for i in 0..=4u32 {
        let fx = frame.xmin + (frame.xmax - frame.xmin) * f64::from(i) / 4.0;
        let fy = frame.ymin + (frame.ymax - frame.ymin) * f64::from(i) / 4.0;
        let px = frame.x(fx);
        let py = frame.y(fy);
        let _ = write!(
            out,
            "<line x1=\"{px:.2}\" y1=\"{b:.2}\" x2=\"{px:.2}\" y2=\"{b2:.2}\" stroke=\"#333333\"/>\n\
             <text x=\"{px:.2}\" y=\"{ly:.2}\" text-anchor=\"middle\">{xt}</text>\n\
             <line x1=\"{x0:.2}\" y1=\"{py:.2}\" x2=\"{x1:.2}\" y2=\"{py:.2}\" stroke=\"#333333\"/>\n\
             <text x=\"{lx:.2}\" y=\"{ty:.2}\" text-anchor=\"end\">{yt}</text>\n",
            b = bottom,
            b2 = bottom + 4.0,
            ly = bottom + 16.0,
            xt = fmt_tick(fx),
            x0 = frame.x0 - 4.0,
            x1 = frame.x0,
            lx = frame.x0 - 7.0,
            ty = py + 4.0,
            yt = fmt_tick(fy),
        );
    }
    let cx = frame.x0 + frame.w / 2.0;
    let cy = frame.y0 + frame.h / 2.0;
    let _ = write!(
        out,
        "<text x=\"{cx:.2}\" y=\"{by:.2}\" text-anchor=\"middle\">{xl}</text>\n\
         <text x=\"14\" y=\"{cy:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {cy:.2})\">{yl}</text>\n",
        by = frame.y0 + frame.h + 34.0,
        xl = xml_escape(&style.x_label),
        yl = xml_escape(&style.y_label),
    );
}

fn svg_polyline(out: &mut String, frame: &Frame, pts: &[(f64, f64)], color: &str) {
    let _ = write!(out, "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"");
    for (i, &(x, y)) in pts.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{:.2},{:.2}", frame.x(x), frame.y(y));
    }
    out.push_str("\"/>\n");
}

fn svg_legend(out: &mut String, frame: &Frame, entries: &[(&str, &str)]) {
    let lx = frame.x0 + frame.w - 150.0;
    for (i, (label, color)) in entries.iter().enumerate() {
        let y = frame.y0 + 8.0 + 16.0 * i as f64;
        let _ = write!(
            out,
            "<line x1=\"{lx:.2}\" y1=\"{y:.2}\" x2=\"{x2:.2}\" y2=\"{y:.2}\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n\
             <text x=\"{tx:.2}\" y=\"{ty:.2}\">{t}</text>\n",
            x2 = lx + 18.0,
            tx = lx + 24.0,
            ty = y + 4.0,
            t = xml_escape(label),
        );
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// Renders one or more density series as a line chart.
pub fn density_chart_svg(series: &[Series], style: &ChartStyle) -> Result<String, ReportError> {
    let all: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .map(|&(x, y)| (x.to_f64(), y.to_f64()))
                .collect()
        })
        .collect();
    if all.iter().all(|pts| pts.is_empty()) {
        return Err(ReportError::NoData);
    }
    let flat = all.iter().flatten();
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymax = 0.0f64;
    for &(x, y) in flat {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymax = ymax.max(y);
    }
    let frame = Frame::new(style, xmin, xmax, 0.0, ymax);
    let mut out = String::new();
    svg_open(&mut out, style);
    svg_axes(&mut out, style, &frame);
    for (i, pts) in all.iter().enumerate() {
        if !pts.is_empty() {
            svg_polyline(&mut out, &frame, pts, PALETTE[i % PALETTE.len()]);
        }
    }
    let entries: Vec<(&str, &str)> = series
        .iter()
        .enumerate()
        .map(|(i, s)| (s.label.as_str(), PALETTE[i % PALETTE.len()]))
        .collect();
    svg_legend(&mut out, &frame, &entries);
    out.push_str("</svg>\n");
    Ok(out)
}

/// Renders a Q-Q series with a dashed identity line and, when present,
/// a red square marking the transferred threshold.
pub fn qq_chart_svg(series: &QQSeries, style: &ChartStyle) -> Result<String, ReportError> {
    if series.points.is_empty() {
        return Err(ReportError::NoData);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for pt in &series.points {
        lo = lo.min(pt.source as f64).min(pt.target as f64);
        hi = hi.max(pt.source as f64).max(pt.target as f64);
    }
    if let Some(m) = &series.marker {
        lo = lo.min(m.source as f64).min(m.target as f64);
        hi = hi.max(m.source as f64).max(m.target as f64);
    }
    let frame = Frame::new(style, lo, hi, lo, hi);
    let mut out = String::new();
    svg_open(&mut out, style);
    svg_axes(&mut out, style, &frame);
    let _ = writeln!(
        out,
        "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" \
         stroke=\"#999999\" stroke-dasharray=\"4 3\"/>",
        x1 = frame.x(frame.xmin),
        y1 = frame.y(frame.xmin),
        x2 = frame.x(frame.xmax),
        y2 = frame.y(frame.xmax),
    );
    let pts: Vec<(f64, f64)> = series
        .points
        .iter()
        .map(|pt| (pt.source as f64, pt.target as f64))
        .collect();
    svg_polyline(&mut out, &frame, &pts, PALETTE[0]);
    if let Some(m) = &series.marker {
        let _ = write!(
            out,
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"8\" height=\"8\" fill=\"{MARKER_COLOR}\"/>\n\
             <text x=\"{tx:.2}\" y=\"{ty:.2}\" fill=\"{MARKER_COLOR}\">{s} -&gt; {t}</text>\n",
            x = frame.x(m.source as f64) - 4.0,
            y = frame.y(m.target as f64) - 4.0,
            tx = frame.x(m.source as f64) + 8.0,
            ty = frame.y(m.target as f64) - 8.0,
            s = m.source,
            t = m.target,
        );
    }
    let entries = [(
        alloc::format!("{} vs {}", series.source_label, series.target_label),
        PALETTE[0],
    )];
    let refs: Vec<(&str, &str)> = entries.iter().map(|(l, c)| (l.as_str(), *c)).collect();
    svg_legend(&mut out, &frame, &refs);
    out.push_str("</svg>\n");
    Ok(out)
}

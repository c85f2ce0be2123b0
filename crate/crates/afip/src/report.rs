//! Report rendering: CSV tables and standalone SVG plots.
//!
//! Display convention follows the usual tables: FIP-scale values to
//! hundredths, Pearson to four decimals. Full precision is available behind
//! a flag so tests can compare exact values.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::equate::AfipTable;
use crate::qq::{LinearFit, QQPlot};
use crate::sample::HistogramBins;
use crate::{Error, Result};

fn create(path: &Path) -> Result<std::fs::File> {
    std::fs::File::create(path).map_err(|e| Error::io(path, e))
}

/// qq points as an `x,y` CSV, full precision.
pub fn write_qq_csv(q: &QQPlot, path: &Path) -> Result<()> {
    let mut f = create(path)?;
    let mut out = String::from("x,y\n");
    for &(x, y) in &q.points {
        out.push_str(&format!("{x},{y}\n"));
    }
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Histogram as a `bin_lo,bin_hi,count` CSV with empty interior bins listed.
pub fn write_histogram_csv(h: &HistogramBins, path: &Path) -> Result<()> {
    let mut f = create(path)?;
    let mut out = String::from("bin_lo,bin_hi,count\n");
    for (idx, count) in h.dense() {
        let (lo, hi) = h.bin_bounds(idx);
        out.push_str(&format!("{lo},{hi},{count}\n"));
    }
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Per-team Pearson table sorted by team code, with a trailing Average row.
/// Four decimal places.
pub fn render_pearson_table(results: &BTreeMap<String, f64>, path: &Path) -> Result<()> {
    if results.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut f = create(path)?;
    let mut out = String::from("team,pearson\n");
    for (team, r) in results {
        out.push_str(&format!("{team},{r:.4}\n"));
    }
    let avg = results.values().sum::<f64>() / results.len() as f64;
    out.push_str(&format!("Average,{avg:.4}\n"));
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// The seven-column per-pitcher report. `full_precision` switches off the
/// hundredths display rounding.
pub fn write_afip_csv(table: &AfipTable, full_precision: bool, path: &Path) -> Result<()> {
    let mut f = create(path)?;
    let fmt = |v: f64| {
        if full_precision {
            format!("{v}")
        } else {
            format!("{v:.2}")
        }
    };
    let mut out =
        String::from("player,slopeIntercept,equipercentile,FIP,SI difference,EQP difference,EQP - SI\n");
    for r in &table.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.pitcher_id,
            fmt(r.afip_si),
            fmt(r.afip_eqp),
            fmt(r.fip),
            fmt(r.si_diff),
            fmt(r.eqp_diff),
            fmt(r.eqp_minus_si),
        ));
    }
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 480.0;
const MARGIN: f64 = 60.0;

struct Scale {
    x0: f64,
    y0: f64,
    sx: f64,
    sy: f64,
}

impl Scale {
    fn from_ranges(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Scale {
        let xspan = (xmax - xmin).max(1e-12);
        let yspan = (ymax - ymin).max(1e-12);
        Scale {
            x0: xmin,
            y0: ymin,
            sx: (SVG_W - 2.0 * MARGIN) / xspan,
            sy: (SVG_H - 2.0 * MARGIN) / yspan,
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) * self.sx
    }

    fn py(&self, y: f64) -> f64 {
        // SVG y grows downward
        SVG_H - MARGIN - (y - self.y0) * self.sy
    }
}

/// Scatter of the qq points, the fitted line as a single polyline across the
/// x-range, axis labels, and the Pearson r annotated to four decimals.
pub fn render_qq_svg(q: &QQPlot, fit: &LinearFit, path: &Path) -> Result<()> {
    if q.points.len() < 2 {
        return Err(Error::DegenerateCorrelation);
    }
    let xmin = q.points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let xmax = q.points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let ymin = q.points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let ymax = q.points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let (fy0, fy1) = (fit.apply(xmin), fit.apply(xmax));
    let scale =
        Scale::from_ranges(xmin, xmax, ymin.min(fy0.min(fy1)), ymax.max(fy0.max(fy1)));

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" viewBox=\"0 0 {SVG_W} {SVG_H}\">\n"
    ));
    svg.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = SVG_H - MARGIN,
        r = SVG_W - MARGIN
    ));
    svg.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        t = MARGIN,
        b = SVG_H - MARGIN
    ));
    svg.push_str(&format!(
        "  <polyline fill=\"none\" stroke=\"red\" points=\"{:.2},{:.2} {:.2},{:.2}\"/>\n",
        scale.px(xmin),
        scale.py(fy0),
        scale.px(xmax),
        scale.py(fy1)
    ));
    for &(x, y) in &q.points {
        svg.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"steelblue\"/>\n",
            scale.px(x),
            scale.py(y)
        ));
    }
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">team (x)</text>\n",
        SVG_W / 2.0,
        SVG_H - MARGIN / 3.0
    ));
    svg.push_str(&format!(
        "  <text x=\"{x}\" y=\"{y}\" text-anchor=\"middle\" transform=\"rotate(-90 {x} {y})\">league average (y)</text>\n",
        x = MARGIN / 3.0,
        y = SVG_H / 2.0
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\">r={:.4}</text>\n",
        MARGIN + 10.0,
        MARGIN + 10.0,
        fit.pearson_r
    ));
    svg.push_str("</svg>\n");

    create(path)?.write_all(svg.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Histogram bars as an SVG bar chart.
pub fn render_histogram_svg(h: &HistogramBins, path: &Path) -> Result<()> {
    let bins = h.dense();
    if bins.is_empty() {
        return Err(Error::EmptySample);
    }
    let max_count = bins.iter().map(|b| b.1).max().unwrap().max(1) as f64;
    let (lo_idx, hi_idx) = (bins[0].0, bins[bins.len() - 1].0);
    let xmin = h.bin_bounds(lo_idx).0;
    let xmax = h.bin_bounds(hi_idx).1;
    let scale = Scale::from_ranges(xmin, xmax, 0.0, max_count);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" viewBox=\"0 0 {SVG_W} {SVG_H}\">\n"
    ));
    for (idx, count) in &bins {
        let (lo, hi) = h.bin_bounds(*idx);
        let x = scale.px(lo);
        let w = scale.px(hi) - x;
        let y = scale.py(*count as f64);
        let hgt = (SVG_H - MARGIN) - y;
        svg.push_str(&format!(
            "  <rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{hgt:.2}\" fill=\"steelblue\" stroke=\"white\"/>\n"
        ));
    }
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">opponent FIP</text>\n",
        SVG_W / 2.0,
        SVG_H - MARGIN / 3.0
    ));
    svg.push_str("</svg>\n");

    create(path)?.write_all(svg.as_bytes()).map_err(|e| Error::io(path, e))
}

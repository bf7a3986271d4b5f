//! Reliability-diagram data: calibration points, a marginal histogram of
//! the forecasts, and pointwise consistency bands for the isotonic
//! recalibration curve under the hypothesis of perfect calibration.
//!
//! Bands resample outcomes with forecasts held fixed: replicate r draws
//! x*ᵢ ~ Bernoulli(pᵢ) from stream (seed, r), refits PAV on (p, x*) and
//! evaluates the step function on the grid 0.00, 0.01, …, 1.00 restricted to
//! [min p, max p].

use std::fmt::Write as _;

use serde::Serialize;

use crate::binning::IsotonicStep;
use crate::domain::{BinaryForecastSeries, BinnedForecasts};
use crate::error::{Result, VerifyError};
use crate::numeric;
use crate::simulate::{calibrated_outcomes, replicate_map};

pub const HISTOGRAM_CELLS: usize = 20;
pub const GRID_STEPS: usize = 100;
pub const DEFAULT_LEVEL: f64 = 0.95;
pub const MIN_REPS: usize = 100;

pub const CSV_HEADER: &str = "section,p,value,lower,upper,count";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagramPoint {
    pub forecast: f64,
    pub frequency: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandPoint {
    pub forecast: f64,
    pub lower: f64,
    pub upper: f64,
}

impl BandPoint {
    pub fn contains(&self, value: f64) -> bool {
        value >= self.lower && value <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramData {
    pub points: Vec<DiagramPoint>,
    pub band: Vec<BandPoint>,
    /// Forecast counts over 20 equal cells of [0, 1].
    pub histogram: Vec<usize>,
    pub level: f64,
    pub reps: usize,
    pub seed: u64,
}

/// Grid points k/100 inside the observed forecast range.
pub fn band_grid(forecasts: &[f64]) -> Vec<f64> {
    let lo = forecasts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = forecasts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..=GRID_STEPS).map(|k| k as f64 / GRID_STEPS as f64).filter(|&g| g >= lo && g <= hi).collect()
}

pub fn histogram(forecasts: &[f64]) -> Vec<usize> {
    let mut counts = vec![0; HISTOGRAM_CELLS];
    for &p in forecasts {
        let cell = ((p * HISTOGRAM_CELLS as f64).floor() as usize).min(HISTOGRAM_CELLS - 1);
        counts[cell] += 1;
    }
    counts
}

/// Pointwise consistency band on `grid` from `reps` calibrated resamples.
pub fn consistency_band(forecasts: &[f64], grid: &[f64], level: f64, reps: usize, seed: u64) -> Vec<BandPoint> {
    if grid.is_empty() {
        return Vec::new();
    }
    let curves = replicate_map(seed, reps, |_, rng| {
        let outcomes = calibrated_outcomes(rng, forecasts);
        let step = IsotonicStep::fit(forecasts, &outcomes);
        grid.iter().map(|&g| step.evaluate(g)).collect::<Vec<f64>>()
    });
    let (lo_prob, hi_prob) = ((1.0 - level) / 2.0, (1.0 + level) / 2.0);
    let mut column = vec![0.0; reps];
    grid.iter()
        .enumerate()
        .map(|(k, &g)| {
            for (slot, curve) in column.iter_mut().zip(&curves) {
                *slot = curve[k];
            }
            column.sort_by(f64::total_cmp);
            BandPoint {
                forecast: g,
                lower: numeric::quantile_sorted(&column, lo_prob),
                upper: numeric::quantile_sorted(&column, hi_prob),
            }
        })
        .collect()
}

pub fn diagram_data(
    series: &BinaryForecastSeries,
    binned: &BinnedForecasts,
    level: f64,
    reps: usize,
    seed: u64,
) -> Result<DiagramData> {
    if !(level > 0.5 && level < 1.0) {
        return Err(VerifyError::BadLevel(level));
    }
    if reps < MIN_REPS {
        return Err(VerifyError::BadReps(reps));
    }
    if binned.total_count() != series.len() {
        return Err(VerifyError::SeriesMismatch { binned: binned.total_count(), series: series.len() });
    }
    let forecasts = series.forecasts();
    let points = binned
        .bins()
        .iter()
        .map(|b| DiagramPoint { forecast: b.mean_forecast, frequency: b.event_frequency, count: b.count })
        .collect();
    let grid = band_grid(forecasts);
    Ok(DiagramData {
        points,
        band: consistency_band(forecasts, &grid, level, reps, seed),
        histogram: histogram(forecasts),
        level,
        reps,
        seed,
    })
}

/// Share of band points whose curve value falls outside the band, skipping
/// the first and last grid points.
pub fn escape_fraction(band: &[BandPoint], curve: &IsotonicStep) -> Option<f64> {
    if band.len() < 3 {
        return None;
    }
    let interior = &band[1..band.len() - 1];
    let escapes = interior.iter().filter(|b| !b.contains(curve.evaluate(b.forecast))).count();
    Some(escapes as f64 / interior.len() as f64)
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 770.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 450.0;
const STRIP_TOP: f64 = 490.0;
const STRIP_BOTTOM: f64 = 560.0;

fn sx(p: f64) -> f64 {
    LEFT + p * (RIGHT - LEFT)
}

fn sy(v: f64) -> f64 {
    BOTTOM - v * (BOTTOM - TOP)
}

/// Standalone SVG: unit-square axes, diagonal, band, calibration points sized
/// by bin count, and a histogram strip of the forecasts.
pub fn render_svg(data: &DiagramData) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r##"<?xml version="1.0" encoding="UTF-8"?>"##);
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"##
    );
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"##);

    let degenerate = data.band.iter().all(|b| b.upper - b.lower <= 0.0);
    if !data.band.is_empty() && !degenerate {
        let mut pts: Vec<String> =
            data.band.iter().map(|b| format!("{:.2},{:.2}", sx(b.forecast), sy(b.upper))).collect();
        pts.extend(data.band.iter().rev().map(|b| format!("{:.2},{:.2}", sx(b.forecast), sy(b.lower))));
        let _ = writeln!(
            s,
            r##"<polygon class="band" points="{}" fill="#9ecae1" fill-opacity="0.5" stroke="none"/>"##,
            pts.join(" ")
        );
    }

    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"##,
        RIGHT - LEFT,
        BOTTOM - TOP
    );
    for k in 0..=5 {
        let v = k as f64 / 5.0;
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{v:.1}</text>"##,
            BOTTOM + 5.0,
            BOTTOM + 20.0,
            x = sx(v)
        );
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.1}</text>"##,
            LEFT - 5.0,
            LEFT - 8.0,
            sy(v) + 4.0,
            y = sy(v),
        );
    }
    let _ = writeln!(
        s,
        r##"<line class="diagonal" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 4"/>"##,
        sx(0.0),
        sy(0.0),
        sx(1.0),
        sy(1.0)
    );

    if !data.points.is_empty() {
        let line: Vec<String> =
            data.points.iter().map(|p| format!("{:.2},{:.2}", sx(p.forecast), sy(p.frequency))).collect();
        let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#d62728"/>"##, line.join(" "));
        let max_count = data.points.iter().map(|p| p.count).max().unwrap_or(1).max(1) as f64;
        for p in &data.points {
            let r = 3.0 + 9.0 * (p.count as f64 / max_count).sqrt();
            let _ = writeln!(
                s,
                r##"<circle class="point" cx="{:.2}" cy="{:.2}" r="{r:.2}" fill="#d62728" fill-opacity="0.7"/>"##,
                sx(p.forecast),
                sy(p.frequency)
            );
        }
    }

    let max_cell = data.histogram.iter().copied().max().unwrap_or(0).max(1) as f64;
    let cell_width = (RIGHT - LEFT) / data.histogram.len().max(1) as f64;
    let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{STRIP_BOTTOM}" x2="{RIGHT}" y2="{STRIP_BOTTOM}" stroke="black"/>"##);
    for (k, &count) in data.histogram.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let h = (STRIP_BOTTOM - STRIP_TOP) * count as f64 / max_cell;
        let _ = writeln!(
            s,
            r##"<rect class="histogram" x="{:.2}" y="{:.2}" width="{:.2}" height="{h:.2}" fill="#7f7f7f"/>"##,
            LEFT + k as f64 * cell_width,
            STRIP_BOTTOM - h,
            cell_width - 1.0
        );
    }
    let _ = writeln!(
        s,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="middle">forecast probability</text>"##,
        (LEFT + RIGHT) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r##"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">observed frequency</text>"##,
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );
    s.push_str("</svg>\n");
    s
}

/// Points, band and histogram sections, six decimals, fixed header.
pub fn export_csv(data: &DiagramData) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for p in &data.points {
        let _ = writeln!(s, "points,{:.6},{:.6},,,{}", p.forecast, p.frequency, p.count);
    }
    for b in &data.band {
        let _ = writeln!(s, "band,{:.6},,{:.6},{:.6},", b.forecast, b.lower, b.upper);
    }
    let width = 1.0 / data.histogram.len().max(1) as f64;
    for (k, &count) in data.histogram.iter().enumerate() {
        let _ = writeln!(s, "histogram,{:.6},,,,{count}", (k as f64 + 0.5) * width);
    }
    s
}

/// The three tables of an exported diagram CSV.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagramTables {
    pub points: Vec<DiagramPoint>,
    pub band: Vec<BandPoint>,
    pub histogram: Vec<usize>,
}

/// Reads back [`export_csv`] output.
pub fn parse_diagram_csv(text: &str) -> Result<DiagramTables> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let mut tables = DiagramTables::default();
    for record in rdr.records() {
        let record = record.map_err(|e| VerifyError::BadRecord {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |reason: &str| VerifyError::BadRecord { line, reason: reason.to_string() };
        let num = |k: usize| -> Result<f64> {
            record.get(k).and_then(|v| v.parse().ok()).ok_or_else(|| bad("expected a number"))
        };
        let count = |k: usize| -> Result<usize> {
            record.get(k).and_then(|v| v.parse().ok()).ok_or_else(|| bad("expected a count"))
        };
        match record.get(0) {
            Some("points") => {
                tables.points.push(DiagramPoint { forecast: num(1)?, frequency: num(2)?, count: count(5)? })
            }
            Some("band") => tables.band.push(BandPoint { forecast: num(1)?, lower: num(3)?, upper: num(4)? }),
            Some("histogram") => tables.histogram.push(count(5)?),
            _ => return Err(bad("unknown section")),
        }
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binning::{bin_fixed, pav_calibrate};
    use crate::simulate::{generate, CoxParameters, ForecastLaw};

    fn calibrated(n: usize, seed: u64) -> BinaryForecastSeries {
        generate(n, CoxParameters::CALIBRATED, ForecastLaw::Uniform { lo: 0.02, hi: 0.98 }, seed).unwrap()
    }

    #[test]
    fn parameter_validation() {
        let s = calibrated(50, 1);
        let b = pav_calibrate(&s);
        assert_eq!(diagram_data(&s, &b, 0.5, 200, 1), Err(VerifyError::BadLevel(0.5)));
        assert_eq!(diagram_data(&s, &b, 1.0, 200, 1), Err(VerifyError::BadLevel(1.0)));
        assert_eq!(diagram_data(&s, &b, 0.9, 99, 1), Err(VerifyError::BadReps(99)));
    }

    #[test]
    fn structure_and_invariants() {
        let s = calibrated(300, 2);
        let d = diagram_data(&s, &pav_calibrate(&s), 0.95, 200, 4).unwrap();
        assert_eq!(d.histogram.iter().sum::<usize>(), 300);
        assert_eq!(d.histogram.len(), HISTOGRAM_CELLS);
        assert!(d.band.iter().all(|b| 0.0 <= b.lower && b.lower <= b.upper && b.upper <= 1.0));
        let lo = s.forecasts().iter().copied().fold(1.0, f64::min);
        assert!(d.band.iter().all(|b| b.forecast >= lo));
        assert!(d.points.windows(2).all(|w| w[0].frequency <= w[1].frequency));
        assert!(d.points.iter().all(|p| (0.0..=1.0).contains(&p.forecast) && (0.0..=1.0).contains(&p.frequency)));
    }

    #[test]
    fn sharp_forecasts_give_degenerate_bands() {
        let p = vec![0.0, 1.0, 1.0, 0.0, 1.0];
        let s = BinaryForecastSeries::new(p.clone(), p).unwrap();
        let d = diagram_data(&s, &pav_calibrate(&s), 0.95, 100, 3).unwrap();
        assert_eq!(d.points.len(), 2);
        assert!(d.points.iter().all(|pt| pt.forecast == pt.frequency));
        assert_eq!(d.band.len(), 101);
        assert!(d.band.iter().all(|b| b.lower == b.upper));
        assert_eq!((d.band[0].lower, d.band[100].upper), (0.0, 1.0));
        let svg = render_svg(&d);
        assert!(!svg.contains("<polygon"));
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let s = calibrated(200, 5);
        let b = pav_calibrate(&s);
        let a = diagram_data(&s, &b, 0.9, 150, 77).unwrap();
        assert_eq!(a, diagram_data(&s, &b, 0.9, 150, 77).unwrap());
        assert_ne!(a.band, diagram_data(&s, &b, 0.9, 150, 78).unwrap().band);
    }

    #[test]
    fn svg_is_deterministic_and_rooted() {
        let s = calibrated(120, 6);
        let d = diagram_data(&s, &bin_fixed(&s, &[0.25, 0.5, 0.75]).unwrap(), 0.95, 100, 1).unwrap();
        let svg = render_svg(&d);
        assert_eq!(svg, render_svg(&d));
        let body = svg.lines().nth(1).unwrap();
        assert!(body.starts_with("<svg "));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), d.points.len());
        assert!(svg.contains("<polygon"));
    }

    #[test]
    fn csv_sections() {
        let p = vec![0.3, 0.32, 0.35];
        let s = BinaryForecastSeries::new(p, vec![1.0, 0.0, 0.0]).unwrap();
        let d = diagram_data(&s, &bin_fixed(&s, &[0.5]).unwrap(), 0.95, 100, 1).unwrap();
        let csv = export_csv(&d);
        assert!(csv.starts_with("section,p,value,lower,upper,count\n"));
        assert_eq!(csv.lines().filter(|l| l.starts_with("points,")).count(), 1);
        assert_eq!(csv.lines().filter(|l| l.starts_with("histogram,")).count(), 20);

        let wide = calibrated(400, 9);
        let full = BinaryForecastSeries::new(
            wide.forecasts().iter().copied().chain([0.0, 1.0]).collect(),
            wide.outcomes().iter().copied().chain([0.0, 1.0]).collect(),
        )
        .unwrap();
        let d = diagram_data(&full, &pav_calibrate(&full), 0.95, 100, 1).unwrap();
        let csv = export_csv(&d);
        assert_eq!(csv.lines().filter(|l| l.starts_with("band,")).count(), 101);

        let back = parse_diagram_csv(&csv).unwrap();
        assert_eq!(back.histogram, d.histogram);
        assert_eq!(back.band.len(), d.band.len());
        for (a, b) in back.band.iter().zip(&d.band) {
            assert!((a.lower - b.lower).abs() <= 5e-7 && (a.upper - b.upper).abs() <= 5e-7);
        }
        for (a, b) in back.points.iter().zip(&d.points) {
            assert!((a.forecast - b.forecast).abs() <= 5e-7 && (a.frequency - b.frequency).abs() <= 5e-7);
            assert_eq!(a.count, b.count);
        }
    }

    #[test]
    fn escape_fraction_counts_interior_points() {
        let band: Vec<BandPoint> =
            (0..5).map(|k| BandPoint { forecast: k as f64 * 0.25, lower: 0.4, upper: 0.6 }).collect();
        let inside = IsotonicStep::fit(&[0.0, 1.0], &[0.5, 0.5]);
        assert_eq!(escape_fraction(&band, &inside), Some(0.0));
        let outside = IsotonicStep::fit(&[0.0, 0.6], &[0.0, 1.0]);
        // 0.25, 0.5 evaluate to 0 and escape; 0.75 evaluates to 1 and escapes
        assert_eq!(escape_fraction(&band, &outside), Some(1.0));
    }
}

//! Partitioning forecasts into bins: fixed thresholds, empirical quantiles,
//! or the maximal constant blocks of an isotonic (PAV) fit.

use std::str::FromStr;

use crate::domain::{Bin, BinaryForecastSeries, BinnedForecasts, BinningMethod};
use crate::error::{Result, VerifyError};
use crate::numeric;

/// Named threshold sets for home win, draw and away win forecasts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Ten equal bins.
    Hwin10,
    /// Breakpoints 0.10, 0.15, 0.20, 0.25, 0.35.
    Draw5,
    /// Seven 0.1-wide bins up to 0.7, then [0.7, 1].
    Awin8,
}

impl Preset {
    pub fn thresholds(self) -> Vec<f64> {
        match self {
            Preset::Hwin10 => vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
            Preset::Draw5 => vec![0.10, 0.15, 0.20, 0.25, 0.35],
            Preset::Awin8 => vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Hwin10 => "hwin10",
            Preset::Draw5 => "draw5",
            Preset::Awin8 => "awin8",
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "hwin10" => Ok(Preset::Hwin10),
            "draw5" => Ok(Preset::Draw5),
            "awin8" => Ok(Preset::Awin8),
            other => Err(format!("unknown preset `{other}`")),
        }
    }
}

/// A binning recipe, applied per series.
#[derive(Debug, Clone, PartialEq)]
pub enum Binning {
    Fixed(Vec<f64>),
    Quantile(usize),
    Pav,
}

impl Binning {
    pub fn preset(preset: Preset) -> Self {
        Binning::Fixed(preset.thresholds())
    }

    pub fn apply(&self, series: &BinaryForecastSeries) -> Result<BinnedForecasts> {
        match self {
            Binning::Fixed(thresholds) => bin_fixed(series, thresholds),
            Binning::Quantile(count) => bin_quantile(series, *count),
            Binning::Pav => Ok(pav_calibrate(series)),
        }
    }
}

/// Bins `[0, t₁), [t₁, t₂), …, [t_k, 1]`. Empty bins are dropped.
pub fn bin_fixed(series: &BinaryForecastSeries, thresholds: &[f64]) -> Result<BinnedForecasts> {
    let ascending = thresholds.windows(2).all(|w| w[0] < w[1]);
    let inside = thresholds.iter().all(|&t| t > 0.0 && t < 1.0);
    if !ascending || !inside {
        return Err(VerifyError::NonAscendingThresholds);
    }
    Ok(bin_by_breaks(series, thresholds, BinningMethod::Fixed))
}

/// Breakpoints at the type-7 quantiles k/D of the forecasts; duplicate
/// breakpoints are merged, so fewer than D bins may result.
pub fn bin_quantile(series: &BinaryForecastSeries, count: usize) -> Result<BinnedForecasts> {
    if count == 0 || count > series.len() {
        return Err(VerifyError::BadBinCount { bins: count, n: series.len() });
    }
    let mut sorted = series.forecasts().to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut breaks: Vec<f64> = (1..count)
        .map(|k| numeric::quantile_sorted(&sorted, k as f64 / count as f64))
        .filter(|&b| b > 0.0 && b < 1.0)
        .collect();
    breaks.dedup();
    Ok(bin_by_breaks(series, &breaks, BinningMethod::Quantile))
}

fn bin_by_breaks(series: &BinaryForecastSeries, breaks: &[f64], method: BinningMethod) -> BinnedForecasts {
    let slots = breaks.len() + 1;
    let mut count = vec![0usize; slots];
    let mut sum_p = vec![0.0; slots];
    let mut sum_x = vec![0.0; slots];
    let membership: Vec<usize> = series
        .pairs()
        .map(|(p, x)| {
            let d = breaks.partition_point(|&b| b <= p);
            count[d] += 1;
            sum_p[d] += p;
            sum_x[d] += x;
            d
        })
        .collect();

    let edge = |k: usize| match k {
        0 => 0.0,
        k if k > breaks.len() => 1.0,
        k => breaks[k - 1],
    };
    let mut bins = Vec::new();
    let mut freq = vec![0.0; slots];
    for d in (0..slots).filter(|&d| count[d] > 0) {
        let n = count[d] as f64;
        freq[d] = sum_x[d] / n;
        bins.push(Bin {
            lower: edge(d),
            upper: edge(d + 1),
            mean_forecast: sum_p[d] / n,
            event_frequency: freq[d],
            count: count[d],
        });
    }
    let recalibrated = membership.iter().map(|&d| freq[d]).collect();
    BinnedForecasts { bins, recalibrated, method }
}

#[derive(Debug, Clone, Copy)]
struct Block {
    /// First position in sorted order.
    start: usize,
    /// One past the last position in sorted order.
    end: usize,
    sum_x: f64,
    sum_y: f64,
}

impl Block {
    fn weight(&self) -> f64 {
        (self.end - self.start) as f64
    }

    fn mean(&self) -> f64 {
        self.sum_y / self.weight()
    }
}

/// Pool-adjacent-violators on `y` as a function of `x`.
///
/// Returns the sort order (by x, then original index) and the maximal
/// constant blocks over it. Equal x values always share a block, so the fit
/// is a function of x; blocks with equal means are merged, so block values
/// strictly increase.
fn pav_blocks(x: &[f64], y: &[f64]) -> (Vec<usize>, Vec<Block>) {
    debug_assert_eq!(x.len(), y.len());
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));

    let mut stack: Vec<Block> = Vec::with_capacity(x.len());
    let mut pos = 0;
    while pos < order.len() {
        // tied forecasts enter as one pooled block
        let mut end = pos + 1;
        while end < order.len() && x[order[end]] == x[order[pos]] {
            end += 1;
        }
        let mut block = Block {
            start: pos,
            end,
            sum_x: order[pos..end].iter().map(|&i| x[i]).sum(),
            sum_y: order[pos..end].iter().map(|&i| y[i]).sum(),
        };
        while let Some(prev) = stack.last() {
            // prev.mean >= block.mean, cross-multiplied to stay exact on counts
            if prev.sum_y * block.weight() >= block.sum_y * prev.weight() {
                let prev = stack.pop().unwrap();
                block = Block {
                    start: prev.start,
                    end: block.end,
                    sum_x: prev.sum_x + block.sum_x,
                    sum_y: prev.sum_y + block.sum_y,
                };
            } else {
                break;
            }
        }
        stack.push(block);
        pos = end;
    }
    (order, stack)
}

/// Least-squares non-decreasing fit of `y` on `x`, returned in input order.
pub fn isotonic_fit(x: &[f64], y: &[f64]) -> Vec<f64> {
    let (order, blocks) = pav_blocks(x, y);
    let mut fitted = vec![0.0; x.len()];
    for block in &blocks {
        let value = block.mean();
        for &i in &order[block.start..block.end] {
            fitted[i] = value;
        }
    }
    fitted
}

/// Isotonic recalibration; each maximal constant block becomes a bin.
pub fn pav_calibrate(series: &BinaryForecastSeries) -> BinnedForecasts {
    let p = series.forecasts();
    let (order, blocks) = pav_blocks(p, series.outcomes());
    let mut recalibrated = vec![0.0; p.len()];
    let mut bins = Vec::with_capacity(blocks.len());
    for (d, block) in blocks.iter().enumerate() {
        let value = block.mean();
        for &i in &order[block.start..block.end] {
            recalibrated[i] = value;
        }
        let lower = if d == 0 { 0.0 } else { p[order[block.start]] };
        let upper = blocks.get(d + 1).map_or(1.0, |next| p[order[next.start]]);
        bins.push(Bin {
            lower,
            upper,
            mean_forecast: block.sum_x / block.weight(),
            event_frequency: value,
            count: block.end - block.start,
        });
    }
    BinnedForecasts { bins, recalibrated, method: BinningMethod::Pav }
}

/// Right-continuous step function through the PAV blocks, for evaluation
/// between observed forecasts.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotonicStep {
    /// (smallest forecast in block, block value), ascending.
    knots: Vec<(f64, f64)>,
}

impl IsotonicStep {
    pub fn fit(x: &[f64], y: &[f64]) -> Self {
        assert!(!x.is_empty(), "isotonic fit of an empty sample");
        let (order, blocks) = pav_blocks(x, y);
        let knots = blocks.iter().map(|b| (x[order[b.start]], b.mean())).collect();
        Self { knots }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Value of the last block starting at or below `at` (the first block
    /// below the observed range).
    pub fn evaluate(&self, at: f64) -> f64 {
        let k = self.knots.partition_point(|&(start, _)| start <= at);
        self.knots[k.saturating_sub(1)].1
    }
}

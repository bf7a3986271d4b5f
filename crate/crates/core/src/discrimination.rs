//! Separation between the forecast distributions of events and non-events:
//! class means, Wilcoxon rank-sum, two-sample Kolmogorov–Smirnov and the
//! concordance (C) statistic.

use serde::Serialize;

use crate::domain::{BinaryForecastSeries, Flag};
use crate::error::{Result, VerifyError};
use crate::inference::{normal_sf, Sidedness, TestResult};
use crate::numeric;

/// Largest pooled sample for which the exact rank-sum test is offered.
pub const EXACT_WILCOXON_LIMIT: usize = 12;

const KOLMOGOROV_TERMS: usize = 100;

/// min, Q1, median, Q3, max (type-7 quantiles).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl FiveNumber {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q = |p| numeric::quantile_sorted(&sorted, p);
        Some(FiveNumber { min: sorted[0], q1: q(0.25), median: q(0.5), q3: q(0.75), max: sorted[sorted.len() - 1] })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscriminationSummary {
    pub n0: usize,
    pub n1: usize,
    /// Mean forecast among non-events.
    pub m0: f64,
    /// Mean forecast among events.
    pub m1: f64,
    /// m1 − m0.
    pub diff: f64,
    /// Absent when every forecast is tied.
    pub wilcoxon: Option<TestResult>,
    pub ks: TestResult,
    pub c_statistic: f64,
    pub five_number_0: FiveNumber,
    pub five_number_1: FiveNumber,
    pub flags: Vec<Flag>,
}

fn classes(series: &BinaryForecastSeries) -> Result<(Vec<f64>, Vec<f64>)> {
    let (zero, one) = series.by_class();
    if zero.is_empty() || one.is_empty() {
        return Err(VerifyError::DegenerateClass);
    }
    Ok((zero, one))
}

pub fn discrimination_summary(series: &BinaryForecastSeries) -> Result<DiscriminationSummary> {
    let (zero, one) = classes(series)?;
    let m0 = numeric::mean(&zero);
    let m1 = numeric::mean(&one);
    let mut flags = Vec::new();
    let wilcoxon = match wilcoxon_test(series) {
        Ok(t) => Some(t),
        Err(VerifyError::ZeroVariance) => {
            flags.push(Flag::ZeroVariance);
            None
        }
        Err(e) => return Err(e),
    };
    Ok(DiscriminationSummary {
        n0: zero.len(),
        n1: one.len(),
        m0,
        m1,
        diff: m1 - m0,
        wilcoxon,
        ks: ks_test(series)?,
        c_statistic: c_statistic(series)?,
        five_number_0: FiveNumber::of(&zero).expect("nonempty class"),
        five_number_1: FiveNumber::of(&one).expect("nonempty class"),
        flags,
    })
}

/// Rank sum of the events' forecasts (midranks) and the tie term Σ(t³ − t).
fn rank_sum(series: &BinaryForecastSeries) -> (f64, f64) {
    let ranks = numeric::midranks(series.forecasts());
    let w = ranks.iter().zip(series.outcomes()).filter(|(_, &x)| x == 1.0).map(|(r, _)| r).sum();
    let mut sorted = series.forecasts().to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0.0;
    for run in sorted.chunk_by(|a, b| a == b) {
        let t = run.len() as f64;
        ties += t * t * t - t;
    }
    (w, ties)
}

/// Normal approximation to the rank-sum test with tie-corrected variance and
/// no continuity correction. One-sided: events forecast higher.
pub fn wilcoxon_test(series: &BinaryForecastSeries) -> Result<TestResult> {
    let (zero, one) = classes(series)?;
    let (n0, n1) = (zero.len() as f64, one.len() as f64);
    let n = n0 + n1;
    let (w, ties) = rank_sum(series);
    let mean = n1 * (n + 1.0) / 2.0;
    let variance = n0 * n1 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if variance.is_nan() || variance <= 0.0 {
        return Err(VerifyError::ZeroVariance);
    }
    let z = (w - mean) / variance.sqrt();
    Ok(TestResult {
        statistic: z,
        df: None,
        p_value: normal_sf(z),
        sidedness: Sidedness::OneSidedUpper,
        floored: false,
    })
}

/// Exact upper-tail rank-sum test by enumerating every assignment of
/// midranks to the event class. Statistic is W.
pub fn wilcoxon_exact_test(series: &BinaryForecastSeries) -> Result<TestResult> {
    let (_, one) = classes(series)?;
    if series.len() > EXACT_WILCOXON_LIMIT {
        return Err(VerifyError::TooLargeForExact { n: series.len(), limit: EXACT_WILCOXON_LIMIT });
    }
    let (w, _) = rank_sum(series);
    let ranks = numeric::midranks(series.forecasts());
    let k = one.len();
    let n = ranks.len();
    let (mut total, mut extreme) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let s: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
        total += 1;
        if s >= w - 1e-9 {
            extreme += 1;
        }
    }
    Ok(TestResult {
        statistic: w,
        df: None,
        p_value: extreme as f64 / total as f64,
        sidedness: Sidedness::OneSidedUpper,
        floored: false,
    })
}

/// Largest gap between the two empirical CDFs.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let t = a[i].min(b[j]);
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic Kolmogorov survival P(K > λ) = 2 Σ (−1)^(k−1) exp(−2k²λ²),
/// truncated at 100 terms and clipped to [0, 1].
///
/// Below λ = 1 the alternating series converges too slowly, so the CDF is
/// taken from the equivalent theta-function form
/// √(2π)/λ Σ exp(−(2k − 1)²π²/(8λ²)) instead.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    use std::f64::consts::PI;
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        let cdf: f64 = (1..=KOLMOGOROV_TERMS)
            .map(|k| {
                let odd = (2 * k - 1) as f64;
                (-odd * odd * PI * PI / (8.0 * lambda * lambda)).exp()
            })
            .sum::<f64>()
            * (2.0 * PI).sqrt()
            / lambda;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut total = 0.0;
    for k in 1..=KOLMOGOROV_TERMS {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let k = k as f64;
        total += sign * (-2.0 * k * k * lambda * lambda).exp();
    }
    (2.0 * total).clamp(0.0, 1.0)
}

/// Two-sample KS test of the class-conditional forecast distributions.
pub fn ks_test(series: &BinaryForecastSeries) -> Result<TestResult> {
    let (zero, one) = classes(series)?;
    let d = ks_statistic(&zero, &one);
    let (n0, n1) = (zero.len() as f64, one.len() as f64);
    let effective = n0 * n1 / (n0 + n1);
    let p_value = if d == 0.0 { 1.0 } else { kolmogorov_sf(effective.sqrt() * d) };
    Ok(TestResult { statistic: d, df: None, p_value, sidedness: Sidedness::TwoSided, floored: false })
}

/// Share of (event, non-event) pairs where the event got the higher
/// forecast, ties counting one half. Computed from the rank sum.
pub fn c_statistic(series: &BinaryForecastSeries) -> Result<f64> {
    let (zero, one) = classes(series)?;
    let (w, _) = rank_sum(series);
    let n1 = one.len() as f64;
    let u = w - n1 * (n1 + 1.0) / 2.0;
    Ok(u / (zero.len() as f64 * n1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_class(zero: &[f64], one: &[f64]) -> BinaryForecastSeries {
        let mut p = zero.to_vec();
        p.extend_from_slice(one);
        let mut x = vec![0.0; zero.len()];
        x.extend(std::iter::repeat_n(1.0, one.len()));
        BinaryForecastSeries::new(p, x).unwrap()
    }

    fn brute_force_c(zero: &[f64], one: &[f64]) -> f64 {
        let mut score = 0.0;
        for &a in one {
            for &b in zero {
                score += if a > b {
                    1.0
                } else if a == b {
                    0.5
                } else {
                    0.0
                };
            }
        }
        score / (zero.len() * one.len()) as f64
    }

    #[test]
    fn summary_means() {
        let s = two_class(&[0.2, 0.4], &[0.6, 0.8]);
        let d = discrimination_summary(&s).unwrap();
        assert!((d.m0 - 0.3).abs() < 1e-15);
        assert!((d.m1 - 0.7).abs() < 1e-15);
        assert!((d.diff - 0.4).abs() < 1e-15);
        assert_eq!((d.n0, d.n1), (2, 2));
        assert!((d.five_number_0.median - 0.3).abs() < 1e-15);
    }

    #[test]
    fn identical_classes_have_no_difference() {
        let d = discrimination_summary(&two_class(&[0.3, 0.5], &[0.5, 0.3])).unwrap();
        assert_eq!(d.diff, 0.0);
        assert_eq!(d.c_statistic, 0.5);
        let w = d.wilcoxon.unwrap();
        assert_eq!((w.statistic, w.p_value), (0.0, 0.5));
        assert_eq!((d.ks.statistic, d.ks.p_value), (0.0, 1.0));
    }

    #[test]
    fn wilcoxon_normal_approximation() {
        // W = 3 + 4, mean 5, variance 2·2·5/12
        let t = wilcoxon_test(&two_class(&[0.2, 0.4], &[0.6, 0.8])).unwrap();
        assert!((t.statistic - 2.0 / (20.0f64 / 12.0).sqrt()).abs() < 1e-12);
        assert!((t.statistic - 1.549).abs() < 1e-3);
        assert!((t.p_value - 0.0607).abs() < 1e-4);
        assert_eq!(t.sidedness, Sidedness::OneSidedUpper);
    }

    #[test]
    fn wilcoxon_exact_tail() {
        // one of C(4, 2) = 6 assignments reaches W = 7
        let t = wilcoxon_exact_test(&two_class(&[0.2, 0.4], &[0.6, 0.8])).unwrap();
        assert_eq!(t.statistic, 7.0);
        assert!((t.p_value - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn wilcoxon_all_tied() {
        let s = two_class(&[0.4, 0.4], &[0.4]);
        assert_eq!(wilcoxon_test(&s), Err(VerifyError::ZeroVariance));
        let d = discrimination_summary(&s).unwrap();
        assert!(d.wilcoxon.is_none());
        assert_eq!(d.flags, vec![Flag::ZeroVariance]);
    }

    #[test]
    fn ks_examples() {
        assert_eq!(ks_test(&two_class(&[0.2, 0.4], &[0.6, 0.8])).unwrap().statistic, 1.0);
        assert_eq!(ks_test(&two_class(&[0.2, 0.6], &[0.4, 0.8])).unwrap().statistic, 0.5);
        let same = ks_test(&two_class(&[0.1, 0.7], &[0.1, 0.7])).unwrap();
        assert_eq!((same.statistic, same.p_value), (0.0, 1.0));
    }

    #[test]
    fn kolmogorov_tail_reference_points() {
        // P(K > 1.36) ≈ 0.049, P(K > 1.0) ≈ 0.270
        assert!((kolmogorov_sf(1.36) - 0.0494).abs() < 5e-4);
        assert!((kolmogorov_sf(1.0) - 0.2700).abs() < 5e-4);
        assert_eq!(kolmogorov_sf(0.01), 1.0);
        // both branches agree where they meet
        let below = kolmogorov_sf(1.0 - 1e-12);
        assert!((below - kolmogorov_sf(1.0)).abs() < 1e-9);
        assert!((kolmogorov_sf(0.5) - 0.9639).abs() < 5e-4);
    }

    #[test]
    fn c_statistic_examples() {
        assert_eq!(c_statistic(&two_class(&[0.2, 0.4], &[0.6, 0.8])).unwrap(), 1.0);
        assert_eq!(c_statistic(&two_class(&[0.5], &[0.5])).unwrap(), 0.5);
        assert_eq!(c_statistic(&two_class(&[0.3, 0.5], &[0.5, 0.7])).unwrap(), 0.875);
        assert_eq!(brute_force_c(&[0.3, 0.5], &[0.5, 0.7]), 0.875);
    }

    #[test]
    fn degenerate_class() {
        let s = BinaryForecastSeries::new(vec![0.2, 0.3], vec![1.0, 1.0]).unwrap();
        assert_eq!(c_statistic(&s), Err(VerifyError::DegenerateClass));
        assert_eq!(ks_test(&s), Err(VerifyError::DegenerateClass));
        assert_eq!(discrimination_summary(&s), Err(VerifyError::DegenerateClass));
    }

    #[test]
    fn monotone_transform_invariance() {
        let zero = [0.12, 0.3, 0.3, 0.45, 0.61];
        let one = [0.3, 0.52, 0.7, 0.88];
        let a = two_class(&zero, &one);
        let f = |p: f64| p.powi(3);
        let b = two_class(&zero.map(f), &one.map(f));
        assert_eq!(wilcoxon_test(&a).unwrap().statistic, wilcoxon_test(&b).unwrap().statistic);
        assert_eq!(ks_test(&a).unwrap().statistic, ks_test(&b).unwrap().statistic);
        assert_eq!(c_statistic(&a).unwrap(), c_statistic(&b).unwrap());
        assert_eq!(c_statistic(&a).unwrap(), brute_force_c(&zero, &one));
    }
}

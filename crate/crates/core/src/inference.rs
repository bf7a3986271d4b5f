//! Reliability tests: Spiegelhalter's Brier-score test, the Cox logistic
//! calibration regression (Wald and deviance tests) and the ignorance
//! likelihood-ratio test.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::domain::BinaryForecastSeries;
use crate::error::{Result, SeparationDirection, VerifyError};
use crate::numeric::{self, logistic, logit};
use crate::scoring::ignorance;
use crate::simulate::LOGIT_EPSILON;

/// IRLS stops when the deviance moves less than this.
pub const DEVIANCE_TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 50;
/// |linear predictor| beyond this during IRLS is treated as separation.
pub const SEPARATION_BOUND: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    TwoSided,
    /// Upper tail of a normal statistic.
    OneSidedUpper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    /// Chi-square degrees of freedom; `None` for normal statistics.
    pub df: Option<f64>,
    pub p_value: f64,
    pub sidedness: Sidedness,
    /// Statistic was slightly negative from rounding and reported as 0.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub floored: bool,
}

impl TestResult {
    pub fn chi_square(statistic: f64, df: f64) -> Self {
        TestResult {
            statistic,
            df: Some(df),
            p_value: chi_square_sf(statistic, df),
            sidedness: Sidedness::TwoSided,
            floored: false,
        }
    }
}

/// P(χ²_df > statistic).
pub fn chi_square_sf(statistic: f64, df: f64) -> f64 {
    if statistic <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df).expect("positive degrees of freedom");
    dist.sf(statistic).clamp(0.0, 1.0)
}

/// P(Z > z) for a standard normal Z.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpiegelhalterResult {
    /// Standardized statistic Z.
    pub z: f64,
    /// Z² against χ²₁.
    pub test: TestResult,
}

/// Z = Σ(x − p)(1 − 2p) / √(Σ(1 − 2p)² p(1 − p)), reported as Z² on one
/// degree of freedom.
pub fn spiegelhalter_test(series: &BinaryForecastSeries) -> Result<SpiegelhalterResult> {
    let numerator = numeric::sum(series.pairs().map(|(p, x)| (x - p) * (1.0 - 2.0 * p)));
    let variance = numeric::sum(series.forecasts().iter().map(|&p| (1.0 - 2.0 * p).powi(2) * p * (1.0 - p)));
    if variance <= 0.0 {
        return Err(VerifyError::DegenerateVariance);
    }
    let z = numerator / variance.sqrt();
    Ok(SpiegelhalterResult { z, test: TestResult::chi_square(z * z, 1.0) })
}

/// Maximum-likelihood fit of logit Pr(X = 1) = α + β·logit(p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationFit {
    pub alpha: f64,
    pub beta: f64,
    pub se_alpha: f64,
    pub se_beta: f64,
    /// −2·loglik at α = 0, β = 1.
    pub deviance_null: f64,
    /// −2·loglik at the estimate.
    pub deviance_fitted: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl CalibrationFit {
    pub fn recalibrate(&self, p: f64) -> f64 {
        logistic(self.alpha + self.beta * clamped_logit(p))
    }
}

fn clamped_logit(p: f64) -> f64 {
    logit(p.clamp(LOGIT_EPSILON, 1.0 - LOGIT_EPSILON))
}

/// ln(1 + eᵗ) without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

fn deviance(z: &[f64], x: &[f64], alpha: f64, beta: f64) -> f64 {
    // −ln μ = softplus(−η), −ln(1 − μ) = softplus(η)
    2.0 * numeric::sum(z.iter().zip(x).map(|(&zi, &xi)| {
        let eta = alpha + beta * zi;
        xi * softplus(-eta) + (1.0 - xi) * softplus(eta)
    }))
}

/// Observed information (= Fisher information for the logit link).
fn information(z: &[f64], alpha: f64, beta: f64) -> [f64; 3] {
    let (mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0);
    for &zi in z {
        let mu = logistic(alpha + beta * zi);
        let w = mu * (1.0 - mu);
        h00 += w;
        h01 += w * zi;
        h11 += w * zi * zi;
    }
    [h00, h01, h11]
}

fn separation(z: &[f64], x: &[f64]) -> Option<SeparationDirection> {
    let (mut lo0, mut hi0, mut lo1, mut hi1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (&zi, &xi) in z.iter().zip(x) {
        if xi == 1.0 {
            lo1 = lo1.min(zi);
            hi1 = hi1.max(zi);
        } else {
            lo0 = lo0.min(zi);
            hi0 = hi0.max(zi);
        }
    }
    if hi0 <= lo1 {
        Some(SeparationDirection::Positive)
    } else if hi1 <= lo0 {
        Some(SeparationDirection::Negative)
    } else {
        None
    }
}

/// Fits the Cox calibration model by iteratively reweighted least squares
/// (Newton steps with step halving), starting from (0, 1).
pub fn fit_cox_calibration(series: &BinaryForecastSeries) -> Result<CalibrationFit> {
    let x = series.outcomes();
    let events = series.event_count();
    if events == 0 || events == series.len() {
        return Err(VerifyError::DegenerateInput("all outcomes are equal"));
    }
    let z: Vec<f64> = series.forecasts().iter().map(|&p| clamped_logit(p)).collect();
    if z.iter().all(|&zi| zi == z[0]) {
        return Err(VerifyError::DegenerateInput("all forecasts are equal"));
    }
    if let Some(direction) = separation(&z, x) {
        return Err(VerifyError::SeparationDetected { direction });
    }

    let deviance_null = deviance(&z, x, 0.0, 1.0);
    let (mut alpha, mut beta) = (0.0, 1.0);
    let mut current = deviance_null;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let [h00, h01, h11] = information(&z, alpha, beta);
        let (mut g0, mut g1) = (0.0, 0.0);
        for (&zi, &xi) in z.iter().zip(x) {
            let r = xi - logistic(alpha + beta * zi);
            g0 += r;
            g1 += r * zi;
        }
        let det = h00 * h11 - h01 * h01;
        if det.is_nan() || det <= 0.0 {
            return Err(VerifyError::DegenerateInput("singular information matrix"));
        }
        let step_alpha = (h11 * g0 - h01 * g1) / det;
        let step_beta = (h00 * g1 - h01 * g0) / det;

        let mut t = 1.0;
        let (mut next_alpha, mut next_beta, mut next) = (alpha, beta, current);
        while t > 1e-10 {
            next_alpha = alpha + t * step_alpha;
            next_beta = beta + t * step_beta;
            next = deviance(&z, x, next_alpha, next_beta);
            if next <= current + 1e-12 {
                break;
            }
            t *= 0.5;
        }
        let max_eta = z.iter().map(|&zi| (next_alpha + next_beta * zi).abs()).fold(0.0, f64::max);
        if max_eta > SEPARATION_BOUND {
            let direction =
                if next_beta >= 0.0 { SeparationDirection::Positive } else { SeparationDirection::Negative };
            return Err(VerifyError::SeparationDetected { direction });
        }
        let change = (current - next).abs();
        alpha = next_alpha;
        beta = next_beta;
        current = next.min(current);
        if change < DEVIANCE_TOLERANCE {
            converged = true;
            break;
        }
    }

    let [h00, h01, h11] = information(&z, alpha, beta);
    let det = h00 * h11 - h01 * h01;
    Ok(CalibrationFit {
        alpha,
        beta,
        se_alpha: (h11 / det).sqrt(),
        se_beta: (h00 / det).sqrt(),
        deviance_null,
        deviance_fitted: deviance(&z, x, alpha, beta),
        converged,
        iterations,
    })
}

/// ((estimate − h₀)/se)² on one degree of freedom.
pub fn wald_test(estimate: f64, se: f64, null_value: f64) -> TestResult {
    let statistic = ((estimate - null_value) / se).powi(2);
    TestResult::chi_square(statistic, 1.0)
}

/// Wald tests of α = 0 and β = 1.
pub fn wald_tests(fit: &CalibrationFit) -> Result<(TestResult, TestResult)> {
    if !fit.converged {
        return Err(VerifyError::NotConverged);
    }
    Ok((wald_test(fit.alpha, fit.se_alpha, 0.0), wald_test(fit.beta, fit.se_beta, 1.0)))
}

/// ΔD = D₀ − D₁ on two degrees of freedom.
pub fn deviance_test(fit: &CalibrationFit) -> Result<TestResult> {
    if !fit.converged {
        return Err(VerifyError::NotConverged);
    }
    Ok(floored_chi_square(fit.deviance_null - fit.deviance_fitted, 2.0))
}

fn floored_chi_square(statistic: f64, df: f64) -> TestResult {
    let mut result = TestResult::chi_square(statistic.max(0.0), df);
    result.floored = statistic < 0.0;
    result
}

/// 2N·(L̄(p) − L̄(q̂)) where q̂ are the Cox-recalibrated forecasts, on two
/// degrees of freedom.
///
/// Forecasts go through the same logit clamp as the regression, which makes
/// the statistic equal to D₀ − D₁.
pub fn ignorance_lr_test(series: &BinaryForecastSeries, fit: &CalibrationFit) -> Result<TestResult> {
    if !fit.converged {
        return Err(VerifyError::NotConverged);
    }
    let raw = numeric::sum(series.pairs().map(|(p, x)| {
        let p = logistic(clamped_logit(p));
        ignorance(p, x, 0.0)
    }));
    let recalibrated = numeric::sum(series.pairs().map(|(p, x)| ignorance(fit.recalibrate(p), x, 0.0)));
    let n = series.len() as f64;
    let statistic = 2.0 * n * (raw / n - recalibrated / n);
    Ok(floored_chi_square(statistic, 2.0))
}

/// Reliability-diagram shape suggested by the signs of (α, β).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationProfile {
    /// Neither α ≠ 0 nor β ≠ 1 is significant.
    Reliable,
    /// α > 0, β = 1: concave, events under-forecast.
    UnderForecasting,
    /// α < 0, β = 1: convex, events over-forecast.
    OverForecasting,
    /// α = 0, β > 1.
    Sigmoid,
    /// α = 0, β < 1.
    InverseSigmoid,
    /// Both parameters depart.
    Mixed,
}

/// Heuristic profile label from the Wald tests at `level`.
pub fn classify_profile(fit: &CalibrationFit, level: f64) -> Result<CalibrationProfile> {
    let (intercept, slope) = wald_tests(fit)?;
    let alpha_off = intercept.p_value < level;
    let beta_off = slope.p_value < level;
    Ok(match (alpha_off, beta_off) {
        (false, false) => CalibrationProfile::Reliable,
        (true, false) if fit.alpha > 0.0 => CalibrationProfile::UnderForecasting,
        (true, false) => CalibrationProfile::OverForecasting,
        (false, true) if fit.beta > 1.0 => CalibrationProfile::Sigmoid,
        (false, true) => CalibrationProfile::InverseSigmoid,
        (true, true) => CalibrationProfile::Mixed,
    })
}

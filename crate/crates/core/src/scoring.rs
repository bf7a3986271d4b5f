//! Proper scoring rules and their empirical means.

use serde::Serialize;

use crate::domain::{BinaryForecastSeries, Category, MulticlassForecastSeries};
use crate::error::{Result, VerifyError};
use crate::numeric;

/// Default clamp for the logarithmic score.
pub const IGNORANCE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ScoringRule {
    HalfBrier,
    Ignorance { epsilon: f64 },
    ZeroOne,
    Rps,
}

impl ScoringRule {
    pub fn ignorance() -> Self {
        ScoringRule::Ignorance { epsilon: IGNORANCE_EPSILON }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScoringRule::HalfBrier => "brier",
            ScoringRule::Ignorance { .. } => "log",
            ScoringRule::ZeroOne => "zero-one",
            ScoringRule::Rps => "rps",
        }
    }

    /// Score of one binary pair. RPS has no binary form.
    pub fn score(&self, p: f64, x: f64) -> Result<f64> {
        match *self {
            ScoringRule::HalfBrier => Ok(half_brier(p, x)),
            ScoringRule::Ignorance { epsilon } => Ok(ignorance(p, x, epsilon)),
            ScoringRule::ZeroOne => Ok(zero_one(p, x)),
            ScoringRule::Rps => Err(VerifyError::RuleNotBinary("rps")),
        }
    }
}

/// (p − x)².
pub fn half_brier(p: f64, x: f64) -> f64 {
    (p - x) * (p - x)
}

/// −x ln p − (1 − x) ln(1 − p), with p clamped to [ε, 1 − ε].
pub fn ignorance(p: f64, x: f64, epsilon: f64) -> f64 {
    let p = p.clamp(epsilon, 1.0 - epsilon);
    -(x * p.ln() + (1.0 - x) * (1.0 - p).ln())
}

/// 0 for a correct categorical call, 1 for a miss, 0.5 at p = 0.5.
pub fn zero_one(p: f64, x: f64) -> f64 {
    if p == 0.5 {
        0.5
    } else if (p > 0.5) == (x == 1.0) {
        0.0
    } else {
        1.0
    }
}

/// Ranked probability score over the ordered categories H < D < A,
/// normalized by J − 1 = 2.
pub fn rps(probs: [f64; 3], outcome: Category) -> f64 {
    let mut cum_p = 0.0;
    let mut cum_x = 0.0;
    let mut total = 0.0;
    for (j, category) in Category::ALL.iter().take(2).enumerate() {
        cum_p += probs[j];
        if outcome == *category {
            cum_x = 1.0;
        }
        total += (cum_p - cum_x) * (cum_p - cum_x);
    }
    total / 2.0
}

/// Empirical mean score N⁻¹ Σ S(p_i, x_i).
pub fn mean_score(series: &BinaryForecastSeries, rule: ScoringRule) -> Result<f64> {
    let scores = series.pairs().map(|(p, x)| rule.score(p, x)).collect::<Result<Vec<_>>>()?;
    Ok(numeric::mean(&scores))
}

/// Mean half-Brier score; infallible shorthand used throughout.
pub fn mean_brier(series: &BinaryForecastSeries) -> f64 {
    mean_brier_of(series.forecasts(), series.outcomes())
}

pub(crate) fn mean_brier_of(forecasts: &[f64], outcomes: &[f64]) -> f64 {
    numeric::sum(forecasts.iter().zip(outcomes).map(|(&p, &x)| half_brier(p, x))) / forecasts.len() as f64
}

pub fn mean_rps(series: &MulticlassForecastSeries) -> f64 {
    numeric::sum(series.rows().iter().map(|r| rps(r.probs(), r.outcome()))) / series.len() as f64
}

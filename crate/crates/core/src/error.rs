use thiserror::Error;

pub type Result<T> = std::result::Result<T, VerifyError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("series is empty")]
    EmptySeries,
    #[error("forecasts and outcomes differ in length ({forecasts} vs {outcomes})")]
    LengthMismatch { forecasts: usize, outcomes: usize },
    #[error("probability {value} at index {index} lies outside [0, 1]")]
    OutOfRangeProbability { index: usize, value: f64 },
    #[error("outcome {value} at index {index} is not 0 or 1")]
    NonBinaryOutcome { index: usize, value: f64 },
    #[error("probabilities of row `{match_id}` sum to {sum}, not 1")]
    ProbabilitySum { match_id: String, sum: f64 },
    #[error("decimal odd {value} is not above 1.0")]
    OddsNotAboveOne { value: f64 },

    #[error("line {line}: missing column `{column}`")]
    MissingColumn { line: u64, column: String },
    #[error("line {line}: bad probability: {reason}")]
    BadProbability { line: u64, reason: String },
    #[error("line {line}: bad outcome label `{label}` (expected H, D or A)")]
    BadOutcomeLabel { line: u64, label: String },
    #[error("line {line}: {reason}")]
    BadRecord { line: u64, reason: String },
    #[error("line {line}: decimal odd {value} is not above 1.0")]
    OddsNotAboveOneAt { line: u64, value: f64 },

    #[error("thresholds must be strictly ascending and inside (0, 1)")]
    NonAscendingThresholds,
    #[error("bin count {bins} invalid for a series of {n} forecasts")]
    BadBinCount { bins: usize, n: usize },

    #[error("binned forecasts cover {binned} observations, series has {series}")]
    SeriesMismatch { binned: usize, series: usize },
    #[error("uncertainty is zero: all outcomes are equal")]
    DegenerateUncertainty,
    #[error("one outcome class is empty")]
    DegenerateClass,
    #[error("null variance is zero (every forecast equals 0.5 or lies at 0/1)")]
    DegenerateVariance,
    #[error("exact enumeration needs at most {limit} observations, got {n}")]
    TooLargeForExact { n: usize, limit: usize },
    #[error("all forecasts are tied")]
    ZeroVariance,
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("outcomes are perfectly separated by the forecasts ({direction})")]
    SeparationDetected { direction: SeparationDirection },
    #[error("calibration fit did not converge")]
    NotConverged,

    #[error("confidence level {0} must lie in (0.5, 1)")]
    BadLevel(f64),
    #[error("at least 100 resamples are required, got {0}")]
    BadReps(usize),
    #[error("forecast law {0} puts mass on 0 or 1")]
    BadLaw(String),
    #[error("scoring rule {0} does not apply to binary pairs")]
    RuleNotBinary(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationDirection {
    /// Every event has a higher forecast than every non-event.
    Positive,
    /// Every event has a lower forecast than every non-event.
    Negative,
}

impl std::fmt::Display for SeparationDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeparationDirection::Positive => f.write_str("events above non-events"),
            SeparationDirection::Negative => f.write_str("events below non-events"),
        }
    }
}

//! Validated value types shared by every analysis.
//!
//! All types here are immutable once built; every analysis is a pure function
//! of them.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Result, VerifyError};
use crate::numeric;

/// Probabilities this far outside `[0, 1]` are treated as float noise and clamped.
pub const CLAMP_TOLERANCE: f64 = 1e-9;

/// Multiclass rows whose probabilities sum within this distance of 1 are renormalized.
pub const UNIT_SUM_TOLERANCE: f64 = 1e-6;

fn checked_probability(index: usize, value: f64) -> Result<f64> {
    if !value.is_finite() || !(-CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(&value) {
        return Err(VerifyError::OutOfRangeProbability { index, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Paired forecast probabilities and binary outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryForecastSeries {
    forecasts: Vec<f64>,
    outcomes: Vec<f64>,
}

impl BinaryForecastSeries {
    /// Validates raw data. Outcomes must be exactly 0 or 1.
    pub fn new(forecasts: Vec<f64>, outcomes: Vec<f64>) -> Result<Self> {
        if forecasts.len() != outcomes.len() {
            return Err(VerifyError::LengthMismatch { forecasts: forecasts.len(), outcomes: outcomes.len() });
        }
        if forecasts.is_empty() {
            return Err(VerifyError::EmptySeries);
        }
        let forecasts =
            forecasts.into_iter().enumerate().map(|(i, p)| checked_probability(i, p)).collect::<Result<Vec<_>>>()?;
        for (index, &value) in outcomes.iter().enumerate() {
            if value != 0.0 && value != 1.0 {
                return Err(VerifyError::NonBinaryOutcome { index, value });
            }
        }
        Ok(Self { forecasts, outcomes })
    }

    pub fn from_bools(forecasts: Vec<f64>, outcomes: &[bool]) -> Result<Self> {
        Self::new(forecasts, outcomes.iter().map(|&x| if x { 1.0 } else { 0.0 }).collect())
    }

    pub fn len(&self) -> usize {
        self.forecasts.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.forecasts.is_empty()
    }

    pub fn forecasts(&self) -> &[f64] {
        &self.forecasts
    }

    /// Outcomes as `0.0` / `1.0`.
    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.forecasts.iter().copied().zip(self.outcomes.iter().copied())
    }

    /// Observed event frequency x̄.
    pub fn base_rate(&self) -> f64 {
        self.event_count() as f64 / self.len() as f64
    }

    pub fn event_count(&self) -> usize {
        self.outcomes.iter().filter(|&&x| x == 1.0).count()
    }

    pub fn mean_forecast(&self) -> f64 {
        numeric::mean(&self.forecasts)
    }

    /// Forecasts split by outcome: `(non-events, events)`.
    pub fn by_class(&self) -> (Vec<f64>, Vec<f64>) {
        let mut zero = Vec::new();
        let mut one = Vec::new();
        for (p, x) in self.pairs() {
            if x == 1.0 {
                one.push(p);
            } else {
                zero.push(p);
            }
        }
        (zero, one)
    }
}

/// Three-way match result category, ordered Home < Draw < Away.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Category {
    #[serde(rename = "H")]
    Home,
    #[serde(rename = "D")]
    Draw,
    #[serde(rename = "A")]
    Away,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Home, Category::Draw, Category::Away];

    pub fn index(self) -> usize {
        match self {
            Category::Home => 0,
            Category::Draw => 1,
            Category::Away => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Category::Home => "H",
            Category::Draw => "D",
            Category::Away => "A",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "H" => Ok(Category::Home),
            "D" => Ok(Category::Draw),
            "A" => Ok(Category::Away),
            other => Err(other.to_string()),
        }
    }
}

/// One match: (home, draw, away) probabilities and the realised category.
#[derive(Debug, Clone, PartialEq)]
pub struct MulticlassRow {
    match_id: String,
    probs: [f64; 3],
    outcome: Category,
}

impl MulticlassRow {
    /// Validates and renormalizes the probability vector.
    ///
    /// Rows summing within [`UNIT_SUM_TOLERANCE`] of 1 are rescaled; the away
    /// component is then the complement of the other two, so the sum is 1.
    pub fn new(match_id: impl Into<String>, probs: [f64; 3], outcome: Category) -> Result<Self> {
        let match_id = match_id.into();
        let mut clean = [0.0; 3];
        for (j, &p) in probs.iter().enumerate() {
            clean[j] = checked_probability(j, p)?;
        }
        let total: f64 = clean.iter().sum();
        if (total - 1.0).abs() > UNIT_SUM_TOLERANCE {
            return Err(VerifyError::ProbabilitySum { match_id, sum: total });
        }
        let home = clean[0] / total;
        let draw = clean[1] / total;
        let away = (1.0 - home - draw).clamp(0.0, 1.0);
        Ok(Self { match_id, probs: [home, draw, away], outcome })
    }

    pub fn match_id(&self) -> &str {
        &self.match_id
    }

    pub fn probs(&self) -> [f64; 3] {
        self.probs
    }

    pub fn prob(&self, category: Category) -> f64 {
        self.probs[category.index()]
    }

    pub fn outcome(&self) -> Category {
        self.outcome
    }
}

/// Per-match three-way forecasts with their outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct MulticlassForecastSeries {
    rows: Vec<MulticlassRow>,
}

impl MulticlassForecastSeries {
    pub fn new(rows: Vec<MulticlassRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(VerifyError::EmptySeries);
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[MulticlassRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BinningMethod {
    Fixed,
    Quantile,
    Pav,
}

/// One retained bin `[lower, upper)` (the last bin is closed at 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bin {
    pub lower: f64,
    pub upper: f64,
    /// Mean forecast p_d of the bin's members.
    pub mean_forecast: f64,
    /// Observed event frequency x̂_d of the bin's members.
    pub event_frequency: f64,
    pub count: usize,
}

/// A partition of a series into bins plus the recalibrated vector x̂.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedForecasts {
    pub(crate) bins: Vec<Bin>,
    pub(crate) recalibrated: Vec<f64>,
    pub(crate) method: BinningMethod,
}

impl BinnedForecasts {
    pub fn bins(&self) -> &[Bin] {
        &self.bins
    }

    /// x̂_i: the event frequency of the bin holding observation i, in series order.
    pub fn recalibrated(&self) -> &[f64] {
        &self.recalibrated
    }

    pub fn method(&self) -> BinningMethod {
        self.method
    }

    pub fn total_count(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DecompositionMethod {
    Cr,
    Lb,
    Yates,
}

/// Non-fatal conditions attached to results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    DegenerateUncertainty,
    DegenerateClass,
    DegenerateVariance,
    ZeroVariance,
    SeparationDetected,
    NotConverged,
    DegenerateInput,
    StatisticFloored,
    DuplicateMatchId,
    HeuristicProfile,
}

impl Flag {
    /// Whether the flag marks a statistic that could not be computed
    /// meaningfully, as opposed to an informational note.
    pub fn is_degenerate(self) -> bool {
        !matches!(self, Flag::StatisticFloored | Flag::DuplicateMatchId | Flag::HeuristicProfile)
    }
}

/// A named component and the sign/weight it enters the score with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Component {
    pub name: &'static str,
    pub value: f64,
    pub weight: f64,
}

impl Component {
    /// Signed contribution to the mean score, e.g. −2·COV.
    pub fn contribution(&self) -> f64 {
        self.weight * self.value
    }
}

/// Named components of one Brier-score decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreDecomposition {
    pub method: DecompositionMethod,
    pub components: Vec<Component>,
    /// Empirical mean half-Brier score the components reconstruct.
    pub mean_score: f64,
    /// x̄(1 − x̄), used for the percent-of-UNC presentation.
    pub uncertainty: f64,
    pub skill: Option<f64>,
    pub flags: Vec<Flag>,
}

impl ScoreDecomposition {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.components.iter().find(|c| c.name == name).map(|c| c.value)
    }

    /// Σ weight·value over the components.
    pub fn reconstruct(&self) -> f64 {
        numeric::sum(self.components.iter().map(Component::contribution))
    }

    /// Component value as a percentage of UNC, or `None` when UNC is 0.
    pub fn percent_of_uncertainty(&self, value: f64) -> Option<f64> {
        (self.uncertainty > 0.0).then(|| 100.0 * value / self.uncertainty)
    }

    pub fn has_flag(&self, flag: Flag) -> bool {
        self.flags.contains(&flag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_series() {
        let s = BinaryForecastSeries::new(vec![0.5], vec![1.0]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.base_rate(), 1.0);
    }

    #[test]
    fn length_mismatch() {
        let err = BinaryForecastSeries::new(vec![0.5, 0.7], vec![1.0]).unwrap_err();
        assert_eq!(err, VerifyError::LengthMismatch { forecasts: 2, outcomes: 1 });
    }

    #[test]
    fn clamps_float_noise() {
        let s = BinaryForecastSeries::new(vec![1.0000000002], vec![0.0]).unwrap();
        assert_eq!(s.forecasts(), &[1.0]);
        let s = BinaryForecastSeries::new(vec![-5e-10], vec![0.0]).unwrap();
        assert_eq!(s.forecasts(), &[0.0]);
    }

    #[test]
    fn rejects_real_violations() {
        assert!(matches!(
            BinaryForecastSeries::new(vec![1.01], vec![0.0]),
            Err(VerifyError::OutOfRangeProbability { index: 0, .. })
        ));
        assert!(matches!(
            BinaryForecastSeries::new(vec![f64::NAN], vec![0.0]),
            Err(VerifyError::OutOfRangeProbability { .. })
        ));
        assert!(matches!(
            BinaryForecastSeries::new(vec![0.3], vec![0.5]),
            Err(VerifyError::NonBinaryOutcome { index: 0, .. })
        ));
        assert_eq!(BinaryForecastSeries::new(vec![], vec![]), Err(VerifyError::EmptySeries));
    }

    #[test]
    fn multiclass_rows_renormalize() {
        let row = MulticlassRow::new("m1", [0.5, 0.3, 0.2000005], Category::Home).unwrap();
        assert_eq!(row.probs().iter().sum::<f64>(), 1.0);
        assert!(matches!(
            MulticlassRow::new("m1", [0.5, 0.3, 0.3], Category::Home),
            Err(VerifyError::ProbabilitySum { .. })
        ));
    }

    #[test]
    fn category_labels_are_case_insensitive() {
        assert_eq!("h".parse::<Category>().unwrap(), Category::Home);
        assert_eq!(" A ".parse::<Category>().unwrap(), Category::Away);
        assert!("X".parse::<Category>().is_err());
    }
}

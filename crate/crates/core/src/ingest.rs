//! CSV ingestion, odds conversion and one-vs-all expansion.
//!
//! Dialect: comma separated, `.` decimal point, mandatory header line, extra
//! columns ignored. Errors carry 1-based line numbers.

use std::collections::HashSet;
use std::fmt::Write as _;

use csv::{ReaderBuilder, StringRecord, Trim};

use crate::domain::{
    BinaryForecastSeries, Category, MulticlassForecastSeries, MulticlassRow, CLAMP_TOLERANCE, UNIT_SUM_TOLERANCE,
};
use crate::error::{Result, VerifyError};

pub const FORECAST_HEADER: [&str; 5] = ["match_id", "p_home", "p_draw", "p_away", "outcome"];
pub const ODDS_HEADER: [&str; 5] = ["match_id", "odds_home", "odds_draw", "odds_away", "outcome"];
pub const BINARY_HEADER: [&str; 2] = ["p", "x"];

/// Decimal odds for home, draw and away.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OddsTriple {
    odds: [f64; 3],
}

impl OddsTriple {
    pub fn new(home: f64, draw: f64, away: f64) -> Result<Self> {
        for value in [home, draw, away] {
            // NaN fails this comparison too
            if !value.is_finite() || value <= 1.0 {
                return Err(VerifyError::OddsNotAboveOne { value });
            }
        }
        Ok(Self { odds: [home, draw, away] })
    }

    pub fn odds(&self) -> [f64; 3] {
        self.odds
    }

    /// Bookmaker margin Σ 1/o − 1.
    pub fn overround(&self) -> f64 {
        self.odds.iter().map(|o| o.recip()).sum::<f64>() - 1.0
    }
}

/// Normalized inverse odds. The away component is the complement of the
/// other two so the vector sums to exactly 1.
pub fn odds_to_probabilities(odds: &OddsTriple) -> [f64; 3] {
    let inv = odds.odds.map(f64::recip);
    let total: f64 = inv.iter().sum();
    let home = inv[0] / total;
    let draw = inv[1] / total;
    [home, draw, 1.0 - home - draw]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IngestWarning {
    DuplicateMatchId { line: u64, match_id: String },
}

impl std::fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IngestWarning::DuplicateMatchId { line, match_id } => {
                write!(f, "line {line}: duplicate match_id `{match_id}`")
            }
        }
    }
}

/// A parsed multiclass file and any non-fatal findings.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub series: MulticlassForecastSeries,
    pub warnings: Vec<IngestWarning>,
}

/// Parses `match_id,p_home,p_draw,p_away,outcome`.
pub fn parse_forecast_csv(text: &str) -> Result<Ingested> {
    parse_multiclass(text, FORECAST_HEADER, |line, values, match_id, outcome| {
        for &v in &values {
            if !v.is_finite() || !(-CLAMP_TOLERANCE..=1.0 + CLAMP_TOLERANCE).contains(&v) {
                return Err(VerifyError::BadProbability { line, reason: format!("{v} outside [0, 1]") });
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > UNIT_SUM_TOLERANCE {
            return Err(VerifyError::BadProbability { line, reason: format!("probabilities sum to {sum}") });
        }
        MulticlassRow::new(match_id, values, outcome)
            .map_err(|e| VerifyError::BadProbability { line, reason: e.to_string() })
    })
}

/// Parses `match_id,odds_home,odds_draw,odds_away,outcome` and converts each
/// row with [`odds_to_probabilities`].
pub fn parse_odds_csv(text: &str) -> Result<Ingested> {
    parse_multiclass(text, ODDS_HEADER, |line, values, match_id, outcome| {
        let odds = OddsTriple::new(values[0], values[1], values[2]).map_err(|e| match e {
            VerifyError::OddsNotAboveOne { value } => VerifyError::OddsNotAboveOneAt { line, value },
            other => other,
        })?;
        MulticlassRow::new(match_id, odds_to_probabilities(&odds), outcome)
    })
}

fn column_indices<const K: usize>(headers: &StringRecord, names: [&str; K]) -> Result<[usize; K]> {
    let mut idx = [0; K];
    for (slot, name) in idx.iter_mut().zip(names) {
        *slot = headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| VerifyError::MissingColumn { line: 1, column: name.to_string() })?;
    }
    Ok(idx)
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    ReaderBuilder::new().has_headers(true).flexible(true).trim(Trim::All).from_reader(text.as_bytes())
}

fn csv_error(err: csv::Error) -> VerifyError {
    let line = err.position().map_or(0, |p| p.line());
    VerifyError::BadRecord { line, reason: err.to_string() }
}

fn field<'r>(record: &'r StringRecord, idx: usize, name: &str, line: u64) -> Result<&'r str> {
    record
        .get(idx)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| VerifyError::MissingColumn { line, column: name.to_string() })
}

fn parse_multiclass<F>(text: &str, header: [&str; 5], mut build: F) -> Result<Ingested>
where
    F: FnMut(u64, [f64; 3], &str, Category) -> Result<MulticlassRow>,
{
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let idx = column_indices(&headers, header)?;

    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let match_id = field(&record, idx[0], header[0], line)?;
        let mut values = [0.0; 3];
        for j in 0..3 {
            let raw = field(&record, idx[j + 1], header[j + 1], line)?;
            values[j] = raw
                .parse()
                .map_err(|_| VerifyError::BadProbability { line, reason: format!("`{raw}` is not a number") })?;
        }
        let label = field(&record, idx[4], header[4], line)?;
        let outcome: Category =
            label.parse().map_err(|_| VerifyError::BadOutcomeLabel { line, label: label.to_string() })?;
        if !seen.insert(match_id.to_string()) {
            warnings.push(IngestWarning::DuplicateMatchId { line, match_id: match_id.to_string() });
        }
        rows.push(build(line, values, match_id, outcome)?);
    }
    Ok(Ingested { series: MulticlassForecastSeries::new(rows)?, warnings })
}

/// Parses the binary `p,x` schema.
pub fn parse_binary_csv(text: &str) -> Result<BinaryForecastSeries> {
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let idx = column_indices(&headers, BINARY_HEADER)?;
    let mut forecasts = Vec::new();
    let mut outcomes = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let p = field(&record, idx[0], "p", line)?;
        let x = field(&record, idx[1], "x", line)?;
        forecasts.push(
            p.parse::<f64>()
                .map_err(|_| VerifyError::BadProbability { line, reason: format!("`{p}` is not a number") })?,
        );
        outcomes.push(
            x.parse::<f64>()
                .map_err(|_| VerifyError::BadRecord { line, reason: format!("outcome `{x}` is not 0 or 1") })?,
        );
    }
    BinaryForecastSeries::new(forecasts, outcomes)
}

/// Which of the three schemas a header line announces, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    Forecast,
    Odds,
    Binary,
}

pub fn detect_schema(text: &str) -> Option<Schema> {
    let mut rdr = reader(text);
    let headers = rdr.headers().ok()?.clone();
    if column_indices(&headers, FORECAST_HEADER).is_ok() {
        Some(Schema::Forecast)
    } else if column_indices(&headers, ODDS_HEADER).is_ok() {
        Some(Schema::Odds)
    } else if column_indices(&headers, BINARY_HEADER).is_ok() {
        Some(Schema::Binary)
    } else {
        None
    }
}

/// Writes the forecast schema with six decimals.
pub fn write_forecast_csv(series: &MulticlassForecastSeries) -> String {
    let mut out = FORECAST_HEADER.join(",");
    out.push('\n');
    for row in series.rows() {
        let [h, d, a] = row.probs();
        let (h, d) = (round6(h), round6(d));
        let mut a = round6(a);
        // rounding can push the sum past the reader's tolerance
        if (h + d + a - 1.0).abs() > UNIT_SUM_TOLERANCE {
            a = round6(1.0 - h - d);
        }
        let _ = writeln!(out, "{},{h:.6},{d:.6},{a:.6},{}", row.match_id(), row.outcome());
    }
    out
}

pub fn write_binary_csv(series: &BinaryForecastSeries) -> String {
    let mut out = String::from("p,x\n");
    for (p, x) in series.pairs() {
        let _ = writeln!(out, "{p:.6},{}", x as u8);
    }
    out
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// Binary series for one category: p_i is that category's probability and
/// x_i = 1 iff it occurred.
pub fn one_vs_all(series: &MulticlassForecastSeries, category: Category) -> BinaryForecastSeries {
    let (forecasts, outcomes) =
        series.rows().iter().map(|row| (row.prob(category), if row.outcome() == category { 1.0 } else { 0.0 })).unzip();
    BinaryForecastSeries::new(forecasts, outcomes).expect("multiclass rows hold validated probabilities")
}

//! Brier-score decompositions: calibration–refinement (CR), likelihood-base
//! (LB) and Yates, plus the skill score and one-vs-all totals.
//!
//! All moments are population moments (divide by N); the identities below
//! are exact only in that form:
//!
//! * CR:    S̄ = REL − RES + UNC
//! * LB:    S̄ = REF − DIS + CB2
//! * Yates: S̄ = UNC − 2·COV + VPB + VPW + RIL

use serde::Serialize;

use crate::binning::Binning;
use crate::domain::{
    BinaryForecastSeries, BinnedForecasts, Category, Component, DecompositionMethod, Flag, MulticlassForecastSeries,
    ScoreDecomposition,
};
use crate::error::{Result, VerifyError};
use crate::ingest::one_vs_all;
use crate::numeric;
use crate::scoring::{mean_brier, mean_brier_of};

fn component(name: &'static str, value: f64, weight: f64) -> Component {
    Component { name, value, weight }
}

/// Per-class sizes and forecast moments.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ClassMoments {
    pub n0: usize,
    pub n1: usize,
    pub m0: f64,
    pub m1: f64,
    pub var0: f64,
    pub var1: f64,
}

impl ClassMoments {
    pub fn of(series: &BinaryForecastSeries) -> Self {
        let (zero, one) = series.by_class();
        let moments = |v: &[f64]| {
            if v.is_empty() {
                (0.0, 0.0)
            } else {
                (numeric::mean(v), numeric::population_variance(v))
            }
        };
        let (m0, var0) = moments(&zero);
        let (m1, var1) = moments(&one);
        Self { n0: zero.len(), n1: one.len(), m0, m1, var0, var1 }
    }

    pub fn degenerate(&self) -> bool {
        self.n0 == 0 || self.n1 == 0
    }

    fn weights(&self) -> (f64, f64) {
        let n = (self.n0 + self.n1) as f64;
        (self.n0 as f64 / n, self.n1 as f64 / n)
    }

    /// Regression coefficient of P on X: m1 − m0 (0 when a class is empty).
    pub fn slope(&self) -> f64 {
        if self.degenerate() {
            0.0
        } else {
            self.m1 - self.m0
        }
    }
}

/// Calibration–refinement decomposition from a binning of the same series.
///
/// REL = S̄(p) − S̄(x̂), RES = S̄(x̄·1) − S̄(x̂), UNC = S̄(x̄·1), where x̂ is the
/// binned recalibration of each observation.
pub fn cr_decompose(series: &BinaryForecastSeries, binned: &BinnedForecasts) -> Result<ScoreDecomposition> {
    if binned.recalibrated().len() != series.len() || binned.total_count() != series.len() {
        return Err(VerifyError::SeriesMismatch { binned: binned.recalibrated().len(), series: series.len() });
    }
    let outcomes = series.outcomes();
    let score = mean_brier(series);
    let recal_score = mean_brier_of(binned.recalibrated(), outcomes);
    let climatology = vec![series.base_rate(); series.len()];
    let unc = mean_brier_of(&climatology, outcomes);

    let rel = score - recal_score;
    let res = unc - recal_score;
    let mut flags = Vec::new();
    let skill = if unc > 0.0 {
        Some((res - rel) / unc)
    } else {
        flags.push(Flag::DegenerateUncertainty);
        None
    };
    Ok(ScoreDecomposition {
        method: DecompositionMethod::Cr,
        components: vec![component("REL", rel, 1.0), component("RES", res, -1.0), component("UNC", unc, 1.0)],
        mean_score: score,
        uncertainty: unc,
        skill,
        flags,
    })
}

/// Brier skill score (RES − REL)/UNC = 1 − S̄/UNC of a CR decomposition.
pub fn skill_score(decomposition: &ScoreDecomposition) -> Result<f64> {
    let unc = decomposition.get("UNC").unwrap_or(decomposition.uncertainty);
    if unc <= 0.0 {
        return Err(VerifyError::DegenerateUncertainty);
    }
    match (decomposition.get("REL"), decomposition.get("RES")) {
        (Some(rel), Some(res)) => Ok((res - rel) / unc),
        _ => Ok(1.0 - decomposition.mean_score / unc),
    }
}

/// Likelihood-base decomposition.
///
/// REF = Var(P); DIS = between-class variance of the class-mean forecasts;
/// CB2 = (n₀/N)·m₀² + (n₁/N)·(m₁ − 1)², the mean squared gap between each
/// class's mean forecast and its outcome value.
pub fn lb_decompose(series: &BinaryForecastSeries) -> ScoreDecomposition {
    let moments = ClassMoments::of(series);
    let (w0, w1) = moments.weights();
    let mean = series.mean_forecast();
    let refinement = numeric::population_variance(series.forecasts());
    let mut flags = Vec::new();
    let (dis, cb2) = if moments.degenerate() {
        flags.push(Flag::DegenerateClass);
        let gap = if moments.n1 == 0 { mean } else { mean - 1.0 };
        (0.0, gap * gap)
    } else {
        let dis = w0 * (moments.m0 - mean).powi(2) + w1 * (moments.m1 - mean).powi(2);
        let cb2 = w0 * moments.m0.powi(2) + w1 * (moments.m1 - 1.0).powi(2);
        (dis, cb2)
    };
    let x_bar = series.base_rate();
    ScoreDecomposition {
        method: DecompositionMethod::Lb,
        components: vec![component("REF", refinement, 1.0), component("DIS", dis, -1.0), component("CB2", cb2, 1.0)],
        mean_score: mean_brier(series),
        uncertainty: x_bar * (1.0 - x_bar),
        skill: None,
        flags,
    }
}

/// Yates decomposition. COV is stored as the (positive) covariance with
/// weight −2; VPB = b²·UNC and VPW is the pooled within-class variance.
pub fn yates_decompose(series: &BinaryForecastSeries) -> ScoreDecomposition {
    let moments = ClassMoments::of(series);
    let (w0, w1) = moments.weights();
    let x_bar = series.base_rate();
    let unc = x_bar * (1.0 - x_bar);
    let cov = numeric::population_covariance(series.forecasts(), series.outcomes());
    let b = moments.slope();
    let vpb = b * b * unc;
    let vpw = w0 * moments.var0 + w1 * moments.var1;
    let ril = (series.mean_forecast() - x_bar).powi(2);
    let mut flags = Vec::new();
    if moments.degenerate() {
        flags.push(Flag::DegenerateClass);
    }
    ScoreDecomposition {
        method: DecompositionMethod::Yates,
        components: vec![
            component("UNC", unc, 1.0),
            component("COV", cov, -2.0),
            component("VPB", vpb, 1.0),
            component("VPW", vpw, 1.0),
            component("RIL", ril, 1.0),
        ],
        mean_score: mean_brier(series),
        uncertainty: unc,
        skill: None,
        flags,
    }
}

/// Decomposes one series with the given method; `binning` is used by CR only.
pub fn decompose(
    series: &BinaryForecastSeries,
    method: DecompositionMethod,
    binning: &Binning,
) -> Result<ScoreDecomposition> {
    match method {
        DecompositionMethod::Cr => cr_decompose(series, &binning.apply(series)?),
        DecompositionMethod::Lb => Ok(lb_decompose(series)),
        DecompositionMethod::Yates => Ok(yates_decompose(series)),
    }
}

/// One-vs-all decompositions and their component-wise totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MulticlassDecomposition {
    pub per_category: Vec<(Category, ScoreDecomposition)>,
    pub all: ScoreDecomposition,
}

pub fn decompose_multiclass(
    series: &MulticlassForecastSeries,
    method: DecompositionMethod,
    binning: &Binning,
) -> Result<MulticlassDecomposition> {
    let per_category = Category::ALL
        .iter()
        .map(|&c| decompose(&one_vs_all(series, c), method, binning).map(|d| (c, d)))
        .collect::<Result<Vec<_>>>()?;
    let all = sum_decompositions(per_category.iter().map(|(_, d)| d));
    Ok(MulticlassDecomposition { per_category, all })
}

/// Component-wise sum of decompositions of the same method.
pub fn sum_decompositions<'a, I>(parts: I) -> ScoreDecomposition
where
    I: IntoIterator<Item = &'a ScoreDecomposition>,
{
    let parts: Vec<&ScoreDecomposition> = parts.into_iter().collect();
    let first = parts.first().expect("at least one decomposition to sum");
    let components = first
        .components
        .iter()
        .enumerate()
        .map(|(k, c)| Component { value: numeric::sum(parts.iter().map(|d| d.components[k].value)), ..*c })
        .collect();
    let uncertainty = numeric::sum(parts.iter().map(|d| d.uncertainty));
    let mean_score = numeric::sum(parts.iter().map(|d| d.mean_score));
    let mut flags: Vec<Flag> = parts.iter().flat_map(|d| d.flags.iter().copied()).collect();
    flags.sort();
    flags.dedup();
    let mut all = ScoreDecomposition { method: first.method, components, mean_score, uncertainty, skill: None, flags };
    if all.method == DecompositionMethod::Cr && uncertainty > 0.0 {
        all.skill = skill_score(&all).ok();
    }
    all
}

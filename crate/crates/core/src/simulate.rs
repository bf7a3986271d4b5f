//! Synthetic forecast–outcome series with known Cox miscalibration, and the
//! seeded replicate machinery used by every Monte Carlo routine.
//!
//! Replicate `r` of a run seeded with `s` draws from ChaCha8 keyed by `s` on
//! stream `r`, so results do not depend on scheduling or thread count.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

use crate::domain::BinaryForecastSeries;
use crate::error::{Result, VerifyError};
use crate::numeric::{logistic, logit};

/// Clamp applied before taking logits of forecasts.
pub const LOGIT_EPSILON: f64 = 1e-6;

/// Generator for replicate `replicate` of a run seeded with `seed`.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Runs `f` on `reps` independent streams and returns the results in
/// replicate order. Runs on the rayon pool when the `parallel` feature is on.
pub fn replicate_map<T, F>(seed: u64, reps: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync + Send,
{
    let run = |r: usize| f(r, &mut replicate_rng(seed, r as u64));
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..reps).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..reps).map(run).collect()
    }
}

/// Distribution of the forecast probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForecastLaw {
    Uniform { lo: f64, hi: f64 },
    Beta { a: f64, b: f64 },
}

impl Default for ForecastLaw {
    fn default() -> Self {
        ForecastLaw::Beta { a: 2.0, b: 2.0 }
    }
}

impl fmt::Display for ForecastLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForecastLaw::Uniform { lo, hi } => write!(f, "uniform:{lo},{hi}"),
            ForecastLaw::Beta { a, b } => write!(f, "beta:{a},{b}"),
        }
    }
}

impl FromStr for ForecastLaw {
    type Err = String;

    /// `beta:A,B` or `uniform:LO,HI`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (kind, args) = s.split_once(':').ok_or_else(|| format!("expected KIND:X,Y, got `{s}`"))?;
        let (x, y) = args.split_once(',').ok_or_else(|| format!("expected two parameters in `{s}`"))?;
        let x: f64 = x.trim().parse().map_err(|_| format!("bad number `{x}`"))?;
        let y: f64 = y.trim().parse().map_err(|_| format!("bad number `{y}`"))?;
        match kind {
            "beta" => Ok(ForecastLaw::Beta { a: x, b: y }),
            "uniform" => Ok(ForecastLaw::Uniform { lo: x, hi: y }),
            other => Err(format!("unknown law `{other}`")),
        }
    }
}

enum Sampler {
    Uniform(f64, f64),
    Beta(Beta<f64>),
}

impl ForecastLaw {
    fn sampler(&self) -> Result<Sampler> {
        match *self {
            ForecastLaw::Uniform { lo, hi } => {
                if !(lo > 0.0 && hi < 1.0 && lo < hi) {
                    return Err(VerifyError::BadLaw(self.to_string()));
                }
                Ok(Sampler::Uniform(lo, hi))
            }
            ForecastLaw::Beta { a, b } => {
                if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                    return Err(VerifyError::BadLaw(self.to_string()));
                }
                Beta::new(a, b).map(Sampler::Beta).map_err(|_| VerifyError::BadLaw(self.to_string()))
            }
        }
    }
}

/// Miscalibration of the generated outcomes:
/// logit Pr(X = 1) = alpha + beta·logit(p).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoxParameters {
    pub alpha: f64,
    pub beta: f64,
}

impl CoxParameters {
    pub const CALIBRATED: CoxParameters = CoxParameters { alpha: 0.0, beta: 1.0 };

    pub fn event_probability(&self, p: f64) -> f64 {
        logistic(self.alpha + self.beta * logit(p.clamp(LOGIT_EPSILON, 1.0 - LOGIT_EPSILON)))
    }
}

/// Draws `n` forecasts from `law` and outcomes from the Cox model.
pub fn generate(n: usize, params: CoxParameters, law: ForecastLaw, seed: u64) -> Result<BinaryForecastSeries> {
    let mut rng = replicate_rng(seed, 0);
    generate_with(&mut rng, n, params, law)
}

/// As [`generate`], drawing from a caller-supplied generator.
pub fn generate_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    params: CoxParameters,
    law: ForecastLaw,
) -> Result<BinaryForecastSeries> {
    if n == 0 {
        return Err(VerifyError::EmptySeries);
    }
    let sampler = law.sampler()?;
    let mut forecasts = Vec::with_capacity(n);
    let mut outcomes = Vec::with_capacity(n);
    for _ in 0..n {
        let p = match &sampler {
            Sampler::Uniform(lo, hi) => rng.random_range(*lo..*hi),
            Sampler::Beta(beta) => beta.sample(rng),
        };
        forecasts.push(p);
        outcomes.push(draw_outcome(rng, params.event_probability(p)));
    }
    BinaryForecastSeries::new(forecasts, outcomes)
}

/// Outcomes for fixed forecasts under perfect calibration.
pub fn calibrated_outcomes<R: Rng + ?Sized>(rng: &mut R, forecasts: &[f64]) -> Vec<f64> {
    forecasts.iter().map(|&p| draw_outcome(rng, p)).collect()
}

fn draw_outcome<R: Rng + ?Sized>(rng: &mut R, prob: f64) -> f64 {
    if rng.random::<f64>() < prob {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let law = ForecastLaw::default();
        let a = generate(200, CoxParameters::CALIBRATED, law, 7).unwrap();
        let b = generate(200, CoxParameters::CALIBRATED, law, 7).unwrap();
        let c = generate(200, CoxParameters::CALIBRATED, law, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn replicate_streams_are_order_independent() {
        let forward = replicate_map(3, 16, |_, rng| rng.random::<u64>());
        let single: Vec<u64> = (0..16).map(|r| replicate_rng(3, r).random::<u64>()).collect();
        assert_eq!(forward, single);
        assert_ne!(forward[0], forward[1]);
    }

    #[test]
    fn calibrated_base_rate_tracks_mean_forecast() {
        for seed in 0..5 {
            let n = 4000;
            let s = generate(n, CoxParameters::CALIBRATED, ForecastLaw::Uniform { lo: 0.05, hi: 0.95 }, seed).unwrap();
            let gap = (s.base_rate() - s.mean_forecast()).abs();
            assert!(gap < 3.0 * (0.25 / n as f64).sqrt(), "seed {seed}: {gap}");
        }
    }

    #[test]
    fn law_validation() {
        let bad = [
            ForecastLaw::Uniform { lo: 0.0, hi: 0.5 },
            ForecastLaw::Uniform { lo: 0.2, hi: 1.0 },
            ForecastLaw::Uniform { lo: 0.6, hi: 0.5 },
            ForecastLaw::Beta { a: 0.0, b: 2.0 },
        ];
        for law in bad {
            assert!(matches!(generate(5, CoxParameters::CALIBRATED, law, 1), Err(VerifyError::BadLaw(_))));
        }
        assert_eq!(generate(0, CoxParameters::CALIBRATED, ForecastLaw::default(), 1), Err(VerifyError::EmptySeries));
    }

    #[test]
    fn law_parsing() {
        assert_eq!("beta:2,2".parse(), Ok(ForecastLaw::Beta { a: 2.0, b: 2.0 }));
        assert_eq!("uniform:0.05,0.95".parse(), Ok(ForecastLaw::Uniform { lo: 0.05, hi: 0.95 }));
        assert!("gamma:1,2".parse::<ForecastLaw>().is_err());
        assert!("beta:2".parse::<ForecastLaw>().is_err());
    }

    #[test]
    fn zero_slope_ignores_forecasts() {
        let params = CoxParameters { alpha: 0.0, beta: 0.0 };
        assert_eq!(params.event_probability(0.01), 0.5);
        assert_eq!(params.event_probability(0.99), 0.5);
    }
}

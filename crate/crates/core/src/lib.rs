//! Verification of probabilistic forecasts for binary and three-way
//! (home/draw/away) outcomes.
//!
//! The pipeline: ingest forecasts or decimal odds ([`ingest`]), reduce a
//! three-way series to one-vs-all binary series, then
//!
//! * score them with proper scoring rules ([`scoring`]),
//! * bin them by thresholds, quantiles or isotonic regression ([`binning`]),
//! * decompose the mean Brier score three ways ([`decomposition`]),
//! * test reliability ([`inference`]) and discrimination ([`discrimination`]),
//! * draw reliability diagrams with consistency bands ([`diagram`]).
//!
//! [`simulate`] generates series with known miscalibration and supplies the
//! seeded replicate streams every Monte Carlo routine uses.
//!
//! ```
//! use fverify::binning::pav_calibrate;
//! use fverify::decomposition::cr_decompose;
//! use fverify::BinaryForecastSeries;
//!
//! let series = BinaryForecastSeries::new(vec![0.2, 0.4, 0.6], vec![1.0, 0.0, 1.0])?;
//! let cr = cr_decompose(&series, &pav_calibrate(&series))?;
//! assert!((cr.reconstruct() - cr.mean_score).abs() < 1e-12);
//! # Ok::<(), fverify::VerifyError>(())
//! ```

pub mod binning;
pub mod decomposition;
pub mod diagram;
pub mod discrimination;
pub mod domain;
pub mod error;
pub mod inference;
pub mod ingest;
pub mod numeric;
pub mod scoring;
pub mod simulate;

pub use domain::{
    Bin, BinaryForecastSeries, BinnedForecasts, BinningMethod, Category, Component, DecompositionMethod, Flag,
    MulticlassForecastSeries, MulticlassRow, ScoreDecomposition,
};
pub use error::{Result, SeparationDirection, VerifyError};

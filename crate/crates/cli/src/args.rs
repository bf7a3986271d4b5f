use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fverify::binning::Preset;
use fverify::simulate::ForecastLaw;

#[derive(Debug, Parser)]
#[command(name = "fverify", version, about = "Verify probabilistic forecasts of binary and home/draw/away outcomes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mean score per category under one scoring rule.
    Score(ScoreArgs),
    /// Brier score decompositions.
    Decompose(DecomposeArgs),
    /// Reliability tests and the logistic calibration fit.
    Calibrate(CalibrateArgs),
    /// Conditional forecast distributions given the outcome.
    Discriminate(DiscriminateArgs),
    /// Reliability diagram with optional consistency bands.
    Diagram(DiagramArgs),
    /// Decimal odds to implied probabilities, as forecast CSV.
    OddsConvert(OddsConvertArgs),
    /// Synthetic forecasts and outcomes from the logistic calibration model.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV file: forecast, odds or binary (`p,x`) schema; `-` reads stdin.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Treat the input as decimal odds.
    #[arg(long)]
    pub odds: bool,
    /// Category for three-way input. Ignored for binary input.
    #[arg(long, value_enum, ignore_case = true, default_value = "all")]
    pub category: CategoryArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CategoryArg {
    #[value(name = "H")]
    Home,
    #[value(name = "D")]
    Draw,
    #[value(name = "A")]
    Away,
    All,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "brier")]
    pub rule: RuleArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Brier,
    Log,
    ZeroOne,
    Rps,
}

#[derive(Debug, Args)]
pub struct BinningArgs {
    #[arg(long, value_enum, default_value = "pav")]
    pub binning: BinningArg,
    /// Number of bins: equal-width for `fixed`, equal-count for `quantile`.
    #[arg(long, conflicts_with = "preset")]
    pub bins: Option<usize>,
    /// Named thresholds for `fixed` binning. Defaults to the category's own.
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BinningArg {
    Fixed,
    Quantile,
    Pav,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse()
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "all")]
    pub method: MethodArg,
    #[command(flatten)]
    pub binning: BinningArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Cr,
    Lb,
    Yates,
    All,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Significance level for the heuristic profile label.
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
}

#[derive(Debug, Args)]
pub struct DiscriminateArgs {
    #[command(flatten)]
    pub input: InputArgs,
}

#[derive(Debug, Args)]
pub struct DiagramArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub binning: BinningArgs,
    /// Add consistency bands under the calibration hypothesis.
    #[arg(long)]
    pub bands: bool,
    #[arg(long, default_value_t = fverify::diagram::DEFAULT_LEVEL)]
    pub level: f64,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// SVG destination. With `--category all` the category is appended to the file stem.
    #[arg(long)]
    pub out_svg: Option<PathBuf>,
    /// CSV destination for points, band and histogram.
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OddsConvertArgs {
    /// Odds CSV: match_id,odds_home,odds_draw,odds_away,outcome; `-` reads stdin.
    #[arg(long, short)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    /// Intercept of the logistic calibration model.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Slope of the logistic calibration model.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta: f64,
    /// Forecast distribution: `beta:A,B` or `uniform:LO,HI`.
    #[arg(long, default_value = "beta:2,2", value_parser = parse_law)]
    pub law: ForecastLaw,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_law(s: &str) -> Result<ForecastLaw, String> {
    s.parse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn categories_parse_case_insensitively() {
        let cli = Cli::try_parse_from(["fverify", "score", "--input", "f.csv", "--category", "h"]).unwrap();
        let Command::Score(args) = cli.command else { panic!("wrong subcommand") };
        assert_eq!(args.input.category, CategoryArg::Home);
    }

    #[test]
    fn negative_model_parameters_are_accepted() {
        let cli = Cli::try_parse_from(["fverify", "simulate", "--n", "5", "--alpha", "-0.3"]).unwrap();
        let Command::Simulate(args) = cli.command else { panic!("wrong subcommand") };
        assert_eq!(args.alpha, -0.3);
    }

    #[test]
    fn bins_and_preset_conflict() {
        let err = Cli::try_parse_from(["fverify", "decompose", "-i", "f", "--bins", "3", "--preset", "draw5"]);
        assert!(err.is_err());
    }
}

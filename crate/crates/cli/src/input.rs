use std::io::Read;
use std::path::Path;

use fverify::binning::{Binning, Preset};
use fverify::ingest::{self, one_vs_all, Schema};
use fverify::{BinaryForecastSeries, Category, Flag, MulticlassForecastSeries};

use crate::args::{BinningArg, BinningArgs, CategoryArg, InputArgs};
use crate::{warning, Failure};

pub fn read_text(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    let result = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::File::open(path).and_then(|mut f| f.read_to_string(&mut text)).map(|_| ())
    };
    result.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(text)
}

/// Parsed input, before category selection.
pub enum Loaded {
    Binary(BinaryForecastSeries),
    Multiclass { series: MulticlassForecastSeries, flags: Vec<Flag> },
}

pub fn load(args: &InputArgs) -> Result<Loaded, Failure> {
    let text = read_text(&args.input)?;
    let schema = if args.odds {
        Schema::Odds
    } else {
        ingest::detect_schema(&text).ok_or_else(|| {
            Failure::Input(format!(
                "{}: header matches none of `{}`, `{}` or `{}`",
                args.input.display(),
                ingest::FORECAST_HEADER.join(","),
                ingest::ODDS_HEADER.join(","),
                ingest::BINARY_HEADER.join(","),
            ))
        })?
    };
    let ingested = match schema {
        Schema::Binary => return Ok(Loaded::Binary(ingest::parse_binary_csv(&text)?)),
        Schema::Forecast => ingest::parse_forecast_csv(&text)?,
        Schema::Odds => ingest::parse_odds_csv(&text)?,
    };
    for w in &ingested.warnings {
        warning(&w.to_string());
    }
    let flags = if ingested.warnings.is_empty() { Vec::new() } else { vec![Flag::DuplicateMatchId] };
    Ok(Loaded::Multiclass { series: ingested.series, flags })
}

/// One binary problem to analyse, labelled for the report.
pub struct Target {
    pub label: &'static str,
    pub category: Option<Category>,
    pub series: BinaryForecastSeries,
}

impl Loaded {
    /// Binary series selected by `--category`, in H, D, A order.
    pub fn targets(&self, which: CategoryArg) -> Vec<Target> {
        match self {
            Loaded::Binary(series) => vec![Target { label: "binary", category: None, series: series.clone() }],
            Loaded::Multiclass { series, .. } => categories(which)
                .into_iter()
                .map(|c| Target { label: c.label(), category: Some(c), series: one_vs_all(series, c) })
                .collect(),
        }
    }

    pub fn is_multiclass(&self) -> bool {
        matches!(self, Loaded::Multiclass { .. })
    }

    pub fn input_flags(&self) -> &[Flag] {
        match self {
            Loaded::Binary(_) => &[],
            Loaded::Multiclass { flags, .. } => flags,
        }
    }
}

pub fn categories(which: CategoryArg) -> Vec<Category> {
    match which {
        CategoryArg::Home => vec![Category::Home],
        CategoryArg::Draw => vec![Category::Draw],
        CategoryArg::Away => vec![Category::Away],
        CategoryArg::All => Category::ALL.to_vec(),
    }
}

/// Default fixed thresholds for a category.
fn category_preset(category: Option<Category>) -> Preset {
    match category {
        Some(Category::Draw) => Preset::Draw5,
        Some(Category::Away) => Preset::Awin8,
        Some(Category::Home) | None => Preset::Hwin10,
    }
}

/// The binning recipe for one target.
pub fn binning_for(args: &BinningArgs, category: Option<Category>) -> Result<Binning, Failure> {
    match args.binning {
        BinningArg::Pav => Ok(Binning::Pav),
        BinningArg::Quantile => match args.bins {
            Some(d) => Ok(Binning::Quantile(d)),
            None => Err(Failure::Usage("--binning quantile needs --bins".into())),
        },
        BinningArg::Fixed => match args.bins {
            Some(0) => Err(Failure::Usage("--bins must be at least 1".into())),
            Some(d) => Ok(Binning::Fixed((1..d).map(|k| k as f64 / d as f64).collect())),
            None => Ok(Binning::preset(args.preset.unwrap_or_else(|| category_preset(category)))),
        },
    }
}

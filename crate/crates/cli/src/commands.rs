use std::path::{Path, PathBuf};

use fverify::binning::IsotonicStep;
use fverify::decomposition::{cr_decompose, lb_decompose, skill_score, sum_decompositions, yates_decompose};
use fverify::diagram::{self, DiagramData};
use fverify::discrimination::{discrimination_summary, wilcoxon_exact_test, FiveNumber, EXACT_WILCOXON_LIMIT};
use fverify::inference::{
    classify_profile, deviance_test, fit_cox_calibration, ignorance_lr_test, spiegelhalter_test, wald_tests, TestResult,
};
use fverify::scoring::{mean_rps, mean_score, ScoringRule};
use fverify::simulate::{generate, CoxParameters};
use fverify::{ingest, numeric, BinnedForecasts, DecompositionMethod, Flag, ScoreDecomposition, VerifyError};
use serde_json::{json, Map, Value};

use crate::args::{
    CalibrateArgs, CategoryArg, Command, DecomposeArgs, DiagramArgs, DiscriminateArgs, MethodArg, OddsConvertArgs,
    RuleArg, ScoreArgs, SimulateArgs,
};
use crate::input::{binning_for, load, read_text, Loaded, Target};
use crate::report::{degenerate_flag, num, Report};
use crate::{warning, Failure, Outcome};

pub fn run(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Score(args) => score(&args),
        Command::Decompose(args) => decompose(&args),
        Command::Calibrate(args) => calibrate(&args),
        Command::Discriminate(args) => discriminate(&args),
        Command::Diagram(args) => draw(&args),
        Command::OddsConvert(args) => odds_convert(&args),
        Command::Simulate(args) => simulate(&args),
    }
}

fn finish(report: Report) -> Result<Outcome, Failure> {
    Ok(Outcome { stdout: report.render(), degenerate: report.is_degenerate() })
}

/// Runs `f`, turning degenerate errors into a flag and `null`.
fn guarded<T>(report: &mut Report, f: impl FnOnce() -> fverify::Result<T>) -> Result<Option<T>, Failure> {
    match f() {
        Ok(v) => Ok(Some(v)),
        Err(e) => match degenerate_flag(&e) {
            Some(flag) => {
                report.flag(flag);
                Ok(None)
            }
            None => Err(e.into()),
        },
    }
}

/// Whether the one-vs-all results get a component-summed All record.
fn wants_all(loaded: &Loaded, which: CategoryArg) -> bool {
    loaded.is_multiclass() && which == CategoryArg::All
}

fn score(args: &ScoreArgs) -> Result<Outcome, Failure> {
    let loaded = load(&args.input)?;
    let mut report = Report::new("score");
    report.flags(loaded.input_flags());
    let mut scores = Map::new();
    let rule = match args.rule {
        RuleArg::Rps => {
            let Loaded::Multiclass { series, .. } = &loaded else {
                return Err(Failure::Usage("--rule rps needs three-way input".into()));
            };
            report.insert("rule", ScoringRule::Rps.name());
            report.insert("n", series.len());
            scores.insert("All".into(), num(mean_rps(series)));
            report.insert("scores", scores);
            return finish(report);
        }
        RuleArg::Brier => ScoringRule::HalfBrier,
        RuleArg::Log => ScoringRule::ignorance(),
        RuleArg::ZeroOne => ScoringRule::ZeroOne,
    };
    report.insert("rule", rule.name());
    let targets = loaded.targets(args.input.category);
    report.insert("n", targets[0].series.len());
    let mut values = Vec::with_capacity(targets.len());
    for t in &targets {
        let value = mean_score(&t.series, rule)?;
        values.push(value);
        scores.insert(t.label.into(), num(value));
    }
    if wants_all(&loaded, args.input.category) {
        scores.insert("All".into(), num(numeric::sum(values)));
    }
    report.insert("scores", scores);
    finish(report)
}

fn methods(arg: MethodArg) -> Vec<DecompositionMethod> {
    match arg {
        MethodArg::Cr => vec![DecompositionMethod::Cr],
        MethodArg::Lb => vec![DecompositionMethod::Lb],
        MethodArg::Yates => vec![DecompositionMethod::Yates],
        MethodArg::All => vec![DecompositionMethod::Cr, DecompositionMethod::Lb, DecompositionMethod::Yates],
    }
}

fn method_key(method: DecompositionMethod) -> &'static str {
    match method {
        DecompositionMethod::Cr => "CR",
        DecompositionMethod::Lb => "LB",
        DecompositionMethod::Yates => "YATES",
    }
}

fn decomposition_json(d: &ScoreDecomposition) -> Value {
    let components: Map<String, Value> = d
        .components
        .iter()
        .map(|c| {
            let entry = json!({
                "value": num(c.value),
                "weight": c.weight,
                "percent_of_unc": num(d.percent_of_uncertainty(c.value)),
            });
            (c.name.to_owned(), entry)
        })
        .collect();
    json!({
        "components": components,
        "mean_score": num(d.mean_score),
        "reconstructed": num(d.reconstruct()),
        "uncertainty": num(d.uncertainty),
        "skill": num(skill_score(d).ok()),
        "flags": d.flags,
    })
}

fn bins_json(binned: &BinnedForecasts) -> Value {
    let method = match binned.method() {
        fverify::BinningMethod::Fixed => "fixed",
        fverify::BinningMethod::Quantile => "quantile",
        fverify::BinningMethod::Pav => "pav",
    };
    let bins: Vec<Value> = binned
        .bins()
        .iter()
        .map(|b| {
            json!({
                "lower": b.lower,
                "upper": b.upper,
                "mean_forecast": b.mean_forecast,
                "event_frequency": b.event_frequency,
                "count": b.count,
            })
        })
        .collect();
    json!({ "method": method, "bins": bins })
}

fn decompose(args: &DecomposeArgs) -> Result<Outcome, Failure> {
    let loaded = load(&args.input)?;
    let mut report = Report::new("decompose");
    report.flags(loaded.input_flags());
    let methods = methods(args.method);
    let targets = loaded.targets(args.input.category);
    let mut per_method: Vec<Vec<ScoreDecomposition>> = vec![Vec::new(); methods.len()];
    let mut results = Vec::new();
    for t in &targets {
        let mut entry = Map::new();
        entry.insert("category".into(), t.label.into());
        entry.insert("n".into(), t.series.len().into());
        entry.insert("base_rate".into(), num(t.series.base_rate()));
        for (k, &method) in methods.iter().enumerate() {
            let d = match method {
                DecompositionMethod::Cr => {
                    let binned = binning_for(&args.binning, t.category)?.apply(&t.series)?;
                    entry.insert("binning".into(), bins_json(&binned));
                    cr_decompose(&t.series, &binned)?
                }
                DecompositionMethod::Lb => lb_decompose(&t.series),
                DecompositionMethod::Yates => yates_decompose(&t.series),
            };
            report.flags(&d.flags);
            entry.insert(method_key(method).into(), decomposition_json(&d));
            per_method[k].push(d);
        }
        results.push(Value::Object(entry));
    }
    if wants_all(&loaded, args.input.category) {
        let mut entry = Map::new();
        entry.insert("category".into(), "All".into());
        for (k, &method) in methods.iter().enumerate() {
            entry.insert(method_key(method).into(), decomposition_json(&sum_decompositions(&per_method[k])));
        }
        results.push(Value::Object(entry));
    }
    report.insert("results", results);
    finish(report)
}

fn test_json(t: &TestResult) -> Value {
    json!({ "statistic": num(t.statistic), "df": t.df, "p_value": num(t.p_value) })
}

fn calibrate(args: &CalibrateArgs) -> Result<Outcome, Failure> {
    let loaded = load(&args.input)?;
    let mut report = Report::new("calibrate");
    report.flags(loaded.input_flags());
    let mut results = Vec::new();
    for t in loaded.targets(args.input.category) {
        results.push(calibrate_one(&mut report, &t, args.level)?);
    }
    report.insert("results", results);
    finish(report)
}

fn calibrate_one(report: &mut Report, t: &Target, level: f64) -> Result<Value, Failure> {
    let spiegelhalter = guarded(report, || spiegelhalter_test(&t.series))?.map(|s| {
        json!({ "z": num(s.z), "z_squared": num(s.test.statistic), "df": s.test.df, "p_value": num(s.test.p_value) })
    });
    let mut separation = Value::Null;
    let fit = match fit_cox_calibration(&t.series) {
        Ok(fit) => Some(fit),
        Err(VerifyError::SeparationDetected { direction }) => {
            report.flag(Flag::SeparationDetected);
            separation = serde_json::to_value(direction).expect("direction serializes");
            None
        }
        Err(e) => guarded(report, || Err::<(), _>(e)).map(|_| None)?,
    };
    let (cox, lr, profile) = match fit {
        Some(fit) if !fit.converged => {
            report.flag(Flag::NotConverged);
            (Value::Null, Value::Null, Value::Null)
        }
        Some(fit) => {
            let (intercept, slope) = wald_tests(&fit)?;
            let deviance = deviance_test(&fit)?;
            let lr = ignorance_lr_test(&t.series, &fit)?;
            if deviance.floored || lr.floored {
                report.flag(Flag::StatisticFloored);
            }
            let profile = classify_profile(&fit, level)?;
            report.flag(Flag::HeuristicProfile);
            let cox = json!({
                "alpha": { "estimate": num(fit.alpha), "se": num(fit.se_alpha), "wald": num(intercept.statistic), "p_value": num(intercept.p_value) },
                "beta": { "estimate": num(fit.beta), "se": num(fit.se_beta), "wald": num(slope.statistic), "p_value": num(slope.p_value) },
                "deviance": {
                    "d0": num(fit.deviance_null),
                    "d1": num(fit.deviance_fitted),
                    "delta": num(deviance.statistic),
                    "df": deviance.df,
                    "p_value": num(deviance.p_value),
                },
                "iterations": fit.iterations,
            });
            (cox, test_json(&lr), serde_json::to_value(profile).expect("profile serializes"))
        }
        None => (Value::Null, Value::Null, Value::Null),
    };
    Ok(json!({
        "category": t.label,
        "n": t.series.len(),
        "spiegelhalter": spiegelhalter,
        "cox": cox,
        "separation": separation,
        "ignorance_lr": lr,
        "profile": profile,
    }))
}

fn five_number_json(f: &FiveNumber) -> Value {
    json!({ "min": f.min, "q1": f.q1, "median": f.median, "q3": f.q3, "max": f.max })
}

fn discriminate(args: &DiscriminateArgs) -> Result<Outcome, Failure> {
    let loaded = load(&args.input)?;
    let mut report = Report::new("discriminate");
    report.flags(loaded.input_flags());
    let mut results = Vec::new();
    for t in loaded.targets(args.input.category) {
        let entry = match guarded(&mut report, || discrimination_summary(&t.series))? {
            Some(d) => {
                report.flags(&d.flags);
                let exact = if t.series.len() <= EXACT_WILCOXON_LIMIT {
                    guarded(&mut report, || wilcoxon_exact_test(&t.series))?.map(|w| test_json(&w))
                } else {
                    None
                };
                json!({
                    "category": t.label,
                    "n0": d.n0,
                    "n1": d.n1,
                    "m0": d.m0,
                    "m1": d.m1,
                    "diff": d.diff,
                    "wilcoxon": d.wilcoxon.as_ref().map(test_json),
                    "wilcoxon_exact": exact,
                    "ks": test_json(&d.ks),
                    "c_statistic": d.c_statistic,
                    "five_number": { "0": five_number_json(&d.five_number_0), "1": five_number_json(&d.five_number_1) },
                })
            }
            None => json!({ "category": t.label, "n": t.series.len() }),
        };
        results.push(entry);
    }
    report.insert("results", results);
    finish(report)
}

/// `dir/stem_H.ext` when several categories share one destination.
fn destination(path: &Path, label: &str, several: bool) -> PathBuf {
    if !several {
        return path.to_path_buf();
    }
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{label}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{label}"),
    };
    path.with_file_name(name)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn draw(args: &DiagramArgs) -> Result<Outcome, Failure> {
    let loaded = load(&args.input)?;
    let mut report = Report::new("diagram");
    report.flags(loaded.input_flags());
    let targets = loaded.targets(args.input.category);
    let several = targets.len() > 1;
    let mut results = Vec::new();
    for t in &targets {
        let binned = binning_for(&args.binning, t.category)?.apply(&t.series)?;
        let data = if args.bands {
            diagram::diagram_data(&t.series, &binned, args.level, args.reps, args.seed)?
        } else {
            DiagramData {
                points: binned
                    .bins()
                    .iter()
                    .map(|b| diagram::DiagramPoint {
                        forecast: b.mean_forecast,
                        frequency: b.event_frequency,
                        count: b.count,
                    })
                    .collect(),
                band: Vec::new(),
                histogram: diagram::histogram(t.series.forecasts()),
                level: args.level,
                reps: 0,
                seed: args.seed,
            }
        };
        let curve = IsotonicStep::fit(t.series.forecasts(), t.series.outcomes());
        let mut files = Map::new();
        if let Some(path) = &args.out_svg {
            let path = destination(path, t.label, several);
            write_file(&path, &diagram::render_svg(&data))?;
            files.insert("svg".into(), path.display().to_string().into());
        }
        if let Some(path) = &args.out_csv {
            let path = destination(path, t.label, several);
            write_file(&path, &diagram::export_csv(&data))?;
            files.insert("csv".into(), path.display().to_string().into());
        }
        let points: Vec<Value> = data
            .points
            .iter()
            .map(|p| json!({ "forecast": p.forecast, "frequency": p.frequency, "count": p.count }))
            .collect();
        results.push(json!({
            "category": t.label,
            "n": t.series.len(),
            "points": points,
            "band_points": data.band.len(),
            "escape_fraction": num(diagram::escape_fraction(&data.band, &curve)),
            "files": files,
        }));
    }
    if args.bands {
        report.insert("level", args.level);
        report.insert("reps", args.reps);
        report.insert("seed", args.seed);
    }
    report.insert("results", results);
    finish(report)
}

fn odds_convert(args: &OddsConvertArgs) -> Result<Outcome, Failure> {
    let text = read_text(&args.input)?;
    let ingested = ingest::parse_odds_csv(&text)?;
    for w in &ingested.warnings {
        warning(&w.to_string());
    }
    Ok(Outcome { stdout: ingest::write_forecast_csv(&ingested.series), degenerate: false })
}

fn simulate(args: &SimulateArgs) -> Result<Outcome, Failure> {
    if args.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let params = CoxParameters { alpha: args.alpha, beta: args.beta };
    let series = generate(args.n, params, args.law, args.seed)?;
    Ok(Outcome { stdout: ingest::write_binary_csv(&series), degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shared_destinations_get_category_suffixes() {
        assert_eq!(destination(Path::new("out/rel.svg"), "H", true), PathBuf::from("out/rel_H.svg"));
        assert_eq!(destination(Path::new("rel"), "D", true), PathBuf::from("rel_D"));
        assert_eq!(destination(Path::new("rel.svg"), "A", false), PathBuf::from("rel.svg"));
    }
}

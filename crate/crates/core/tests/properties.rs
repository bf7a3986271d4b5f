mod oracle;

use fverify::binning::{bin_fixed, bin_quantile, isotonic_fit, pav_calibrate, Binning};
use fverify::decomposition::{cr_decompose, decompose_multiclass, lb_decompose, yates_decompose};
use fverify::discrimination::{c_statistic, discrimination_summary};
use fverify::ingest::{odds_to_probabilities, one_vs_all, OddsTriple};
use fverify::scoring::mean_brier;
use fverify::{BinaryForecastSeries, Category, DecompositionMethod, MulticlassForecastSeries, MulticlassRow};
use proptest::prelude::*;

fn series(max_len: usize) -> impl Strategy<Value = BinaryForecastSeries> {
    prop::collection::vec((0.0..=1.0f64, any::<bool>()), 2..=max_len).prop_map(|pairs| {
        let (p, x): (Vec<f64>, Vec<bool>) = pairs.into_iter().unzip();
        BinaryForecastSeries::from_bools(p, &x).unwrap()
    })
}

/// Forecasts on a coarse grid so ties are common.
fn tied_series(max_len: usize) -> impl Strategy<Value = BinaryForecastSeries> {
    prop::collection::vec((0u8..=10, any::<bool>()), 2..=max_len).prop_map(|pairs| {
        let p = pairs.iter().map(|(k, _)| f64::from(*k) / 10.0).collect();
        let x: Vec<bool> = pairs.iter().map(|(_, x)| *x).collect();
        BinaryForecastSeries::from_bools(p, &x).unwrap()
    })
}

fn both_classes(s: &BinaryForecastSeries) -> bool {
    let k = s.event_count();
    k > 0 && k < s.len()
}

/// Thresholds halfway between consecutive distinct forecasts, so every
/// distinct value gets its own bin.
fn singleton_thresholds(p: &[f64]) -> Vec<f64> {
    let mut v = p.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.windows(2).map(|w| 0.5 * (w[0] + w[1])).filter(|t| *t > 0.0 && *t < 1.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn every_decomposition_reconstructs_the_brier_score(s in series(300)) {
        let bs = oracle::brier(s.forecasts(), s.outcomes());
        for binning in [Binning::Pav, Binning::Quantile(2), Binning::Fixed(vec![0.3, 0.7])] {
            let cr = cr_decompose(&s, &binning.apply(&s).unwrap()).unwrap();
            prop_assert!((cr.reconstruct() - bs).abs() < 1e-12);
        }
        prop_assert!((lb_decompose(&s).reconstruct() - bs).abs() < 1e-12);
        prop_assert!((yates_decompose(&s).reconstruct() - bs).abs() < 1e-12);
    }

    #[test]
    fn yates_and_lb_components_are_linked(s in series(300)) {
        prop_assume!(both_classes(&s));
        let y = yates_decompose(&s);
        let lb = lb_decompose(&s);
        let d = discrimination_summary(&s).unwrap();
        let b = d.diff;
        let c = |name| y.get(name).unwrap();
        prop_assert!((c("COV") - b * c("UNC")).abs() < 1e-12);
        prop_assert!((c("VPB") - b * b * c("UNC")).abs() < 1e-12);
        prop_assert!((lb.get("REF").unwrap() - (c("VPB") + c("VPW"))).abs() < 1e-12);
        prop_assert!((lb.get("DIS").unwrap() - c("VPB")).abs() < 1e-12);
        let cb2 = c("UNC") - 2.0 * c("COV") + c("VPB") + c("RIL");
        prop_assert!((lb.get("CB2").unwrap() - cb2).abs() < 1e-12);
        let (n0, n1, n) = (d.n0 as f64, d.n1 as f64, s.len() as f64);
        prop_assert!((lb.get("DIS").unwrap() - n0 * n1 / (n * n) * b * b).abs() < 1e-12);
    }

    #[test]
    fn singleton_bins_give_the_discrete_murphy_components(s in tied_series(200)) {
        let binned = bin_fixed(&s, &singleton_thresholds(s.forecasts())).unwrap();
        let cr = cr_decompose(&s, &binned).unwrap();
        let (rel, res, unc) = oracle::murphy_discrete(s.forecasts(), s.outcomes());
        prop_assert!((cr.get("REL").unwrap() - rel).abs() < 1e-12);
        prop_assert!((cr.get("RES").unwrap() - res).abs() < 1e-12);
        prop_assert!((cr.get("UNC").unwrap() - unc).abs() < 1e-12);
    }

    #[test]
    fn pav_reliability_is_nonnegative(s in series(300)) {
        let cr = cr_decompose(&s, &pav_calibrate(&s)).unwrap();
        prop_assert!(cr.get("REL").unwrap() >= -1e-15);
    }

    #[test]
    fn coarser_bins_never_resolve_more(s in tied_series(200)) {
        let fine = cr_decompose(&s, &bin_fixed(&s, &[0.2, 0.4, 0.5, 0.6, 0.8]).unwrap()).unwrap();
        let coarse = cr_decompose(&s, &bin_fixed(&s, &[0.4, 0.6]).unwrap()).unwrap();
        prop_assert!(coarse.get("RES").unwrap() <= fine.get("RES").unwrap() + 1e-12);
    }

    #[test]
    fn pav_matches_exhaustive_search(s in series(10)) {
        let (p, x) = (s.forecasts(), s.outcomes());
        let fitted = isotonic_fit(p, x);
        let expected = oracle::isotonic_brute_force(p, x);
        prop_assert_eq!(oracle::sse(&fitted, x), oracle::sse(&expected, x));
        prop_assert_eq!(fitted, expected);
    }

    #[test]
    fn pav_matches_exhaustive_search_with_ties(s in tied_series(12)) {
        let (p, x) = (s.forecasts(), s.outcomes());
        prop_assert_eq!(isotonic_fit(p, x), oracle::isotonic_brute_force(p, x));
    }

    #[test]
    fn pav_is_idempotent(s in tied_series(100)) {
        let fitted = isotonic_fit(s.forecasts(), s.outcomes());
        for (again, once) in isotonic_fit(s.forecasts(), &fitted).iter().zip(&fitted) {
            prop_assert!((again - once).abs() < 1e-15);
        }
    }

    #[test]
    fn binning_conserves_counts_and_events(s in series(300), d in 1usize..8) {
        prop_assume!(d <= s.len());
        let events = s.event_count() as f64;
        for binned in [pav_calibrate(&s), bin_quantile(&s, d).unwrap(), bin_fixed(&s, &[0.25, 0.5]).unwrap()] {
            prop_assert_eq!(binned.total_count(), s.len());
            let binned_events: f64 = binned.bins().iter().map(|b| b.event_frequency * b.count as f64).sum();
            prop_assert!((binned_events - events).abs() < 1e-9);
        }
    }

    #[test]
    fn c_statistic_counts_pairs(s in tied_series(200)) {
        prop_assume!(both_classes(&s));
        prop_assert_eq!(c_statistic(&s).unwrap(), oracle::concordance_pairs(s.forecasts(), s.outcomes()));
    }

    #[test]
    fn c_statistic_ignores_monotone_transforms(s in series(200)) {
        prop_assume!(both_classes(&s));
        let squashed: Vec<f64> = s.forecasts().iter().map(|p| p * p * p).collect();
        let t = BinaryForecastSeries::new(squashed, s.outcomes().to_vec()).unwrap();
        prop_assert_eq!(c_statistic(&s).unwrap(), c_statistic(&t).unwrap());
    }

    #[test]
    fn one_vs_all_probabilities_sum_to_one(rows in prop::collection::vec((0.01..1.0f64, 0.01..1.0f64, 0.01..1.0f64, 0u8..3), 1..50)) {
        let rows: Vec<MulticlassRow> = rows
            .into_iter()
            .enumerate()
            .map(|(i, (h, d, a, k))| {
                let total = h + d + a;
                MulticlassRow::new(i.to_string(), [h / total, d / total, a / total], Category::ALL[k as usize]).unwrap()
            })
            .collect();
        let series = MulticlassForecastSeries::new(rows).unwrap();
        let parts: Vec<BinaryForecastSeries> = Category::ALL.iter().map(|&c| one_vs_all(&series, c)).collect();
        for i in 0..series.len() {
            let total: f64 = parts.iter().map(|s| s.forecasts()[i]).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            let events: f64 = parts.iter().map(|s| s.outcomes()[i]).sum();
            prop_assert_eq!(events, 1.0);
        }
        let brier_total: f64 = parts.iter().map(mean_brier).sum();
        let all = decompose_multiclass(&series, DecompositionMethod::Yates, &Binning::Pav).unwrap().all;
        prop_assert!((all.mean_score - brier_total).abs() < 1e-12);
        prop_assert!((all.reconstruct() - brier_total).abs() < 1e-12);
    }

    #[test]
    fn odds_conversion_ignores_common_scale(h in 1.05..20.0f64, d in 1.05..20.0f64, a in 1.05..20.0f64, k in 1.0..5.0f64) {
        let base = odds_to_probabilities(&OddsTriple::new(h, d, a).unwrap());
        let scaled = odds_to_probabilities(&OddsTriple::new(h * k, d * k, a * k).unwrap());
        for (u, v) in base.iter().zip(scaled) {
            prop_assert!((u - v).abs() < 1e-12);
        }
        prop_assert!((base.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn climatological_forecast_is_exactly_degenerate() {
    for (n, k) in [(4, 1), (10, 3), (7, 3), (9, 2), (100, 37)] {
        let x: Vec<bool> = (0..n).map(|i| i < k).collect();
        let x_bar = k as f64 / n as f64;
        let s = BinaryForecastSeries::from_bools(vec![x_bar; n], &x).unwrap();
        let cr = cr_decompose(&s, &pav_calibrate(&s)).unwrap();
        let lb = lb_decompose(&s);
        let y = yates_decompose(&s);
        assert_eq!(cr.get("REL"), Some(0.0), "n={n}");
        assert_eq!(cr.get("RES"), Some(0.0), "n={n}");
        assert_eq!(cr.skill, Some(0.0), "n={n}");
        assert_eq!(lb.get("REF"), Some(0.0), "n={n}");
        assert_eq!(lb.get("DIS"), Some(0.0), "n={n}");
        assert_eq!(y.get("COV"), Some(0.0), "n={n}");
        assert_eq!(cr.mean_score, cr.uncertainty, "n={n}");
    }
}

//! `atfmrisk fit`: estimate the delay-cost model from flight-level data.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::json;

use atfmrisk::costlib::{self, CostCoefficients};
use atfmrisk::fitlab::{
    self, train_test_split, zscore_filter, GbtParams, ModelFile, RegulationSample,
};
use atfmrisk::ingest::{self, ReasonCode};

use super::{input_err, numeric_err};
use crate::report::RunReport;
use crate::{CliError, FitArgs, FitMethod};

pub fn run(args: &FitArgs) -> Result<(), CliError> {
    if !(args.split > 0.0 && args.split < 1.0) {
        return Err(CliError::Input(format!(
            "--split must be in (0, 1), got {}",
            args.split
        )));
    }
    let needs_reasons = matches!(
        args.method,
        FitMethod::Ols | FitMethod::Gbt | FitMethod::All
    );
    if needs_reasons && args.regulations.is_none() {
        return Err(CliError::Input(
            "--method ols/gbt/all needs --regulations to join regulation reasons".into(),
        ));
    }

    let mut report = RunReport::new("fit");

    let flights = ingest::parse_flights(&args.flights).map_err(input_err)?;
    report.parsed("flights", &flights);
    let (aircraft, aircraft_parsed) = ingest::parse_aircraft(&args.aircraft).map_err(input_err)?;
    report.parsed("aircraft", &aircraft_parsed);

    let reason_of: BTreeMap<String, ReasonCode> = match &args.regulations {
        Some(path) => {
            let regs = ingest::parse_regulations(path).map_err(input_err)?;
            report.parsed("regulations", &regs);
            let mut map = BTreeMap::new();
            for r in regs.records {
                map.entry(r.reg_id).or_insert(r.reason);
            }
            map
        }
        None => BTreeMap::new(),
    };
    report.stage_done("parse");

    // Per-flight costs use the reference coefficients; the fit then
    // re-estimates the aggregate curve from the regulation averages.
    let costing = CostCoefficients::default();
    let allocation = costlib::allocate_to_regulations(&flights.records, &aircraft, &costing);
    if allocation.n_excluded_unknown_aircraft > 0 {
        report.note(format!(
            "excluded {} delayed flight(s) with unknown aircraft types: {}",
            allocation.n_excluded_unknown_aircraft,
            allocation
                .excluded_aircraft_types
                .iter()
                .cloned()
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    let samples: Vec<RegulationSample> = allocation
        .summaries
        .iter()
        .map(|s| RegulationSample::from_summary(s, reason_of.get(&s.reg_id).copied()))
        .collect();
    report.note(format!("{} regulation samples", samples.len()));

    let filtered = zscore_filter(&samples, args.zcost, args.zdelay);
    report.note(format!(
        "z-score filter kept {} of {} samples (|z_cost| < {}, |z_delay| < {})",
        filtered.len(),
        samples.len(),
        args.zcost,
        args.zdelay
    ));
    let (train, test) = train_test_split(&filtered, args.split, args.seed);
    report.stage_done("prepare");

    let to_points = |s: &[RegulationSample]| -> Vec<(f64, f64)> {
        s.iter().map(|x| (x.avg_delay, x.avg_cost)).collect()
    };
    let quad = fitlab::fit_quadratic_with_validation(&to_points(&train), &to_points(&test))
        .map_err(numeric_err)?;
    let error_model = fitlab::fit_error_model(&filtered, args.bins).map_err(numeric_err)?;
    report.stage_done("fit");

    let model = ModelFile::from_fit(&quad, &error_model, costing.reference_sqrt_mtow);
    model
        .save(&args.out)
        .map_err(|e| input_err(format!("{}: {e}", args.out.display())))?;

    println!(
        "alpha = {:.6}, beta = {:.6}, R2 in = {:.4}, R2 out = {:.4} (n_train = {}, n_test = {})",
        quad.alpha, quad.beta, quad.r2_in, quad.r2_out, quad.n_train, quad.n_test
    );

    if needs_reasons {
        let companion = companion_report(args, &train, &test)?;
        let companion_path = companion_report_path(&args.out);
        std::fs::write(
            &companion_path,
            serde_json::to_string_pretty(&companion).expect("serializable") + "\n",
        )
        .map_err(|e| input_err(format!("{}: {e}", companion_path.display())))?;
        report.note(format!("companion report: {}", companion_path.display()));
        report.stage_done("report");
    }

    report.finish();
    Ok(())
}

/// The companion report sits next to model.json.
pub fn companion_report_path(model_out: &Path) -> std::path::PathBuf {
    model_out.with_extension("report.json")
}

fn companion_report(
    args: &FitArgs,
    train: &[RegulationSample],
    test: &[RegulationSample],
) -> Result<serde_json::Value, CliError> {
    // Reason-aware fits use only the samples whose regulation was found.
    let with_reasons = |s: &[RegulationSample]| -> Vec<RegulationSample> {
        s.iter().filter(|x| x.reason.is_some()).cloned().collect()
    };
    let train_r = with_reasons(train);
    let test_r = with_reasons(test);
    let dropped = train.len() - train_r.len() + test.len() - test_r.len();

    let mut out = serde_json::Map::new();
    out.insert("n_train".into(), json!(train_r.len()));
    out.insert("n_test".into(), json!(test_r.len()));
    out.insert("samples_without_reason".into(), json!(dropped));

    if matches!(args.method, FitMethod::Ols | FitMethod::All) {
        let ols = fitlab::fit_ols_dummies(&train_r).map_err(numeric_err)?;
        let dummies: serde_json::Map<String, serde_json::Value> = ols
            .dummy_coefs
            .iter()
            .map(|(reason, coef)| {
                (
                    reason.to_string(),
                    json!({
                        "coef": coef,
                        "std_error": ols.dummy_std_errors[reason],
                        "significant_1pct": ols
                            .significant_1pct
                            .contains(&fitlab::OlsResult::dummy_name(*reason)),
                    }),
                )
            })
            .collect();
        out.insert(
            "ols".into(),
            json!({
                "intercept": ols.intercept,
                "intercept_std_error": ols.intercept_se,
                "delay_coef": ols.delay_coef,
                "delay_std_error": ols.delay_se,
                "baseline_reason": ols.baseline_reason.to_string(),
                "dummies": dummies,
                "significant_1pct": ols.significant_1pct,
                "r2": ols.r2,
            }),
        );
    }

    if matches!(args.method, FitMethod::Gbt | FitMethod::All) {
        let params = GbtParams {
            seed: args.seed,
            ..GbtParams::default()
        };
        let model = fitlab::fit_gbt(&train_r, &params).map_err(numeric_err)?;
        let importance = fitlab::gbt_importance(&model);
        let r2_out = gbt_r2(&model, &test_r);
        out.insert(
            "gbt".into(),
            json!({
                "n_trees": params.n_trees,
                "learning_rate": params.learning_rate,
                "max_depth": params.max_depth,
                "min_samples_leaf": params.min_samples_leaf,
                "importances": importance.per_feature,
                "reason_importance_aggregate": importance.reason_aggregate,
                "r2_out": r2_out,
            }),
        );
    }

    Ok(serde_json::Value::Object(out))
}

fn gbt_r2(model: &fitlab::GbtModel, test: &[RegulationSample]) -> Option<f64> {
    let preds: Vec<f64> = test.iter().map(|s| fitlab::gbt_predict(model, s)).collect();
    let ys: Vec<f64> = test.iter().map(|s| s.avg_cost).collect();
    fitlab::r_squared(&preds, &ys).ok()
}

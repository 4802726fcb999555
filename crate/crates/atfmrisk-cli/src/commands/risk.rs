//! `atfmrisk risk`: per-sector economic risk over calendar horizons.

use atfmrisk::fitlab::ModelFile;
use atfmrisk::ingest;
use atfmrisk::riskcalc::{self, AdMode, AggregationPeriod, RiskOptions};

use super::{input_err, parse_year_range};
use crate::report::RunReport;
use crate::table::write_risk_csv;
use crate::{AdModeArg, CliError, PeriodArg, RiskArgs};

pub fn run(args: &RiskArgs) -> Result<(), CliError> {
    let (first_year, last_year) = parse_year_range(&args.range)?;
    let period = match args.period {
        PeriodArg::Month => AggregationPeriod::Month,
        PeriodArg::Quarter => AggregationPeriod::Quarter,
        PeriodArg::Year => AggregationPeriod::Year,
        PeriodArg::QuarterAcrossYears => AggregationPeriod::QuarterAcrossYears,
    };
    let options = RiskOptions {
        ad_mode: match args.ad_mode {
            AdModeArg::Flight => AdMode::FlightWeighted,
            AdModeArg::Regulation => AdMode::RegulationWeighted,
        },
    };

    let mut report = RunReport::new("risk");

    let model = match &args.model {
        Some(path) => {
            ModelFile::load(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?
        }
        None => ModelFile::shipped_default(),
    };
    let regulations = ingest::parse_regulations(&args.regulations).map_err(input_err)?;
    report.parsed("regulations", &regulations);
    let openings = ingest::parse_openings(&args.openings).map_err(input_err)?;
    report.parsed("openings", &openings);
    report.stage_done("parse");

    let error_model = model.error_model();
    let blocks = riskcalc::aggregate_horizons(
        &regulations.records,
        &openings.records,
        &period,
        (first_year, last_year),
        &model.cost,
        &error_model,
        &options,
    );
    let mut flagged = 0usize;
    for (horizon, results) in &blocks {
        if results.is_empty() {
            report.note(format!(
                "horizon {}: no open sector, emitted empty",
                horizon.label
            ));
        }
        flagged += results.iter().filter(|c| !c.flags.is_empty()).count();
    }
    report.note(format!("{flagged} flagged sector-horizon entries"));
    report.stage_done("compute");

    let named: Vec<(String, Vec<_>)> = blocks
        .into_iter()
        .map(|(h, rows)| (h.label, rows))
        .collect();
    write_risk_csv(&args.out, &named)?;
    report.stage_done("write");

    println!(
        "wrote {} with {} horizon block(s)",
        args.out.display(),
        named.len()
    );
    report.finish();
    Ok(())
}

//! `atfmrisk severity`: percentile-rank risk values into severity classes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use atfmrisk::severity::{classify_all, SeverityBands, SeverityClass};

use super::input_err;
use crate::report::RunReport;
use crate::table::{read_risk_csv, write_severity_csv};
use crate::{CliError, SeverityArgs};

#[derive(Deserialize)]
struct BandEntry {
    upper: f64,
    class: SeverityClass,
}

/// Loads a bands file: `[{"upper": 0.1, "class": "very_low"}, ...]`.
fn load_bands(path: &Path) -> Result<SeverityBands, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    let entries: Vec<BandEntry> =
        serde_json::from_str(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    SeverityBands::new(entries.into_iter().map(|b| (b.upper, b.class)).collect())
        .map_err(|e| input_err(format!("{}: {e}", path.display())))
}

pub fn run(args: &SeverityArgs) -> Result<(), CliError> {
    let mut report = RunReport::new("severity");
    let bands = match &args.bands {
        Some(path) => load_bands(path)?,
        None => SeverityBands::default(),
    };

    let rows = read_risk_csv(&args.risk)?;
    report.note(format!("{} risk rows", rows.len()));

    // Classification is relative to the sectors analyzed together, so it
    // runs per horizon block.
    let mut by_horizon: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    let mut horizon_order: Vec<String> = Vec::new();
    for row in &rows {
        if !by_horizon.contains_key(&row.horizon) {
            horizon_order.push(row.horizon.clone());
        }
        by_horizon
            .entry(row.horizon.clone())
            .or_default()
            .push((row.sector_id.clone(), row.tr));
    }

    let blocks: Vec<(String, Vec<_>)> = horizon_order
        .iter()
        .map(|horizon| {
            let risks = &by_horizon[horizon];
            (horizon.clone(), classify_all(risks, &bands))
        })
        .collect();
    report.stage_done("classify");

    write_severity_csv(&args.out, &blocks)?;
    println!(
        "wrote {} with {} horizon block(s)",
        args.out.display(),
        blocks.len()
    );
    report.finish();
    Ok(())
}

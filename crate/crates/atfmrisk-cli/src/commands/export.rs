//! `atfmrisk export`: attach severity results to the sector GeoJSON.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::input_err;
use crate::report::RunReport;
use crate::table::{read_risk_csv, read_severity_csv, SeverityRow};
use crate::{CliError, ExportArgs};

pub fn run(args: &ExportArgs) -> Result<(), CliError> {
    let mut report = RunReport::new("export");

    let all_rows = read_severity_csv(&args.severity)?;
    let mut horizons: Vec<String> = all_rows.iter().map(|r| r.horizon.clone()).collect();
    horizons.sort();
    horizons.dedup();
    let horizon = match (&args.horizon, horizons.as_slice()) {
        (Some(wanted), _) => {
            if !horizons.iter().any(|h| h == wanted) {
                return Err(CliError::Input(format!(
                    "horizon {wanted:?} not in {}; available: {}",
                    args.severity.display(),
                    horizons.join(", ")
                )));
            }
            wanted.clone()
        }
        (None, [single]) => single.clone(),
        (None, []) => return Err(CliError::Input("severity file has no rows".into())),
        (None, _) => {
            return Err(CliError::Input(format!(
                "severity file holds several horizons ({}); pick one with --horizon",
                horizons.join(", ")
            )))
        }
    };
    let rows: BTreeMap<String, SeverityRow> = all_rows
        .into_iter()
        .filter(|r| r.horizon == horizon)
        .map(|r| (r.sector_id.clone(), r))
        .collect();
    report.note(format!(
        "horizon {horizon}: {} classified sectors",
        rows.len()
    ));

    // cost_std_eur comes from risk.csv when available.
    let cost_std: BTreeMap<String, f64> = match &args.risk {
        Some(path) => read_risk_csv(path)?
            .into_iter()
            .filter(|r| r.horizon == horizon)
            .map(|r| (r.sector_id, r.cost_std))
            .collect(),
        None => BTreeMap::new(),
    };

    let text = std::fs::read_to_string(&args.sectors)
        .map_err(|e| input_err(format!("{}: {e}", args.sectors.display())))?;
    let mut root: Value = serde_json::from_str(&text)
        .map_err(|e| input_err(format!("{}: {e}", args.sectors.display())))?;
    if root.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(CliError::Input(format!(
            "{}: not a GeoJSON FeatureCollection",
            args.sectors.display()
        )));
    }
    let features = root
        .get_mut("features")
        .and_then(Value::as_array_mut)
        .ok_or_else(|| CliError::Input(format!("{}: no features array", args.sectors.display())))?;

    let mut matched = 0usize;
    let mut seen: Vec<&str> = Vec::new();
    for feature in features.iter_mut() {
        let Some(sector_id) = feature
            .pointer("/properties/sector_id")
            .and_then(Value::as_str)
            .map(str::to_string)
        else {
            continue;
        };
        let Some(row) = rows.get(&sector_id) else {
            continue;
        };
        matched += 1;
        seen.push(&rows[&sector_id].sector_id);
        if let Some(props) = feature.get_mut("properties").and_then(Value::as_object_mut) {
            props.insert("severity".into(), json!(row.class.to_string()));
            props.insert("tr_eur".into(), json!(row.tr));
            props.insert("percentile".into(), json!(row.percentile));
            if let Some(std) = cost_std.get(&sector_id) {
                props.insert("cost_std_eur".into(), json!(std));
            }
        }
    }
    report.note(format!("{matched} features annotated"));

    // Classified sectors with no footprint go to a sidecar listing.
    let missing: Vec<&SeverityRow> = rows
        .values()
        .filter(|r| !seen.contains(&r.sector_id.as_str()))
        .collect();
    if !missing.is_empty() {
        let sidecar_path = args.out.with_extension("sidecar.json");
        let listing: Vec<Value> = missing
            .iter()
            .map(|r| {
                json!({
                    "sector_id": r.sector_id,
                    "severity": r.class.to_string(),
                    "tr_eur": r.tr,
                    "percentile": r.percentile,
                })
            })
            .collect();
        std::fs::write(
            &sidecar_path,
            serde_json::to_string_pretty(&json!({
                "horizon": horizon,
                "sectors_without_geometry": listing,
            }))
            .expect("serializable")
                + "\n",
        )
        .map_err(|e| input_err(format!("{}: {e}", sidecar_path.display())))?;
        eprintln!(
            "warning: {} classified sector(s) have no geometry; listed in {}",
            missing.len(),
            sidecar_path.display()
        );
    }

    let mut out_text = serde_json::to_string_pretty(&root).map_err(|e| input_err(e.to_string()))?;
    out_text.push('\n');
    std::fs::write(&args.out, out_text)
        .map_err(|e| input_err(format!("{}: {e}", args.out.display())))?;
    println!("wrote {}", args.out.display());
    report.finish();
    Ok(())
}

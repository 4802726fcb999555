//! Readers and writers for the pipeline's CSV products.
//!
//! Floats round-trip exactly (shortest representation, '.' decimal
//! separator, no grouping), so downstream stages see the same values the
//! upstream stage computed.

use std::path::Path;

use atfmrisk::riskcalc::SectorRiskComponents;
use atfmrisk::severity::{ClassifiedRisk, SeverityClass};

use crate::CliError;

pub const RISK_HEADER: [&str; 14] = [
    "sector_id",
    "horizon",
    "n_regulations",
    "afdr",
    "ad_min",
    "acd_eur_min",
    "tc_eur",
    "open_min",
    "regulated_min",
    "p_open",
    "p_reg_given_open",
    "tr_eur",
    "cost_std_eur",
    "flags",
];

pub const SEVERITY_HEADER: [&str; 5] = ["sector_id", "horizon", "tr_eur", "percentile", "severity"];

pub fn write_risk_csv(
    path: &Path,
    blocks: &[(String, Vec<SectorRiskComponents>)],
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    w.write_record(RISK_HEADER).map_err(write_err(path))?;
    for (horizon, rows) in blocks {
        for c in rows {
            w.write_record(&[
                c.sector_id.clone(),
                horizon.clone(),
                c.n_regulations.to_string(),
                c.afdr.to_string(),
                c.ad.to_string(),
                c.acd.to_string(),
                c.tc.to_string(),
                c.open_minutes.to_string(),
                c.regulated_minutes.to_string(),
                c.p_open.to_string(),
                c.p_reg_given_open.to_string(),
                c.tr.to_string(),
                c.cost_std.to_string(),
                c.flags_string(),
            ])
            .map_err(write_err(path))?;
        }
    }
    w.flush()
        .map_err(|e| CliError::Input(format!("cannot flush {}: {e}", path.display())))
}

/// One row of risk.csv, as read back by downstream commands.
#[derive(Debug, Clone)]
pub struct RiskRow {
    pub sector_id: String,
    pub horizon: String,
    pub tr: f64,
    pub cost_std: f64,
}

pub fn read_risk_csv(path: &Path) -> Result<Vec<RiskRow>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Input(format!("{}: missing column {name:?}", path.display())))
    };
    let (i_sector, i_horizon, i_tr, i_std) = (
        col("sector_id")?,
        col("horizon")?,
        col("tr_eur")?,
        col("cost_std_eur")?,
    );

    let mut rows = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let line = row_no + 2;
        let record =
            record.map_err(|e| CliError::Input(format!("{} line {line}: {e}", path.display())))?;
        let float = |i: usize, name: &str| -> Result<f64, CliError> {
            record.get(i).and_then(|v| v.parse().ok()).ok_or_else(|| {
                CliError::Input(format!("{} line {line}: bad {name}", path.display()))
            })
        };
        rows.push(RiskRow {
            sector_id: record.get(i_sector).unwrap_or_default().to_string(),
            horizon: record.get(i_horizon).unwrap_or_default().to_string(),
            tr: float(i_tr, "tr_eur")?,
            cost_std: float(i_std, "cost_std_eur")?,
        });
    }
    Ok(rows)
}

pub fn write_severity_csv(
    path: &Path,
    blocks: &[(String, Vec<ClassifiedRisk>)],
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    w.write_record(SEVERITY_HEADER).map_err(write_err(path))?;
    for (horizon, rows) in blocks {
        for r in rows {
            w.write_record(&[
                r.sector_id.clone(),
                horizon.clone(),
                r.tr.to_string(),
                r.percentile.to_string(),
                r.class.to_string(),
            ])
            .map_err(write_err(path))?;
        }
    }
    w.flush()
        .map_err(|e| CliError::Input(format!("cannot flush {}: {e}", path.display())))
}

/// One row of severity.csv.
#[derive(Debug, Clone)]
pub struct SeverityRow {
    pub sector_id: String,
    pub horizon: String,
    pub tr: f64,
    pub percentile: f64,
    pub class: SeverityClass,
}

pub fn read_severity_csv(path: &Path) -> Result<Vec<SeverityRow>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        .clone();
    for required in SEVERITY_HEADER {
        if !headers.iter().any(|h| h == required) {
            return Err(CliError::Input(format!(
                "{}: missing column {required:?}",
                path.display()
            )));
        }
    }
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .expect("checked above")
    };
    let (i_sector, i_horizon, i_tr, i_pct, i_class) = (
        col("sector_id"),
        col("horizon"),
        col("tr_eur"),
        col("percentile"),
        col("severity"),
    );

    let mut rows = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let line = row_no + 2;
        let record =
            record.map_err(|e| CliError::Input(format!("{} line {line}: {e}", path.display())))?;
        let get = |i: usize| record.get(i).unwrap_or_default();
        let parse_f64 = |i: usize, name: &str| -> Result<f64, CliError> {
            get(i)
                .parse()
                .map_err(|_| CliError::Input(format!("{} line {line}: bad {name}", path.display())))
        };
        rows.push(SeverityRow {
            sector_id: get(i_sector).to_string(),
            horizon: get(i_horizon).to_string(),
            tr: parse_f64(i_tr, "tr_eur")?,
            percentile: parse_f64(i_pct, "percentile")?,
            class: get(i_class)
                .parse()
                .map_err(|e| CliError::Input(format!("{} line {line}: {e}", path.display())))?,
        });
    }
    Ok(rows)
}

fn write_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Input(format!("cannot write {}: {e}", path.display()))
}

//! Parser for the aggregate regulations file.

use std::collections::HashSet;
use std::path::Path;

use chrono::NaiveDate;

use super::{
    column_indices, map_open_error, IngestError, LocationType, Parsed, ReasonCode,
    RegulationRecord, RowError, RowErrorKind, AVG_CONSISTENCY_TOLERANCE_MIN,
};

pub(crate) const REGULATION_COLUMNS: [&str; 11] = [
    "date",
    "reg_id",
    "reference_location",
    "location_type",
    "reason",
    "n_regulated_flights",
    "n_delayed_flights",
    "total_delay_min",
    "avg_delay_per_regulated_min",
    "avg_delay_per_delayed_min",
    "duration_min",
];

/// Parses regulations.csv.
///
/// Row order is preserved. Rows violating an invariant are rejected with
/// their line number; a duplicate `(reg_id, date)` pair aborts the whole
/// parse, since silently keeping both would corrupt downstream averages.
pub fn parse_regulations(path: &Path) -> Result<Parsed<RegulationRecord>, IngestError> {
    let path_str = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| map_open_error(e, &path_str))?;

    let headers = reader
        .headers()
        .map_err(|e| IngestError::Csv {
            path: path_str.clone(),
            source: e,
        })?
        .clone();
    let idx = column_indices(&headers, &REGULATION_COLUMNS, &path_str)?;

    let mut out = Parsed::new();
    let mut seen: HashSet<(String, NaiveDate)> = HashSet::new();

    for (row_no, row) in reader.records().enumerate() {
        let line = row_no as u64 + 2; // header is line 1
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                out.rejected.push(RowError {
                    line,
                    kind: RowErrorKind::Malformed,
                    reason: format!("unreadable row: {e}"),
                });
                continue;
            }
        };
        match parse_row(&row, &idx) {
            Ok(rec) => {
                let key = (rec.reg_id.clone(), rec.date);
                if !seen.insert(key) {
                    return Err(IngestError::DuplicateRegulation {
                        path: path_str,
                        line,
                        reg_id: rec.reg_id,
                        date: rec.date,
                    });
                }
                out.records.push(rec);
            }
            Err(reason) => {
                out.rejected.push(RowError {
                    line,
                    kind: RowErrorKind::Malformed,
                    reason,
                });
            }
        }
    }
    Ok(out)
}

fn parse_row(row: &csv::StringRecord, idx: &[usize]) -> Result<RegulationRecord, String> {
    let field = |i: usize| row.get(idx[i]).ok_or_else(|| "missing field".to_string());

    let date =
        NaiveDate::parse_from_str(field(0)?, "%Y-%m-%d").map_err(|e| format!("bad date: {e}"))?;
    let reg_id = field(1)?.to_string();
    if reg_id.is_empty() {
        return Err("empty reg_id".into());
    }
    let reference_location = field(2)?.to_string();
    if reference_location.is_empty() {
        return Err("empty reference_location".into());
    }
    let location_type: LocationType = field(3)?.parse()?;
    let reason: ReasonCode = field(4)?.parse()?;
    let n_regulated_flights: u32 = field(5)?
        .parse()
        .map_err(|e| format!("bad n_regulated_flights: {e}"))?;
    let n_delayed_flights: u32 = field(6)?
        .parse()
        .map_err(|e| format!("bad n_delayed_flights: {e}"))?;
    let total_delay: f64 = field(7)?
        .parse()
        .map_err(|e| format!("bad total_delay_min: {e}"))?;
    let avg_delay_per_regulated: f64 = field(8)?
        .parse()
        .map_err(|e| format!("bad avg_delay_per_regulated_min: {e}"))?;
    let avg_delay_per_delayed: f64 = field(9)?
        .parse()
        .map_err(|e| format!("bad avg_delay_per_delayed_min: {e}"))?;
    let duration: f64 = field(10)?
        .parse()
        .map_err(|e| format!("bad duration_min: {e}"))?;

    if n_delayed_flights > n_regulated_flights {
        return Err("delayed exceeds regulated".into());
    }
    if total_delay < 0.0 || !total_delay.is_finite() {
        return Err(format!(
            "total_delay must be non-negative, got {total_delay}"
        ));
    }
    if n_delayed_flights == 0 && total_delay != 0.0 {
        return Err("total_delay must be 0 when no flight was delayed".into());
    }
    if n_delayed_flights > 0 {
        let implied = total_delay / f64::from(n_delayed_flights);
        if (avg_delay_per_delayed - implied).abs() > AVG_CONSISTENCY_TOLERANCE_MIN {
            return Err(format!(
                "avg_delay_per_delayed {avg_delay_per_delayed} inconsistent with total/n = {implied:.3}"
            ));
        }
    }
    if !duration.is_finite() {
        return Err("duration must be finite".into());
    }

    Ok(RegulationRecord {
        date,
        reg_id,
        reference_location,
        location_type,
        reason,
        n_regulated_flights,
        n_delayed_flights,
        total_delay,
        avg_delay_per_regulated,
        avg_delay_per_delayed,
        duration,
    })
}

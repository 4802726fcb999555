//! Parsers for the per-flight delay file and the aircraft spec table.

use std::path::Path;

use chrono::NaiveDate;

use super::{
    column_indices, map_open_error, AircraftSpec, AircraftTable, FlightDelayRecord, IngestError,
    Parsed, RowError, RowErrorKind,
};

pub(crate) const FLIGHT_COLUMNS: [&str; 5] = [
    "flight_id",
    "date",
    "aircraft_type",
    "atfm_delay_min",
    "most_penalising_reg_id",
];

pub(crate) const AIRCRAFT_COLUMNS: [&str; 2] = ["aircraft_type", "mtow_tonnes"];

/// Parses flights.csv. A zero delay is valid (regulated but not delayed);
/// a negative delay is not.
pub fn parse_flights(path: &Path) -> Result<Parsed<FlightDelayRecord>, IngestError> {
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
    let idx = column_indices(&headers, &FLIGHT_COLUMNS, &path_str)?;

    let mut out = Parsed::new();
    for (row_no, row) in reader.records().enumerate() {
        let line = row_no as u64 + 2;
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
        match parse_flight_row(&row, &idx) {
            Ok(rec) => out.records.push(rec),
            Err(reason) => out.rejected.push(RowError {
                line,
                kind: RowErrorKind::Malformed,
                reason,
            }),
        }
    }
    Ok(out)
}

fn parse_flight_row(row: &csv::StringRecord, idx: &[usize]) -> Result<FlightDelayRecord, String> {
    let field = |i: usize| row.get(idx[i]).ok_or_else(|| "missing field".to_string());

    let flight_id = field(0)?.to_string();
    if flight_id.is_empty() {
        return Err("empty flight_id".into());
    }
    let date =
        NaiveDate::parse_from_str(field(1)?, "%Y-%m-%d").map_err(|e| format!("bad date: {e}"))?;
    let aircraft_type = field(2)?.to_string();
    if aircraft_type.is_empty() {
        return Err("empty aircraft_type".into());
    }
    let atfm_delay: f64 = field(3)?
        .parse()
        .map_err(|e| format!("bad atfm_delay_min: {e}"))?;
    if atfm_delay < 0.0 || !atfm_delay.is_finite() {
        return Err(format!("atfm_delay must be non-negative, got {atfm_delay}"));
    }
    let most_penalising_reg_id = field(4)?.to_string();
    if most_penalising_reg_id.is_empty() {
        return Err("empty most_penalising_reg_id".into());
    }
    Ok(FlightDelayRecord {
        flight_id,
        date,
        aircraft_type,
        atfm_delay,
        most_penalising_reg_id,
    })
}

/// Parses aircraft.csv into a type -> spec table.
pub fn parse_aircraft(path: &Path) -> Result<(AircraftTable, Parsed<AircraftSpec>), IngestError> {
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
    let idx = column_indices(&headers, &AIRCRAFT_COLUMNS, &path_str)?;

    let mut out = Parsed::new();
    let mut table = AircraftTable::new();
    for (row_no, row) in reader.records().enumerate() {
        let line = row_no as u64 + 2;
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
        let parse = || -> Result<AircraftSpec, String> {
            let aircraft_type = row
                .get(idx[0])
                .ok_or_else(|| "missing field".to_string())?
                .to_string();
            if aircraft_type.is_empty() {
                return Err("empty aircraft_type".into());
            }
            let mtow: f64 = row
                .get(idx[1])
                .ok_or_else(|| "missing field".to_string())?
                .parse()
                .map_err(|e| format!("bad mtow_tonnes: {e}"))?;
            if mtow <= 0.0 || !mtow.is_finite() {
                return Err(format!("mtow must be positive, got {mtow}"));
            }
            Ok(AircraftSpec {
                aircraft_type,
                mtow,
            })
        };
        match parse() {
            Ok(spec) => {
                if table.contains_key(&spec.aircraft_type) {
                    out.rejected.push(RowError {
                        line,
                        kind: RowErrorKind::Malformed,
                        reason: format!("duplicate aircraft_type {:?}", spec.aircraft_type),
                    });
                } else {
                    table.insert(spec.aircraft_type.clone(), spec.clone());
                    out.records.push(spec);
                }
            }
            Err(reason) => out.rejected.push(RowError {
                line,
                kind: RowErrorKind::Malformed,
                reason,
            }),
        }
    }
    Ok((table, out))
}

/// Lists the distinct aircraft types referenced by flights but absent from
/// the table. Such flights are excluded from cost computation downstream.
pub fn unknown_aircraft_types(flights: &[FlightDelayRecord], table: &AircraftTable) -> Vec<String> {
    let mut unknown: Vec<String> = flights
        .iter()
        .filter(|f| !table.contains_key(&f.aircraft_type))
        .map(|f| f.aircraft_type.clone())
        .collect();
    unknown.sort();
    unknown.dedup();
    unknown
}

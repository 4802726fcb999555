//! Parsing and validation of the input file formats.
//!
//! Four CSV files and one GeoJSON file feed the pipeline:
//!
//! | file             | header                                                      |
//! |------------------|-------------------------------------------------------------|
//! | regulations.csv  | `date,reg_id,reference_location,location_type,reason,n_regulated_flights,n_delayed_flights,total_delay_min,avg_delay_per_regulated_min,avg_delay_per_delayed_min,duration_min` |
//! | openings.csv     | `sector_id,open_start,open_end` (ISO-8601 UTC)              |
//! | flights.csv      | `flight_id,date,aircraft_type,atfm_delay_min,most_penalising_reg_id` |
//! | aircraft.csv     | `aircraft_type,mtow_tonnes`                                 |
//! | sectors.geojson  | RFC 7946 FeatureCollection, `properties.sector_id` required |
//!
//! Parsing is total over valid files: every data row either becomes a record
//! or a [`RowError`] with its line number, so
//! `records.len() + rejected.len() == data rows`.

mod flights;
mod geometry;
mod openings;
mod regulations;
mod write;

pub use flights::{parse_aircraft, parse_flights, unknown_aircraft_types};
pub use geometry::parse_sector_geometries;
pub use openings::{merge_intervals, parse_openings};
pub use regulations::parse_regulations;
pub use write::{
    write_aircraft, write_flights, write_openings, write_regulations, write_sector_geometries,
};

use std::collections::BTreeMap;
use std::fmt;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for the `avg_delay_per_delayed` vs `total_delay / n_delayed`
/// consistency check. Source reports round averages to one decimal.
pub const AVG_CONSISTENCY_TOLERANCE_MIN: f64 = 0.51;

/// Single-letter regulation reason code (C, W, G, S, I, ...).
///
/// Unknown letters are accepted and carried through; only the A-Z shape is
/// enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ReasonCode(char);

impl ReasonCode {
    pub fn new(code: char) -> Result<Self, String> {
        if code.is_ascii_uppercase() {
            Ok(ReasonCode(code))
        } else {
            Err(format!(
                "reason must be a single uppercase letter, got {code:?}"
            ))
        }
    }

    pub fn as_char(self) -> char {
        self.0
    }
}

impl fmt::Display for ReasonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::str::FromStr for ReasonCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => ReasonCode::new(c),
            _ => Err(format!(
                "reason must be a single uppercase letter, got {s:?}"
            )),
        }
    }
}

impl TryFrom<String> for ReasonCode {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ReasonCode> for String {
    fn from(r: ReasonCode) -> String {
        r.0.to_string()
    }
}

/// Whether a regulation applies at an airport or in en-route airspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocationType {
    Airport,
    Enroute,
}

impl fmt::Display for LocationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocationType::Airport => write!(f, "AIRPORT"),
            LocationType::Enroute => write!(f, "ENROUTE"),
        }
    }
}

impl std::str::FromStr for LocationType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "AIRPORT" => Ok(LocationType::Airport),
            "ENROUTE" => Ok(LocationType::Enroute),
            other => Err(format!(
                "location_type must be AIRPORT or ENROUTE, got {other:?}"
            )),
        }
    }
}

/// One historical ATFM regulation, as reported in the daily summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct RegulationRecord {
    pub date: NaiveDate,
    pub reg_id: String,
    pub reference_location: String,
    pub location_type: LocationType,
    pub reason: ReasonCode,
    pub n_regulated_flights: u32,
    pub n_delayed_flights: u32,
    /// Total assigned delay in minutes.
    pub total_delay: f64,
    pub avg_delay_per_regulated: f64,
    pub avg_delay_per_delayed: f64,
    /// Regulation duration in minutes. Negative when the regulation was
    /// cancelled before its scheduled start.
    pub duration: f64,
}

/// One opening interval of a sector, `[open_start, open_end)` in UTC.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpeningRecord {
    pub sector_id: String,
    pub open_start: DateTime<Utc>,
    pub open_end: DateTime<Utc>,
}

impl OpeningRecord {
    /// Interval length in minutes.
    pub fn minutes(&self) -> f64 {
        (self.open_end - self.open_start).num_seconds() as f64 / 60.0
    }
}

/// One regulated flight with its assigned ATFM delay.
#[derive(Debug, Clone, PartialEq)]
pub struct FlightDelayRecord {
    pub flight_id: String,
    pub date: NaiveDate,
    pub aircraft_type: String,
    /// Assigned ATFM delay in minutes; zero for regulated-but-not-delayed.
    pub atfm_delay: f64,
    pub most_penalising_reg_id: String,
}

/// Aircraft type with its maximum take-off weight.
#[derive(Debug, Clone, PartialEq)]
pub struct AircraftSpec {
    pub aircraft_type: String,
    /// Maximum take-off weight in tonnes.
    pub mtow: f64,
}

impl AircraftSpec {
    /// Square root of MTOW, the quantity that scales delay cost.
    pub fn sqrt_mtow(&self) -> f64 {
        self.mtow.sqrt()
    }
}

/// Mapping aircraft_type -> spec, in deterministic iteration order.
pub type AircraftTable = BTreeMap<String, AircraftSpec>;

/// Sector footprint as a closed polygon ring of (longitude, latitude).
#[derive(Debug, Clone, PartialEq)]
pub struct SectorGeometry {
    pub sector_id: String,
    /// Exterior ring; first and last vertex are equal.
    pub polygon: Vec<(f64, f64)>,
}

/// Why a data row was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowErrorKind {
    Malformed,
    InvertedInterval,
}

/// A rejected data row, with 1-based line number in the source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub kind: RowErrorKind,
    pub reason: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

/// Outcome of parsing one file: validated records plus per-row rejections
/// and non-fatal warnings.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    pub rejected: Vec<RowError>,
    pub warnings: Vec<String>,
}

impl<T> Parsed<T> {
    pub(crate) fn new() -> Self {
        Parsed {
            records: Vec::new(),
            rejected: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

/// Fatal ingest failures (per-row problems are collected in [`Parsed`]).
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: missing column {column:?}")]
    MissingColumn { path: String, column: String },
    #[error("{path} line {line}: duplicate regulation {reg_id:?} on {date}")]
    DuplicateRegulation {
        path: String,
        line: u64,
        reg_id: String,
        date: NaiveDate,
    },
    #[error("{path}: CSV error: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: not a GeoJSON FeatureCollection")]
    NotAFeatureCollection { path: String },
    #[error("{path}: feature {index} has no properties.sector_id")]
    MissingSectorId { path: String, index: usize },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

/// Distinguishes "file unreadable" from "file unparseable" when opening a CSV.
pub(crate) fn map_open_error(e: csv::Error, path: &str) -> IngestError {
    if matches!(e.kind(), csv::ErrorKind::Io(_)) {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => IngestError::Io {
                path: path.to_string(),
                source: io,
            },
            _ => unreachable!(),
        }
    } else {
        IngestError::Csv {
            path: path.to_string(),
            source: e,
        }
    }
}

/// Resolves the positions of the expected columns in a CSV header.
///
/// Column lookup is by name, so column order and extra columns are tolerated.
pub(crate) fn column_indices(
    headers: &csv::StringRecord,
    expected: &[&str],
    path: &str,
) -> Result<Vec<usize>, IngestError> {
    expected
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.trim() == *name)
                .ok_or_else(|| IngestError::MissingColumn {
                    path: path.to_string(),
                    column: name.to_string(),
                })
        })
        .collect()
}

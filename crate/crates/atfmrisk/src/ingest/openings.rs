//! Parser for the sector opening schedule.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, Utc};

use super::{
    column_indices, map_open_error, IngestError, OpeningRecord, Parsed, RowError, RowErrorKind,
};

pub(crate) const OPENING_COLUMNS: [&str; 3] = ["sector_id", "open_start", "open_end"];

/// Parses openings.csv and merges overlapping intervals per sector.
///
/// Overlaps (and touching intervals) are unioned with a warning; the output
/// is sorted by sector then start time, so merging is idempotent.
pub fn parse_openings(path: &Path) -> Result<Parsed<OpeningRecord>, IngestError> {
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
    let idx = column_indices(&headers, &OPENING_COLUMNS, &path_str)?;

    let mut out = Parsed::new();
    let mut raw: Vec<OpeningRecord> = Vec::new();

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
        match parse_row(&row, &idx) {
            Ok(rec) => raw.push(rec),
            Err((kind, reason)) => out.rejected.push(RowError { line, kind, reason }),
        }
    }

    let (merged, n_merges) = merge_intervals(raw);
    if n_merges > 0 {
        out.warnings
            .push(format!("merged {n_merges} overlapping opening interval(s)"));
    }
    out.records = merged;
    Ok(out)
}

fn parse_row(
    row: &csv::StringRecord,
    idx: &[usize],
) -> Result<OpeningRecord, (RowErrorKind, String)> {
    let field = |i: usize| {
        row.get(idx[i])
            .ok_or((RowErrorKind::Malformed, "missing field".to_string()))
    };
    let sector_id = field(0)?.to_string();
    if sector_id.is_empty() {
        return Err((RowErrorKind::Malformed, "empty sector_id".into()));
    }
    let open_start: DateTime<Utc> = field(1)?
        .parse()
        .map_err(|e| (RowErrorKind::Malformed, format!("bad open_start: {e}")))?;
    let open_end: DateTime<Utc> = field(2)?
        .parse()
        .map_err(|e| (RowErrorKind::Malformed, format!("bad open_end: {e}")))?;
    if open_end <= open_start {
        return Err((
            RowErrorKind::InvertedInterval,
            format!("inverted interval: {open_end} <= {open_start}"),
        ));
    }
    Ok(OpeningRecord {
        sector_id,
        open_start,
        open_end,
    })
}

type Interval = (DateTime<Utc>, DateTime<Utc>);

/// Unions opening intervals per sector. Returns the merged records sorted by
/// (sector_id, open_start) and the number of intervals absorbed by a merge.
pub fn merge_intervals(records: Vec<OpeningRecord>) -> (Vec<OpeningRecord>, usize) {
    let mut by_sector: BTreeMap<String, Vec<Interval>> = BTreeMap::new();
    for rec in records {
        by_sector
            .entry(rec.sector_id)
            .or_default()
            .push((rec.open_start, rec.open_end));
    }

    let mut merged = Vec::new();
    let mut n_merges = 0;
    for (sector_id, mut intervals) in by_sector {
        intervals.sort();
        let mut iter = intervals.into_iter();
        let Some(mut current) = iter.next() else {
            continue;
        };
        for (start, end) in iter {
            if start <= current.1 {
                n_merges += 1;
                if end > current.1 {
                    current.1 = end;
                }
            } else {
                merged.push(OpeningRecord {
                    sector_id: sector_id.clone(),
                    open_start: current.0,
                    open_end: current.1,
                });
                current = (start, end);
            }
        }
        merged.push(OpeningRecord {
            sector_id,
            open_start: current.0,
            open_end: current.1,
        });
    }
    (merged, n_merges)
}

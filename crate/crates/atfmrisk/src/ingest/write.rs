//! Writers that serialize records back to the ingest file formats.
//!
//! Floats are written with shortest round-trip formatting, so
//! parse(write(records)) == records bit-for-bit.

use std::io;
use std::path::Path;

use serde_json::{json, Value};

use super::flights::{AIRCRAFT_COLUMNS, FLIGHT_COLUMNS};
use super::openings::OPENING_COLUMNS;
use super::regulations::REGULATION_COLUMNS;
use super::{AircraftSpec, FlightDelayRecord, OpeningRecord, RegulationRecord, SectorGeometry};

pub fn write_regulations(path: &Path, records: &[RegulationRecord]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(REGULATION_COLUMNS)?;
    for r in records {
        w.write_record(&[
            r.date.format("%Y-%m-%d").to_string(),
            r.reg_id.clone(),
            r.reference_location.clone(),
            r.location_type.to_string(),
            r.reason.to_string(),
            r.n_regulated_flights.to_string(),
            r.n_delayed_flights.to_string(),
            r.total_delay.to_string(),
            r.avg_delay_per_regulated.to_string(),
            r.avg_delay_per_delayed.to_string(),
            r.duration.to_string(),
        ])?;
    }
    w.flush()
}

pub fn write_openings(path: &Path, records: &[OpeningRecord]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(OPENING_COLUMNS)?;
    for r in records {
        w.write_record(&[
            r.sector_id.clone(),
            r.open_start.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
            r.open_end.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
        ])?;
    }
    w.flush()
}

pub fn write_flights(path: &Path, records: &[FlightDelayRecord]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(FLIGHT_COLUMNS)?;
    for r in records {
        w.write_record(&[
            r.flight_id.clone(),
            r.date.format("%Y-%m-%d").to_string(),
            r.aircraft_type.clone(),
            r.atfm_delay.to_string(),
            r.most_penalising_reg_id.clone(),
        ])?;
    }
    w.flush()
}

pub fn write_aircraft(path: &Path, records: &[AircraftSpec]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(AIRCRAFT_COLUMNS)?;
    for r in records {
        w.write_record(&[r.aircraft_type.clone(), r.mtow.to_string()])?;
    }
    w.flush()
}

pub fn write_sector_geometries(path: &Path, records: &[SectorGeometry]) -> io::Result<()> {
    let features: Vec<Value> = records
        .iter()
        .map(|g| {
            let ring: Vec<Value> = g
                .polygon
                .iter()
                .map(|(lon, lat)| json!([lon, lat]))
                .collect();
            json!({
                "type": "Feature",
                "properties": { "sector_id": g.sector_id },
                "geometry": { "type": "Polygon", "coordinates": [ring] }
            })
        })
        .collect();
    let collection = json!({ "type": "FeatureCollection", "features": features });
    std::fs::write(path, serde_json::to_string_pretty(&collection)?)
}

#[cfg(test)]
mod tests {
    use super::super::{parse_flights, parse_openings, parse_regulations, parse_sector_geometries};
    use super::*;
    use chrono::NaiveDate;

    #[test]
    fn regulations_round_trip() {
        let records = vec![RegulationRecord {
            date: NaiveDate::from_ymd_opt(2016, 7, 14).unwrap(),
            reg_id: "LFEE5R_1".into(),
            reference_location: "LFEE5R".into(),
            location_type: super::super::LocationType::Enroute,
            reason: "C".parse().unwrap(),
            n_regulated_flights: 120,
            n_delayed_flights: 80,
            total_delay: 960.25,
            avg_delay_per_regulated: 8.002083333333333,
            avg_delay_per_delayed: 12.0,
            duration: -60.5,
        }];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("regulations.csv");
        write_regulations(&path, &records).unwrap();
        let parsed = parse_regulations(&path).unwrap();
        assert_eq!(parsed.records, records);
        assert!(parsed.rejected.is_empty());
    }

    #[test]
    fn openings_round_trip() {
        let records = vec![OpeningRecord {
            sector_id: "EDYYB5KL".into(),
            open_start: "2016-07-14T06:00:00Z".parse().unwrap(),
            open_end: "2016-07-14T22:00:00Z".parse().unwrap(),
        }];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("openings.csv");
        write_openings(&path, &records).unwrap();
        assert_eq!(parse_openings(&path).unwrap().records, records);
    }

    #[test]
    fn flights_round_trip() {
        let records = vec![FlightDelayRecord {
            flight_id: "F000001".into(),
            date: NaiveDate::from_ymd_opt(2016, 7, 14).unwrap(),
            aircraft_type: "B738".into(),
            atfm_delay: 13.700000000000001,
            most_penalising_reg_id: "R1".into(),
        }];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("flights.csv");
        write_flights(&path, &records).unwrap();
        assert_eq!(parse_flights(&path).unwrap().records, records);
    }

    #[test]
    fn geometry_round_trip() {
        let records = vec![SectorGeometry {
            sector_id: "S1".into(),
            polygon: vec![(0.0, 0.0), (1.5, 0.0), (1.5, 1.25), (0.0, 0.0)],
        }];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sectors.geojson");
        write_sector_geometries(&path, &records).unwrap();
        assert_eq!(parse_sector_geometries(&path).unwrap().records, records);
    }
}

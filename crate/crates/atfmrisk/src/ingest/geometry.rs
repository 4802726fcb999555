//! GeoJSON sector geometry loading.

use std::fs;
use std::path::Path;

use serde_json::Value;

use super::{IngestError, Parsed, SectorGeometry};

/// Parses an RFC 7946 FeatureCollection of sector polygons.
///
/// Each feature needs `properties.sector_id` and a Polygon geometry.
/// Unclosed exterior rings are auto-closed with a warning; non-Polygon
/// geometries are skipped with a warning.
pub fn parse_sector_geometries(path: &Path) -> Result<Parsed<SectorGeometry>, IngestError> {
    let path_str = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| IngestError::Io {
        path: path_str.clone(),
        source: e,
    })?;
    let root: Value = serde_json::from_str(&text).map_err(|e| IngestError::Json {
        path: path_str.clone(),
        source: e,
    })?;

    if root.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(IngestError::NotAFeatureCollection { path: path_str });
    }
    let features = root.get("features").and_then(Value::as_array).ok_or(
        IngestError::NotAFeatureCollection {
            path: path_str.clone(),
        },
    )?;

    let mut out = Parsed::new();
    for (index, feature) in features.iter().enumerate() {
        let sector_id = feature
            .pointer("/properties/sector_id")
            .and_then(Value::as_str)
            .ok_or_else(|| IngestError::MissingSectorId {
                path: path_str.clone(),
                index,
            })?
            .to_string();

        let geometry = feature.get("geometry").unwrap_or(&Value::Null);
        let geom_type = geometry
            .get("type")
            .and_then(Value::as_str)
            .unwrap_or("null");
        if geom_type != "Polygon" {
            out.warnings.push(format!(
                "feature {index} ({sector_id}): skipping {geom_type} geometry"
            ));
            continue;
        }
        let Some(exterior) = geometry.pointer("/coordinates/0").and_then(Value::as_array) else {
            out.warnings.push(format!(
                "feature {index} ({sector_id}): polygon has no exterior ring"
            ));
            continue;
        };

        let mut ring: Vec<(f64, f64)> = Vec::with_capacity(exterior.len());
        let mut bad_vertex = false;
        for vertex in exterior {
            match (
                vertex.get(0).and_then(Value::as_f64),
                vertex.get(1).and_then(Value::as_f64),
            ) {
                (Some(lon), Some(lat)) => ring.push((lon, lat)),
                _ => {
                    bad_vertex = true;
                    break;
                }
            }
        }
        if bad_vertex {
            out.warnings.push(format!(
                "feature {index} ({sector_id}): malformed vertex, skipped"
            ));
            continue;
        }
        if ring.len() >= 3 && ring.first() != ring.last() {
            ring.push(ring[0]);
            out.warnings
                .push(format!("feature {index} ({sector_id}): auto-closed ring"));
        }
        if ring.len() < 4 {
            out.warnings.push(format!(
                "feature {index} ({sector_id}): ring has fewer than 3 vertices, skipped"
            ));
            continue;
        }
        out.records.push(SectorGeometry {
            sector_id,
            polygon: ring,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn geojson_file(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "{body}").unwrap();
        f
    }

    #[test]
    fn parses_closed_polygon() {
        let f = geojson_file(
            r#"{"type":"FeatureCollection","features":[
                {"type":"Feature","properties":{"sector_id":"S1"},
                 "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}}
            ]}"#,
        );
        let parsed = parse_sector_geometries(f.path()).unwrap();
        assert_eq!(parsed.records.len(), 1);
        assert_eq!(parsed.records[0].polygon.len(), 4);
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn auto_closes_unclosed_ring() {
        let f = geojson_file(
            r#"{"type":"FeatureCollection","features":[
                {"type":"Feature","properties":{"sector_id":"S1"},
                 "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1]]]}}
            ]}"#,
        );
        let parsed = parse_sector_geometries(f.path()).unwrap();
        let ring = &parsed.records[0].polygon;
        assert_eq!(ring.len(), 4);
        assert_eq!(ring.first(), ring.last());
        assert_eq!(parsed.warnings.len(), 1);
    }

    #[test]
    fn skips_point_geometry_with_warning() {
        let f = geojson_file(
            r#"{"type":"FeatureCollection","features":[
                {"type":"Feature","properties":{"sector_id":"S1"},
                 "geometry":{"type":"Point","coordinates":[0,0]}}
            ]}"#,
        );
        let parsed = parse_sector_geometries(f.path()).unwrap();
        assert!(parsed.records.is_empty());
        assert_eq!(parsed.warnings.len(), 1);
    }

    #[test]
    fn rejects_non_feature_collection() {
        let f = geojson_file(r#"{"type":"Feature"}"#);
        assert!(matches!(
            parse_sector_geometries(f.path()),
            Err(IngestError::NotAFeatureCollection { .. })
        ));
    }

    #[test]
    fn missing_sector_id_is_fatal() {
        let f = geojson_file(
            r#"{"type":"FeatureCollection","features":[
                {"type":"Feature","properties":{},
                 "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}}
            ]}"#,
        );
        assert!(matches!(
            parse_sector_geometries(f.path()),
            Err(IngestError::MissingSectorId { index: 0, .. })
        ));
    }
}

//! Qualitative severity classification of sector risk.
//!
//! Sectors are ranked by economic risk; the empirical-CDF percentile of each
//! sector maps onto a five-level scale. The first band is the closed
//! interval `[0, 0.1]`, the rest are half-open `(lo, hi]`:
//!
//! | percentile   | severity  |
//! |--------------|-----------|
//! | [0.0 - 0.1]  | very low  |
//! | (0.1 - 0.3]  | low       |
//! | (0.3 - 0.6]  | medium    |
//! | (0.6 - 0.9]  | high      |
//! | (0.9 - 1.0]  | very high |
//!
//! Classification is relative to the analyzed set: scaling every risk by a
//! positive constant changes no class.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Five-level severity scale, ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeverityClass {
    VeryLow,
    Low,
    Medium,
    High,
    VeryHigh,
}

impl fmt::Display for SeverityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SeverityClass::VeryLow => "very_low",
            SeverityClass::Low => "low",
            SeverityClass::Medium => "medium",
            SeverityClass::High => "high",
            SeverityClass::VeryHigh => "very_high",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for SeverityClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "very_low" => Ok(SeverityClass::VeryLow),
            "low" => Ok(SeverityClass::Low),
            "medium" => Ok(SeverityClass::Medium),
            "high" => Ok(SeverityClass::High),
            "very_high" => Ok(SeverityClass::VeryHigh),
            other => Err(format!("unknown severity class {other:?}")),
        }
    }
}

/// Percentile bands, each `(upper_bound, class)`; bounds strictly increase
/// and end at 1.0.
#[derive(Debug, Clone, PartialEq)]
pub struct SeverityBands {
    bands: Vec<(f64, SeverityClass)>,
}

#[derive(Debug, Error, PartialEq)]
pub enum InvalidBands {
    #[error("bands must not be empty")]
    Empty,
    #[error("band upper bounds must be strictly increasing and in (0, 1]")]
    NotIncreasing,
    #[error("last band must end at 1.0, got {0}")]
    DoesNotEndAtOne(f64),
}

impl SeverityBands {
    pub fn new(bands: Vec<(f64, SeverityClass)>) -> Result<Self, InvalidBands> {
        if bands.is_empty() {
            return Err(InvalidBands::Empty);
        }
        let mut prev = 0.0;
        for &(upper, _) in &bands {
            if !(upper > prev && upper <= 1.0) {
                return Err(InvalidBands::NotIncreasing);
            }
            prev = upper;
        }
        let last = bands.last().expect("nonempty").0;
        if last != 1.0 {
            return Err(InvalidBands::DoesNotEndAtOne(last));
        }
        Ok(SeverityBands { bands })
    }

    pub fn bands(&self) -> &[(f64, SeverityClass)] {
        &self.bands
    }
}

impl Default for SeverityBands {
    fn default() -> Self {
        SeverityBands::new(vec![
            (0.1, SeverityClass::VeryLow),
            (0.3, SeverityClass::Low),
            (0.6, SeverityClass::Medium),
            (0.9, SeverityClass::High),
            (1.0, SeverityClass::VeryHigh),
        ])
        .expect("default bands are valid")
    }
}

/// Empirical-CDF percentiles: `percentile(v) = #{risks <= v} / N`.
///
/// Ties share a percentile, so a fully tied input maps everything to 1.0.
pub fn ecdf_percentiles(risks: &[(String, f64)]) -> Vec<(String, f64)> {
    let n = risks.len() as f64;
    let mut sorted: Vec<f64> = risks.iter().map(|(_, tr)| *tr).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite risks"));
    risks
        .iter()
        .map(|(id, tr)| {
            let count = sorted.partition_point(|v| v <= tr);
            (id.clone(), count as f64 / n)
        })
        .collect()
}

/// Maps a percentile to the first band whose upper bound is >= it.
///
/// The interval semantics follow the published table: `[0, b_1]` closed,
/// then `(b_i, b_{i+1}]`.
pub fn classify(percentile: f64, bands: &SeverityBands) -> SeverityClass {
    debug_assert!(
        percentile > 0.0 && percentile <= 1.0,
        "percentile {percentile}"
    );
    for &(upper, class) in &bands.bands {
        if percentile <= upper {
            return class;
        }
    }
    bands.bands.last().expect("nonempty").1
}

/// One classified sector.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedRisk {
    pub sector_id: String,
    pub tr: f64,
    pub percentile: f64,
    pub class: SeverityClass,
}

/// Ranks and classifies every sector.
pub fn classify_all(risks: &[(String, f64)], bands: &SeverityBands) -> Vec<ClassifiedRisk> {
    let percentiles = ecdf_percentiles(risks);
    risks
        .iter()
        .zip(percentiles)
        .map(|((id, tr), (_, percentile))| ClassifiedRisk {
            sector_id: id.clone(),
            tr: *tr,
            percentile,
            class: classify(percentile, bands),
        })
        .collect()
}

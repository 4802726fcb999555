//! Delay-to-cost translation.
//!
//! Per-flight cost is a quadratic in the assigned delay, scaled linearly by
//! the aircraft's sqrt(MTOW) relative to a reference aircraft:
//!
//! ```text
//! cost(delay, s) = (s / s_ref) * (alpha * delay + beta * delay^2)   for delay > 0
//!                = 0                                                 otherwise
//! ```
//!
//! Early or zero delay never yields a negative cost. Per-regulation
//! aggregation follows the most-penalising-regulation principle: each
//! flight's delay and cost count towards exactly one regulation.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::ingest::{AircraftTable, FlightDelayRecord};

/// Coefficients of the delay-cost quadratic plus the reference aircraft's
/// sqrt(MTOW). The defaults reproduce the fitted average-cost curve for a
/// 70 t reference aircraft.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostCoefficients {
    /// EUR per minute of delay.
    pub alpha: f64,
    /// EUR per squared minute of delay.
    pub beta: f64,
    /// sqrt(MTOW in tonnes) of the aircraft for which `alpha`/`beta` hold.
    pub reference_sqrt_mtow: f64,
}

pub const DEFAULT_ALPHA: f64 = 23.1;
pub const DEFAULT_BETA: f64 = 1.05;
pub const DEFAULT_REFERENCE_MTOW_TONNES: f64 = 70.0;

impl Default for CostCoefficients {
    fn default() -> Self {
        CostCoefficients {
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            reference_sqrt_mtow: DEFAULT_REFERENCE_MTOW_TONNES.sqrt(),
        }
    }
}

impl CostCoefficients {
    pub fn new(alpha: f64, beta: f64, reference_sqrt_mtow: f64) -> Self {
        assert!(alpha >= 0.0 && beta >= 0.0 && reference_sqrt_mtow > 0.0);
        CostCoefficients {
            alpha,
            beta,
            reference_sqrt_mtow,
        }
    }
}

/// Average cost per minute of delay: `alpha + beta * avg_delay` for a
/// positive average delay, 0 for a zero one.
///
/// Defined so that `avg_cost_per_minute(d) * d` reproduces the quadratic
/// cost exactly (same arithmetic path as [`flight_delay_cost`]), and so a
/// regulation that delayed nobody carries zero expected cost.
pub fn avg_cost_per_minute(avg_delay: f64, coeffs: &CostCoefficients) -> f64 {
    debug_assert!(avg_delay >= 0.0);
    if avg_delay > 0.0 {
        coeffs.alpha + coeffs.beta * avg_delay
    } else {
        0.0
    }
}

/// Cost in EUR of an ATFM delay for one flight.
///
/// Total over all inputs: non-positive delays cost exactly 0.
pub fn flight_delay_cost(delay: f64, sqrt_mtow: f64, coeffs: &CostCoefficients) -> f64 {
    debug_assert!(sqrt_mtow > 0.0);
    if delay > 0.0 {
        (sqrt_mtow / coeffs.reference_sqrt_mtow) * (delay * avg_cost_per_minute(delay, coeffs))
    } else {
        0.0
    }
}

/// Delay and cost of one regulation, aggregated over the delayed flights
/// for which it was the most penalising one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegulationCostSummary {
    pub reg_id: String,
    pub n_delayed: u32,
    /// Minutes, summed over delayed flights.
    pub total_delay: f64,
    /// EUR, summed over delayed flights.
    pub total_cost: f64,
    /// Minutes per delayed flight.
    pub avg_delay: f64,
    /// EUR per delayed flight.
    pub avg_cost: f64,
}

/// Outcome of allocating flights to regulations.
#[derive(Debug, Clone)]
pub struct AllocationReport {
    /// One summary per regulation that actually received delay, sorted by
    /// reg_id.
    pub summaries: Vec<RegulationCostSummary>,
    /// Delayed flights dropped because their aircraft type is not in the
    /// table.
    pub n_excluded_unknown_aircraft: usize,
    pub excluded_aircraft_types: BTreeSet<String>,
}

/// Attributes every delayed flight's delay and cost to its most penalising
/// regulation.
///
/// Flights with zero delay are not counted as delayed; regulations that were
/// never the most penalising one for any delayed flight produce no summary.
/// Delayed flights with an unknown aircraft type are excluded and counted
/// rather than imputed. Sums run in input order, so results are deterministic.
pub fn allocate_to_regulations(
    flights: &[FlightDelayRecord],
    aircraft: &AircraftTable,
    coeffs: &CostCoefficients,
) -> AllocationReport {
    struct Acc {
        n_delayed: u32,
        total_delay: f64,
        total_cost: f64,
    }

    let mut per_reg: BTreeMap<&str, Acc> = BTreeMap::new();
    let mut n_excluded = 0usize;
    let mut excluded_types = BTreeSet::new();

    for flight in flights {
        if flight.atfm_delay <= 0.0 {
            continue;
        }
        let Some(spec) = aircraft.get(&flight.aircraft_type) else {
            n_excluded += 1;
            excluded_types.insert(flight.aircraft_type.clone());
            continue;
        };
        let cost = flight_delay_cost(flight.atfm_delay, spec.sqrt_mtow(), coeffs);
        let acc = per_reg
            .entry(flight.most_penalising_reg_id.as_str())
            .or_insert(Acc {
                n_delayed: 0,
                total_delay: 0.0,
                total_cost: 0.0,
            });
        acc.n_delayed += 1;
        acc.total_delay += flight.atfm_delay;
        acc.total_cost += cost;
    }

    let summaries = per_reg
        .into_iter()
        .map(|(reg_id, acc)| {
            let n = f64::from(acc.n_delayed);
            RegulationCostSummary {
                reg_id: reg_id.to_string(),
                n_delayed: acc.n_delayed,
                total_delay: acc.total_delay,
                total_cost: acc.total_cost,
                avg_delay: acc.total_delay / n,
                avg_cost: acc.total_cost / n,
            }
        })
        .collect();

    AllocationReport {
        summaries,
        n_excluded_unknown_aircraft: n_excluded,
        excluded_aircraft_types: excluded_types,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::AircraftSpec;
    use chrono::NaiveDate;

    fn reference_table() -> AircraftTable {
        let mut t = AircraftTable::new();
        t.insert(
            "REF".into(),
            AircraftSpec {
                aircraft_type: "REF".into(),
                mtow: 70.0,
            },
        );
        t.insert(
            "BIG".into(),
            AircraftSpec {
                aircraft_type: "BIG".into(),
                mtow: 280.0,
            },
        );
        t
    }

    fn flight(id: &str, aircraft: &str, delay: f64, reg: &str) -> FlightDelayRecord {
        FlightDelayRecord {
            flight_id: id.into(),
            date: NaiveDate::from_ymd_opt(2016, 7, 14).unwrap(),
            aircraft_type: aircraft.into(),
            atfm_delay: delay,
            most_penalising_reg_id: reg.into(),
        }
    }

    #[test]
    fn zero_and_negative_delay_cost_nothing() {
        let c = CostCoefficients::default();
        assert_eq!(flight_delay_cost(0.0, 8.0, &c), 0.0);
        assert_eq!(flight_delay_cost(-5.0, 8.0, &c), 0.0);
    }

    #[test]
    fn reference_aircraft_ten_minutes_costs_336_exactly() {
        let c = CostCoefficients::default();
        let cost = flight_delay_cost(10.0, c.reference_sqrt_mtow, &c);
        assert_eq!(cost, 336.0);
    }

    #[test]
    fn cost_scales_linearly_with_sqrt_mtow() {
        let c = CostCoefficients::default();
        // sqrt(280) = 2 * sqrt(70), so 4x MTOW costs exactly twice as much.
        let cost = flight_delay_cost(10.0, 2.0 * c.reference_sqrt_mtow, &c);
        assert_eq!(cost, 672.0);
    }

    #[test]
    fn acd_examples() {
        let c = CostCoefficients::default();
        assert_eq!(avg_cost_per_minute(10.0, &c), 33.6);
        assert_eq!(avg_cost_per_minute(0.0, &c), 0.0);
        // Order-of-magnitude check against the ~100 EUR/min rule of thumb.
        let acd = avg_cost_per_minute(73.2, &c);
        assert!(acd > 50.0 && acd < 200.0, "acd = {acd}");
    }

    #[test]
    fn acd_times_delay_is_bitwise_the_quadratic() {
        let c = CostCoefficients::default();
        for delay in [0.1, 1.0, 7.3, 10.0, 14.0, 59.2, 123.456] {
            let lhs = avg_cost_per_minute(delay, &c) * delay;
            let rhs = flight_delay_cost(delay, c.reference_sqrt_mtow, &c);
            assert_eq!(lhs, rhs, "delay {delay}");
        }
    }

    #[test]
    fn allocation_sums_per_regulation() {
        let c = CostCoefficients::default();
        let flights = vec![
            flight("F1", "REF", 10.0, "R"),
            flight("F2", "REF", 20.0, "R"),
        ];
        let report = allocate_to_regulations(&flights, &reference_table(), &c);
        assert_eq!(report.summaries.len(), 1);
        let s = &report.summaries[0];
        assert_eq!(s.n_delayed, 2);
        assert_eq!(s.total_delay, 30.0);
        assert_eq!(s.avg_delay, 15.0);
        // c(10) = 336, c(20) = 23.1*20 + 1.05*400 = 882
        assert!((s.total_cost - 1218.0).abs() < 1e-9);
        assert!((s.avg_cost - 609.0).abs() < 1e-9);
    }

    #[test]
    fn zero_delay_regulation_produces_no_summary() {
        let c = CostCoefficients::default();
        let flights = vec![flight("F1", "REF", 0.0, "R")];
        let report = allocate_to_regulations(&flights, &reference_table(), &c);
        assert!(report.summaries.is_empty());
    }

    #[test]
    fn allocation_partitions_across_regulations() {
        let c = CostCoefficients::default();
        let flights = vec![
            flight("F1", "REF", 10.0, "A"),
            flight("F2", "REF", 20.0, "B"),
            flight("F3", "REF", 5.0, "A"),
        ];
        let report = allocate_to_regulations(&flights, &reference_table(), &c);
        assert_eq!(report.summaries.len(), 2);
        assert_eq!(report.summaries[0].reg_id, "A");
        assert_eq!(report.summaries[0].n_delayed, 2);
        assert_eq!(report.summaries[1].reg_id, "B");
        assert_eq!(report.summaries[1].n_delayed, 1);

        let total: f64 = report.summaries.iter().map(|s| s.total_delay).sum();
        assert_eq!(total, 35.0);
    }

    #[test]
    fn unknown_aircraft_excluded_and_counted() {
        let c = CostCoefficients::default();
        let flights = vec![
            flight("F1", "UNKNOWN", 10.0, "R"),
            flight("F2", "REF", 10.0, "R"),
        ];
        let report = allocate_to_regulations(&flights, &reference_table(), &c);
        assert_eq!(report.n_excluded_unknown_aircraft, 1);
        assert!(report.excluded_aircraft_types.contains("UNKNOWN"));
        assert_eq!(report.summaries[0].n_delayed, 1);
    }

    #[test]
    fn cost_monotone_in_delay_and_homogeneous_in_sqrt_mtow() {
        let c = CostCoefficients::default();
        let mut prev = 0.0;
        for i in 0..200 {
            let delay = f64::from(i) * 0.5;
            let cost = flight_delay_cost(delay, 9.0, &c);
            assert!(cost >= prev);
            prev = cost;
        }
        for k in [0.5, 1.0, 2.0, 3.7] {
            let base = flight_delay_cost(12.0, 8.0, &c);
            let scaled = flight_delay_cost(12.0, k * 8.0, &c);
            assert!((scaled - k * base).abs() <= 1e-9 * scaled.abs().max(1.0));
        }
    }
}

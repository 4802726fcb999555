//! Seeded synthetic scenarios with a ground-truth manifest.
//!
//! A scenario is one quarter of activity: sectors with opening schedules and
//! polygon footprints, regulations with delay statistics, and the regulated
//! flights behind them. Everything derives from a single 64-bit seed, so a
//! scenario regenerates byte-identically.
//!
//! Cost structure of the generated flights: each regulation has a
//! characteristic delay drawn from a gamma distribution. With `noise_cv = 0`
//! every delayed flight of a regulation carries exactly that delay on the
//! reference aircraft, which puts the per-regulation (avg delay, avg cost)
//! points exactly on the `true_alpha`/`true_beta` quadratic — the fit
//! recovers the generator coefficients to machine precision. A positive
//! `noise_cv` scatters the points off the curve through two channels:
//! a per-regulation aircraft type whose sqrt(MTOW) factor is a unit-mean
//! lognormal draw (multiplicative cost noise that leaves the fitted
//! coefficients unbiased), plus a smaller unit-mean lognormal jitter on the
//! individual flight delays.
//!
//! The manifest records every per-sector risk component computed directly
//! from the generated records with the true coefficients, deliberately not
//! reusing the risk-computation code, so it can serve as an independent
//! end-to-end oracle.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{
    self, AircraftSpec, FlightDelayRecord, LocationType, OpeningRecord, ReasonCode,
    RegulationRecord, SectorGeometry,
};

/// Everything that controls a generated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioParams {
    pub n_sectors: usize,
    pub n_regulations: usize,
    pub n_flights: usize,
    /// Coefficients of the per-flight cost quadratic the flights encode.
    pub true_alpha: f64,
    pub true_beta: f64,
    /// Sampling weights of regulation reasons; must sum to 1.
    pub reason_mix: BTreeMap<ReasonCode, f64>,
    /// Gamma distribution of the per-regulation characteristic delay,
    /// truncated to [0.5, delay_max_minutes].
    pub delay_gamma_shape: f64,
    pub delay_gamma_scale: f64,
    /// Upper truncation of the characteristic delay; the default matches
    /// the span the shipped error-bin table covers.
    pub delay_max_minutes: f64,
    /// Coefficient of variation of the multiplicative lognormal cost noise.
    pub noise_cv: f64,
    /// Probability that a regulated flight is assigned delay.
    pub p_flight_delayed: f64,
    /// Probability that a regulation was cancelled before starting
    /// (negative duration). Never applied to a sector's first regulation.
    pub p_cancelled: f64,
    /// Calendar quarter the scenario covers.
    pub year: i32,
    pub quarter: u8,
    pub seed: u64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            n_sectors: 50,
            n_regulations: 500,
            n_flights: 10_000,
            true_alpha: crate::costlib::DEFAULT_ALPHA,
            true_beta: crate::costlib::DEFAULT_BETA,
            reason_mix: default_reason_mix(),
            delay_gamma_shape: 2.0,
            delay_gamma_scale: 7.0,
            delay_max_minutes: 60.0,
            noise_cv: 0.2,
            p_flight_delayed: 0.63,
            p_cancelled: 0.02,
            year: 2016,
            quarter: 3,
            seed: 0,
        }
    }
}

/// Observed reason shares: C 37%, W 18%, G 14%, S 7.4%, the rest split
/// evenly over the remaining common codes.
pub fn default_reason_mix() -> BTreeMap<ReasonCode, f64> {
    let mut mix = BTreeMap::new();
    let r = |c: char| ReasonCode::new(c).expect("uppercase");
    mix.insert(r('C'), 0.37);
    mix.insert(r('W'), 0.18);
    mix.insert(r('G'), 0.14);
    mix.insert(r('S'), 0.074);
    let rest = ['I', 'M', 'O', 'P', 'R', 'T', 'V'];
    let share = (1.0 - 0.37 - 0.18 - 0.14 - 0.074) / rest.len() as f64;
    for c in rest {
        mix.insert(r(c), share);
    }
    mix
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid scenario parameters: {0}")]
    InvalidParams(String),
}

/// Ground-truth risk components of one sector, computed from the generated
/// records with straight-line arithmetic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorTruth {
    pub sector_id: String,
    pub n_regulations: usize,
    pub afdr: f64,
    pub ad: f64,
    pub acd: f64,
    pub tc: f64,
    pub open_minutes: f64,
    pub regulated_minutes: f64,
    pub p_open: f64,
    pub p_reg_given_open: f64,
    pub tr: f64,
}

/// Scenario-wide ground truth, serialized as manifest.json.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub params: ScenarioParams,
    pub horizon_label: String,
    pub horizon_start: String,
    pub horizon_end: String,
    pub t_h_minutes: f64,
    pub n_delayed_flights: usize,
    pub sectors: Vec<SectorTruth>,
}

/// A fully generated scenario, in memory.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub regulations: Vec<RegulationRecord>,
    pub openings: Vec<OpeningRecord>,
    pub flights: Vec<FlightDelayRecord>,
    pub aircraft: Vec<AircraftSpec>,
    pub geometries: Vec<SectorGeometry>,
    pub manifest: Manifest,
}

impl Scenario {
    /// Writes the five input files plus manifest.json into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> io::Result<()> {
        std::fs::create_dir_all(dir)?;
        ingest::write_regulations(&dir.join("regulations.csv"), &self.regulations)?;
        ingest::write_openings(&dir.join("openings.csv"), &self.openings)?;
        ingest::write_flights(&dir.join("flights.csv"), &self.flights)?;
        ingest::write_aircraft(&dir.join("aircraft.csv"), &self.aircraft)?;
        ingest::write_sector_geometries(&dir.join("sectors.geojson"), &self.geometries)?;
        let mut manifest = serde_json::to_string_pretty(&self.manifest)?;
        manifest.push('\n');
        std::fs::write(dir.join("manifest.json"), manifest)
    }
}

/// How many non-reference aircraft types a noisy scenario carries.
const NOISY_FLEET_SIZE: usize = 64;

/// The synthetic fleet: a 70 t reference type, plus (for a noisy scenario)
/// types whose sqrt(MTOW) factors sit at the quantile midpoints of a
/// unit-mean lognormal, renormalized so their average is exactly 1.
/// Assigning one such type uniformly per regulation multiplies its average
/// cost by an independent unit-mean factor, which scatters the fit samples
/// off the quadratic without biasing the recovered coefficients.
fn fleet(noise_cv: f64) -> Vec<AircraftSpec> {
    let reference = AircraftSpec {
        aircraft_type: "REF".into(),
        mtow: crate::costlib::DEFAULT_REFERENCE_MTOW_TONNES,
    };
    let mut types = vec![reference];
    if noise_cv > 0.0 {
        // The between-regulation share of the cost noise.
        let cv_between = noise_cv * (3.0f64).sqrt() / 2.0;
        let sigma = (1.0 + cv_between * cv_between).ln().sqrt();
        let mut factors: Vec<f64> = (0..NOISY_FLEET_SIZE)
            .map(|j| {
                let p = (j as f64 + 0.5) / NOISY_FLEET_SIZE as f64;
                (sigma * inverse_normal_cdf(p) - sigma * sigma / 2.0).exp()
            })
            .collect();
        let mean = factors.iter().sum::<f64>() / factors.len() as f64;
        for k in &mut factors {
            *k /= mean;
        }
        for (i, k) in factors.iter().enumerate() {
            types.push(AircraftSpec {
                aircraft_type: format!("AC{i:02}"),
                mtow: crate::costlib::DEFAULT_REFERENCE_MTOW_TONNES * k * k,
            });
        }
    }
    types
}

/// Inverse standard normal CDF, Acklam's rational approximation
/// (relative error below 1.2e-9 on (0, 1)).
fn inverse_normal_cdf(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

fn validate(params: &ScenarioParams) -> Result<(), SynthError> {
    let fail = |msg: String| Err(SynthError::InvalidParams(msg));
    if params.n_sectors == 0 {
        return fail("n_sectors must be positive".into());
    }
    if params.n_regulations < params.n_sectors {
        return fail("need at least one regulation per sector".into());
    }
    if params.n_flights < params.n_regulations {
        return fail("need at least one flight per regulation".into());
    }
    for (value, what) in [
        (params.true_alpha, "true_alpha"),
        (params.true_beta, "true_beta"),
    ] {
        if value.is_nan() || value < 0.0 {
            return fail(format!("{what} must be non-negative"));
        }
    }
    for (value, what) in [
        (params.delay_gamma_shape, "delay_gamma_shape"),
        (params.delay_gamma_scale, "delay_gamma_scale"),
    ] {
        if value.is_nan() || value <= 0.0 {
            return fail(format!("{what} must be positive"));
        }
    }
    if params.delay_max_minutes.is_nan() || params.delay_max_minutes <= 0.5 {
        return fail("delay_max_minutes must exceed the 0.5-minute floor".into());
    }
    if params.noise_cv.is_nan() || params.noise_cv < 0.0 {
        return fail("noise_cv must be non-negative".into());
    }
    for p in [params.p_flight_delayed, params.p_cancelled] {
        if !(0.0..=1.0).contains(&p) {
            return fail(format!("probability {p} outside [0, 1]"));
        }
    }
    let total: f64 = params.reason_mix.values().sum();
    if params.reason_mix.is_empty() || (total - 1.0).abs() > 1e-9 {
        return fail(format!("reason_mix must sum to 1, got {total}"));
    }
    if params.reason_mix.values().any(|p| *p < 0.0) {
        return fail("reason_mix weights must be non-negative".into());
    }
    if !(1..=4).contains(&params.quarter) {
        return fail(format!("quarter must be 1..=4, got {}", params.quarter));
    }
    Ok(())
}

/// Generates the scenario for `params`. Deterministic: the same parameters
/// always produce the same records and manifest.
pub fn generate(params: &ScenarioParams) -> Result<Scenario, SynthError> {
    validate(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let horizon_start = quarter_start(params.year, params.quarter);
    let horizon_end = quarter_end(params.year, params.quarter);
    let t_h_minutes = (horizon_end - horizon_start).num_minutes();
    let n_days = (horizon_end - horizon_start).num_days();

    let sector_ids: Vec<String> = (0..params.n_sectors)
        .map(|i| format!("SYN{:04}", i + 1))
        .collect();
    let geometries = sector_grid(&sector_ids);

    // Openings: one interval per sector from the quarter start, a uniform
    // whole-minute length in [1, T_H] so p_open covers (0, 1].
    let mut openings = Vec::with_capacity(params.n_sectors);
    let mut open_minutes: BTreeMap<&str, i64> = BTreeMap::new();
    for sector_id in &sector_ids {
        let minutes = rng.gen_range(1..=t_h_minutes);
        open_minutes.insert(sector_id.as_str(), minutes);
        openings.push(OpeningRecord {
            sector_id: sector_id.clone(),
            open_start: horizon_start,
            open_end: horizon_start + Duration::minutes(minutes),
        });
    }

    // Regulations: round-robin over sectors first so every sector gets one,
    // then uniform. Flights are spread as evenly as possible.
    let delay_dist = Gamma::new(params.delay_gamma_shape, params.delay_gamma_scale)
        .map_err(|e| SynthError::InvalidParams(format!("gamma: {e}")))?;
    // The within-regulation share of the cost noise, applied to flight delays.
    let cv_within = params.noise_cv / 2.0;
    let lognorm_sigma = (1.0 + cv_within * cv_within).ln().sqrt();
    let reasons: Vec<(ReasonCode, f64)> = params.reason_mix.iter().map(|(r, p)| (*r, *p)).collect();
    let fleet = fleet(params.noise_cv);
    let noisy_types = &fleet[1..];

    let base_flights = params.n_flights / params.n_regulations;
    let extra_flights = params.n_flights % params.n_regulations;

    let mut regulations = Vec::with_capacity(params.n_regulations);
    let mut flights = Vec::with_capacity(params.n_flights);
    let mut flight_no = 0usize;

    for reg_index in 0..params.n_regulations {
        let sector_pos = if reg_index < params.n_sectors {
            reg_index
        } else {
            rng.gen_range(0..params.n_sectors)
        };
        let sector_id = &sector_ids[sector_pos];
        let reg_id = format!("R{:06}", reg_index + 1);
        let date = (horizon_start + Duration::days(rng.gen_range(0..n_days))).date_naive();
        let reason = sample_reason(&reasons, rng.gen::<f64>());
        let mut duration = f64::from(rng.gen_range(30..=480i32));
        let first_of_sector = reg_index < params.n_sectors;
        if !first_of_sector && rng.gen::<f64>() < params.p_cancelled {
            duration = -duration;
        }
        // Rejection-sample the truncated gamma; the cap cuts a thin tail,
        // so a bounded retry count suffices.
        let mut characteristic_delay = params.delay_max_minutes;
        for _ in 0..64 {
            let draw = delay_dist.sample(&mut rng).max(0.5);
            if draw <= params.delay_max_minutes {
                characteristic_delay = draw;
                break;
            }
        }
        // One aircraft type per regulation: its sqrt(MTOW) factor is the
        // regulation's multiplicative cost-noise draw.
        let delayed_aircraft = if params.noise_cv > 0.0 {
            &noisy_types[rng.gen_range(0..noisy_types.len())].aircraft_type
        } else {
            &fleet[0].aircraft_type
        };

        let n_regulated = base_flights + usize::from(reg_index < extra_flights);
        let mut n_delayed = 0u32;
        let mut total_delay = 0.0;
        for flight_index in 0..n_regulated {
            flight_no += 1;
            // The first flight of each regulation is always delayed, so
            // every regulation carries identifiable delay statistics.
            let delayed = flight_index == 0 || rng.gen::<f64>() < params.p_flight_delayed;
            let (delay, aircraft_type) = if delayed {
                let delay = if params.noise_cv > 0.0 {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    characteristic_delay
                        * (lognorm_sigma * z - lognorm_sigma * lognorm_sigma / 2.0).exp()
                } else {
                    characteristic_delay
                };
                (delay, delayed_aircraft.clone())
            } else {
                (
                    0.0,
                    fleet[rng.gen_range(0..fleet.len())].aircraft_type.clone(),
                )
            };
            if delay > 0.0 {
                n_delayed += 1;
                total_delay += delay;
            }
            flights.push(FlightDelayRecord {
                flight_id: format!("F{:07}", flight_no),
                date,
                aircraft_type,
                atfm_delay: delay,
                most_penalising_reg_id: reg_id.clone(),
            });
        }

        let n = f64::from(n_delayed);
        regulations.push(RegulationRecord {
            date,
            reg_id,
            reference_location: sector_id.clone(),
            location_type: LocationType::Enroute,
            reason,
            n_regulated_flights: n_regulated as u32,
            n_delayed_flights: n_delayed,
            total_delay,
            avg_delay_per_regulated: total_delay / n_regulated as f64,
            avg_delay_per_delayed: if n_delayed > 0 { total_delay / n } else { 0.0 },
            duration,
        });
    }

    let manifest = build_manifest(
        params,
        &regulations,
        &flights,
        &open_minutes,
        horizon_start,
        horizon_end,
        t_h_minutes as f64,
    );

    Ok(Scenario {
        regulations,
        openings,
        flights,
        aircraft: fleet,
        geometries,
        manifest,
    })
}

/// Per-sector ground truth straight from the records and true coefficients.
fn build_manifest(
    params: &ScenarioParams,
    regulations: &[RegulationRecord],
    flights: &[FlightDelayRecord],
    open_minutes: &BTreeMap<&str, i64>,
    horizon_start: DateTime<Utc>,
    horizon_end: DateTime<Utc>,
    t_h_minutes: f64,
) -> Manifest {
    struct Acc {
        n_regs: usize,
        delayed: u64,
        delay: f64,
        regulated: f64,
    }
    let mut per_sector: BTreeMap<&str, Acc> = BTreeMap::new();
    for reg in regulations {
        let acc = per_sector
            .entry(reg.reference_location.as_str())
            .or_insert(Acc {
                n_regs: 0,
                delayed: 0,
                delay: 0.0,
                regulated: 0.0,
            });
        acc.n_regs += 1;
        acc.delayed += u64::from(reg.n_delayed_flights);
        acc.delay += reg.total_delay;
        acc.regulated += reg.duration.max(0.0);
    }

    let sectors = per_sector
        .into_iter()
        .map(|(sector_id, acc)| {
            let afdr = acc.delayed as f64 / acc.n_regs as f64;
            let ad = if acc.delayed > 0 {
                acc.delay / acc.delayed as f64
            } else {
                0.0
            };
            let acd = if ad > 0.0 {
                params.true_alpha + params.true_beta * ad
            } else {
                0.0
            };
            let tc = afdr * ad * acd;
            let open = open_minutes.get(sector_id).copied().unwrap_or(0) as f64;
            let p_open = open / t_h_minutes;
            let regulated = acc.regulated.min(open);
            let p_reg = if open > 0.0 { regulated / open } else { 0.0 };
            SectorTruth {
                sector_id: sector_id.to_string(),
                n_regulations: acc.n_regs,
                afdr,
                ad,
                acd,
                tc,
                open_minutes: open,
                regulated_minutes: regulated,
                p_open,
                p_reg_given_open: p_reg,
                tr: tc * p_reg * p_open,
            }
        })
        .collect();

    Manifest {
        params: params.clone(),
        horizon_label: format!("{}Q{}", params.year, params.quarter),
        horizon_start: horizon_start.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
        horizon_end: horizon_end.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
        t_h_minutes,
        n_delayed_flights: flights.iter().filter(|f| f.atfm_delay > 0.0).count(),
        sectors,
    }
}

fn sample_reason(reasons: &[(ReasonCode, f64)], u: f64) -> ReasonCode {
    let mut cum = 0.0;
    for (reason, p) in reasons {
        cum += p;
        if u < cum {
            return *reason;
        }
    }
    reasons.last().expect("validated nonempty").0
}

fn quarter_start(year: i32, quarter: u8) -> DateTime<Utc> {
    let month = u32::from(quarter - 1) * 3 + 1;
    Utc.with_ymd_and_hms(year, month, 1, 0, 0, 0)
        .single()
        .expect("valid date")
}

fn quarter_end(year: i32, quarter: u8) -> DateTime<Utc> {
    if quarter == 4 {
        quarter_start(year + 1, 1)
    } else {
        let month = u32::from(quarter) * 3 + 1;
        Utc.with_ymd_and_hms(year, month, 1, 0, 0, 0)
            .single()
            .expect("valid date")
    }
}

/// Rectangular sector footprints on a lon/lat grid over Europe.
fn sector_grid(sector_ids: &[String]) -> Vec<SectorGeometry> {
    let cols = (sector_ids.len() as f64).sqrt().ceil() as usize;
    let (lon0, lat0) = (-10.0, 35.0);
    let (cell_w, cell_h) = (30.0 / cols as f64, 25.0 / cols as f64);
    sector_ids
        .iter()
        .enumerate()
        .map(|(i, sector_id)| {
            let (row, col) = (i / cols, i % cols);
            let west = lon0 + col as f64 * cell_w;
            let south = lat0 + row as f64 * cell_h;
            let east = west + cell_w;
            let north = south + cell_h;
            SectorGeometry {
                sector_id: sector_id.clone(),
                polygon: vec![
                    (west, south),
                    (east, south),
                    (east, north),
                    (west, north),
                    (west, south),
                ],
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costlib;
    use crate::fitlab;

    fn small_params(seed: u64) -> ScenarioParams {
        ScenarioParams {
            n_sectors: 10,
            n_regulations: 60,
            n_flights: 600,
            seed,
            ..ScenarioParams::default()
        }
    }

    #[test]
    fn same_seed_writes_byte_identical_directories() {
        let scenario = generate(&small_params(7)).unwrap();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        scenario.write_to_dir(dir_a.path()).unwrap();
        generate(&small_params(7))
            .unwrap()
            .write_to_dir(dir_b.path())
            .unwrap();
        for name in [
            "regulations.csv",
            "openings.csv",
            "flights.csv",
            "aircraft.csv",
            "sectors.geojson",
            "manifest.json",
        ] {
            let a = std::fs::read(dir_a.path().join(name)).unwrap();
            let b = std::fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between runs");
        }
    }

    #[test]
    fn different_seeds_differ() {
        let a = generate(&small_params(1)).unwrap();
        let b = generate(&small_params(2)).unwrap();
        assert_ne!(a.regulations, b.regulations);
    }

    #[test]
    fn noiseless_scenario_recovers_true_coefficients() {
        let params = ScenarioParams {
            noise_cv: 0.0,
            ..small_params(3)
        };
        let scenario = generate(&params).unwrap();

        let mut table = crate::ingest::AircraftTable::new();
        for spec in &scenario.aircraft {
            table.insert(spec.aircraft_type.clone(), spec.clone());
        }
        let coeffs = costlib::CostCoefficients::default();
        let report = costlib::allocate_to_regulations(&scenario.flights, &table, &coeffs);
        let points: Vec<(f64, f64)> = report
            .summaries
            .iter()
            .map(|s| (s.avg_delay, s.avg_cost))
            .collect();
        let (alpha, beta) = fitlab::fit_quadratic_origin(&points).unwrap();
        assert!(
            (alpha - params.true_alpha).abs() / params.true_alpha < 1e-6,
            "alpha {alpha}"
        );
        assert!(
            (beta - params.true_beta).abs() / params.true_beta < 1e-6,
            "beta {beta}"
        );
    }

    #[test]
    fn reason_frequencies_match_the_mix() {
        let params = ScenarioParams {
            n_sectors: 100,
            n_regulations: 25_000,
            n_flights: 25_000,
            seed: 11,
            ..ScenarioParams::default()
        };
        let scenario = generate(&params).unwrap();
        let mut counts: BTreeMap<ReasonCode, usize> = BTreeMap::new();
        for reg in &scenario.regulations {
            *counts.entry(reg.reason).or_default() += 1;
        }
        for (reason, expected) in &params.reason_mix {
            let observed = *counts.get(reason).unwrap_or(&0) as f64 / params.n_regulations as f64;
            assert!(
                (observed - expected).abs() < 0.02,
                "{reason}: observed {observed:.4}, expected {expected:.4}"
            );
        }
    }

    #[test]
    fn generated_files_pass_ingest_validation() {
        let scenario = generate(&small_params(5)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        scenario.write_to_dir(dir.path()).unwrap();

        let regs = ingest::parse_regulations(&dir.path().join("regulations.csv")).unwrap();
        assert_eq!(regs.records.len(), 60);
        assert!(regs.rejected.is_empty());

        let openings = ingest::parse_openings(&dir.path().join("openings.csv")).unwrap();
        assert_eq!(openings.records.len(), 10);
        assert!(openings.rejected.is_empty());

        let flights = ingest::parse_flights(&dir.path().join("flights.csv")).unwrap();
        assert_eq!(flights.records.len(), 600);
        assert!(flights.rejected.is_empty());

        let (table, parsed) = ingest::parse_aircraft(&dir.path().join("aircraft.csv")).unwrap();
        assert!(parsed.rejected.is_empty());
        assert!(ingest::unknown_aircraft_types(&flights.records, &table).is_empty());

        let geom = ingest::parse_sector_geometries(&dir.path().join("sectors.geojson")).unwrap();
        assert_eq!(geom.records.len(), 10);
    }

    #[test]
    fn manifest_tr_matches_riskcalc_within_1e9() {
        let params = small_params(13);
        let scenario = generate(&params).unwrap();
        let coeffs = costlib::CostCoefficients::default();
        let err = fitlab::ModelFile::shipped_default().error_model();
        let horizon = crate::riskcalc::HorizonSpec::quarter(params.year, params.quarter);
        let results = crate::riskcalc::compute_all(
            &scenario.regulations,
            &scenario.openings,
            &horizon,
            &coeffs,
            &err,
            &crate::riskcalc::RiskOptions::default(),
        );
        assert_eq!(results.len(), scenario.manifest.sectors.len());
        for truth in &scenario.manifest.sectors {
            let got = results
                .iter()
                .find(|r| r.sector_id == truth.sector_id)
                .unwrap();
            let rel = (got.tr - truth.tr).abs() / truth.tr.abs().max(1e-300);
            assert!(
                rel < 1e-9,
                "{}: got {}, truth {}",
                truth.sector_id,
                got.tr,
                truth.tr
            );
        }
    }

    #[test]
    fn every_sector_has_positive_distinct_tr() {
        let scenario = generate(&small_params(17)).unwrap();
        let mut trs: Vec<f64> = scenario.manifest.sectors.iter().map(|s| s.tr).collect();
        assert!(trs.iter().all(|tr| *tr > 0.0));
        trs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        trs.dedup();
        assert_eq!(trs.len(), scenario.manifest.sectors.len());
    }

    #[test]
    fn invalid_params_are_rejected() {
        let bad = ScenarioParams {
            n_flights: 5,
            n_regulations: 10,
            ..ScenarioParams::default()
        };
        assert!(generate(&bad).is_err());
        let mut bad_mix = ScenarioParams::default();
        bad_mix
            .reason_mix
            .insert(ReasonCode::new('C').unwrap(), 0.9);
        assert!(generate(&bad_mix).is_err());
    }

    #[test]
    fn inverse_normal_cdf_reference_points() {
        assert!(inverse_normal_cdf(0.5).abs() < 1e-9);
        assert!((inverse_normal_cdf(0.975) - 1.959963985).abs() < 1e-6);
        assert!((inverse_normal_cdf(0.025) + 1.959963985).abs() < 1e-6);
        assert!((inverse_normal_cdf(0.999) - 3.090232306).abs() < 1e-6);
    }

    #[test]
    fn noisy_fleet_factors_average_to_one() {
        let types = fleet(0.2);
        assert_eq!(types.len(), 1 + NOISY_FLEET_SIZE);
        let mean_k: f64 = types[1..]
            .iter()
            .map(|t| (t.mtow / crate::costlib::DEFAULT_REFERENCE_MTOW_TONNES).sqrt())
            .sum::<f64>()
            / NOISY_FLEET_SIZE as f64;
        assert!((mean_k - 1.0).abs() < 1e-12, "mean factor {mean_k}");
        assert!(fleet(0.0).len() == 1);
    }

    #[test]
    fn params_round_trip_through_json() {
        let params = small_params(23);
        let text = serde_json::to_string(&params).unwrap();
        let back: ScenarioParams = serde_json::from_str(&text).unwrap();
        assert_eq!(back, params);
        // Partial override files fall back to defaults for missing fields.
        let partial: ScenarioParams = serde_json::from_str(r#"{"n_sectors": 3}"#).unwrap();
        assert_eq!(partial.n_sectors, 3);
        assert_eq!(
            partial.n_regulations,
            ScenarioParams::default().n_regulations
        );
    }
}

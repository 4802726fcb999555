//! Economic risk and severity analytics for ATFM regulation data.
//!
//! The library turns historical air-traffic-flow-management records into a
//! per-sector economic picture in four stages:
//!
//! 1. [`ingest`] parses and validates the input files (regulations, sector
//!    openings, regulated flights, aircraft specs, sector geometries).
//! 2. [`costlib`] translates flight delay into airline cost via a
//!    sqrt(MTOW)-scaled quadratic and aggregates per regulation under the
//!    most-penalising-regulation principle.
//! 3. [`fitlab`] estimates the delay-to-cost model from flight-level data:
//!    outlier filtering, train/test split, quadratic-through-origin fit,
//!    OLS with reason dummies, gradient boosted trees, and a quantile-binned
//!    error model.
//! 4. [`riskcalc`] combines regulation impact with opening/regulation
//!    probabilities into per-sector expected cost and economic risk, and
//!    [`severity`] maps risk percentiles onto a five-level qualitative scale.
//!
//! [`synth`] generates seeded synthetic scenarios with a ground-truth
//! manifest so the whole pipeline can be exercised without proprietary data.

pub mod costlib;
pub mod fitlab;
pub mod ingest;
pub mod riskcalc;
pub mod severity;
pub mod synth;

pub use costlib::CostCoefficients;
pub use fitlab::model::ModelFile;

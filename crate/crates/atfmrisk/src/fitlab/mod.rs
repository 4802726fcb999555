//! Statistical estimation of the delay-cost model.
//!
//! Mirrors the analysis pipeline applied to the flight-level dataset:
//! z-score outlier filtering, a seeded 75/25 train/test split, a quadratic
//! through-origin fit of average cost on average delay, an OLS regression
//! with regulation-reason dummies, gradient boosted trees with feature
//! importances, and a quantile-binned standard-deviation error model.

pub mod errmodel;
pub mod gbt;
pub mod linalg;
pub mod model;
pub mod ols;
pub mod quad;
pub mod split;

pub use errmodel::{error_lookup, fit_error_model, ErrorBin, ErrorModel};
pub use gbt::{fit_gbt, gbt_importance, gbt_predict, GbtModel, GbtParams, ImportanceReport};
pub use model::{FitSummary, ModelFile};
pub use ols::{fit_ols_dummies, fit_ols_dummies_with_baseline, OlsResult};
pub use quad::{fit_quadratic_origin, fit_quadratic_with_validation, r_squared, QuadFitResult};
pub use split::{train_test_split, SplitMix64};

use thiserror::Error;

use crate::costlib::RegulationCostSummary;
use crate::ingest::ReasonCode;

/// One regulation's averaged delay and cost, the unit of observation for
/// every fit in this module.
#[derive(Debug, Clone, PartialEq)]
pub struct RegulationSample {
    /// Average delay per delayed flight, minutes.
    pub avg_delay: f64,
    /// Average cost per delayed flight, EUR.
    pub avg_cost: f64,
    /// Regulation reason, when known. Reason-aware fits require it.
    pub reason: Option<ReasonCode>,
    pub total_delay: Option<f64>,
    pub total_cost: Option<f64>,
}

impl RegulationSample {
    pub fn new(avg_delay: f64, avg_cost: f64) -> Self {
        RegulationSample {
            avg_delay,
            avg_cost,
            reason: None,
            total_delay: None,
            total_cost: None,
        }
    }

    pub fn with_reason(avg_delay: f64, avg_cost: f64, reason: ReasonCode) -> Self {
        RegulationSample {
            avg_delay,
            avg_cost,
            reason: Some(reason),
            total_delay: None,
            total_cost: None,
        }
    }

    pub fn from_summary(summary: &RegulationCostSummary, reason: Option<ReasonCode>) -> Self {
        RegulationSample {
            avg_delay: summary.avg_delay,
            avg_cost: summary.avg_cost,
            reason,
            total_delay: Some(summary.total_delay),
            total_cost: Some(summary.total_cost),
        }
    }
}

/// Failures of the fitting operations.
#[derive(Debug, Error)]
pub enum FitError {
    #[error("normal equations are singular (degenerate x values)")]
    SingularSystem,
    #[error("target is constant; R^2 undefined")]
    ConstantTarget,
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("sample {index} has no regulation reason; reason-aware fit needs one")]
    MissingReason { index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

/// Retains samples with |z| below the thresholds on both axes.
///
/// Means and standard deviations (population) are computed once over the
/// full input, not re-estimated after removals. A zero standard deviation
/// on an axis disables filtering on that axis.
pub fn zscore_filter(
    samples: &[RegulationSample],
    z_cost_max: f64,
    z_delay_max: f64,
) -> Vec<RegulationSample> {
    if samples.len() < 2 {
        return samples.to_vec();
    }
    let (cost_mean, cost_std) = mean_std(samples.iter().map(|s| s.avg_cost));
    let (delay_mean, delay_std) = mean_std(samples.iter().map(|s| s.avg_delay));

    samples
        .iter()
        .filter(|s| {
            let cost_ok =
                cost_std == 0.0 || ((s.avg_cost - cost_mean) / cost_std).abs() < z_cost_max;
            let delay_ok =
                delay_std == 0.0 || ((s.avg_delay - delay_mean) / delay_std).abs() < z_delay_max;
            cost_ok && delay_ok
        })
        .cloned()
        .collect()
}

/// Mean and population standard deviation in one pass over the values.
pub(crate) fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

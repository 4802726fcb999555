//! The model.json format: cost coefficients, fit quality and error bins.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::errmodel::ErrorModel;
use super::quad::QuadFitResult;
use crate::costlib::CostCoefficients;

/// Fit-quality block of model.json.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub r2_in: f64,
    pub r2_out: f64,
    pub n_train: usize,
    pub n_test: usize,
}

/// The serialized model: everything risk computation needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub cost: CostCoefficients,
    pub fit: FitSummary,
    pub error_bins: Vec<super::errmodel::ErrorBin>,
}

/// The default model shipped with the tool, embedded at compile time.
/// Coefficients 23.1 / 1.05 for a 70 t reference aircraft and the nine
/// published error bins.
const DEFAULT_MODEL_JSON: &str = include_str!("../../data/default_model.json");

impl ModelFile {
    pub fn from_fit(
        quad: &QuadFitResult,
        error_model: &ErrorModel,
        reference_sqrt_mtow: f64,
    ) -> Self {
        ModelFile {
            cost: CostCoefficients {
                alpha: quad.alpha,
                beta: quad.beta,
                reference_sqrt_mtow,
            },
            fit: FitSummary {
                r2_in: quad.r2_in,
                r2_out: quad.r2_out,
                n_train: quad.n_train,
                n_test: quad.n_test,
            },
            error_bins: error_model.bins.clone(),
        }
    }

    /// The built-in default model.
    pub fn shipped_default() -> Self {
        serde_json::from_str(DEFAULT_MODEL_JSON).expect("embedded default model is valid")
    }

    pub fn error_model(&self) -> ErrorModel {
        ErrorModel {
            bins: self.error_bins.clone(),
        }
    }

    pub fn load(path: &Path) -> io::Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        fs::write(
            path,
            serde_json::to_string_pretty(self).map(|mut s| {
                s.push('\n');
                s
            })?,
        )
    }
}

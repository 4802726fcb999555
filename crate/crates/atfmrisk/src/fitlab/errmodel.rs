//! Quantile-binned dispersion model of the average cost.
//!
//! Samples are sorted by average delay and cut into equal-count bins; each
//! bin stores the population standard deviation of the average cost and its
//! ratio to the bin mean. The model quantifies how far off the fitted
//! average-cost curve a given delay level tends to be.

use serde::{Deserialize, Serialize};

use super::{FitError, RegulationSample};

/// One delay bin: `[lo, hi)` minutes (last bin closed at the maximum).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBin {
    pub lo: f64,
    pub hi: f64,
    /// Population standard deviation of avg_cost in the bin, EUR.
    pub std: f64,
    /// std divided by the bin's mean cost; 0 for an all-zero bin.
    #[serde(rename = "ratio")]
    pub ratio_to_mean: f64,
}

/// Ordered, contiguous delay bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    pub bins: Vec<ErrorBin>,
}

/// Bins the samples into `n_bins` equal-count quantile bins (sizes differ by
/// at most one; the first `n % n_bins` bins take the extra sample).
pub fn fit_error_model(
    samples: &[RegulationSample],
    n_bins: usize,
) -> Result<ErrorModel, FitError> {
    if n_bins == 0 {
        return Err(FitError::InvalidParams("n_bins must be positive".into()));
    }
    let n = samples.len();
    if n < n_bins {
        return Err(FitError::TooFewSamples {
            needed: n_bins,
            got: n,
        });
    }

    let mut sorted: Vec<&RegulationSample> = samples.iter().collect();
    sorted.sort_by(|a, b| {
        a.avg_delay
            .partial_cmp(&b.avg_delay)
            .expect("finite delays")
    });

    let base = n / n_bins;
    let extra = n % n_bins;
    let mut bins = Vec::with_capacity(n_bins);
    let mut start = 0;
    for b in 0..n_bins {
        let size = base + usize::from(b < extra);
        let chunk = &sorted[start..start + size];
        start += size;

        let mean = chunk.iter().map(|s| s.avg_cost).sum::<f64>() / size as f64;
        let var = chunk
            .iter()
            .map(|s| (s.avg_cost - mean) * (s.avg_cost - mean))
            .sum::<f64>()
            / size as f64;
        let std = var.sqrt();
        let ratio = if mean > 0.0 { std / mean } else { 0.0 };

        bins.push(ErrorBin {
            lo: chunk[0].avg_delay,
            hi: f64::NAN,
            std,
            ratio_to_mean: ratio,
        });
    }
    // Close the intervals: hi = next bin's lo, last bin ends at the maximum.
    for b in 0..n_bins - 1 {
        bins[b].hi = bins[b + 1].lo;
    }
    bins[n_bins - 1].hi = sorted[n - 1].avg_delay;
    Ok(ErrorModel { bins })
}

/// Returns `(std, ratio)` of the bin containing `avg_delay`; out-of-range
/// delays clamp to the first or last bin.
pub fn error_lookup(model: &ErrorModel, avg_delay: f64) -> (f64, f64) {
    let last = model.bins.len() - 1;
    for bin in &model.bins[..last] {
        if avg_delay < bin.hi {
            return (bin.std, bin.ratio_to_mean);
        }
    }
    (model.bins[last].std, model.bins[last].ratio_to_mean)
}

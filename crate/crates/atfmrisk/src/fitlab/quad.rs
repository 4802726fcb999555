//! Quadratic-through-origin least squares and the R^2 score.

use serde::{Deserialize, Serialize};

use super::FitError;

/// Coefficients and fit quality of the average-cost model
/// `y = alpha * x + beta * x^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadFitResult {
    pub alpha: f64,
    pub beta: f64,
    /// R^2 on the training sample.
    pub r2_in: f64,
    /// R^2 on the held-out sample.
    pub r2_out: f64,
    pub n_train: usize,
    pub n_test: usize,
}

/// Least-squares solution of `y ~ alpha * x + beta * x^2` (no intercept),
/// via the 2x2 normal equations.
///
/// Returns `(alpha, beta)`. Fails with [`FitError::SingularSystem`] when the
/// normal matrix determinant falls below `1e-12` times its scale, which
/// covers fewer than two distinct positive x values.
pub fn fit_quadratic_origin(points: &[(f64, f64)]) -> Result<(f64, f64), FitError> {
    let mut s2 = 0.0; // sum x^2
    let mut s3 = 0.0; // sum x^3
    let mut s4 = 0.0; // sum x^4
    let mut sxy = 0.0; // sum x*y
    let mut sx2y = 0.0; // sum x^2*y
    for &(x, y) in points {
        let x2 = x * x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
        sxy += x * y;
        sx2y += x2 * y;
    }

    let det = s2 * s4 - s3 * s3;
    let scale = s2 * s4;
    let well_conditioned = det.is_finite() && det.abs() > 1e-12 * scale;
    if !well_conditioned || scale == 0.0 {
        return Err(FitError::SingularSystem);
    }
    let alpha = (sxy * s4 - sx2y * s3) / det;
    let beta = (s2 * sx2y - s3 * sxy) / det;
    Ok((alpha, beta))
}

/// Coefficient of determination `1 - SS_res / SS_tot`, with `SS_tot`
/// centered on `mean(y)`.
pub fn r_squared(predictions: &[f64], y: &[f64]) -> Result<f64, FitError> {
    if y.len() < 2 {
        return Err(FitError::TooFewSamples {
            needed: 2,
            got: y.len(),
        });
    }
    assert_eq!(predictions.len(), y.len());
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if ss_tot == 0.0 {
        return Err(FitError::ConstantTarget);
    }
    let ss_res: f64 = predictions
        .iter()
        .zip(y)
        .map(|(p, v)| (v - p) * (v - p))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Fits the quadratic on `train` and scores it on both samples.
pub fn fit_quadratic_with_validation(
    train: &[(f64, f64)],
    test: &[(f64, f64)],
) -> Result<QuadFitResult, FitError> {
    let (alpha, beta) = fit_quadratic_origin(train)?;
    let predict = |pts: &[(f64, f64)]| -> (Vec<f64>, Vec<f64>) {
        let preds = pts.iter().map(|&(x, _)| alpha * x + beta * x * x).collect();
        let ys = pts.iter().map(|&(_, y)| y).collect();
        (preds, ys)
    };
    let (train_pred, train_y) = predict(train);
    let r2_in = r_squared(&train_pred, &train_y)?;
    let (test_pred, test_y) = predict(test);
    let r2_out = r_squared(&test_pred, &test_y)?;
    Ok(QuadFitResult {
        alpha,
        beta,
        r2_in,
        r2_out,
        n_train: train.len(),
        n_test: test.len(),
    })
}

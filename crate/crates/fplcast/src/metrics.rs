//! Point-forecast error metrics.

use crate::error::{Error, Result};

fn check_lengths(pred: &[f64], actual: &[f64]) -> Result<()> {
    if pred.len() != actual.len() {
        return Err(Error::InvalidInput(format!(
            "metric length mismatch: {} predictions vs {} actuals",
            pred.len(),
            actual.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::InvalidInput("metric over empty sample".into()));
    }
    Ok(())
}

/// Root mean square error with uniform weights.
pub fn rmse(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check_lengths(pred, actual)?;
    let sse: f64 = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum();
    Ok((sse / pred.len() as f64).sqrt())
}

/// Mean absolute error.
pub fn mae(pred: &[f64], actual: &[f64]) -> Result<f64> {
    check_lengths(pred, actual)?;
    let sae: f64 = pred.iter().zip(actual).map(|(p, a)| (p - a).abs()).sum();
    Ok(sae / pred.len() as f64)
}

/// Weighted RMSE: sqrt(sum w*(p-a)^2 / sum w).
pub fn weighted_rmse(pred: &[f64], actual: &[f64], weights: &[f64]) -> Result<f64> {
    check_lengths(pred, actual)?;
    if weights.len() != pred.len() {
        return Err(Error::InvalidInput(format!(
            "weight length mismatch: {} weights vs {} samples",
            weights.len(),
            pred.len()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..pred.len() {
        let d = pred[i] - actual[i];
        num += weights[i] * d * d;
        den += weights[i];
    }
    if den <= 0.0 {
        return Err(Error::InvalidInput("non-positive weight total".into()));
    }
    Ok((num / den).sqrt())
}

//! Min-max normalization of features and targets, fitted on the training
//! partition only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub feature_min: Vec<f64>,
    pub feature_max: Vec<f64>,
    pub target_min: f64,
    pub target_max: f64,
}

impl ScalerParams {
    /// Fit per-feature and target min/max over training rows.
    pub fn fit(values: &[Vec<f64>], targets: &[f64]) -> Result<ScalerParams> {
        if values.is_empty() || targets.len() != values.len() {
            return Err(Error::InvalidInput(
                "scaler fit needs rows with matching targets".into(),
            ));
        }
        let width = values[0].len();
        let mut feature_min = vec![f64::INFINITY; width];
        let mut feature_max = vec![f64::NEG_INFINITY; width];
        for row in values {
            if row.len() != width {
                return Err(Error::WidthMismatch {
                    expected: width,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                feature_min[j] = feature_min[j].min(v);
                feature_max[j] = feature_max[j].max(v);
            }
        }
        let target_min = targets.iter().copied().fold(f64::INFINITY, f64::min);
        let target_max = targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(ScalerParams {
            feature_min,
            feature_max,
            target_min,
            target_max,
        })
    }

    pub fn width(&self) -> usize {
        self.feature_min.len()
    }

    #[inline]
    fn map(value: f64, min: f64, max: f64) -> f64 {
        if max <= min {
            // constant feature
            return 0.0;
        }
        ((value - min) / (max - min)).clamp(0.0, 1.0)
    }

    /// Normalize one feature vector into [0,1], clipping out-of-range values.
    pub fn normalize_features(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.width() {
            return Err(Error::WidthMismatch {
                expected: self.width(),
                got: values.len(),
            });
        }
        Ok(values
            .iter()
            .enumerate()
            .map(|(j, &v)| Self::map(v, self.feature_min[j], self.feature_max[j]))
            .collect())
    }

    pub fn normalize_target(&self, target: f64) -> f64 {
        Self::map(target, self.target_min, self.target_max)
    }

    /// Inverse of `normalize_target` for in-range values. With a constant
    /// training target the stored minimum is returned.
    pub fn denormalize_target(&self, normalized: f64) -> f64 {
        if self.target_max <= self.target_min {
            return self.target_min;
        }
        self.target_min + normalized * (self.target_max - self.target_min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fit_simple() -> ScalerParams {
        ScalerParams::fit(
            &[vec![0.0, 5.0], vec![10.0, 5.0], vec![4.0, 5.0]],
            &[-2.0, 10.0, 4.0],
        )
        .unwrap()
    }

    #[test]
    fn linear_map_midpoint() {
        let s = fit_simple();
        assert_eq!(s.normalize_features(&[5.0, 5.0]).unwrap()[0], 0.5);
    }

    #[test]
    fn out_of_range_values_clip() {
        let s = fit_simple();
        assert_eq!(s.normalize_features(&[12.0, 5.0]).unwrap()[0], 1.0);
        assert_eq!(s.normalize_features(&[-3.0, 5.0]).unwrap()[0], 0.0);
    }

    #[test]
    fn constant_feature_maps_to_zero() {
        let s = fit_simple();
        assert_eq!(s.normalize_features(&[5.0, 123.0]).unwrap()[1], 0.0);
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let s = fit_simple();
        assert!(s.normalize_features(&[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn target_round_trip(y in -20i32..30) {
            let s = ScalerParams::fit(&[vec![0.0], vec![1.0]], &[-20.0, 30.0]).unwrap();
            let y = f64::from(y);
            let back = s.denormalize_target(s.normalize_target(y));
            prop_assert!((back - y).abs() < 1e-12);
        }
    }
}

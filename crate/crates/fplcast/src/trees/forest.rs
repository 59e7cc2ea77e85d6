//! Random forest regressor over weighted CART trees.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cart::{fit_cart_on, validate_training_input, CartParams, MaxFeatures, TreeModel};
use super::matrix::DenseMatrix;
use super::sampling::{canonical_order, stream, weighted_bootstrap};
use super::FittedModel;
use crate::error::Result;
use crate::util::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfHyperparams {
    pub n_estimators: usize,
    pub max_depth: Option<u32>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
}

/// Fit a random forest. When `bootstrap` is set, each tree trains on a
/// weighted resample with replacement of size N whose drawn copies carry
/// unit weight; otherwise every tree sees the full weighted sample.
/// Per-tree seeds derive from (seed, tree index), so the forest is
/// reproducible and trees can be fitted in parallel.
pub fn fit_random_forest(
    x: &DenseMatrix,
    y: &[f64],
    w: &[f64],
    h: &RfHyperparams,
    seed: u64,
) -> Result<FittedModel> {
    validate_training_input(x, y, w)?;
    if h.n_estimators == 0 {
        return Err(crate::error::Error::InvalidInput(
            "n_estimators must be >= 1".into(),
        ));
    }
    let order = canonical_order(x, y, w);
    let cart = CartParams {
        max_depth: h.max_depth,
        min_samples_split: h.min_samples_split,
        min_samples_leaf: h.min_samples_leaf,
        max_features: h.max_features,
    };

    let trees: Vec<TreeModel> = (0..h.n_estimators)
        .into_par_iter()
        .map(|t| {
            let tree_seed = derive_seed(seed, "rf-tree", t as u64);
            let mut feature_rng = stream(derive_seed(tree_seed, "features", 0));
            if h.bootstrap {
                let mut draw_rng = stream(derive_seed(tree_seed, "bootstrap", 0));
                let draws = weighted_bootstrap(&mut draw_rng, &order, w, order.len());
                let idx: Vec<usize> = draws.iter().map(|&(i, _)| i).collect();
                let mut bw = vec![0.0; x.n_rows()];
                for &(i, c) in &draws {
                    bw[i] = c;
                }
                fit_cart_on(x, idx, y, &bw, &cart, &mut feature_rng)
            } else {
                fit_cart_on(x, order.clone(), y, w, &cart, &mut feature_rng)
            }
        })
        .collect();

    Ok(FittedModel::RandomForest {
        params: h.clone(),
        trees,
        n_features: x.n_cols(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::cart::fit_cart;
    use crate::trees::predict;

    fn grid(n: usize) -> (DenseMatrix, Vec<f64>, Vec<f64>) {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let y: Vec<f64> = (0..n).map(|i| (i as f64).sin() * 3.0 + i as f64 * 0.5).collect();
        (DenseMatrix::from_rows(&rows).unwrap(), y, vec![1.0; n])
    }

    #[test]
    fn single_tree_without_bootstrap_reduces_to_cart() {
        let (x, y, w) = grid(30);
        let h = RfHyperparams {
            n_estimators: 1,
            max_depth: Some(4),
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: MaxFeatures::Fraction(1.0),
            bootstrap: false,
        };
        let forest = fit_random_forest(&x, &y, &w, &h, 42).unwrap();
        let cart = fit_cart(
            &x,
            &y,
            &w,
            &CartParams {
                max_depth: Some(4),
                min_samples_split: 2,
                min_samples_leaf: 1,
                max_features: MaxFeatures::Fraction(1.0),
            },
            42,
        )
        .unwrap();
        for i in 0..x.n_rows() {
            let pf = predict(&forest, &x).unwrap()[i];
            let pc = cart.predict_row(x.row(i));
            assert_eq!(pf, pc);
        }
    }

    #[test]
    fn constant_targets_stay_constant() {
        let rows: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64]).collect();
        let x = DenseMatrix::from_rows(&rows).unwrap();
        let y = vec![2.0; 12];
        let h = RfHyperparams {
            n_estimators: 5,
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
        };
        let model = fit_random_forest(&x, &y, &vec![1.0; 12], &h, 9).unwrap();
        for p in predict(&model, &x).unwrap() {
            assert_eq!(p, 2.0);
        }
    }

    #[test]
    fn same_inputs_give_bit_identical_predictions() {
        let (x, y, w) = grid(25);
        let h = RfHyperparams {
            n_estimators: 8,
            max_depth: Some(6),
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: MaxFeatures::Fraction(0.2),
            bootstrap: true,
        };
        let a = fit_random_forest(&x, &y, &w, &h, 7).unwrap();
        let b = fit_random_forest(&x, &y, &w, &h, 7).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(predict(&a, &x).unwrap(), predict(&b, &x).unwrap());
    }

    #[test]
    fn deep_forest_interpolates_training_data() {
        // 50 synthetic points, no bootstrap, all features: every tree can
        // isolate each sample, so training error collapses.
        let (x, y, w) = grid(50);
        let h = RfHyperparams {
            n_estimators: 3,
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: MaxFeatures::Fraction(1.0),
            bootstrap: false,
        };
        let model = fit_random_forest(&x, &y, &w, &h, 1).unwrap();
        let preds = predict(&model, &x).unwrap();
        let rmse = crate::metrics::rmse(&preds, &y).unwrap();
        assert!(rmse < 1e-6, "training rmse {rmse} not near zero");
    }
}

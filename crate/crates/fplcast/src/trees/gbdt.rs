//! Second-order gradient-boosted trees with weighted squared error and
//! early stopping on a held-out validation fold.

use serde::{Deserialize, Serialize};

use super::cart::{validate_training_input, Node, TreeModel};
use super::matrix::DenseMatrix;
use super::sampling::{canonical_order, sample_features, stream, subsample_rows};
use super::FittedModel;
use crate::error::{Error, Result};
use crate::metrics::weighted_rmse;
use crate::util::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtHyperparams {
    pub n_estimators: usize,
    pub max_depth: u32,
    pub learning_rate: f64,
    pub subsample: f64,
    pub colsample_bytree: f64,
    pub min_child_weight: f64,
    pub gamma: f64,
    pub reg_lambda: f64,
}

/// Patience-based stopping on a validation metric. The run stops after the
/// round at which the best value has stood for `patience` consecutive rounds,
/// counting the round that set it; `best_round` is the first round attaining
/// the minimum.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    best: f64,
    best_round: usize,
    round: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> EarlyStopping {
        assert!(patience >= 1, "patience must be >= 1");
        EarlyStopping {
            patience,
            best: f64::INFINITY,
            best_round: 0,
            round: 0,
        }
    }

    /// Feed the metric for the next round; returns true when training should
    /// stop after this round.
    pub fn observe(&mut self, value: f64) -> bool {
        self.round += 1;
        if value < self.best {
            self.best = value;
            self.best_round = self.round;
        }
        self.round - self.best_round + 1 >= self.patience
    }

    pub fn best_round(&self) -> usize {
        self.best_round
    }

    pub fn best_value(&self) -> f64 {
        self.best
    }

    pub fn rounds_seen(&self) -> usize {
        self.round
    }
}

/// Split gain: 1/2 [GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l)] - gamma.
fn best_split(
    x: &DenseMatrix,
    idx: &[usize],
    grad: &[f64],
    hess: &[f64],
    features: &[usize],
    min_child_weight: f64,
    lambda: f64,
    gamma: f64,
) -> Option<(usize, f64)> {
    let n = idx.len();
    let mut g_sum = 0.0;
    let mut h_sum = 0.0;
    for &i in idx {
        g_sum += grad[i];
        h_sum += hess[i];
    }
    let parent_term = g_sum * g_sum / (h_sum + lambda);

    let mut best: Option<(f64, usize, f64)> = None;
    let mut triples: Vec<(f64, f64, f64)> = Vec::with_capacity(n);
    for &f in features {
        triples.clear();
        triples.extend(idx.iter().map(|&i| (x.get(i, f), grad[i], hess[i])));
        triples.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("non-finite feature"));

        let mut gl = 0.0;
        let mut hl = 0.0;
        for i in 1..n {
            let (xv, gv, hv) = triples[i - 1];
            gl += gv;
            hl += hv;
            if triples[i].0 <= xv {
                continue;
            }
            let gr = g_sum - gl;
            let hr = h_sum - hl;
            if hl < min_child_weight || hr < min_child_weight {
                continue;
            }
            let gain =
                0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent_term) - gamma;
            let improved = match best {
                None => gain > 0.0,
                Some((bg, _, _)) => gain > bg,
            };
            if improved {
                best = Some((gain, f, 0.5 * (xv + triples[i].0)));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}

struct BoostTreeGrower<'a> {
    x: &'a DenseMatrix,
    grad: &'a [f64],
    hess: &'a [f64],
    features: &'a [usize],
    max_depth: u32,
    min_child_weight: f64,
    lambda: f64,
    gamma: f64,
    nodes: Vec<Node>,
}

impl BoostTreeGrower<'_> {
    fn leaf_value(&self, idx: &[usize]) -> f64 {
        let mut g = 0.0;
        let mut h = 0.0;
        for &i in idx {
            g += self.grad[i];
            h += self.hess[i];
        }
        -g / (h + self.lambda)
    }

    fn grow(&mut self, idx: Vec<usize>, depth: u32) -> usize {
        if depth < self.max_depth && idx.len() >= 2 {
            if let Some((f, thr)) = best_split(
                self.x,
                &idx,
                self.grad,
                self.hess,
                self.features,
                self.min_child_weight,
                self.lambda,
                self.gamma,
            ) {
                let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
                    idx.iter().partition(|&&i| self.x.get(i, f) <= thr);
                let at = self.nodes.len();
                self.nodes.push(Node::Leaf { value: 0.0 });
                let left = self.grow(left_idx, depth + 1);
                let right = self.grow(right_idx, depth + 1);
                self.nodes[at] = Node::Split {
                    feature: f,
                    threshold: thr,
                    left,
                    right,
                };
                return at;
            }
        }
        self.nodes.push(Node::Leaf {
            value: self.leaf_value(&idx),
        });
        self.nodes.len() - 1
    }
}

/// Per-sample gradient and hessian of the weighted squared error
/// L = sum_i w_i/2 (pred_i - y_i)^2 at the current predictions.
pub fn squared_error_grad_hess(pred: &[f64], y: &[f64], w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let grad = pred
        .iter()
        .zip(y)
        .zip(w)
        .map(|((p, t), wi)| wi * (p - t))
        .collect();
    let hess = w.to_vec();
    (grad, hess)
}

/// Fit a gradient-boosted model. Training stops early when the weighted
/// validation RMSE stops improving (see [`EarlyStopping`]); prediction uses
/// the first `best_iteration` trees.
#[allow(clippy::too_many_arguments)]
pub fn fit_gbdt(
    x_train: &DenseMatrix,
    y_train: &[f64],
    w_train: &[f64],
    x_val: &DenseMatrix,
    y_val: &[f64],
    w_val: &[f64],
    h: &GbdtHyperparams,
    seed: u64,
    patience: usize,
) -> Result<FittedModel> {
    validate_training_input(x_train, y_train, w_train)?;
    if x_val.n_rows() == 0 || y_val.is_empty() {
        return Err(Error::InvalidInput(
            "gbdt requires a non-empty validation set for early stopping".into(),
        ));
    }
    if x_val.n_cols() != x_train.n_cols() {
        return Err(Error::WidthMismatch {
            expected: x_train.n_cols(),
            got: x_val.n_cols(),
        });
    }
    if h.n_estimators == 0 {
        return Err(Error::InvalidInput("n_estimators must be >= 1".into()));
    }

    let n = x_train.n_rows();
    let d = x_train.n_cols();
    let sw: f64 = w_train.iter().sum();
    let base_score = y_train
        .iter()
        .zip(w_train)
        .map(|(y, w)| y * w)
        .sum::<f64>()
        / sw;

    let order = canonical_order(x_train, y_train, w_train);
    let mut pred_train = vec![base_score; n];
    let mut pred_val = vec![base_score; x_val.n_rows()];
    let mut trees: Vec<TreeModel> = Vec::new();
    let mut val_history: Vec<f64> = Vec::new();
    let mut stopper = EarlyStopping::new(patience);

    for round in 0..h.n_estimators {
        let rows = if h.subsample < 1.0 {
            let m = (h.subsample * n as f64).ceil() as usize;
            let mut rng = stream(derive_seed(seed, "gbdt-rows", round as u64));
            subsample_rows(&mut rng, &order, m)
        } else {
            order.clone()
        };
        let features = if h.colsample_bytree < 1.0 {
            let m = (h.colsample_bytree * d as f64).ceil() as usize;
            let mut rng = stream(derive_seed(seed, "gbdt-cols", round as u64));
            sample_features(&mut rng, d, m)
        } else {
            (0..d).collect()
        };

        let (grad, hess) = squared_error_grad_hess(&pred_train, y_train, w_train);
        let mut grower = BoostTreeGrower {
            x: x_train,
            grad: &grad,
            hess: &hess,
            features: &features,
            max_depth: h.max_depth,
            min_child_weight: h.min_child_weight,
            lambda: h.reg_lambda,
            gamma: h.gamma,
            nodes: Vec::new(),
        };
        grower.grow(rows, 0);
        let tree = TreeModel {
            nodes: grower.nodes,
        };

        for i in 0..n {
            pred_train[i] += h.learning_rate * tree.predict_row(x_train.row(i));
        }
        for i in 0..x_val.n_rows() {
            pred_val[i] += h.learning_rate * tree.predict_row(x_val.row(i));
        }
        trees.push(tree);

        let val_rmse = weighted_rmse(&pred_val, y_val, w_val)?;
        val_history.push(val_rmse);
        if stopper.observe(val_rmse) {
            break;
        }
    }

    Ok(FittedModel::Gbdt {
        params: h.clone(),
        trees,
        shrinkage: h.learning_rate,
        base_score,
        best_iteration: stopper.best_round(),
        n_features: d,
        val_history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::predict;

    fn params(n_estimators: usize) -> GbdtHyperparams {
        GbdtHyperparams {
            n_estimators,
            max_depth: 3,
            learning_rate: 0.1,
            subsample: 1.0,
            colsample_bytree: 1.0,
            min_child_weight: 1.0,
            gamma: 0.0,
            reg_lambda: 1.0,
        }
    }

    fn toy(n: usize) -> (DenseMatrix, Vec<f64>, Vec<f64>) {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, (i % 5) as f64]).collect();
        let y: Vec<f64> = (0..n).map(|i| 0.3 * i as f64 + f64::from(u32::from(i % 5 == 0))).collect();
        (DenseMatrix::from_rows(&rows).unwrap(), y, vec![1.0; n])
    }

    #[test]
    fn single_leaf_single_round_predicts_weighted_mean() {
        let (x, y, w) = toy(10);
        let h = GbdtHyperparams {
            n_estimators: 1,
            max_depth: 0,
            learning_rate: 1.0,
            reg_lambda: 0.0,
            ..params(1)
        };
        let model = fit_gbdt(&x, &y, &w, &x, &y, &w, &h, 1, 30).unwrap();
        // base = weighted mean; the single leaf fits -G/(H+0) = 0 on top
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        for p in predict(&model, &x).unwrap() {
            assert!((p - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn gain_formula_plugs_through() {
        // G_L=-2, H_L=1, G_R=2, H_R=1, lambda=0, gamma=0 -> gain = 4
        let gl: f64 = -2.0;
        let hl = 1.0;
        let gr = 2.0;
        let hr = 1.0;
        let lambda = 0.0;
        let parent = (gl + gr) * (gl + gr) / (hl + hr + lambda);
        let gain = 0.5 * (gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent);
        assert_eq!(gain, 4.0);
    }

    #[test]
    fn flat_validation_curve_stops_at_round_31() {
        let mut stopper = EarlyStopping::new(30);
        assert!(!stopper.observe(1.0));
        let mut stopped_at = 0;
        for round in 2..=60 {
            if stopper.observe(0.9) {
                stopped_at = round;
                break;
            }
        }
        assert_eq!(stopped_at, 31);
        assert_eq!(stopper.best_round(), 2);
    }

    #[test]
    fn improving_curve_defers_stopping() {
        let mut stopper = EarlyStopping::new(5);
        for round in 1..=20 {
            let stop = stopper.observe(1.0 / round as f64);
            assert!(!stop);
        }
        assert_eq!(stopper.best_round(), 20);
    }

    #[test]
    fn empty_validation_set_is_an_error() {
        let (x, y, w) = toy(6);
        let xe = DenseMatrix::from_flat(0, 2, vec![]);
        assert!(xe.is_ok());
        let err = fit_gbdt(&x, &y, &w, &xe.unwrap(), &[], &[], &params(10), 1, 30);
        assert!(err.is_err());
    }

    #[test]
    fn training_rmse_is_monotone_without_sampling() {
        let (x, y, w) = toy(40);
        let h = params(50);
        let model = fit_gbdt(&x, &y, &w, &x, &y, &w, &h, 5, 1000).unwrap();
        // with train == val and no row/column sampling the history is the
        // weighted training RMSE, which must never increase
        if let FittedModel::Gbdt { val_history, .. } = &model {
            for pair in val_history.windows(2) {
                assert!(
                    pair[1] <= pair[0] + 1e-12,
                    "training rmse increased: {} -> {}",
                    pair[0],
                    pair[1]
                );
            }
        } else {
            panic!("expected gbdt model");
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let (x, y, w) = toy(12);
        let _ = x;
        let pred: Vec<f64> = y.iter().map(|v| v * 0.8 + 0.3).collect();
        let (grad, hess) = squared_error_grad_hess(&pred, &y, &w);
        let loss = |p: &[f64]| -> f64 {
            p.iter()
                .zip(&y)
                .zip(&w)
                .map(|((pi, yi), wi)| 0.5 * wi * (pi - yi) * (pi - yi))
                .sum()
        };
        // the loss is quadratic in pred, so central differences carry no
        // truncation error and a larger step only reduces rounding noise
        let eps = 1e-3;
        for i in 0..pred.len() {
            let mut up = pred.clone();
            let mut dn = pred.clone();
            up[i] += eps;
            dn[i] -= eps;
            let g_fd = (loss(&up) - loss(&dn)) / (2.0 * eps);
            let h_fd = (loss(&up) - 2.0 * loss(&pred) + loss(&dn)) / (eps * eps);
            assert!((grad[i] - g_fd).abs() <= 1e-6 * g_fd.abs().max(1.0));
            assert!((hess[i] - h_fd).abs() <= 1e-6 * h_fd.abs().max(1.0));
        }
    }
}

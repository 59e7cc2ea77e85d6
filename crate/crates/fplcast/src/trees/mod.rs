//! Native weighted tree learners: CART, random forest, and second-order
//! gradient boosting — the two model families searched over.

pub mod cart;
pub mod forest;
pub mod gbdt;
pub mod matrix;
pub mod sampling;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

pub use cart::{fit_cart, CartParams, MaxFeatures, Node, TreeModel};
pub use forest::{fit_random_forest, RfHyperparams};
pub use gbdt::{fit_gbdt, EarlyStopping, GbdtHyperparams};
pub use matrix::DenseMatrix;

use crate::error::{Error, Result};

/// A trained model of either family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FittedModel {
    RandomForest {
        params: RfHyperparams,
        trees: Vec<TreeModel>,
        n_features: usize,
    },
    Gbdt {
        params: GbdtHyperparams,
        trees: Vec<TreeModel>,
        /// Learning rate applied to every stored (unscaled) tree output.
        shrinkage: f64,
        base_score: f64,
        /// Prediction uses trees[0..best_iteration].
        best_iteration: usize,
        n_features: usize,
        /// Weighted validation RMSE per boosting round, for inspection.
        val_history: Vec<f64>,
    },
}

impl FittedModel {
    pub fn n_features(&self) -> usize {
        match self {
            FittedModel::RandomForest { n_features, .. } => *n_features,
            FittedModel::Gbdt { n_features, .. } => *n_features,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FittedModel::RandomForest { .. } => "random_forest",
            FittedModel::Gbdt { .. } => "gbdt",
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.n_features() {
            return Err(Error::WidthMismatch {
                expected: self.n_features(),
                got: row.len(),
            });
        }
        let out = match self {
            FittedModel::RandomForest { trees, .. } => {
                if trees.is_empty() {
                    return Err(Error::InvalidInput("random forest with no trees".into()));
                }
                trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / trees.len() as f64
            }
            FittedModel::Gbdt {
                trees,
                shrinkage,
                base_score,
                best_iteration,
                ..
            } => {
                let mut acc = *base_score;
                for tree in &trees[..(*best_iteration).min(trees.len())] {
                    acc += shrinkage * tree.predict_row(row);
                }
                acc
            }
        };
        if !out.is_finite() {
            return Err(Error::NonFinite {
                context: "model prediction".into(),
            });
        }
        Ok(out)
    }
}

/// Predict a whole matrix.
pub fn predict(model: &FittedModel, x: &DenseMatrix) -> Result<Vec<f64>> {
    if x.n_cols() != model.n_features() {
        return Err(Error::WidthMismatch {
            expected: model.n_features(),
            got: x.n_cols(),
        });
    }
    (0..x.n_rows()).map(|i| model.predict_row(x.row(i))).collect()
}

const MODEL_FORMAT: &str = "fplcast-model/1";

/// Self-describing model archive: format version, feature schema tag,
/// payload, and a content checksum validated on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format: String,
    pub feature_schema: String,
    pub n_features: usize,
    pub checksum: String,
    pub model: FittedModel,
}

impl ModelArtifact {
    pub fn new(model: FittedModel, feature_schema: &str) -> Result<ModelArtifact> {
        let payload = serde_json::to_vec(&model)?;
        Ok(ModelArtifact {
            format: MODEL_FORMAT.to_string(),
            feature_schema: feature_schema.to_string(),
            n_features: model.n_features(),
            checksum: hex_sha256(&payload),
            model,
        })
    }
}

fn hex_sha256(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn save_model(path: &Path, model: &FittedModel, feature_schema: &str) -> Result<()> {
    let artifact = ModelArtifact::new(model.clone(), feature_schema)?;
    let json = serde_json::to_string(&artifact)?;
    std::fs::write(path, json).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn load_model(path: &Path, expected_schema: Option<&str>) -> Result<FittedModel> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let artifact: ModelArtifact = serde_json::from_str(&text)?;
    if artifact.format != MODEL_FORMAT {
        return Err(Error::CorruptArtifact {
            path: path.display().to_string(),
            message: format!("unsupported format {}", artifact.format),
        });
    }
    let payload = serde_json::to_vec(&artifact.model)?;
    if hex_sha256(&payload) != artifact.checksum {
        return Err(Error::CorruptArtifact {
            path: path.display().to_string(),
            message: "checksum mismatch".into(),
        });
    }
    if artifact.n_features != artifact.model.n_features() {
        return Err(Error::CorruptArtifact {
            path: path.display().to_string(),
            message: "feature width mismatch".into(),
        });
    }
    if let Some(schema) = expected_schema {
        if artifact.feature_schema != schema {
            return Err(Error::SchemaMismatch {
                expected: schema.to_string(),
                got: artifact.feature_schema,
            });
        }
    }
    Ok(artifact.model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_one_gbdt_leaves_match_hand_computation() {
        // base = 2/3 (weighted mean of y=[0,1], w=[1,2]); at round one
        // g = w*(base - y) = (2/3, -2/3), h = (1, 2); with lambda = 1 the
        // leaves are -g/(h+1): left -1/3, right 2/9.
        let x = DenseMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let y = vec![0.0, 1.0];
        let w = vec![1.0, 2.0];
        let h = GbdtHyperparams {
            n_estimators: 1,
            max_depth: 1,
            learning_rate: 1.0,
            subsample: 1.0,
            colsample_bytree: 1.0,
            min_child_weight: 0.0,
            gamma: 0.0,
            reg_lambda: 1.0,
        };
        let model = fit_gbdt(&x, &y, &w, &x, &y, &w, &h, 1, 30).unwrap();
        let base = 2.0 / 3.0;
        assert!((model.predict_row(&[0.0]).unwrap() - (base - 1.0 / 3.0)).abs() < 1e-12);
        assert!((model.predict_row(&[1.0]).unwrap() - (base + 2.0 / 9.0)).abs() < 1e-12);
    }

    #[test]
    fn gbdt_prediction_uses_only_best_iteration_trees() {
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64]).collect();
        let x = DenseMatrix::from_rows(&rows).unwrap();
        let y: Vec<f64> = (0..30).map(|i| (i as f64 * 0.7).sin()).collect();
        let w = vec![1.0; 30];
        let h = GbdtHyperparams {
            n_estimators: 40,
            max_depth: 3,
            learning_rate: 0.3,
            subsample: 1.0,
            colsample_bytree: 1.0,
            min_child_weight: 1.0,
            gamma: 0.0,
            reg_lambda: 1.0,
        };
        let model = fit_gbdt(&x, &y, &w, &x, &y, &w, &h, 2, 1000).unwrap();
        if let FittedModel::Gbdt {
            trees,
            best_iteration,
            shrinkage,
            base_score,
            ..
        } = &model
        {
            let mut manual = *base_score;
            for t in &trees[..*best_iteration] {
                manual += shrinkage * t.predict_row(&[4.0]);
            }
            assert_eq!(model.predict_row(&[4.0]).unwrap(), manual);
            assert!(*best_iteration < trees.len() || *best_iteration == trees.len());
        } else {
            panic!("expected gbdt");
        }
    }

    #[test]
    fn width_mismatch_is_an_error() {
        let x = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let y = vec![0.0, 1.0];
        let model = fit_random_forest(
            &x,
            &y,
            &[1.0, 1.0],
            &RfHyperparams {
                n_estimators: 2,
                max_depth: None,
                min_samples_split: 2,
                min_samples_leaf: 1,
                max_features: MaxFeatures::Fraction(1.0),
                bootstrap: false,
            },
            1,
        )
        .unwrap();
        let narrow = DenseMatrix::from_rows(&[vec![0.0]]).unwrap();
        assert!(matches!(
            predict(&model, &narrow),
            Err(Error::WidthMismatch { .. })
        ));
    }

    #[test]
    fn empty_forest_prediction_is_an_error() {
        let model = FittedModel::RandomForest {
            params: RfHyperparams {
                n_estimators: 1,
                max_depth: None,
                min_samples_split: 2,
                min_samples_leaf: 1,
                max_features: MaxFeatures::Fraction(1.0),
                bootstrap: false,
            },
            trees: vec![],
            n_features: 1,
        };
        assert!(model.predict_row(&[0.0]).is_err());
    }

    #[test]
    fn artifact_round_trip_validates_checksum() {
        let dir = tempfile::tempdir().unwrap();
        let x = DenseMatrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let y = vec![1.0, 2.0, 3.0];
        let model = fit_random_forest(
            &x,
            &y,
            &[1.0; 3],
            &RfHyperparams {
                n_estimators: 3,
                max_depth: Some(2),
                min_samples_split: 2,
                min_samples_leaf: 1,
                max_features: MaxFeatures::Sqrt,
                bootstrap: true,
            },
            11,
        )
        .unwrap();
        let path = dir.path().join("model.json");
        save_model(&path, &model, "GK-v1").unwrap();
        let loaded = load_model(&path, Some("GK-v1")).unwrap();
        assert_eq!(model, loaded);
        assert!(load_model(&path, Some("DEF-v1")).is_err());

        // tamper with the stored checksum
        let mut value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        value["checksum"] = serde_json::Value::String("00".into());
        std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
        assert!(load_model(&path, None).is_err());
    }
}

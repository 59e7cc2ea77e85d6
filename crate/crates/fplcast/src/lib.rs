//! Fantasy Premier League point forecasting.
//!
//! The crate covers the full pipeline: ingesting FPL and Understat data,
//! joining it into player-match records, building position-specific
//! multi-horizon features, tuning tree-ensemble regressors with a K-best
//! hyperparameter search, producing median ensemble forecasts, and scoring
//! them against realized points by return category.

pub mod error;
pub mod metrics;
pub mod trees;
pub mod types;
pub mod util;
pub mod weighting;

pub use error::{Error, Result};

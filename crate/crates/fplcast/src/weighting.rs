//! Per-sample training/validation weights.
//!
//! Targets are discretized into position-specific quantile bins, each bin is
//! weighted inversely to its frequency, large weights are clipped at a high
//! quantile, and the vector is rescaled to unit mean.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::types::Position;
use crate::util::quantile;

/// Bins per position and the clip quantile applied to raw weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightingConfig {
    pub bins_per_position: BTreeMap<Position, usize>,
    pub clip_quantile: f64,
}

impl Default for WeightingConfig {
    fn default() -> Self {
        let mut bins = BTreeMap::new();
        bins.insert(Position::Gk, 2);
        bins.insert(Position::Def, 3);
        bins.insert(Position::Mid, 4);
        bins.insert(Position::Fwd, 3);
        bins.insert(Position::Am, 5);
        WeightingConfig {
            bins_per_position: bins,
            clip_quantile: 0.95,
        }
    }
}

impl WeightingConfig {
    pub fn bins_for(&self, position: Position) -> usize {
        *self.bins_per_position.get(&position).unwrap_or(&2)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.clip_quantile && self.clip_quantile < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "clip_quantile must be in (0,1), got {}",
                self.clip_quantile
            )));
        }
        for (pos, &bins) in &self.bins_per_position {
            if bins < 2 {
                return Err(Error::InvalidConfig(format!(
                    "bins for {pos} must be >= 2, got {bins}"
                )));
            }
        }
        Ok(())
    }
}

/// Interior cut points of a quantile discretization. A value lands in bin
/// `number of edges <= value`; duplicate edges are collapsed so labels stay
/// contiguous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinEdges(Vec<f64>);

impl BinEdges {
    pub fn cut_points(&self) -> &[f64] {
        &self.0
    }

    pub fn n_bins(&self) -> usize {
        self.0.len() + 1
    }

    pub fn label_of(&self, value: f64) -> u32 {
        self.0.iter().filter(|&&e| e <= value).count() as u32
    }
}

/// Fit quantile bin edges on a target sample.
pub fn fit_bins(targets: &[f64], n_bins: usize) -> Result<BinEdges> {
    if targets.is_empty() {
        return Err(Error::InvalidInput("fit_bins over empty targets".into()));
    }
    if n_bins < 1 {
        return Err(Error::InvalidInput("n_bins must be >= 1".into()));
    }
    let mut sorted = targets.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite target"));
    let mut edges = Vec::with_capacity(n_bins.saturating_sub(1));
    for i in 1..n_bins {
        let q = i as f64 / n_bins as f64;
        let e = crate::util::quantile_sorted(&sorted, q);
        // Collapse duplicate edges and edges equal to the sample minimum:
        // either would create an empty bin.
        if e > sorted[0] && edges.last().map_or(true, |&last: &f64| e > last) {
            edges.push(e);
        }
    }
    Ok(BinEdges(edges))
}

/// Label targets with bins fitted on the same sample.
pub fn discretize_targets(targets: &[f64], n_bins: usize) -> Result<Vec<u32>> {
    let edges = fit_bins(targets, n_bins)?;
    Ok(label_targets(&edges, targets))
}

/// Label targets with previously fitted edges.
pub fn label_targets(edges: &BinEdges, targets: &[f64]) -> Vec<u32> {
    targets.iter().map(|&t| edges.label_of(t)).collect()
}

/// Inverse-frequency weights: weight(bin b) = N / (bins_present * count(b)).
/// The mean of the returned vector is exactly 1 by construction.
pub fn balanced_weights(labels: &[u32]) -> Result<Vec<f64>> {
    if labels.is_empty() {
        return Err(Error::InvalidInput("balanced_weights over empty labels".into()));
    }
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    let n = labels.len() as f64;
    let k = counts.len() as f64;
    Ok(labels
        .iter()
        .map(|l| n / (k * counts[l] as f64))
        .collect())
}

/// Clip weights above the empirical `clip_quantile` (linear interpolation)
/// and rescale to unit mean.
pub fn clip_and_rescale(weights: &[f64], clip_quantile: f64) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(Error::InvalidInput("clip_and_rescale over empty weights".into()));
    }
    if weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::InvalidInput("weights must be strictly positive".into()));
    }
    let cap = quantile(weights, clip_quantile);
    let clipped: Vec<f64> = weights.iter().map(|&w| w.min(cap)).collect();
    let mean = clipped.iter().sum::<f64>() / clipped.len() as f64;
    Ok(clipped.into_iter().map(|w| w / mean).collect())
}

/// Full weighting pipeline for one sample set: discretize, balance, clip,
/// rescale.
pub fn sample_weights(targets: &[f64], n_bins: usize, clip_quantile: f64) -> Result<Vec<f64>> {
    let labels = discretize_targets(targets, n_bins)?;
    let raw = balanced_weights(&labels)?;
    clip_and_rescale(&raw, clip_quantile)
}

/// Weighting pipeline with bin edges fitted elsewhere (training edges applied
/// to validation targets).
pub fn sample_weights_with_edges(
    edges: &BinEdges,
    targets: &[f64],
    clip_quantile: f64,
) -> Result<Vec<f64>> {
    let labels = label_targets(edges, targets);
    let raw = balanced_weights(&labels)?;
    clip_and_rescale(&raw, clip_quantile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_value_split() {
        let labels = discretize_targets(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0], 2).unwrap();
        assert_eq!(labels, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn all_equal_collapses_to_single_label() {
        let labels = discretize_targets(&[0.4; 9], 5).unwrap();
        assert!(labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn uniform_grid_quarters_evenly() {
        // Brute-force oracle: with 100 evenly spaced values and 4 quantile
        // bins, each bin must hold exactly 25 values.
        let targets: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
        let labels = discretize_targets(&targets, 4).unwrap();
        let mut counts = [0usize; 4];
        for l in labels {
            counts[l as usize] += 1;
        }
        assert_eq!(counts, [25, 25, 25, 25]);
    }

    #[test]
    fn balanced_weights_formula() {
        // bins of sizes (3,1), N=4
        let w = balanced_weights(&[0, 0, 0, 1]).unwrap();
        assert_eq!(w, vec![4.0 / 6.0, 4.0 / 6.0, 4.0 / 6.0, 2.0]);
    }

    #[test]
    fn single_bin_gives_unit_weights() {
        assert_eq!(balanced_weights(&[0, 0, 0]).unwrap(), vec![1.0; 3]);
    }

    #[test]
    fn symmetric_bins_give_unit_weights() {
        assert_eq!(balanced_weights(&[0, 0, 1, 1]).unwrap(), vec![1.0; 4]);
    }

    #[test]
    fn constant_weights_pass_through_clip() {
        let w = clip_and_rescale(&[2.0; 8], 0.95).unwrap();
        assert_eq!(w, vec![1.0; 8]);
    }

    #[test]
    fn clip_twenty_vector_hand_computed() {
        // 19 ones and one 100. Sorted, the 0.95 quantile sits at position
        // 0.95*19 = 18.05, i.e. 1 + 0.05*(100-1) = 5.95. After clipping the
        // mean is 24.95/20, so the final values follow directly.
        let mut w = vec![1.0; 19];
        w.push(100.0);
        let out = clip_and_rescale(&w, 0.95).unwrap();
        let mean_after_clip = 24.95 / 20.0;
        for v in &out[..19] {
            assert!((v - 1.0 / mean_after_clip).abs() < 1e-12);
        }
        assert!((out[19] - 5.95 / mean_after_clip).abs() < 1e-12);
        let mean: f64 = out.iter().sum::<f64>() / out.len() as f64;
        assert!((mean - 1.0).abs() < 1e-9);
    }

    #[test]
    fn validation_weights_reuse_training_edges() {
        let train = [0.0, 0.1, 0.2, 0.8, 0.9, 1.0];
        let edges = fit_bins(&train, 2).unwrap();
        let val_labels = label_targets(&edges, &[0.05, 0.95]);
        assert_eq!(val_labels, vec![0, 1]);
    }

    proptest! {
        #[test]
        fn final_weights_have_unit_mean_and_positive_entries(
            targets in proptest::collection::vec(0.0f64..1.0, 4..120),
            n_bins in 2usize..6,
        ) {
            let w = sample_weights(&targets, n_bins, 0.95).unwrap();
            let mean = w.iter().sum::<f64>() / w.len() as f64;
            prop_assert!((mean - 1.0).abs() < 1e-9);
            prop_assert!(w.iter().all(|&x| x > 0.0));
        }

        #[test]
        fn labels_invariant_under_positive_scaling(
            targets in proptest::collection::vec(0.0f64..1.0, 4..80),
            n_bins in 2usize..6,
            // powers of two keep the scaling exact in floating point
            scale in prop_oneof![Just(0.5f64), Just(2.0), Just(4.0), Just(8.0)],
        ) {
            let base = discretize_targets(&targets, n_bins).unwrap();
            let scaled: Vec<f64> = targets.iter().map(|t| t * scale).collect();
            let rescaled = discretize_targets(&scaled, n_bins).unwrap();
            prop_assert_eq!(base, rescaled);
        }
    }
}

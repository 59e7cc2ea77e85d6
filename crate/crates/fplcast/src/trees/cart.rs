//! Weighted regression tree: exact greedy splits on weighted squared error.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::DenseMatrix;
use super::sampling::{canonical_order, sample_features, stream};
use crate::error::{Error, Result};
use crate::util::derive_seed;

/// Fraction of features considered at each split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// ceil(sqrt(d)) features per split.
    Sqrt,
    /// ceil(fraction * d) features per split; 1.0 means all.
    Fraction(f64),
}

impl MaxFeatures {
    pub fn count(&self, d: usize) -> usize {
        let m = match self {
            MaxFeatures::Sqrt => (d as f64).sqrt().ceil() as usize,
            MaxFeatures::Fraction(f) => (f * d as f64).ceil() as usize,
        };
        m.clamp(1, d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartParams {
    pub max_depth: Option<u32>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams {
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: MaxFeatures::Fraction(1.0),
        }
    }
}

/// Flat tree node: internal nodes route `x[feature] <= threshold` left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub nodes: Vec<Node>,
}

impl TreeModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

pub(crate) fn validate_training_input(x: &DenseMatrix, y: &[f64], w: &[f64]) -> Result<()> {
    if x.n_rows() == 0 || x.n_cols() == 0 {
        return Err(Error::InvalidInput("empty training matrix".into()));
    }
    if y.len() != x.n_rows() || w.len() != x.n_rows() {
        return Err(Error::InvalidInput(format!(
            "training shape mismatch: {} rows, {} targets, {} weights",
            x.n_rows(),
            y.len(),
            w.len()
        )));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite {
            context: "training features".into(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "training targets".into(),
        });
    }
    if w.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::InvalidInput("weights must be finite and positive".into()));
    }
    Ok(())
}

/// Best split for one node: maximizes S(parent) - S(left) - S(right) where
/// S(node) = sum w*(y - weighted mean)^2. Candidate thresholds are midpoints
/// between consecutive distinct feature values; ties keep the lowest feature
/// index and threshold.
fn best_split(
    x: &DenseMatrix,
    idx: &[usize],
    y: &[f64],
    w: &[f64],
    features: &[usize],
    min_leaf: usize,
) -> Option<(usize, f64)> {
    let n = idx.len();
    let mut sw = 0.0;
    let mut swy = 0.0;
    let mut swy2 = 0.0;
    for &i in idx {
        sw += w[i];
        swy += w[i] * y[i];
        swy2 += w[i] * y[i] * y[i];
    }
    let s_parent = swy2 - swy * swy / sw;

    let mut best: Option<(f64, usize, f64)> = None;
    let mut triples: Vec<(f64, f64, f64)> = Vec::with_capacity(n);
    for &f in features {
        triples.clear();
        triples.extend(idx.iter().map(|&i| (x.get(i, f), y[i], w[i])));
        triples.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("non-finite feature"));

        let mut lw = 0.0;
        let mut lwy = 0.0;
        let mut lwy2 = 0.0;
        for i in 1..n {
            let (xv, yv, wv) = triples[i - 1];
            lw += wv;
            lwy += wv * yv;
            lwy2 += wv * yv * yv;
            if triples[i].0 <= xv {
                continue;
            }
            if i < min_leaf || n - i < min_leaf {
                continue;
            }
            let rw = sw - lw;
            if lw <= 0.0 || rw <= 0.0 {
                continue;
            }
            let rwy = swy - lwy;
            let rwy2 = swy2 - lwy2;
            let s_l = lwy2 - lwy * lwy / lw;
            let s_r = rwy2 - rwy * rwy / rw;
            let gain = s_parent - s_l - s_r;
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

struct Grower<'a> {
    x: &'a DenseMatrix,
    y: &'a [f64],
    w: &'a [f64],
    params: &'a CartParams,
    nodes: Vec<Node>,
}

impl Grower<'_> {
    fn leaf_value(&self, idx: &[usize]) -> f64 {
        let mut sw = 0.0;
        let mut swy = 0.0;
        for &i in idx {
            sw += self.w[i];
            swy += self.w[i] * self.y[i];
        }
        swy / sw
    }

    fn grow(&mut self, idx: Vec<usize>, depth: u32, rng: &mut ChaCha8Rng) -> usize {
        let n = idx.len();
        let depth_ok = self.params.max_depth.map_or(true, |d| depth < d);
        let splittable = depth_ok
            && n >= self.params.min_samples_split
            && n >= 2 * self.params.min_samples_leaf
            && !constant(self.y, &idx);

        if splittable {
            let d = self.x.n_cols();
            let m = self.params.max_features.count(d);
            let features: Vec<usize> = if m == d {
                (0..d).collect()
            } else {
                sample_features(rng, d, m)
            };
            if let Some((f, thr)) =
                best_split(self.x, &idx, self.y, self.w, &features, self.params.min_samples_leaf)
            {
                let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
                    idx.iter().partition(|&&i| self.x.get(i, f) <= thr);
                let at = self.nodes.len();
                self.nodes.push(Node::Leaf { value: 0.0 });
                let left = self.grow(left_idx, depth + 1, rng);
                let right = self.grow(right_idx, depth + 1, rng);
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

fn constant(y: &[f64], idx: &[usize]) -> bool {
    let first = y[idx[0]];
    idx.iter().all(|&i| y[i] == first)
}

/// Fit one weighted regression tree on rows given in a deterministic order.
/// Used by the forest, which supplies its own (bootstrapped) row sets.
pub(crate) fn fit_cart_on(
    x: &DenseMatrix,
    idx: Vec<usize>,
    y: &[f64],
    w: &[f64],
    params: &CartParams,
    rng: &mut ChaCha8Rng,
) -> TreeModel {
    let mut grower = Grower {
        x,
        y,
        w,
        params,
        nodes: Vec::new(),
    };
    grower.grow(idx, 0, rng);
    TreeModel {
        nodes: grower.nodes,
    }
}

/// Fit one weighted regression tree. Rows are reordered canonically by
/// content before any random draw, making the fit invariant to input order.
pub fn fit_cart(
    x: &DenseMatrix,
    y: &[f64],
    w: &[f64],
    params: &CartParams,
    seed: u64,
) -> Result<TreeModel> {
    validate_training_input(x, y, w)?;
    let order = canonical_order(x, y, w);
    let mut rng = stream(derive_seed(seed, "cart", 0));
    Ok(fit_cart_on(x, order, y, w, params, &mut rng))
}

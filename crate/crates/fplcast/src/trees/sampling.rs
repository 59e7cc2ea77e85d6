//! Deterministic row and feature sampling.
//!
//! All randomness is driven through a canonical row order derived from row
//! content, so fitting is invariant to the order training rows arrive in.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::matrix::DenseMatrix;
use crate::util::{fnv1a64, hash_f64};

/// Row indices sorted by a content hash of (features, target, weight).
/// Identical rows may appear in either relative order; they are
/// interchangeable downstream.
pub fn canonical_order(x: &DenseMatrix, y: &[f64], w: &[f64]) -> Vec<usize> {
    let mut keyed: Vec<(u64, usize)> = (0..x.n_rows())
        .map(|i| {
            let mut h = fnv1a64(b"row");
            for &v in x.row(i) {
                hash_f64(&mut h, v);
            }
            hash_f64(&mut h, y[i]);
            hash_f64(&mut h, w[i]);
            (h, i)
        })
        .collect();
    keyed.sort_unstable_by_key(|&(h, _)| h);
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// Weighted bootstrap of `n_draws` rows with replacement over `order`.
/// Returns (row index, draw count) pairs in canonical order; each drawn copy
/// carries unit weight, so the count is the row's effective weight.
pub fn weighted_bootstrap(
    rng: &mut ChaCha8Rng,
    order: &[usize],
    weights: &[f64],
    n_draws: usize,
) -> Vec<(usize, f64)> {
    let mut cumulative = Vec::with_capacity(order.len());
    let mut total = 0.0;
    for &i in order {
        total += weights[i];
        cumulative.push(total);
    }
    let mut counts = vec![0u32; order.len()];
    for _ in 0..n_draws {
        let u: f64 = rng.gen::<f64>() * total;
        let pos = cumulative.partition_point(|&c| c <= u).min(order.len() - 1);
        counts[pos] += 1;
    }
    order
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| c > 0)
        .map(|(&i, &c)| (i, f64::from(c)))
        .collect()
}

/// Sample `m` of the canonical positions without replacement, returning the
/// chosen row indices in canonical order.
pub fn subsample_rows(rng: &mut ChaCha8Rng, order: &[usize], m: usize) -> Vec<usize> {
    let n = order.len();
    let m = m.clamp(1, n);
    if m == n {
        return order.to_vec();
    }
    // partial Fisher-Yates over canonical positions
    let mut positions: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = rng.gen_range(i..n);
        positions.swap(i, j);
    }
    let mut chosen = positions[..m].to_vec();
    chosen.sort_unstable();
    chosen.into_iter().map(|p| order[p]).collect()
}

/// Sample `m` distinct feature indices out of `d`, ascending.
pub fn sample_features(rng: &mut ChaCha8Rng, d: usize, m: usize) -> Vec<usize> {
    let m = m.clamp(1, d);
    if m == d {
        return (0..d).collect();
    }
    let mut all: Vec<usize> = (0..d).collect();
    for i in 0..m {
        let j = rng.gen_range(i..d);
        all.swap(i, j);
    }
    let mut chosen = all[..m].to_vec();
    chosen.sort_unstable();
    chosen
}

/// Seed a deterministic stream.
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (DenseMatrix, Vec<f64>, Vec<f64>) {
        let x = DenseMatrix::from_rows(&[
            vec![1.0, 2.0],
            vec![3.0, 4.0],
            vec![5.0, 6.0],
            vec![7.0, 8.0],
        ])
        .unwrap();
        (x, vec![1.0, 2.0, 3.0, 4.0], vec![1.0; 4])
    }

    #[test]
    fn canonical_order_ignores_input_permutation() {
        let (x, y, w) = toy();
        let order = canonical_order(&x, &y, &w);

        let perm = [2usize, 0, 3, 1];
        let rows: Vec<Vec<f64>> = perm.iter().map(|&i| x.row(i).to_vec()).collect();
        let xp = DenseMatrix::from_rows(&rows).unwrap();
        let yp: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
        let wp: Vec<f64> = perm.iter().map(|&i| w[i]).collect();
        let order_p = canonical_order(&xp, &yp, &wp);

        let content: Vec<f64> = order.iter().map(|&i| y[i]).collect();
        let content_p: Vec<f64> = order_p.iter().map(|&i| yp[i]).collect();
        assert_eq!(content, content_p);
    }

    #[test]
    fn bootstrap_draw_count_is_exact() {
        let (x, y, w) = toy();
        let order = canonical_order(&x, &y, &w);
        let mut rng = stream(7);
        let draws = weighted_bootstrap(&mut rng, &order, &w, 10);
        let total: f64 = draws.iter().map(|(_, c)| c).sum();
        assert_eq!(total, 10.0);
    }

    #[test]
    fn subsample_is_sorted_and_deterministic() {
        let order = vec![3usize, 1, 4, 0, 2];
        let a = subsample_rows(&mut stream(5), &order, 3);
        let b = subsample_rows(&mut stream(5), &order, 3);
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
    }

    #[test]
    fn feature_sample_is_ascending_distinct() {
        let f = sample_features(&mut stream(11), 20, 5);
        assert_eq!(f.len(), 5);
        assert!(f.windows(2).all(|p| p[0] < p[1]));
    }
}

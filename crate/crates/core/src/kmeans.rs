//! Seeded Lloyd k-means with k-means++ initialization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::score::{sq_dist, EmbeddingMatrix, LabelVector};

pub const KMEANS_RESTARTS: usize = 4;
pub const KMEANS_MAX_ITER: usize = 300;

#[derive(Clone, Debug)]
pub struct KMeansFit {
    pub labels: LabelVector,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squares of the final state.
    pub sse: f64,
    /// SSE after every centroid update, in iteration order.
    pub sse_history: Vec<f64>,
}

/// Cluster labels of the best (lowest SSE) of [`KMEANS_RESTARTS`] runs.
pub fn kmeans(x: &EmbeddingMatrix, k: usize, seed: u64) -> Result<LabelVector> {
    Ok(kmeans_fit(x, k, seed)?.labels)
}

pub fn kmeans_fit(x: &EmbeddingMatrix, k: usize, seed: u64) -> Result<KMeansFit> {
    if k == 0 || x.n_rows() < k {
        return Err(Error::InvalidArgument(format!("k-means needs 1 <= k <= rows (k {k}, rows {})", x.n_rows())));
    }
    let mut best: Option<KMeansFit> = None;
    for restart in 0..KMEANS_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart as u64);
        let fit = lloyd(x, k, &mut rng);
        if best.as_ref().is_none_or(|b| fit.sse < b.sse) {
            best = Some(fit);
        }
    }
    Ok(best.unwrap())
}

fn init_plus_plus(x: &EmbeddingMatrix, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = x.n_rows();
    let mut chosen = vec![rng.gen_range(0..n)];
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(x.row(i), x.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        } else {
            // all remaining points coincide with a centroid
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.gen_range(0..free.len())]
        };
        chosen.push(next);
        for i in 0..n {
            d2[i] = d2[i].min(sq_dist(x.row(i), x.row(next)));
        }
    }
    chosen.into_iter().map(|i| x.row(i).to_vec()).collect()
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, m) in centroids.iter().enumerate() {
        let d = sq_dist(p, m);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd(x: &EmbeddingMatrix, k: usize, rng: &mut ChaCha8Rng) -> KMeansFit {
    let n = x.n_rows();
    let dim = x.n_cols();
    let mut centroids = init_plus_plus(x, k, rng);
    let mut labels = vec![usize::MAX; n];
    let mut history = Vec::new();
    let mut sse = f64::INFINITY;

    for _ in 0..KMEANS_MAX_ITER {
        let mut next: Vec<usize> = (0..n).map(|i| nearest(x.row(i), &centroids).0).collect();

        // refill empty clusters with the point farthest from its centroid
        let mut sizes = vec![0usize; k];
        next.iter().for_each(|&l| sizes[l] += 1);
        for c in 0..k {
            if sizes[c] > 0 {
                continue;
            }
            let donor = (0..n)
                .filter(|&i| sizes[next[i]] > 1)
                .map(|i| (i, sq_dist(x.row(i), &centroids[next[i]])))
                .fold(None, |acc: Option<(usize, f64)>, (i, d)| match acc {
                    Some((_, bd)) if bd >= d => acc,
                    _ => Some((i, d)),
                });
            if let Some((i, _)) = donor {
                sizes[next[i]] -= 1;
                next[i] = c;
                sizes[c] = 1;
                centroids[c] = x.row(i).to_vec();
            }
        }

        let changed = next != labels;
        labels = next;

        let mut sums = vec![vec![0.0; dim]; k];
        for (i, &l) in labels.iter().enumerate() {
            for (s, v) in sums[l].iter_mut().zip(x.row(i)) {
                *s += v;
            }
        }
        for c in 0..k {
            if sizes[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / sizes[c] as f64).collect();
            }
        }
        sse = (0..n).map(|i| sq_dist(x.row(i), &centroids[labels[i]])).sum();
        history.push(sse);
        if !changed {
            break;
        }
    }
    KMeansFit { labels: LabelVector(labels), centroids, sse, sse_history: history }
}

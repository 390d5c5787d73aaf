//! Embedding containers and the cluster scores that rank hole choices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kmeans::kmeans;

/// Regularizer of the supervised score denominator.
pub const SUPERVISED_EPS: f64 = 1e-12;
/// Regularizer of the unsupervised score denominator.
pub const UNSUPERVISED_EPS: f64 = 1e-9;

/// Row-major `n_rows x n_cols` matrix of harmonic coordinates, one row per
/// trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn new(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch { expected: n_rows * n_cols, got: data.len() });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("embedding has non-finite entries".into()));
        }
        Ok(EmbeddingMatrix { n_rows, n_cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.len());
        if let Some(r) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch { expected: n_cols, got: r.len() });
        }
        Self::new(rows.len(), n_cols, rows.concat())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.n_rows).map(move |i| self.row(i))
    }

    /// Rows `idx` in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> EmbeddingMatrix {
        let data = idx.iter().flat_map(|&i| self.row(i).iter().copied()).collect();
        EmbeddingMatrix { n_rows: idx.len(), n_cols: self.n_cols, data }
    }

    pub fn scaled(&self, c: f64) -> EmbeddingMatrix {
        EmbeddingMatrix { data: self.data.iter().map(|x| x * c).collect(), ..self.clone() }
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Integer class id per trajectory.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelVector(pub Vec<usize>);

impl LabelVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Number of classes assuming dense ids (`max + 1`).
    pub fn n_classes(&self) -> usize {
        self.0.iter().max().map_or(0, |m| m + 1)
    }

    /// Count of distinct ids actually present.
    pub fn n_present(&self) -> usize {
        let mut v = self.0.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }

    /// Relabels to dense ids in order of first appearance.
    pub fn densified(&self) -> LabelVector {
        let mut map = std::collections::HashMap::new();
        LabelVector(
            self.0
                .iter()
                .map(|&l| {
                    let next = map.len();
                    *map.entry(l).or_insert(next)
                })
                .collect(),
        )
    }
}

/// Minimum inter-class over (maximum intra-class + eps) distance.
pub fn cluster_score_supervised(x: &EmbeddingMatrix, y: &LabelVector) -> Result<f64> {
    if x.n_rows() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.n_rows(), got: y.len() });
    }
    if y.n_present() < 2 {
        return Err(Error::InvalidArgument("supervised score needs at least two classes".into()));
    }
    let mut min_inter = f64::INFINITY;
    let mut max_intra: f64 = 0.0;
    for i in 0..x.n_rows() {
        for j in i + 1..x.n_rows() {
            let d = sq_dist(x.row(i), x.row(j));
            if y.0[i] == y.0[j] {
                max_intra = max_intra.max(d);
            } else {
                min_inter = min_inter.min(d);
            }
        }
    }
    Ok(min_inter.sqrt() / (max_intra.sqrt() + SUPERVISED_EPS))
}

/// Size-balanced score of a given clustering: minimum inter-cluster distance
/// times the smallest cluster size, over the population standard deviation of
/// the cluster sizes (+ eps). Sizes are taken over clusters `0..n_classes`.
pub fn unsupervised_score_from_labels(x: &EmbeddingMatrix, labels: &LabelVector, n_classes: usize) -> Result<f64> {
    if x.n_rows() != labels.len() {
        return Err(Error::DimensionMismatch { expected: x.n_rows(), got: labels.len() });
    }
    let mut sizes = vec![0usize; n_classes];
    for &l in labels.as_slice() {
        if l >= n_classes {
            return Err(Error::InvalidArgument(format!("label {l} outside 0..{n_classes}")));
        }
        sizes[l] += 1;
    }
    let mut min_inter = f64::INFINITY;
    for i in 0..x.n_rows() {
        for j in i + 1..x.n_rows() {
            if labels.0[i] != labels.0[j] {
                min_inter = min_inter.min(sq_dist(x.row(i), x.row(j)));
            }
        }
    }
    if !min_inter.is_finite() {
        return Ok(0.0);
    }
    let n = n_classes as f64;
    let mean = sizes.iter().sum::<usize>() as f64 / n;
    let var = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / n;
    let min_size = *sizes.iter().min().unwrap() as f64;
    Ok(min_inter.sqrt() * min_size / (var.sqrt() + UNSUPERVISED_EPS))
}

/// Runs seeded k-means and scores the resulting clustering. Empty clusters
/// trigger up to five reseeded retries before the score falls back to zero.
pub fn cluster_score_unsupervised(x: &EmbeddingMatrix, n_classes: usize, seed: u64) -> Result<(f64, LabelVector)> {
    if n_classes < 2 || x.n_rows() < n_classes {
        return Err(Error::InvalidArgument(format!(
            "unsupervised score needs rows >= n_classes >= 2 (rows {}, n_classes {n_classes})",
            x.n_rows()
        )));
    }
    let mut labels = kmeans(x, n_classes, seed)?;
    for attempt in 0..=5u64 {
        if attempt > 0 {
            labels = kmeans(x, n_classes, seed.wrapping_add(attempt))?;
        }
        if labels.n_present() == n_classes {
            let s = unsupervised_score_from_labels(x, &labels, n_classes)?;
            return Ok((s, labels));
        }
    }
    Ok((0.0, labels))
}

//! Downstream classifiers over harmonic embeddings: k-nearest neighbours and
//! a bootstrap random forest of Gini-split decision trees.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::score::{sq_dist, EmbeddingMatrix, LabelVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Knn,
    RandomForest,
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "knn" => Ok(ClassifierKind::Knn),
            "random_forest" | "random-forest" | "rf" => Ok(ClassifierKind::RandomForest),
            other => Err(Error::InvalidArgument(format!("unknown classifier `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierParams {
    /// Defaults to `min(3, n_train)`.
    pub k_neighbors: Option<usize>,
    pub n_trees: usize,
    pub max_depth: usize,
    /// Features tried per split; defaults to `ceil(sqrt(n_features))`.
    pub max_features: Option<usize>,
}

impl Default for ClassifierParams {
    fn default() -> Self {
        ClassifierParams { k_neighbors: None, n_trees: 100, max_depth: 8, max_features: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnnModel {
    pub k: usize,
    pub x: EmbeddingMatrix,
    pub y: LabelVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf { class: usize },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// Arena-allocated binary tree; node 0 is the root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    /// Stream id of the tree's generator under the forest seed.
    pub stream: u64,
}

impl DecisionTree {
    pub fn predict_one(&self, x: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { class } => return class,
                Node::Split { feature, threshold, left, right } => {
                    at = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomForest {
    pub seed: u64,
    pub n_features: usize,
    pub n_classes: usize,
    pub max_depth: usize,
    pub trees: Vec<DecisionTree>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClassifierModel {
    Knn(KnnModel),
    RandomForest(RandomForest),
}

impl ClassifierModel {
    pub fn n_features(&self) -> usize {
        match self {
            ClassifierModel::Knn(m) => m.x.n_cols(),
            ClassifierModel::RandomForest(f) => f.n_features,
        }
    }
}

pub fn train_classifier(
    kind: ClassifierKind,
    x: &EmbeddingMatrix,
    y: &LabelVector,
    params: &ClassifierParams,
    seed: u64,
) -> Result<ClassifierModel> {
    if x.n_rows() == 0 {
        return Err(Error::InvalidArgument("empty training set".into()));
    }
    if x.n_rows() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.n_rows(), got: y.len() });
    }
    match kind {
        ClassifierKind::Knn => {
            let k = params.k_neighbors.unwrap_or(3).min(x.n_rows()).max(1);
            Ok(ClassifierModel::Knn(KnnModel { k, x: x.clone(), y: y.clone() }))
        }
        ClassifierKind::RandomForest => Ok(ClassifierModel::RandomForest(train_forest(x, y, params, seed))),
    }
}

pub fn predict(model: &ClassifierModel, x: &EmbeddingMatrix) -> Result<LabelVector> {
    if x.n_rows() > 0 && x.n_cols() != model.n_features() {
        return Err(Error::DimensionMismatch { expected: model.n_features(), got: x.n_cols() });
    }
    let labels = match model {
        ClassifierModel::Knn(m) => x.rows().map(|p| knn_vote(m, p)).collect(),
        ClassifierModel::RandomForest(f) => x
            .rows()
            .map(|p| {
                let mut votes = vec![0usize; f.n_classes];
                for t in &f.trees {
                    votes[t.predict_one(p)] += 1;
                }
                argmax_lowest(&votes)
            })
            .collect(),
    };
    Ok(LabelVector(labels))
}

/// Index of the largest count; ties go to the smallest index.
fn argmax_lowest(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

fn knn_vote(m: &KnnModel, p: &[f64]) -> usize {
    let mut order: Vec<(f64, usize)> = m.x.rows().enumerate().map(|(i, q)| (sq_dist(p, q), i)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut votes = vec![0usize; m.y.n_classes()];
    for &(_, i) in order.iter().take(m.k) {
        votes[m.y.0[i]] += 1;
    }
    argmax_lowest(&votes)
}

fn train_forest(x: &EmbeddingMatrix, y: &LabelVector, params: &ClassifierParams, seed: u64) -> RandomForest {
    let n_features = x.n_cols();
    let n_classes = y.n_classes();
    let max_features = params
        .max_features
        .unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize)
        .clamp(1, n_features.max(1));
    let trees = (0..params.n_trees as u64)
        .into_par_iter()
        .map(|stream| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let n = x.n_rows();
            let sample: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let mut builder = TreeBuilder {
                x,
                y: y.as_slice(),
                n_classes,
                max_depth: params.max_depth,
                max_features,
                rng,
                nodes: Vec::new(),
            };
            builder.grow(sample, 0);
            DecisionTree { nodes: builder.nodes, stream }
        })
        .collect();
    RandomForest { seed, n_features, n_classes, max_depth: params.max_depth, trees }
}

struct TreeBuilder<'a> {
    x: &'a EmbeddingMatrix,
    y: &'a [usize],
    n_classes: usize,
    max_depth: usize,
    max_features: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

impl TreeBuilder<'_> {
    fn counts(&self, idx: &[usize]) -> Vec<usize> {
        let mut c = vec![0usize; self.n_classes];
        for &i in idx {
            c[self.y[i]] += 1;
        }
        c
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let counts = self.counts(&idx);
        let majority = argmax_lowest(&counts);
        self.nodes.push(Node::Leaf { class: majority });
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.max_depth || idx.len() < 2 {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(&idx, &counts) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x.row(i)[feature] <= threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split { feature, threshold, left, right };
        id
    }

    /// Best Gini split over a random feature subset; thresholds are midpoints
    /// between consecutive distinct values.
    fn best_split(&mut self, idx: &[usize], parent: &[usize]) -> Option<(usize, f64)> {
        let mut features: Vec<usize> = (0..self.x.n_cols()).collect();
        features.shuffle(&mut self.rng);
        features.truncate(self.max_features);
        features.sort_unstable();

        let n = idx.len();
        let parent_impurity = gini(parent, n);
        let mut best: Option<(f64, usize, f64)> = None;
        for &f in &features {
            let mut vals: Vec<(f64, usize)> = idx.iter().map(|&i| (self.x.row(i)[f], self.y[i])).collect();
            vals.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = vec![0usize; self.n_classes];
            for k in 0..n - 1 {
                left[vals[k].1] += 1;
                if vals[k].0 == vals[k + 1].0 {
                    continue;
                }
                let nl = k + 1;
                let right: Vec<usize> = parent.iter().zip(&left).map(|(p, l)| p - l).collect();
                let w = (nl as f64 * gini(&left, nl) + (n - nl) as f64 * gini(&right, n - nl)) / n as f64;
                if w < parent_impurity - 1e-12 && best.is_none_or(|b| w < b.0) {
                    best = Some((w, f, 0.5 * (vals[k].0 + vals[k + 1].0)));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

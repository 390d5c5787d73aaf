//! Synthetic benchmark: a random Delaunay complex over the unit square and
//! trajectory classes built from weight-inflated shortest paths.

pub mod delaunay;
pub mod paths;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex2;
use crate::error::{Error, Result};
use crate::flow::Trajectory;
use crate::score::LabelVector;

pub use delaunay::{complex_from_points, delaunay_complex, delaunay_triangles, uniform_points};
pub use paths::{endpoint_paths, shortest_path, trajectory_class};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_points: usize,
    pub n_classes: usize,
    pub n_train_per_class: usize,
    pub n_test_per_class: usize,
    pub alpha: f64,
    pub margin: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn new(n_points: usize, n_classes: usize, n_train_per_class: usize, n_test_per_class: usize, seed: u64) -> Self {
        SynthConfig { n_points, n_classes, n_train_per_class, n_test_per_class, alpha: 1.05, margin: 0.1, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 10 {
            return Err(Error::InvalidArgument(format!("n_points must be >= 10, got {}", self.n_points)));
        }
        if self.n_classes == 0 || self.n_train_per_class == 0 || self.n_test_per_class == 0 {
            return Err(Error::InvalidArgument("class and split counts must be >= 1".into()));
        }
        if !(self.alpha > 1.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha must be > 1, got {}", self.alpha)));
        }
        if !(self.margin > 0.0 && self.margin < 0.5) {
            return Err(Error::InvalidArgument(format!("margin must lie in (0, 0.5), got {}", self.margin)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

/// Labelled trajectories with a train/test tag each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledTrajectorySet {
    pub trajectories: Vec<Trajectory>,
    pub split: Vec<Split>,
}

impl LabeledTrajectorySet {
    fn part(&self, which: Split) -> Vec<Trajectory> {
        self.trajectories.iter().zip(&self.split).filter(|(_, &s)| s == which).map(|(t, _)| t.clone()).collect()
    }

    pub fn train(&self) -> Vec<Trajectory> {
        self.part(Split::Train)
    }

    pub fn test(&self) -> Vec<Trajectory> {
        self.part(Split::Test)
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }
}

/// Labels of labelled trajectories; errors if any label is missing.
pub fn labels_of(ts: &[Trajectory]) -> Result<LabelVector> {
    ts.iter()
        .enumerate()
        .map(|(i, t)| t.label.ok_or_else(|| Error::Format(format!("trajectory {i} has no label"))))
        .collect::<Result<Vec<_>>>()
        .map(LabelVector)
}

pub fn make_dataset(cfg: &SynthConfig) -> Result<(SimplicialComplex2, LabeledTrajectorySet)> {
    cfg.validate()?;
    let sc = delaunay_complex(cfg.n_points, cfg.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let per_class = cfg.n_train_per_class + cfg.n_test_per_class;
    let mut trajectories = Vec::with_capacity(cfg.n_classes * per_class);
    let mut split = Vec::with_capacity(trajectories.capacity());
    for class in 0..cfg.n_classes {
        let class_seed: u64 = rng.gen();
        let paths = trajectory_class(&sc, class_seed, per_class, cfg.alpha, cfg.margin)?;
        let mut order: Vec<usize> = (0..per_class).collect();
        order.shuffle(&mut rng);
        let mut tags = vec![Split::Test; per_class];
        for &i in &order[..cfg.n_train_per_class] {
            tags[i] = Split::Train;
        }
        for (t, tag) in paths.into_iter().zip(tags) {
            trajectories.push(Trajectory { label: Some(class), ..t });
            split.push(tag);
        }
    }
    Ok((sc, LabeledTrajectorySet { trajectories, split }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::flow_embed;

    #[test]
    fn split_sizes() {
        let cfg = SynthConfig::new(120, 3, 5, 50, 1);
        let (sc, data) = make_dataset(&cfg).unwrap();
        assert_eq!(data.train().len(), 15);
        assert_eq!(data.test().len(), 150);
        for class in 0..3 {
            assert_eq!(data.train().iter().filter(|t| t.label == Some(class)).count(), 5);
        }
        assert!(data.trajectories.iter().all(|t| flow_embed(t, &sc).is_ok()));
    }

    #[test]
    fn same_seed_same_dataset() {
        let cfg = SynthConfig::new(60, 2, 2, 3, 8);
        assert_eq!(make_dataset(&cfg).unwrap(), make_dataset(&cfg).unwrap());
    }

    #[test]
    fn config_checks() {
        assert!(SynthConfig::new(5, 2, 1, 1, 0).validate().is_err());
        let mut cfg = SynthConfig::new(50, 2, 1, 1, 0);
        cfg.alpha = 1.0;
        assert!(cfg.validate().is_err());
    }
}

//! Landmark search over k-tuples of triangles: greedy sampled initialization
//! followed by first-improvement hill climbing in n-hop neighbourhoods.
//!
//! Every evaluated tuple score and every harmonic vector is memoized, so
//! revisiting a tuple during the climb costs a table lookup.

use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::RwLock;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex2;
use crate::error::{Error, Result};
use crate::flow::FlowMatrix;
use crate::harmonic::{embed, HarmonicBasis, HarmonicCache, HarmonicSettings};
use crate::score::{cluster_score_supervised, cluster_score_unsupervised, LabelVector};

/// Neighbour evaluations dispatched together before the sequential
/// acceptance scan. Fixed so evaluation counts do not depend on thread count.
const SPECULATION_WIDTH: usize = 16;
const INIT_ROUNDS: usize = 3;

/// Ordered holes `(sigma_1, ..., sigma_k)`, distinct triangle ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CandidateTuple(pub Vec<usize>);

impl CandidateTuple {
    pub fn holes(&self) -> &[usize] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScoreMode {
    Supervised,
    Unsupervised { n_classes: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n_holes: usize,
    pub n_init: usize,
    pub n_hop: usize,
    pub mode: ScoreMode,
    pub seed: u64,
    /// Accepted-move budget; `None` means `10 * k * average triangle degree`.
    pub max_steps: Option<usize>,
    pub harmonic: HarmonicSettings,
}

impl SearchConfig {
    pub fn new(n_holes: usize, mode: ScoreMode, seed: u64) -> Self {
        SearchConfig { n_holes, n_init: 10, n_hop: 2, mode, seed, max_steps: None, harmonic: HarmonicSettings::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_holes == 0 || self.n_init == 0 || self.n_hop == 0 {
            return Err(Error::InvalidArgument("n_holes, n_init and n_hop must be at least 1".into()));
        }
        if let ScoreMode::Unsupervised { n_classes } = self.mode {
            if n_classes < 2 {
                return Err(Error::InvalidArgument("unsupervised mode needs n_classes >= 2".into()));
            }
        }
        Ok(())
    }

    pub fn default_max_steps(&self, adjacency: &[Vec<usize>]) -> usize {
        let avg = if adjacency.is_empty() {
            0.0
        } else {
            adjacency.iter().map(Vec::len).sum::<usize>() as f64 / adjacency.len() as f64
        };
        ((10 * self.n_holes) as f64 * avg).ceil().max(1.0) as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub step: usize,
    pub holes: Vec<usize>,
    pub score: f64,
    /// Score-cache hits accumulated when this state was accepted.
    pub cache_hits: usize,
}

/// Goal-function history of a search: the initial state (step 0) and every
/// accepted move.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub entries: Vec<TraceEntry>,
    pub evaluations: usize,
    pub cache_hits: usize,
    pub harmonic_cache_hits: usize,
    pub hit_max_steps: bool,
}

/// Scores candidate tuples against fixed flows, memoizing harmonic vectors
/// and tuple scores.
pub struct Evaluator<'a> {
    sc: &'a SimplicialComplex2,
    flows: &'a FlowMatrix,
    labels: Option<&'a LabelVector>,
    mode: ScoreMode,
    seed: u64,
    settings: HarmonicSettings,
    harmonics: HarmonicCache,
    scores: RwLock<HashMap<Vec<usize>, f64>>,
    evaluations: AtomicUsize,
    hits: AtomicUsize,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        sc: &'a SimplicialComplex2,
        flows: &'a FlowMatrix,
        labels: Option<&'a LabelVector>,
        cfg: &SearchConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if flows.n_flows() == 0 {
            return Err(Error::InvalidArgument("no training flows".into()));
        }
        if flows.n_edges() != sc.n_edges() {
            return Err(Error::DimensionMismatch { expected: sc.n_edges(), got: flows.n_edges() });
        }
        match (cfg.mode, labels) {
            (ScoreMode::Supervised, None) => {
                return Err(Error::InvalidArgument("supervised mode requires labels".into()));
            }
            (ScoreMode::Supervised, Some(y)) if y.len() != flows.n_flows() => {
                return Err(Error::DimensionMismatch { expected: flows.n_flows(), got: y.len() });
            }
            (ScoreMode::Unsupervised { n_classes }, _) if flows.n_flows() < n_classes => {
                return Err(Error::InvalidArgument(format!(
                    "{} flows cannot form {n_classes} clusters",
                    flows.n_flows()
                )));
            }
            _ => {}
        }
        Ok(Evaluator {
            sc,
            flows,
            labels,
            mode: cfg.mode,
            seed: cfg.seed,
            settings: cfg.harmonic,
            harmonics: HarmonicCache::new(),
            scores: RwLock::new(HashMap::new()),
            evaluations: AtomicUsize::new(0),
            hits: AtomicUsize::new(0),
        })
    }

    pub fn complex(&self) -> &SimplicialComplex2 {
        self.sc
    }

    pub fn harmonic_cache(&self) -> &HarmonicCache {
        &self.harmonics
    }

    /// Number of tuple scores actually computed.
    pub fn evaluations(&self) -> usize {
        self.evaluations.load(Ordering::Relaxed)
    }

    pub fn cache_hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    /// Previously computed score of `holes`, if any. Does not count as a hit.
    pub fn cached_score(&self, holes: &[usize]) -> Option<f64> {
        let mut key = holes.to_vec();
        key.sort_unstable();
        self.scores.read().unwrap().get(&key).copied()
    }

    /// Cluster score of the tuple, or `-inf` when a hole is degenerate.
    pub fn evaluate(&self, holes: &[usize]) -> Result<f64> {
        let mut key = holes.to_vec();
        key.sort_unstable();
        if key.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument(format!("tuple {holes:?} repeats a triangle")));
        }
        if let Some(&s) = self.scores.read().unwrap().get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(s);
        }
        // the score is invariant under column order; sorting makes it
        // bit-identical too
        let s = self.compute(&key)?;
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        self.scores.write().unwrap().entry(key).or_insert(s);
        Ok(s)
    }

    fn compute(&self, holes: &[usize]) -> Result<f64> {
        let basis = match HarmonicBasis::build(self.sc, holes, &self.settings, &self.harmonics) {
            Ok(b) => b,
            Err(Error::DegenerateHole(_)) => return Ok(f64::NEG_INFINITY),
            Err(e) => return Err(e),
        };
        let x = embed(&basis, self.flows)?;
        match self.mode {
            ScoreMode::Supervised => cluster_score_supervised(&x, self.labels.expect("checked in new")),
            ScoreMode::Unsupervised { n_classes } => Ok(cluster_score_unsupervised(&x, n_classes, self.seed)?.0),
        }
    }

    pub fn basis(&self, holes: &[usize]) -> Result<HarmonicBasis> {
        HarmonicBasis::build(self.sc, holes, &self.settings, &self.harmonics)
    }
}

/// Score of one tuple under the evaluator's flows, labels and mode.
pub fn evaluate_tuple(eval: &Evaluator<'_>, tuple: &CandidateTuple) -> Result<f64> {
    eval.evaluate(&tuple.0)
}

/// Triangles sharing an edge with each triangle.
pub fn triangle_adjacency(sc: &SimplicialComplex2) -> Vec<Vec<usize>> {
    sc.triangle_adjacency()
}

/// Triangles within `n_hop` adjacency steps of `t`, excluding `t`, ascending.
pub fn n_hop_ball(adj: &[Vec<usize>], t: usize, n_hop: usize) -> Vec<usize> {
    let mut depth: HashMap<usize, usize> = HashMap::from([(t, 0)]);
    let mut queue = VecDeque::from([t]);
    while let Some(u) = queue.pop_front() {
        let d = depth[&u];
        if d == n_hop {
            continue;
        }
        for &v in &adj[u] {
            if let std::collections::hash_map::Entry::Vacant(e) = depth.entry(v) {
                e.insert(d + 1);
                queue.push_back(v);
            }
        }
    }
    let mut out: Vec<usize> = depth.into_keys().filter(|&v| v != t).collect();
    out.sort_unstable();
    out
}

/// All tuples differing from `tuple` in exactly one coordinate, replaced by a
/// triangle within `n_hop` steps and not already in the tuple. Ordered by
/// coordinate index, then triangle id.
pub fn neighbors(tuple: &CandidateTuple, n_hop: usize, adj: &[Vec<usize>]) -> Vec<CandidateTuple> {
    let mut out = Vec::new();
    for (i, &hole) in tuple.0.iter().enumerate() {
        for t in n_hop_ball(adj, hole, n_hop) {
            if tuple.0.contains(&t) {
                continue;
            }
            let mut next = tuple.0.clone();
            next[i] = t;
            out.push(CandidateTuple(next));
        }
    }
    out
}

/// Builds the starting tuple one hole at a time: for hole `i`, sample `n_init`
/// triangles and keep the one maximizing the score together with the holes
/// already fixed.
pub fn initialize(eval: &Evaluator<'_>, cfg: &SearchConfig) -> Result<(CandidateTuple, f64)> {
    cfg.validate()?;
    let n_tri = eval.sc.n_triangles();
    if n_tri < cfg.n_holes {
        return Err(Error::InvalidArgument(format!("{} holes requested but only {n_tri} triangles", cfg.n_holes)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut chosen: Vec<usize> = Vec::with_capacity(cfg.n_holes);
    let mut score = f64::NEG_INFINITY;
    for i in 0..cfg.n_holes {
        let mut tried = vec![false; n_tri];
        for &c in &chosen {
            tried[c] = true;
        }
        let mut picked: Option<(usize, f64)> = None;
        for _ in 0..INIT_ROUNDS {
            let pool: Vec<usize> = (0..n_tri).filter(|&t| !tried[t]).collect();
            if pool.is_empty() {
                break;
            }
            let sample: Vec<usize> = pool.choose_multiple(&mut rng, cfg.n_init).copied().collect();
            for &t in &sample {
                tried[t] = true;
            }
            let scores: Vec<Result<f64>> = sample
                .par_iter()
                .map(|&t| {
                    let mut tuple = chosen.clone();
                    tuple.push(t);
                    eval.evaluate(&tuple)
                })
                .collect();
            for (&t, s) in sample.iter().zip(scores) {
                let s = s?;
                if s == f64::NEG_INFINITY {
                    continue;
                }
                if picked.is_none_or(|(_, best)| s > best) {
                    picked = Some((t, s));
                }
            }
            if picked.is_some() {
                break;
            }
        }
        let (t, s) = picked.ok_or(Error::InitializationFailed { hole: i })?;
        chosen.push(t);
        score = s;
    }
    Ok((CandidateTuple(chosen), score))
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub tuple: CandidateTuple,
    pub score: f64,
    pub basis: HarmonicBasis,
    pub trace: SearchTrace,
}

/// First-improvement hill climbing from `init`: scan neighbours in order, move
/// to the first strictly better one and rescan; stop at an n-hop local
/// optimum or after `max_steps` accepted moves.
pub fn local_search(eval: &Evaluator<'_>, init: CandidateTuple, cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    for &t in &init.0 {
        eval.sc.check_triangle(t)?;
    }
    let adj = eval.sc.triangle_adjacency();
    let max_steps = cfg.max_steps.unwrap_or_else(|| cfg.default_max_steps(&adj));
    let mut current = init;
    let mut score = eval.evaluate(&current.0)?;
    if score == f64::NEG_INFINITY {
        return Err(Error::DegenerateHole(current.0[0]).in_stage("local_search"));
    }
    let mut trace = SearchTrace::default();
    trace.entries.push(TraceEntry { step: 0, holes: current.0.clone(), score, cache_hits: eval.cache_hits() });

    let mut steps = 0;
    'climb: loop {
        if steps >= max_steps {
            trace.hit_max_steps = true;
            break;
        }
        let candidates = neighbors(&current, cfg.n_hop, &adj);
        for chunk in candidates.chunks(SPECULATION_WIDTH) {
            let scores: Vec<Result<f64>> = chunk.par_iter().map(|t| eval.evaluate(&t.0)).collect();
            for (cand, s) in chunk.iter().zip(scores) {
                let s = s?;
                if s > score {
                    current = cand.clone();
                    score = s;
                    steps += 1;
                    trace.entries.push(TraceEntry {
                        step: steps,
                        holes: current.0.clone(),
                        score,
                        cache_hits: eval.cache_hits(),
                    });
                    continue 'climb;
                }
            }
        }
        break;
    }
    trace.evaluations = eval.evaluations();
    trace.cache_hits = eval.cache_hits();
    trace.harmonic_cache_hits = eval.harmonic_cache().hits();
    let basis = eval.basis(&current.0)?;
    Ok(SearchOutcome { tuple: current, score, basis, trace })
}

/// Initialization followed by local search.
pub fn search(eval: &Evaluator<'_>, cfg: &SearchConfig) -> Result<SearchOutcome> {
    let (init, _) = initialize(eval, cfg)?;
    local_search(eval, init, cfg)
}

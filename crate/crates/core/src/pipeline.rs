//! End-to-end run: embed, diffuse, search landmarks, classify.

use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::classify::{predict, train_classifier, ClassifierKind, ClassifierParams};
use crate::complex::SimplicialComplex2;
use crate::datagen::{labels_of, make_dataset, SynthConfig};
use crate::error::{Error, Result, StageExt};
use crate::flow::{default_tau, diffuse_with_tol, flow_matrix, DiffusionSettings, FlowMatrix, Trajectory};
use crate::harmonic::{embed, HarmonicBasis, HarmonicCache};
use crate::io::{
    config_hash, format_trace, landmark_records, read_complex, read_trajectories, write_atomic, write_json, Report,
};
use crate::kmeans::kmeans;
use crate::metrics::{accuracy, adjusted_rand_index, matched_accuracy};
use crate::score::{cluster_score_unsupervised, EmbeddingMatrix, LabelVector};
use crate::search::{search, Evaluator, ScoreMode, SearchConfig, SearchOutcome};

/// Everything a run needs besides its input data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub search: SearchConfig,
    pub classifier: ClassifierKind,
    #[serde(default)]
    pub classifier_params: ClassifierParams,
    #[serde(default)]
    pub diffusion: DiffusionSettings,
    /// Seeds the classifier and the evaluation clustering.
    pub eval_seed: u64,
}

impl PipelineConfig {
    pub fn supervised(n_holes: usize, seed: u64) -> Self {
        PipelineConfig {
            search: SearchConfig::new(n_holes, ScoreMode::Supervised, seed),
            classifier: ClassifierKind::RandomForest,
            classifier_params: ClassifierParams::default(),
            diffusion: DiffusionSettings::default(),
            eval_seed: seed,
        }
    }

    pub fn unsupervised(n_holes: usize, n_classes: usize, seed: u64) -> Self {
        PipelineConfig { search: SearchConfig::new(n_holes, ScoreMode::Unsupervised { n_classes }, seed), ..Self::supervised(n_holes, seed) }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub search: SearchOutcome,
    pub tau: f64,
    pub train_embedding: EmbeddingMatrix,
    pub test_embedding: EmbeddingMatrix,
    /// k-means labels of the training flows from the fit over all flows
    /// (unsupervised mode only).
    pub train_clusters: Option<LabelVector>,
    pub predicted: LabelVector,
    pub ari: Option<f64>,
    pub accuracy: Option<f64>,
}

fn all_labelled(ts: &[Trajectory]) -> bool {
    !ts.is_empty() && ts.iter().all(|t| t.label.is_some())
}

/// Flow matrices of both splits after diffusion, plus the diffusion time used.
pub fn diffused_flows(
    sc: &SimplicialComplex2,
    train: &[Trajectory],
    test: &[Trajectory],
    settings: &DiffusionSettings,
) -> Result<(FlowMatrix, FlowMatrix, f64)> {
    if settings.tau_scale < 0.0 {
        return Err(Error::NegativeTau(settings.tau_scale));
    }
    let f_train = flow_matrix(train, sc).stage("embed")?;
    let f_test = flow_matrix(test, sc).stage("embed")?;
    let tau = if settings.tau_scale > 0.0 { default_tau(sc, settings.tau_scale) } else { 0.0 };
    let f_train = diffuse_with_tol(&f_train, sc, tau, settings.rel_tol).stage("diffuse")?;
    let f_test = diffuse_with_tol(&f_test, sc, tau, settings.rel_tol).stage("diffuse")?;
    Ok((f_train, f_test, tau))
}

/// Flow matrices ready for the search and the classifier.
struct Prepared {
    f_train: FlowMatrix,
    f_test: FlowMatrix,
    /// Flows the search scores: the training flows, plus the test flows in
    /// unsupervised mode.
    f_fit: FlowMatrix,
    y_train: Option<LabelVector>,
    tau: f64,
}

fn prepare(sc: &SimplicialComplex2, train: &[Trajectory], test: &[Trajectory], cfg: &PipelineConfig) -> Result<Prepared> {
    let (f_train, f_test, tau) = diffused_flows(sc, train, test, &cfg.diffusion)?;
    let (f_fit, y_train) = match cfg.search.mode {
        ScoreMode::Supervised => (f_train.clone(), Some(labels_of(train).stage("load")?)),
        // without labels nothing needs holding out
        ScoreMode::Unsupervised { .. } => {
            (FlowMatrix::new(sc.n_edges(), [f_train.columns(), f_test.columns()].concat())?, None)
        }
    };
    Ok(Prepared { f_train, f_test, f_fit, y_train, tau })
}

/// Embeddings and labels produced from a fixed set of landmarks.
#[derive(Clone, Debug)]
pub struct Classification {
    pub train_embedding: EmbeddingMatrix,
    pub test_embedding: EmbeddingMatrix,
    /// k-means labels of the training flows from the fit over all flows
    /// (unsupervised mode only).
    pub train_clusters: Option<LabelVector>,
    pub predicted: LabelVector,
    pub ari: Option<f64>,
    pub accuracy: Option<f64>,
}

fn classify_prepared(
    basis: &HarmonicBasis,
    p: &Prepared,
    test: &[Trajectory],
    cfg: &PipelineConfig,
) -> Result<Classification> {
    let x_train = embed(basis, &p.f_train)?;
    let x_test = embed(basis, &p.f_test)?;
    let (train_clusters, predicted) = match (cfg.search.mode, &p.y_train) {
        (ScoreMode::Unsupervised { n_classes }, _) => {
            let x_fit = embed(basis, &p.f_fit)?;
            let (_, fit_labels) = cluster_score_unsupervised(&x_fit, n_classes, cfg.search.seed).stage("classify")?;
            let train_labels = LabelVector(fit_labels.0[..x_train.n_rows()].to_vec());
            let pred = if x_test.n_rows() >= n_classes {
                kmeans(&x_test, n_classes, cfg.eval_seed).stage("classify")?
            } else {
                LabelVector(vec![0; x_test.n_rows()])
            };
            (Some(train_labels), pred)
        }
        (ScoreMode::Supervised, Some(y)) => {
            let model = train_classifier(cfg.classifier, &x_train, y, &cfg.classifier_params, cfg.eval_seed)
                .stage("classify")?;
            (None, predict(&model, &x_test).stage("classify")?)
        }
        (ScoreMode::Supervised, None) => unreachable!("supervised runs always carry labels"),
    };

    let (ari, acc) = if all_labelled(test) && test.len() >= 2 {
        let truth = labels_of(test)?;
        let acc = match cfg.search.mode {
            ScoreMode::Supervised => accuracy(&predicted, &truth)?,
            ScoreMode::Unsupervised { .. } => matched_accuracy(&predicted, &truth)?,
        };
        (Some(adjusted_rand_index(&predicted, &truth)?), Some(acc))
    } else {
        (None, None)
    };
    Ok(Classification { train_embedding: x_train, test_embedding: x_test, train_clusters, predicted, ari, accuracy: acc })
}

/// Landmark search only. Returns the outcome and the diffusion time.
pub fn infer_landmarks(
    sc: &SimplicialComplex2,
    train: &[Trajectory],
    test: &[Trajectory],
    cfg: &PipelineConfig,
) -> Result<(SearchOutcome, f64)> {
    let p = prepare(sc, train, test, cfg)?;
    let eval = Evaluator::new(sc, &p.f_fit, p.y_train.as_ref(), &cfg.search).stage("search")?;
    Ok((search(&eval, &cfg.search).stage("search")?, p.tau))
}

/// Classification with given landmark triangles, skipping the search.
pub fn classify_with_landmarks(
    sc: &SimplicialComplex2,
    holes: &[usize],
    train: &[Trajectory],
    test: &[Trajectory],
    cfg: &PipelineConfig,
) -> Result<Classification> {
    let p = prepare(sc, train, test, cfg)?;
    let basis =
        HarmonicBasis::build(sc, holes, &cfg.search.harmonic, &HarmonicCache::new()).stage("harmonic")?;
    classify_prepared(&basis, &p, test, cfg)
}

pub fn run_on_data(
    sc: &SimplicialComplex2,
    train: &[Trajectory],
    test: &[Trajectory],
    cfg: &PipelineConfig,
) -> Result<RunOutcome> {
    run_on_data_with(sc, train, test, cfg, |_| Ok(()))
}

/// As [`run_on_data`], calling `on_search` once the landmarks are fixed and
/// before classification starts.
pub fn run_on_data_with(
    sc: &SimplicialComplex2,
    train: &[Trajectory],
    test: &[Trajectory],
    cfg: &PipelineConfig,
    mut on_search: impl FnMut(&SearchOutcome) -> Result<()>,
) -> Result<RunOutcome> {
    let p = prepare(sc, train, test, cfg)?;
    let eval = Evaluator::new(sc, &p.f_fit, p.y_train.as_ref(), &cfg.search).stage("search")?;
    let outcome = search(&eval, &cfg.search).stage("search")?;
    on_search(&outcome).stage("write")?;
    let c = classify_prepared(&outcome.basis, &p, test, cfg)?;
    Ok(RunOutcome {
        search: outcome,
        tau: p.tau,
        train_embedding: c.train_embedding,
        test_embedding: c.test_embedding,
        train_clusters: c.train_clusters,
        predicted: c.predicted,
        ari: c.ari,
        accuracy: c.accuracy,
    })
}

/// File-driven run: inputs, output directory and the pipeline settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub complex: PathBuf,
    pub train: PathBuf,
    #[serde(default)]
    pub test: Option<PathBuf>,
    pub output_dir: PathBuf,
    #[serde(flatten)]
    pub pipeline: PipelineConfig,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        for p in [Some(&self.complex), Some(&self.train), self.test.as_ref()].into_iter().flatten() {
            if !p.is_file() {
                return Err(Error::InvalidArgument(format!("input file {} does not exist", p.display())));
            }
        }
        self.pipeline.search.validate()
    }
}

fn mode_name(mode: ScoreMode) -> &'static str {
    match mode {
        ScoreMode::Supervised => "supervised",
        ScoreMode::Unsupervised { .. } => "unsupervised",
    }
}

/// Loads the inputs named in `cfg`, runs the pipeline and writes into
/// `output_dir`:
///
/// - `config.json`: the effective configuration
/// - `landmarks.json`, `trace.jsonl`: written as soon as the search ends
/// - `embeddings_train.json`, `embeddings_test.json`
/// - `predicted_labels.json`, plus `train_clusters.json` in unsupervised mode
/// - `report.json`
///
/// Errors carry the failing stage.
pub fn run_pipeline(cfg: &RunConfig) -> Result<Report> {
    cfg.validate().stage("config")?;
    let out = &cfg.output_dir;
    fs::create_dir_all(out).map_err(Error::from).stage("config")?;
    let hash = config_hash(cfg).stage("config")?;
    write_json(&out.join("config.json"), cfg).stage("write")?;

    let sc = read_complex(&cfg.complex).stage("load")?;
    let train = read_trajectories(&cfg.train).stage("load")?;
    let test = match &cfg.test {
        Some(p) => read_trajectories(p).stage("load")?,
        None => Vec::new(),
    };

    let run = run_on_data_with(&sc, &train, &test, &cfg.pipeline, |o| {
        write_json(&out.join("landmarks.json"), &landmark_records(&sc, &o.basis))?;
        write_atomic(&out.join("trace.jsonl"), format_trace(&o.trace)?.as_bytes())
    })?;

    let write = || -> Result<()> {
        write_json(&out.join("embeddings_train.json"), &run.train_embedding)?;
        write_json(&out.join("embeddings_test.json"), &run.test_embedding)?;
        write_json(&out.join("predicted_labels.json"), &run.predicted)?;
        if let Some(c) = &run.train_clusters {
            write_json(&out.join("train_clusters.json"), c)?;
        }
        Ok(())
    };
    write().stage("write")?;

    let trace = &run.search.trace;
    let report = Report {
        landmarks: landmark_records(&sc, &run.search.basis),
        score_trace: trace.entries.iter().map(|e| (e.step, e.score)).collect(),
        ari: run.ari,
        accuracy: run.accuracy,
        config_hash: hash,
        seed: cfg.pipeline.search.seed,
        mode: mode_name(cfg.pipeline.search.mode).to_string(),
        tau: run.tau,
        final_score: run.search.score,
        evaluations: trace.evaluations,
        cache_hits: trace.cache_hits,
        hit_max_steps: trace.hit_max_steps,
    };
    write_json(&out.join("report.json"), &report).stage("write")?;
    Ok(report)
}

/// One cell of an ARI table over hole counts and dataset seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub n_holes: usize,
    pub seed: u64,
    pub ari: f64,
    pub accuracy: f64,
    pub final_score: f64,
}

/// Generates one synthetic dataset per seed and runs the pipeline for every
/// hole count on it.
pub fn evaluate_grid(synth: &SynthConfig, hole_counts: &[usize], seeds: &[u64], base: &PipelineConfig) -> Result<Vec<EvalRow>> {
    let mut rows = Vec::new();
    for &seed in seeds {
        let (sc, data) = make_dataset(&SynthConfig { seed, ..synth.clone() })?;
        let (train, test) = (data.train(), data.test());
        for &k in hole_counts {
            let mut cfg = base.clone();
            cfg.search.n_holes = k;
            cfg.search.seed = seed;
            cfg.eval_seed = seed;
            let out = run_on_data(&sc, &train, &test, &cfg)?;
            rows.push(EvalRow {
                n_holes: k,
                seed,
                ari: out.ari.unwrap_or(f64::NAN),
                accuracy: out.accuracy.unwrap_or(f64::NAN),
                final_score: out.search.score,
            });
        }
    }
    Ok(rows)
}

/// Median ARI per hole count, in the order of `hole_counts`.
pub fn median_ari(rows: &[EvalRow], hole_counts: &[usize]) -> Vec<(usize, f64)> {
    hole_counts
        .iter()
        .map(|&k| {
            let mut v: Vec<f64> = rows.iter().filter(|r| r.n_holes == k).map(|r| r.ari).collect();
            (k, median(&mut v))
        })
        .collect()
}

pub fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

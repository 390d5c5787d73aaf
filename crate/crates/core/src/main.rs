use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hodge_landmarks::classify::ClassifierKind;
use hodge_landmarks::datagen::{make_dataset, SynthConfig};
use hodge_landmarks::error::{Error, Result};
use hodge_landmarks::grid::{ingest_points, BBox, GridSpec};
use hodge_landmarks::io::{
    format_trace, landmark_records, read_complex, read_json, read_tracks, read_trajectories, write_atomic,
    write_complex, write_json, write_trajectories, LandmarkRecord,
};
use hodge_landmarks::pipeline::{
    classify_with_landmarks, evaluate_grid, infer_landmarks, median_ari, run_pipeline, PipelineConfig, RunConfig,
};

/// Landmark inference and trajectory classification on simplicial complexes.
#[derive(Parser)]
#[command(name = "hodge-landmarks", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic Delaunay complex and labelled trajectories.
    Generate(GenerateArgs),
    /// Discretize point tracks onto a hex-grid triangulation.
    Ingest(IngestArgs),
    /// Search landmark triangles.
    Infer(InferArgs),
    /// Embed and classify with landmarks from `infer`.
    Classify(ClassifyArgs),
    /// Full pipeline from a config document or flags.
    Run(RunArgs),
    /// ARI table over hole counts and synthetic seeds.
    Evaluate(EvaluateArgs),
    /// Convert a search trace into plot-ready CSV.
    TraceExport(TraceExportArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 400)]
    n_points: usize,
    #[arg(long, default_value_t = 3)]
    n_classes: usize,
    #[arg(long, default_value_t = 5)]
    n_train: usize,
    #[arg(long, default_value_t = 50)]
    n_test: usize,
    #[arg(long, default_value_t = 1.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    margin: f64,
}

impl SynthArgs {
    fn config(&self, seed: u64) -> SynthConfig {
        SynthConfig {
            n_points: self.n_points,
            n_classes: self.n_classes,
            n_train_per_class: self.n_train,
            n_test_per_class: self.n_test,
            alpha: self.alpha,
            margin: self.margin,
            seed,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    synth: SynthArgs,
}

#[derive(Args)]
struct IngestArgs {
    /// `id, timestamp, lon, lat` lines.
    #[arg(long)]
    tracks: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    min_lon: f64,
    #[arg(long, allow_hyphen_values = true)]
    min_lat: f64,
    #[arg(long, allow_hyphen_values = true)]
    max_lon: f64,
    #[arg(long, allow_hyphen_values = true)]
    max_lat: f64,
    /// Hex diameter in degrees.
    #[arg(long)]
    cell_diameter: f64,
    /// JSON list of polygons, each a list of `[lon, lat]`.
    #[arg(long)]
    land_mask: Option<PathBuf>,
    #[arg(long)]
    apply_land_mask: bool,
    #[arg(long, allow_hyphen_values = true)]
    reference_lat: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Supervised,
    Unsupervised,
}

#[derive(Clone, Copy, ValueEnum)]
enum Classifier {
    Knn,
    RandomForest,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long, value_enum, default_value = "supervised")]
    mode: Mode,
    /// Cluster count for unsupervised mode.
    #[arg(long)]
    n_clusters: Option<usize>,
    #[arg(long, default_value_t = 3)]
    n_holes: usize,
    #[arg(long, default_value_t = 10)]
    n_init: usize,
    #[arg(long, default_value_t = 2)]
    n_hop: usize,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Diffusion time in units of 1 / lambda_max; 0 disables diffusion.
    #[arg(long, default_value_t = 2.0)]
    tau_scale: f64,
    #[arg(long, value_enum, default_value = "random-forest")]
    classifier: Classifier,
    #[arg(long)]
    k_neighbors: Option<usize>,
    #[arg(long, default_value_t = 100)]
    n_trees: usize,
    #[arg(long, default_value_t = 8)]
    max_depth: usize,
    /// Classifier and evaluation seed; the search seed if unset.
    #[arg(long)]
    eval_seed: Option<u64>,
}

impl PipelineArgs {
    fn config(&self, seed: u64) -> Result<PipelineConfig> {
        self.config_with(seed, None)
    }

    fn config_with(&self, seed: u64, default_clusters: Option<usize>) -> Result<PipelineConfig> {
        let mut cfg = match self.mode {
            Mode::Supervised => PipelineConfig::supervised(self.n_holes, seed),
            Mode::Unsupervised => {
                let n = self.n_clusters.or(default_clusters).ok_or_else(|| {
                    Error::InvalidArgument("--n-clusters is required in unsupervised mode".into())
                })?;
                PipelineConfig::unsupervised(self.n_holes, n, seed)
            }
        };
        cfg.search.n_init = self.n_init;
        cfg.search.n_hop = self.n_hop;
        cfg.search.max_steps = self.max_steps;
        cfg.diffusion.tau_scale = self.tau_scale;
        cfg.classifier = match self.classifier {
            Classifier::Knn => ClassifierKind::Knn,
            Classifier::RandomForest => ClassifierKind::RandomForest,
        };
        cfg.classifier_params.k_neighbors = self.k_neighbors;
        cfg.classifier_params.n_trees = self.n_trees;
        cfg.classifier_params.max_depth = self.max_depth;
        cfg.eval_seed = self.eval_seed.unwrap_or(seed);
        cfg.search.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    complex: PathBuf,
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: Option<PathBuf>,
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    /// `landmarks.json` written by `infer` or `run`.
    #[arg(long)]
    landmarks: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Config document; the remaining flags are ignored when given.
    #[arg(long, conflicts_with_all = ["complex", "train", "test", "out", "seed"])]
    config: Option<PathBuf>,
    #[arg(long)]
    complex: Option<PathBuf>,
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    holes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    seeds: Vec<u64>,
    #[command(flatten)]
    synth: SynthArgs,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Also write the per-run rows as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TraceExportArgs {
    /// `trace.jsonl` or `report.json`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config_err<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage("config"))
}

fn load_err<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_stage("load"))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    config_err(fs::create_dir_all(dir).map_err(Error::from))
}

fn load_inputs(
    input: &InputArgs,
) -> Result<(hodge_landmarks::complex::SimplicialComplex2, Vec<hodge_landmarks::flow::Trajectory>, Vec<hodge_landmarks::flow::Trajectory>)>
{
    for p in [Some(&input.complex), Some(&input.train), input.test.as_ref()].into_iter().flatten() {
        if !p.is_file() {
            return config_err(Err(Error::InvalidArgument(format!("input file {} does not exist", p.display()))));
        }
    }
    let sc = load_err(read_complex(&input.complex))?;
    let train = load_err(read_trajectories(&input.train))?;
    let test = match &input.test {
        Some(p) => load_err(read_trajectories(p))?,
        None => Vec::new(),
    };
    Ok((sc, train, test))
}

#[derive(Serialize)]
struct IngestSummary {
    n_vertices: usize,
    n_edges: usize,
    n_triangles: usize,
    n_trajectories: usize,
    track_ids: Vec<String>,
    dropped_points: usize,
    dropped_tracks: Vec<(String, String)>,
}

#[derive(Serialize)]
struct InferSummary {
    holes: Vec<usize>,
    final_score: f64,
    tau: f64,
    evaluations: usize,
    cache_hits: usize,
    hit_max_steps: bool,
    seed: u64,
}

#[derive(Serialize)]
struct ClassifySummary {
    holes: Vec<usize>,
    ari: Option<f64>,
    accuracy: Option<f64>,
}

fn generate(a: &GenerateArgs) -> Result<()> {
    let cfg = a.synth.config(a.seed);
    config_err(cfg.validate())?;
    ensure_dir(&a.out)?;
    let (sc, data) = make_dataset(&cfg)?;
    write_complex(&a.out.join("complex.json"), &sc)?;
    write_trajectories(&a.out.join("train.jsonl"), &data.train())?;
    write_trajectories(&a.out.join("test.jsonl"), &data.test())?;
    write_json(&a.out.join("manifest.json"), &cfg)?;
    println!(
        "{} vertices, {} edges, {} triangles; {} train and {} test trajectories",
        sc.n_vertices(),
        sc.n_edges(),
        sc.n_triangles(),
        data.train().len(),
        data.test().len()
    );
    Ok(())
}

fn ingest(a: &IngestArgs) -> Result<()> {
    let mut spec = GridSpec::new(
        BBox { min_lon: a.min_lon, min_lat: a.min_lat, max_lon: a.max_lon, max_lat: a.max_lat },
        a.cell_diameter,
    );
    spec.apply_land_mask = a.apply_land_mask;
    spec.reference_lat = a.reference_lat;
    if let Some(p) = &a.land_mask {
        spec.land_mask = config_err(read_json(p))?;
    }
    config_err(spec.validate())?;
    if !a.tracks.is_file() {
        return config_err(Err(Error::InvalidArgument(format!("input file {} does not exist", a.tracks.display()))));
    }
    ensure_dir(&a.out)?;
    let tracks = load_err(read_tracks(&a.tracks))?;
    let res = ingest_points(&tracks, &spec)?;
    let sc = &res.grid.complex;
    write_complex(&a.out.join("complex.json"), sc)?;
    write_trajectories(&a.out.join("trajectories.jsonl"), &res.trajectories)?;
    write_json(&a.out.join("grid.json"), &spec)?;
    for (id, why) in &res.dropped_tracks {
        eprintln!("dropped track {id}: {why}");
    }
    if res.dropped_points > 0 {
        eprintln!("{} points outside the bounding box dropped", res.dropped_points);
    }
    write_json(
        &a.out.join("ingest.json"),
        &IngestSummary {
            n_vertices: sc.n_vertices(),
            n_edges: sc.n_edges(),
            n_triangles: sc.n_triangles(),
            n_trajectories: res.trajectories.len(),
            track_ids: res.track_ids.clone(),
            dropped_points: res.dropped_points,
            dropped_tracks: res.dropped_tracks.clone(),
        },
    )?;
    println!("{} trajectories on {} triangles", res.trajectories.len(), sc.n_triangles());
    Ok(())
}

fn infer(a: &InferArgs) -> Result<()> {
    let cfg = config_err(a.pipeline.config(a.seed))?;
    let (sc, train, test) = load_inputs(&a.input)?;
    ensure_dir(&a.out)?;
    let (outcome, tau) = infer_landmarks(&sc, &train, &test, &cfg)?;
    write_json(&a.out.join("landmarks.json"), &landmark_records(&sc, &outcome.basis))?;
    write_atomic(&a.out.join("trace.jsonl"), format_trace(&outcome.trace)?.as_bytes())?;
    let t = &outcome.trace;
    write_json(
        &a.out.join("infer.json"),
        &InferSummary {
            holes: outcome.tuple.0.clone(),
            final_score: outcome.score,
            tau,
            evaluations: t.evaluations,
            cache_hits: t.cache_hits,
            hit_max_steps: t.hit_max_steps,
            seed: a.seed,
        },
    )?;
    println!("holes {:?} score {:.6e}", outcome.tuple.0, outcome.score);
    Ok(())
}

fn classify(a: &ClassifyArgs) -> Result<()> {
    let cfg = config_err(a.pipeline.config(a.seed))?;
    let records: Vec<LandmarkRecord> = config_err(read_json(&a.landmarks))?;
    let (sc, train, test) = load_inputs(&a.input)?;
    ensure_dir(&a.out)?;
    let holes: Vec<usize> = records.iter().map(|r| r.triangle).collect();
    let c = classify_with_landmarks(&sc, &holes, &train, &test, &cfg)?;
    write_json(&a.out.join("embeddings_train.json"), &c.train_embedding)?;
    write_json(&a.out.join("embeddings_test.json"), &c.test_embedding)?;
    write_json(&a.out.join("predicted_labels.json"), &c.predicted)?;
    if let Some(cl) = &c.train_clusters {
        write_json(&a.out.join("train_clusters.json"), cl)?;
    }
    write_json(&a.out.join("classify.json"), &ClassifySummary { holes, ari: c.ari, accuracy: c.accuracy })?;
    print_scores(c.ari, c.accuracy);
    Ok(())
}

fn print_scores(ari: Option<f64>, acc: Option<f64>) {
    match (ari, acc) {
        (Some(r), Some(a)) => println!("ARI {r:.4} accuracy {a:.4}"),
        _ => println!("test set unlabelled; no scores"),
    }
}

fn run(a: &RunArgs) -> Result<()> {
    let cfg: RunConfig = match &a.config {
        Some(p) => config_err(read_json(p))?,
        None => {
            let missing = |what: &str| Error::InvalidArgument(format!("--{what} is required without --config"));
            let seed = a.seed.ok_or_else(|| missing("seed")).map_err(|e| e.in_stage("config"))?;
            RunConfig {
                complex: a.complex.clone().ok_or_else(|| missing("complex")).map_err(|e| e.in_stage("config"))?,
                train: a.train.clone().ok_or_else(|| missing("train")).map_err(|e| e.in_stage("config"))?,
                test: a.test.clone(),
                output_dir: a.out.clone().ok_or_else(|| missing("out")).map_err(|e| e.in_stage("config"))?,
                pipeline: config_err(a.pipeline.config(seed))?,
            }
        }
    };
    let report = run_pipeline(&cfg)?;
    let holes: Vec<usize> = report.landmarks.iter().map(|l| l.triangle).collect();
    println!("holes {holes:?} score {:.6e}", report.final_score);
    print_scores(report.ari, report.accuracy);
    Ok(())
}

fn evaluate(a: &EvaluateArgs) -> Result<()> {
    let synth = a.synth.config(0);
    config_err(synth.validate())?;
    let base = config_err(a.pipeline.config_with(0, Some(synth.n_classes)))?;
    let rows = evaluate_grid(&synth, &a.holes, &a.seeds, &base)?;
    println!("{:>7} {:>6} {:>8} {:>8}", "n_holes", "seed", "ARI", "acc");
    for r in &rows {
        println!("{:>7} {:>6} {:>8.4} {:>8.4}", r.n_holes, r.seed, r.ari, r.accuracy);
    }
    for (k, m) in median_ari(&rows, &a.holes) {
        println!("median ARI n_holes={k}: {m:.4}");
    }
    if let Some(p) = &a.out {
        write_json(p, &rows)?;
    }
    Ok(())
}

#[derive(serde::Deserialize)]
struct TraceLine {
    step: usize,
    tuple: Vec<usize>,
    score: f64,
    cache_hits: usize,
}

fn trace_export(a: &TraceExportArgs) -> Result<()> {
    if !a.input.is_file() {
        return config_err(Err(Error::InvalidArgument(format!("input file {} does not exist", a.input.display()))));
    }
    let text = load_err(fs::read_to_string(&a.input).map_err(Error::from))?;
    let mut csv = String::new();
    if a.input.extension().is_some_and(|e| e == "json") {
        let report: hodge_landmarks::io::Report = load_err(serde_json::from_str(&text).map_err(Error::from))?;
        csv.push_str("step,score\n");
        for (step, score) in report.score_trace {
            csv += &format!("{step},{score}\n");
        }
    } else {
        csv.push_str("step,score,cache_hits,tuple\n");
        for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
            let t: TraceLine = serde_json::from_str(line)
                .map_err(|e| Error::Format(format!("trace line {}: {e}", i + 1)).in_stage("load"))?;
            let tuple: Vec<String> = t.tuple.iter().map(usize::to_string).collect();
            csv += &format!("{},{},{},{}\n", t.step, t.score, t.cache_hits, tuple.join(" "));
        }
    }
    match &a.out {
        Some(p) => write_atomic(p, csv.as_bytes()),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Ingest(a) => ingest(a),
        Command::Infer(a) => infer(a),
        Command::Classify(a) => classify(a),
        Command::Run(a) => run(a),
        Command::Evaluate(a) => evaluate(a),
        Command::TraceExport(a) => trace_export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Two trajectory classes, no labels: the landmark search maximizes the
//! k-means cluster score and the test set is clustered in harmonic space.

use hodge_landmarks::datagen::{make_dataset, SynthConfig};
use hodge_landmarks::pipeline::{run_on_data, PipelineConfig};

fn main() -> hodge_landmarks::error::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let (sc, data) = make_dataset(&SynthConfig::new(400, 2, 5, 50, seed))?;
    let cfg = PipelineConfig::unsupervised(2, 2, seed);
    let out = run_on_data(&sc, &data.train(), &data.test(), &cfg)?;

    println!("holes {:?}, score {:.4e}", out.search.tuple.holes(), out.search.score);
    let truth: Vec<usize> = data.test().iter().map(|t| t.label.unwrap()).collect();
    for (i, row) in out.test_embedding.rows().enumerate().step_by(10) {
        println!("{:>3} class {} cluster {} x = {:+.3?}", i, truth[i], out.predicted.0[i], row);
    }
    println!("ARI {:.4}, matched accuracy {:.4}", out.ari.unwrap(), out.accuracy.unwrap());
    Ok(())
}

//! k-NN and random forest on two noisy blobs, with ARI and accuracy.

use hodge_landmarks::classify::{predict, train_classifier, ClassifierKind, ClassifierParams};
use hodge_landmarks::kmeans::kmeans;
use hodge_landmarks::metrics::{accuracy, adjusted_rand_index, matched_accuracy};
use hodge_landmarks::score::{EmbeddingMatrix, LabelVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn blobs(n: usize, rng: &mut ChaCha8Rng) -> (EmbeddingMatrix, LabelVector) {
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for i in 0..n {
        let c = i % 2;
        let cx = if c == 0 { -1.0 } else { 1.0 };
        rows.push(vec![cx + rng.gen_range(-0.8..0.8), rng.gen_range(-1.0..1.0)]);
        y.push(c);
    }
    (EmbeddingMatrix::from_rows(&rows).unwrap(), LabelVector(y))
}

fn main() -> hodge_landmarks::error::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (x_train, y_train) = blobs(20, &mut rng);
    let (x_test, y_test) = blobs(200, &mut rng);
    for kind in [ClassifierKind::Knn, ClassifierKind::RandomForest] {
        let model = train_classifier(kind, &x_train, &y_train, &ClassifierParams::default(), 0)?;
        let pred = predict(&model, &x_test)?;
        println!(
            "{kind:?}: accuracy {:.3}, ARI {:.3}",
            accuracy(&pred, &y_test)?,
            adjusted_rand_index(&pred, &y_test)?
        );
    }
    let clusters = kmeans(&x_test, 2, 0)?;
    println!(
        "k-means: matched accuracy {:.3}, ARI {:.3}",
        matched_accuracy(&clusters, &y_test)?,
        adjusted_rand_index(&clusters, &y_test)?
    );
    Ok(())
}

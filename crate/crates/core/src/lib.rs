//! Landmark inference on 2-dimensional simplicial complexes.
//!
//! Trajectories become edge flows, landmark triangles are removed to open
//! holes, and the flows are projected onto the harmonic vectors those holes
//! create. A local search picks the holes that best separate trajectory
//! classes; the projections then feed a classifier or k-means.
//!
//! ```no_run
//! use hodge_landmarks::datagen::{make_dataset, SynthConfig};
//! use hodge_landmarks::pipeline::{run_on_data, PipelineConfig};
//!
//! let (sc, data) = make_dataset(&SynthConfig::new(400, 3, 5, 50, 0))?;
//! let out = run_on_data(&sc, &data.train(), &data.test(), &PipelineConfig::supervised(3, 0))?;
//! println!("holes {:?}, ARI {:?}", out.search.tuple.holes(), out.ari);
//! # Ok::<(), hodge_landmarks::error::Error>(())
//! ```

pub mod classify;
pub mod complex;
pub mod datagen;
pub mod error;
pub mod expm;
pub mod flow;
pub mod grid;
pub mod harmonic;
pub mod io;
pub mod kmeans;
pub mod lsq;
pub mod metrics;
pub mod pipeline;
pub mod score;
pub mod search;
pub mod sparse;
pub mod topology;

pub use complex::{build_complex, SimplicialComplex2};
pub use error::{Error, Result};
pub use flow::{EdgeFlow, FlowMatrix, Trajectory};
pub use harmonic::{HarmonicBasis, HarmonicVector};
pub use score::{EmbeddingMatrix, LabelVector};
pub use search::{CandidateTuple, SearchConfig};

//! Harmonic vectors of single-triangle holes.
//!
//! For a triangle `sigma`, its boundary `b = B2 sigma` is divergence free. In
//! the complex with `sigma` removed, `b` splits into a curl part in the image
//! of the remaining boundary matrix and a harmonic part circulating around
//! the hole. The curl part is the least-squares fit of `b` by the remaining
//! triangle boundaries, so the harmonic part is the fit residual, obtained
//! here without forming any pseudo-inverse or eigendecomposition.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use crate::complex::SimplicialComplex2;
use crate::error::{Error, Result};
use crate::flow::{EdgeFlow, FlowMatrix};
use crate::lsq::{cgls, LsqSettings};
use crate::score::EmbeddingMatrix;
use crate::sparse::{dot, norm2, ColumnMasked};

/// Residual norms below this fraction of `||B2 sigma||` mark a degenerate
/// hole.
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HarmonicSettings {
    pub lsq_tol: f64,
    /// Iteration cap as a multiple of the edge count.
    pub max_iter_factor: usize,
}

impl Default for HarmonicSettings {
    fn default() -> Self {
        HarmonicSettings { lsq_tol: 1e-10, max_iter_factor: 10 }
    }
}

/// Unit harmonic flow of the complex punctured at `hole`.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicVector {
    pub hole: usize,
    pub values: EdgeFlow,
}

impl HarmonicVector {
    /// Nonzero entries as `(edge id, value)`.
    pub fn sparse_entries(&self) -> Vec<(usize, f64)> {
        self.values.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(e, v)| (e, *v)).collect()
    }
}

/// Computes the harmonic vector of `sc \ {sigma}` without caching.
pub fn compute_harmonic_vector(
    sc: &SimplicialComplex2,
    sigma: usize,
    settings: &HarmonicSettings,
) -> Result<HarmonicVector> {
    sc.check_triangle(sigma)?;
    if !(settings.lsq_tol > 0.0 && settings.lsq_tol <= 1e-4) {
        return Err(Error::InvalidArgument(format!("lsq_tol must lie in (0, 1e-4], got {}", settings.lsq_tol)));
    }
    let b2 = sc.boundary_2();
    let mut rhs = vec![0.0; sc.n_edges()];
    for (e, v) in b2.column(sigma) {
        rhs[e] = v;
    }
    let punctured = ColumnMasked::new(b2, [sigma]);
    let lsq = LsqSettings { tol: settings.lsq_tol, max_iter: settings.max_iter_factor * sc.n_edges().max(1) };
    let mut h = cgls(&punctured, &rhs, lsq)?.residual;

    let norm = norm2(&h);
    if norm < DEGENERACY_THRESHOLD * norm2(&rhs) {
        return Err(Error::DegenerateHole(sigma));
    }
    // sign: largest-magnitude entry positive, first such edge on ties
    let mut pivot = 0;
    for (e, v) in h.iter().enumerate() {
        if v.abs() > h[pivot].abs() {
            pivot = e;
        }
    }
    let scale = if h[pivot] < 0.0 { -1.0 / norm } else { 1.0 / norm };
    h.iter_mut().for_each(|x| *x *= scale);
    Ok(HarmonicVector { hole: sigma, values: EdgeFlow(h) })
}

type CacheEntry = std::result::Result<Arc<HarmonicVector>, ()>;

/// Memo table `triangle id -> harmonic vector` (or a degeneracy marker).
/// Safe for concurrent use; racing inserts store identical values.
#[derive(Default)]
pub struct HarmonicCache {
    map: RwLock<HashMap<usize, CacheEntry>>,
    hits: AtomicUsize,
}

impl HarmonicCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }
}

/// Cached harmonic vector for hole `sigma`.
pub fn harmonic_vector(
    sc: &SimplicialComplex2,
    sigma: usize,
    settings: &HarmonicSettings,
    cache: &HarmonicCache,
) -> Result<Arc<HarmonicVector>> {
    if let Some(entry) = cache.map.read().unwrap().get(&sigma) {
        cache.hits.fetch_add(1, Ordering::Relaxed);
        return entry.clone().map_err(|_| Error::DegenerateHole(sigma));
    }
    let computed = match compute_harmonic_vector(sc, sigma, settings) {
        Ok(h) => Ok(Arc::new(h)),
        Err(Error::DegenerateHole(_)) => Err(()),
        Err(e) => return Err(e),
    };
    cache.map.write().unwrap().entry(sigma).or_insert_with(|| computed.clone());
    computed.map_err(|_| Error::DegenerateHole(sigma))
}

/// Harmonic vectors for an ordered list of holes, each computed on its own
/// punctured complex.
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    columns: Vec<Arc<HarmonicVector>>,
}

impl HarmonicBasis {
    pub fn new(columns: Vec<Arc<HarmonicVector>>) -> Result<Self> {
        for (i, a) in columns.iter().enumerate() {
            if columns[..i].iter().any(|b| b.hole == a.hole) {
                return Err(Error::InvalidArgument(format!("hole {} listed twice", a.hole)));
            }
        }
        if let Some(first) = columns.first() {
            if let Some(bad) = columns.iter().find(|c| c.values.len() != first.values.len()) {
                return Err(Error::DimensionMismatch { expected: first.values.len(), got: bad.values.len() });
            }
        }
        Ok(HarmonicBasis { columns })
    }

    pub fn build(
        sc: &SimplicialComplex2,
        holes: &[usize],
        settings: &HarmonicSettings,
        cache: &HarmonicCache,
    ) -> Result<Self> {
        let cols = holes.iter().map(|&h| harmonic_vector(sc, h, settings, cache)).collect::<Result<Vec<_>>>()?;
        Self::new(cols)
    }

    pub fn k(&self) -> usize {
        self.columns.len()
    }

    pub fn holes(&self) -> Vec<usize> {
        self.columns.iter().map(|c| c.hole).collect()
    }

    pub fn columns(&self) -> &[Arc<HarmonicVector>] {
        &self.columns
    }
}

/// Harmonic coordinates: entry `(j, i) = h_i . f_j`.
pub fn embed(basis: &HarmonicBasis, flows: &FlowMatrix) -> Result<EmbeddingMatrix> {
    if let Some(h) = basis.columns.first() {
        if h.values.len() != flows.n_edges() {
            return Err(Error::DimensionMismatch { expected: h.values.len(), got: flows.n_edges() });
        }
    }
    let k = basis.k();
    let mut data = Vec::with_capacity(k * flows.n_flows());
    for f in flows.columns() {
        for h in &basis.columns {
            data.push(dot(&h.values, f));
        }
    }
    EmbeddingMatrix::new(flows.n_flows(), k, data)
}

/// Pairs of holes (by position in `holes`) whose triangles share an edge.
/// Per-hole harmonic vectors are least accurate for such pairs.
pub fn adjacent_hole_pairs(sc: &SimplicialComplex2, holes: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..holes.len() {
        let ei = sc.triangle_edges(holes[i]);
        for j in i + 1..holes.len() {
            let ej = sc.triangle_edges(holes[j]);
            if ei.iter().any(|e| ej.contains(e)) {
                out.push((i, j));
            }
        }
    }
    out
}

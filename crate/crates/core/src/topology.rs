//! Betti numbers and the Hodge decomposition of edge flows.

use nalgebra::DMatrix;

use crate::complex::{PuncturedComplex, SimplicialComplex2};
use crate::error::{Error, Result};
use crate::lsq::{cgls, LsqSettings};
use crate::sparse::SparseOperator;

/// Singular values at or below this are treated as zero.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Largest edge count accepted by the dense routines.
pub const DENSE_EDGE_LIMIT: usize = 2000;

/// Numerical rank from the singular values of a dense matrix.
pub fn dense_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    // SVD of the wide/tall orientation that keeps the factorization small
    let sv = if m.nrows() >= m.ncols() {
        m.clone().singular_values()
    } else {
        m.transpose().singular_values()
    };
    sv.iter().filter(|&&s| s > RANK_THRESHOLD).count()
}

fn check_size(n_edges: usize) -> Result<()> {
    if n_edges > DENSE_EDGE_LIMIT {
        Err(Error::SizeLimit { what: "complex", size: n_edges, limit: DENSE_EDGE_LIMIT })
    } else {
        Ok(())
    }
}

/// `(beta_0, beta_1)` of a punctured complex via dense ranks of the boundary
/// matrices.
pub fn betti_numbers(pc: &PuncturedComplex<'_>) -> Result<(usize, usize)> {
    let sc = pc.base();
    check_size(sc.n_edges())?;
    let r1 = dense_rank(&sc.boundary_1().to_dense());
    let r2 = dense_rank(&pc.boundary_2().to_dense());
    Ok((sc.n_vertices() - r1, sc.n_edges() - r1 - r2))
}

/// Dimension of `ker L1` from a dense symmetric eigendecomposition.
pub fn harmonic_dimension(laplacian: &SparseOperator) -> Result<usize> {
    check_size(laplacian.rows())?;
    let ev = laplacian.to_dense().symmetric_eigenvalues();
    Ok(ev.iter().filter(|&&l| l.abs() <= RANK_THRESHOLD).count())
}

/// Orthogonal split of an edge flow into gradient, curl and harmonic parts.
#[derive(Clone, Debug)]
pub struct HodgeParts {
    /// Component in the image of `B1^T`.
    pub gradient: Vec<f64>,
    /// Component in the image of `B2`.
    pub curl: Vec<f64>,
    /// Remainder, in the kernel of `L1`.
    pub harmonic: Vec<f64>,
}

/// Computes the Hodge decomposition of `flow` on `sc` by two sparse
/// least-squares projections.
pub fn hodge_decomposition(sc: &SimplicialComplex2, flow: &[f64], tol: f64) -> Result<HodgeParts> {
    if flow.len() != sc.n_edges() {
        return Err(Error::DimensionMismatch { expected: sc.n_edges(), got: flow.len() });
    }
    let settings = LsqSettings { tol, max_iter: 10 * sc.n_edges().max(10) };
    let b1t = sc.boundary_1().transpose();
    let grad_fit = cgls(&b1t, flow, settings)?;
    let curl_fit = cgls(sc.boundary_2(), flow, settings)?;
    let gradient: Vec<f64> = flow.iter().zip(&grad_fit.residual).map(|(f, r)| f - r).collect();
    let curl: Vec<f64> = flow.iter().zip(&curl_fit.residual).map(|(f, r)| f - r).collect();
    let harmonic = (0..flow.len()).map(|i| flow[i] - gradient[i] - curl[i]).collect();
    Ok(HodgeParts { gradient, curl, harmonic })
}

//! Dense reference computations shared by the integration tests. Boundary
//! matrices are rebuilt here from the simplex lists, independently of the
//! sparse operators in the library.

#![allow(dead_code)]

use hodge_landmarks::complex::{build_complex, SimplicialComplex2};
use hodge_landmarks::datagen::delaunay_complex;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn dense_b1(sc: &SimplicialComplex2) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(sc.n_vertices(), sc.n_edges());
    for (j, &[u, v]) in sc.edges().iter().enumerate() {
        b[(u, j)] = -1.0;
        b[(v, j)] = 1.0;
    }
    b
}

/// Columns for triangles not in `removed`; removed columns are left zero.
pub fn dense_b2(sc: &SimplicialComplex2, removed: &[usize]) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(sc.n_edges(), sc.n_triangles());
    for (j, &[u, v, w]) in sc.triangles().iter().enumerate() {
        if removed.contains(&j) {
            continue;
        }
        b[(sc.edge_id(v, w).unwrap(), j)] = 1.0;
        b[(sc.edge_id(u, w).unwrap(), j)] = -1.0;
        b[(sc.edge_id(u, v).unwrap(), j)] = 1.0;
    }
    b
}

pub fn dense_l1(sc: &SimplicialComplex2, removed: &[usize]) -> DMatrix<f64> {
    let b1 = dense_b1(sc);
    let b2 = dense_b2(sc, removed);
    b1.transpose() * &b1 + &b2 * b2.transpose()
}

/// Orthonormal basis of the eigenspace with `|lambda| <= threshold`.
pub fn kernel_basis(m: DMatrix<f64>, threshold: f64) -> Vec<DVector<f64>> {
    let eig = SymmetricEigen::new(m);
    (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i].abs() <= threshold)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect()
}

/// Number of eigenvalues with `|lambda| <= threshold`.
pub fn kernel_dim(m: DMatrix<f64>, threshold: f64) -> usize {
    m.symmetric_eigenvalues().iter().filter(|l| l.abs() <= threshold).count()
}

/// `exp(-tau M) x` for symmetric `M` via its eigendecomposition.
pub fn dense_heat(m: &DMatrix<f64>, tau: f64, x: &[f64]) -> Vec<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let v = &eig.eigenvectors;
    let coeff = v.transpose() * DVector::from_column_slice(x);
    let scaled = DVector::from_iterator(coeff.len(), coeff.iter().zip(eig.eigenvalues.iter()).map(|(c, l)| c * (-tau * l).exp()));
    (v * scaled).iter().copied().collect()
}

/// Delaunay complex on `n` uniform points in the unit square.
pub fn random_delaunay(n: usize, seed: u64) -> SimplicialComplex2 {
    delaunay_complex(n, seed).unwrap()
}

/// Random abstract complex: `n_tri` random triangles on `n_vertices`
/// vertices plus a few bare edges.
pub fn random_abstract(rng: &mut impl Rng, n_vertices: usize, n_tri: usize) -> SimplicialComplex2 {
    let verts: Vec<usize> = (0..n_vertices).collect();
    let tris: Vec<[usize; 3]> = (0..n_tri)
        .map(|_| {
            let s: Vec<usize> = verts.choose_multiple(rng, 3).copied().collect();
            [s[0], s[1], s[2]]
        })
        .collect();
    let edges: Vec<[usize; 2]> = (0..n_vertices / 3)
        .map(|_| {
            let s: Vec<usize> = verts.choose_multiple(rng, 2).copied().collect();
            [s[0], s[1]]
        })
        .collect();
    build_complex(n_vertices, &tris, &edges).unwrap()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Supervised cluster score written out from its definition.
pub fn supervised_score(x: &[Vec<f64>], y: &[usize]) -> f64 {
    let mut inter = f64::INFINITY;
    let mut intra: f64 = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let d = x[i].iter().zip(&x[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if y[i] == y[j] {
                intra = intra.max(d);
            } else {
                inter = inter.min(d);
            }
        }
    }
    inter / (intra + 1e-12)
}

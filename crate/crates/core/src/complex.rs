//! Two-dimensional simplicial complexes with canonical (increasing vertex
//! order) orientations and their boundary operators.

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::sparse::SparseOperator;

/// A complex with vertices `0..n_vertices`, edges `(u, v)` with `u < v` and
/// triangles `(u, v, w)` with `u < v < w`.
///
/// Edge and triangle ids are dense indices into the lexicographically sorted
/// lists. Boundary operators are built lazily and shared by every view of the
/// complex.
#[derive(Debug)]
pub struct SimplicialComplex2 {
    n_vertices: usize,
    coords: Option<Vec<[f64; 2]>>,
    edges: Vec<[usize; 2]>,
    edge_index: HashMap<[usize; 2], usize>,
    triangles: Vec<[usize; 3]>,
    triangle_index: HashMap<[usize; 3], usize>,
    b1: OnceLock<SparseOperator>,
    b2: OnceLock<SparseOperator>,
    l1_up: OnceLock<SparseOperator>,
}

impl Clone for SimplicialComplex2 {
    fn clone(&self) -> Self {
        SimplicialComplex2 {
            n_vertices: self.n_vertices,
            coords: self.coords.clone(),
            edges: self.edges.clone(),
            edge_index: self.edge_index.clone(),
            triangles: self.triangles.clone(),
            triangle_index: self.triangle_index.clone(),
            b1: OnceLock::new(),
            b2: OnceLock::new(),
            l1_up: OnceLock::new(),
        }
    }
}

impl PartialEq for SimplicialComplex2 {
    fn eq(&self, other: &Self) -> bool {
        self.n_vertices == other.n_vertices
            && self.coords == other.coords
            && self.edges == other.edges
            && self.triangles == other.triangles
    }
}

fn sorted_triple(t: [usize; 3]) -> [usize; 3] {
    let mut s = t;
    s.sort_unstable();
    s
}

fn sorted_pair(u: usize, v: usize) -> [usize; 2] {
    if u < v {
        [u, v]
    } else {
        [v, u]
    }
}

/// Builds the downward closure of `triangles` plus `extra_edges` on
/// `n_vertices` vertices.
///
/// Vertex order inside each input simplex is irrelevant; output simplices are
/// sorted and deduplicated.
pub fn build_complex(
    n_vertices: usize,
    triangles: &[[usize; 3]],
    extra_edges: &[[usize; 2]],
) -> Result<SimplicialComplex2> {
    let check = |v: usize| {
        if v >= n_vertices {
            Err(Error::VertexOutOfRange { vertex: v, n_vertices })
        } else {
            Ok(())
        }
    };
    let mut tris = BTreeSet::new();
    for &t in triangles {
        for v in t {
            check(v)?;
        }
        let s = sorted_triple(t);
        if s[0] == s[1] || s[1] == s[2] {
            return Err(Error::DegenerateSimplex(t.to_vec()));
        }
        tris.insert(s);
    }
    let mut edges = BTreeSet::new();
    for &[u, v] in extra_edges {
        check(u)?;
        check(v)?;
        if u == v {
            return Err(Error::DegenerateSimplex(vec![u, v]));
        }
        edges.insert(sorted_pair(u, v));
    }
    for &[a, b, c] in &tris {
        edges.insert([a, b]);
        edges.insert([a, c]);
        edges.insert([b, c]);
    }
    let edges: Vec<[usize; 2]> = edges.into_iter().collect();
    let triangles: Vec<[usize; 3]> = tris.into_iter().collect();
    let edge_index = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let triangle_index = triangles.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    Ok(SimplicialComplex2 {
        n_vertices,
        coords: None,
        edges,
        edge_index,
        triangles,
        triangle_index,
        b1: OnceLock::new(),
        b2: OnceLock::new(),
        l1_up: OnceLock::new(),
    })
}

impl SimplicialComplex2 {
    /// Attaches planar vertex positions.
    pub fn with_coords(mut self, coords: Vec<[f64; 2]>) -> Result<Self> {
        if coords.len() != self.n_vertices {
            return Err(Error::DimensionMismatch { expected: self.n_vertices, got: coords.len() });
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Id of the edge joining `u` and `v`, in either order.
    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_index.get(&sorted_pair(u, v)).copied()
    }

    pub fn triangle_id(&self, t: [usize; 3]) -> Option<usize> {
        self.triangle_index.get(&sorted_triple(t)).copied()
    }

    /// Edge ids of triangle `t = (u, v, w)` in boundary order
    /// `[(v, w), (u, w), (u, v)]`, matching signs `[+1, -1, +1]`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        let [u, v, w] = self.triangles[t];
        [self.edge_index[&[v, w]], self.edge_index[&[u, w]], self.edge_index[&[u, v]]]
    }

    /// Edges that are not a face of any triangle.
    pub fn bare_edges(&self) -> Vec<[usize; 2]> {
        let mut covered = vec![false; self.edges.len()];
        for t in 0..self.triangles.len() {
            for e in self.triangle_edges(t) {
                covered[e] = true;
            }
        }
        self.edges.iter().zip(covered).filter(|(_, c)| !c).map(|(e, _)| *e).collect()
    }

    pub fn check_triangle(&self, t: usize) -> Result<()> {
        if t < self.triangles.len() {
            Ok(())
        } else {
            Err(Error::TriangleOutOfRange { id: t, n_triangles: self.triangles.len() })
        }
    }

    /// Signed vertex-edge incidence matrix (`n_vertices x n_edges`): edge
    /// `(u, v)` has `-1` at `u` and `+1` at `v`.
    pub fn boundary_1(&self) -> &SparseOperator {
        self.b1.get_or_init(|| {
            let triplets = self
                .edges
                .iter()
                .enumerate()
                .flat_map(|(e, &[u, v])| [(u, e, -1.0), (v, e, 1.0)])
                .collect();
            SparseOperator::from_triplets(self.n_vertices, self.edges.len(), triplets)
        })
    }

    /// Edge-triangle boundary matrix (`n_edges x n_triangles`) of the full
    /// complex.
    pub fn boundary_2(&self) -> &SparseOperator {
        self.b2.get_or_init(|| {
            let triplets = (0..self.triangles.len())
                .flat_map(|t| {
                    let [vw, uw, uv] = self.triangle_edges(t);
                    [(vw, t, 1.0), (uw, t, -1.0), (uv, t, 1.0)]
                })
                .collect();
            SparseOperator::from_triplets(self.edges.len(), self.triangles.len(), triplets)
        })
    }

    /// Up-Laplacian `B2 B2^T` on edges.
    pub fn l1_up(&self) -> &SparseOperator {
        self.l1_up.get_or_init(|| {
            let b2 = self.boundary_2();
            b2.matmul(&b2.transpose())
        })
    }

    /// Hodge Laplacian `B1^T B1 + B2 B2^T`.
    pub fn hodge_laplacian_1(&self) -> SparseOperator {
        let b1 = self.boundary_1();
        b1.transpose().matmul(b1).add(self.l1_up())
    }

    /// Triangle adjacency through shared edges. Lists are sorted and never
    /// contain the triangle itself.
    pub fn triangle_adjacency(&self) -> Vec<Vec<usize>> {
        let b2 = self.boundary_2();
        let mut adj = vec![Vec::new(); self.triangles.len()];
        for e in 0..self.edges.len() {
            let cofaces: Vec<usize> = b2.row(e).map(|(t, _)| t).collect();
            for &a in &cofaces {
                for &b in &cofaces {
                    if a != b {
                        adj[a].push(b);
                    }
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Undirected vertex adjacency lists `(neighbor, edge id)`, sorted by
    /// neighbor.
    pub fn vertex_adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for (e, &[u, v]) in self.edges.iter().enumerate() {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn punctured(&self, removed: impl IntoIterator<Item = usize>) -> Result<PuncturedComplex<'_>> {
        PuncturedComplex::new(self, removed)
    }
}

/// A complex with some triangles deleted. Never copies the base complex.
#[derive(Clone, Debug)]
pub struct PuncturedComplex<'a> {
    base: &'a SimplicialComplex2,
    removed: BTreeSet<usize>,
}

impl<'a> PuncturedComplex<'a> {
    pub fn new(base: &'a SimplicialComplex2, removed: impl IntoIterator<Item = usize>) -> Result<Self> {
        let removed: BTreeSet<usize> = removed.into_iter().collect();
        for &t in &removed {
            base.check_triangle(t)?;
        }
        Ok(PuncturedComplex { base, removed })
    }

    pub fn base(&self) -> &'a SimplicialComplex2 {
        self.base
    }

    pub fn removed(&self) -> &BTreeSet<usize> {
        &self.removed
    }

    /// Base ids of the kept triangles, ascending.
    pub fn kept_triangles(&self) -> Vec<usize> {
        (0..self.base.n_triangles()).filter(|t| !self.removed.contains(t)).collect()
    }

    /// Boundary matrix restricted to kept triangles (`n_edges x n_kept`),
    /// columns in ascending base-id order.
    pub fn boundary_2(&self) -> SparseOperator {
        let full = self.base.boundary_2();
        let mut triplets = Vec::with_capacity(3 * full.cols());
        for (col, t) in self.kept_triangles().into_iter().enumerate() {
            triplets.extend(full.column(t).map(|(e, v)| (e, col, v)));
        }
        SparseOperator::from_triplets(self.base.n_edges(), full.cols() - self.removed.len(), triplets)
    }

    /// Hodge Laplacian of the punctured complex.
    pub fn hodge_laplacian_1(&self) -> SparseOperator {
        let b1 = self.base.boundary_1();
        let b2 = self.boundary_2();
        b1.transpose().matmul(b1).add(&b2.matmul(&b2.transpose()))
    }
}

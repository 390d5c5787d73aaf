//! Dijkstra shortest paths and weight-inflated path families.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::SimplicialComplex2;
use crate::error::{Error, Result};
use crate::flow::Trajectory;

#[derive(Clone, Copy, PartialEq)]
struct State {
    cost: f64,
    v: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost, then on vertex id
        other.cost.total_cmp(&self.cost).then_with(|| other.v.cmp(&self.v))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Vertex sequence of a minimum-weight path from `s` to `e`.
///
/// `adj[v]` lists `(neighbour, edge id)`; `weights` is indexed by edge id and
/// must be non-negative. Equal-cost alternatives resolve to the first one
/// settled, which is deterministic for fixed inputs.
pub fn shortest_path(adj: &[Vec<(usize, usize)>], weights: &[f64], s: usize, e: usize) -> Result<Vec<usize>> {
    let n = adj.len();
    for v in [s, e] {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n_vertices: n });
        }
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(State { cost: 0.0, v: s });
    while let Some(State { cost, v }) = heap.pop() {
        if v == e {
            break;
        }
        if cost > dist[v] {
            continue;
        }
        for &(u, edge) in &adj[v] {
            let next = cost + weights[edge];
            if next < dist[u] {
                dist[u] = next;
                prev[u] = v;
                heap.push(State { cost: next, v: u });
            }
        }
    }
    if !dist[e].is_finite() {
        return Err(Error::Disconnected { from: s, to: e });
    }
    let mut path = vec![e];
    while let Some(&v) = path.last() {
        if v == s {
            break;
        }
        path.push(prev[v]);
    }
    path.reverse();
    Ok(path)
}

/// Euclidean edge lengths of a complex with coordinates.
pub fn edge_lengths(sc: &SimplicialComplex2) -> Result<Vec<f64>> {
    let xy = sc.coords().ok_or_else(|| Error::InvalidArgument("complex has no coordinates".into()))?;
    Ok(sc.edges().iter().map(|&[u, v]| (xy[u][0] - xy[v][0]).hypot(xy[u][1] - xy[v][1])).collect())
}

/// `n_paths` successive shortest paths from `s` to `e`, starting from Euclidean
/// weights and multiplying the weight of every used edge by `alpha` after each
/// path.
pub fn endpoint_paths(sc: &SimplicialComplex2, s: usize, e: usize, n_paths: usize, alpha: f64) -> Result<Vec<Vec<usize>>> {
    if alpha < 1.0 || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("weight inflation must be finite and >= 1, got {alpha}")));
    }
    let adj = sc.vertex_adjacency();
    let mut w = edge_lengths(sc)?;
    let mut out = Vec::with_capacity(n_paths);
    for _ in 0..n_paths {
        let path = shortest_path(&adj, &w, s, e)?;
        for pair in path.windows(2) {
            let id = sc.edge_id(pair[0], pair[1]).expect("path follows edges");
            w[id] *= alpha;
        }
        out.push(path);
    }
    Ok(out)
}

/// Start and end vertices of a class: a random side of the unit square, and
/// vertices within `margin` of that side and of the opposite side.
pub fn sample_endpoints(sc: &SimplicialComplex2, rng: &mut ChaCha8Rng, margin: f64) -> Result<(usize, usize)> {
    let xy = sc.coords().ok_or_else(|| Error::InvalidArgument("complex has no coordinates".into()))?;
    let side: usize = rng.gen_range(0..4);
    let pick = |side: usize, rng: &mut ChaCha8Rng| {
        // distance to side: 0 left, 1 right, 2 bottom, 3 top
        let dist = |p: [f64; 2]| match side {
            0 => p[0],
            1 => 1.0 - p[0],
            2 => p[1],
            _ => 1.0 - p[1],
        };
        let strip: Vec<usize> = (0..xy.len()).filter(|&v| dist(xy[v]) < margin).collect();
        if strip.is_empty() {
            (0..xy.len()).min_by(|&a, &b| dist(xy[a]).total_cmp(&dist(xy[b]))).unwrap()
        } else {
            strip[rng.gen_range(0..strip.len())]
        }
    };
    let s = pick(side, rng);
    let e = pick(side ^ 1, rng);
    if s == e {
        return Err(Error::InvalidArgument("start and end coincide".into()));
    }
    Ok((s, e))
}

/// One trajectory class: shared random endpoints on opposite boundary strips
/// and `n_paths` weight-inflated shortest paths between them.
pub fn trajectory_class(
    sc: &SimplicialComplex2,
    class_seed: u64,
    n_paths: usize,
    alpha: f64,
    margin: f64,
) -> Result<Vec<Trajectory>> {
    if n_paths == 0 {
        return Err(Error::InvalidArgument("n_paths must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(class_seed);
    let (s, e) = sample_endpoints(sc, &mut rng, margin)?;
    Ok(endpoint_paths(sc, s, e, n_paths, alpha)?.into_iter().map(Trajectory::new).collect())
}

//! Incremental Bowyer–Watson Delaunay triangulation on exact predicates.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust::{incircle, orient2d, Coord};

use crate::complex::{build_complex, SimplicialComplex2};
use crate::error::{Error, Result};

/// Half-width of the enclosing super-triangle, in units of the input extent.
const SUPER_SCALE: f64 = 1e6;

fn c(p: [f64; 2]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

struct Mesh {
    pts: Vec<[f64; 2]>,
    tris: Vec<[usize; 3]>,
    alive: Vec<bool>,
    /// directed edge (a, b) of a counter-clockwise triangle -> that triangle
    owner: HashMap<(usize, usize), usize>,
    last: usize,
}

impl Mesh {
    fn orient(&self, a: usize, b: usize, p: [f64; 2]) -> f64 {
        orient2d(c(self.pts[a]), c(self.pts[b]), c(p))
    }

    fn in_circle(&self, t: usize, p: [f64; 2]) -> bool {
        let [a, b, d] = self.tris[t];
        incircle(c(self.pts[a]), c(self.pts[b]), c(self.pts[d]), c(p)) > 0.0
    }

    fn add(&mut self, t: [usize; 3]) -> usize {
        let id = self.tris.len();
        self.tris.push(t);
        self.alive.push(true);
        for i in 0..3 {
            self.owner.insert((t[i], t[(i + 1) % 3]), id);
        }
        id
    }

    fn kill(&mut self, id: usize) {
        self.alive[id] = false;
        let t = self.tris[id];
        for i in 0..3 {
            self.owner.remove(&(t[i], t[(i + 1) % 3]));
        }
    }

    fn across(&self, a: usize, b: usize) -> Option<usize> {
        self.owner.get(&(b, a)).copied()
    }

    /// Visibility walk from the last inserted triangle, with a linear scan as
    /// a fallback.
    fn locate(&self, p: [f64; 2]) -> usize {
        let mut t = self.last;
        let cap = self.tris.len() + 8;
        'walk: for _ in 0..cap {
            let tri = self.tris[t];
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                if self.orient(a, b, p) < 0.0 {
                    match self.across(a, b) {
                        Some(n) => {
                            t = n;
                            continue 'walk;
                        }
                        None => break 'walk,
                    }
                }
            }
            return t;
        }
        (0..self.tris.len())
            .filter(|&t| self.alive[t])
            .find(|&t| {
                let tri = self.tris[t];
                (0..3).all(|i| self.orient(tri[i], tri[(i + 1) % 3], p) >= 0.0)
            })
            .expect("point lies inside the super-triangle")
    }

    fn insert(&mut self, v: usize) -> Result<()> {
        let p = self.pts[v];
        let start = self.locate(p);
        let mut cavity = vec![start];
        let mut seen = HashMap::from([(start, true)]);
        let mut i = 0;
        while i < cavity.len() {
            let tri = self.tris[cavity[i]];
            i += 1;
            for k in 0..3 {
                if let Some(n) = self.across(tri[k], tri[(k + 1) % 3]) {
                    if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(n) {
                        let inside = self.in_circle(n, p);
                        e.insert(inside);
                        if inside {
                            cavity.push(n);
                        }
                    }
                }
            }
        }
        let mut rim = Vec::new();
        for &t in &cavity {
            let tri = self.tris[t];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let inner = self.across(a, b).is_some_and(|n| seen.get(&n) == Some(&true));
                if !inner {
                    rim.push((a, b));
                }
            }
        }
        if rim.iter().any(|&(a, b)| self.orient(a, b, p) <= 0.0) {
            return Err(Error::InvalidArgument(format!("cavity of point {v} is not star-shaped")));
        }
        for &t in &cavity {
            self.kill(t);
        }
        for (a, b) in rim {
            self.last = self.add([a, b, v]);
        }
        Ok(())
    }
}

/// Delaunay triangles (counter-clockwise, input indices) of a planar point
/// set. Exact duplicates are inserted once; the later copies stay isolated.
/// Cocircular ties keep the first triangulation found, so the empty-circle
/// property holds non-strictly.
pub fn delaunay_triangles(points: &[[f64; 2]]) -> Result<Vec<[usize; 3]>> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 points, got {}", points.len())));
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite point coordinate".into()));
    }
    let p0 = points[0];
    let p1 = points.iter().copied().find(|&p| p != p0);
    let general = p1.is_some_and(|p1| points.iter().any(|&q| orient2d(c(p0), c(p1), c(q)) != 0.0));
    if !general {
        return Err(Error::Collinear);
    }

    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let r = SUPER_SCALE * (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let n = points.len();
    let mut pts = points.to_vec();
    pts.push([mid[0] - 2.0 * r, mid[1] - r]);
    pts.push([mid[0] + 2.0 * r, mid[1] - r]);
    pts.push([mid[0], mid[1] + 2.0 * r]);

    let mut mesh = Mesh { pts, tris: Vec::new(), alive: Vec::new(), owner: HashMap::new(), last: 0 };
    mesh.add([n, n + 1, n + 2]);

    let mut first_at: HashMap<(u64, u64), usize> = HashMap::new();
    for v in 0..n {
        let key = (points[v][0].to_bits(), points[v][1].to_bits());
        if first_at.insert(key, v).is_some() {
            continue;
        }
        mesh.insert(v)?;
    }

    let mut out: Vec<[usize; 3]> = (0..mesh.tris.len())
        .filter(|&t| mesh.alive[t])
        .map(|t| mesh.tris[t])
        .filter(|t| t.iter().all(|&v| v < n))
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// `n` points drawn uniformly from the unit square.
pub fn uniform_points(n: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect()
}

/// Delaunay complex of the given points with every triangle filled and the
/// coordinates attached.
pub fn complex_from_points(points: &[[f64; 2]]) -> Result<SimplicialComplex2> {
    let tris = delaunay_triangles(points)?;
    build_complex(points.len(), &tris, &[])?.with_coords(points.to_vec())
}

/// Delaunay complex of `n_points` seeded uniform points in the unit square.
pub fn delaunay_complex(n_points: usize, seed: u64) -> Result<SimplicialComplex2> {
    complex_from_points(&uniform_points(n_points, seed))
}

//! Regional hexagonal grids and the discretization of raw point tracks onto
//! their triangulation.
//!
//! Hex cells are pointy-top with circumradius `R = cell_diameter / 2`, laid
//! out in the equirectangular plane `x = lon * cos(ref_lat)`, `y = lat`. Cell
//! centers and corners together form a triangular lattice of spacing `R`
//! anchored at the origin; each cell is split into six triangles around its
//! center.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::complex::{build_complex, SimplicialComplex2};
use crate::datagen::paths::shortest_path;
use crate::error::{Error, Result};
use crate::flow::Trajectory;
use crate::io::PointTrack;

const SQRT3: f64 = 1.732_050_807_568_877_2;
/// Corner offsets of a cell in lattice units, counter-clockwise from 30 degrees.
const CORNERS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min_lon: f64,
    pub min_lat: f64,
    pub max_lon: f64,
    pub max_lat: f64,
}

impl BBox {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.min_lon && p[0] <= self.max_lon && p[1] >= self.min_lat && p[1] <= self.max_lat
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub bbox: BBox,
    /// Corner-to-corner hex diameter in degrees.
    pub cell_diameter: f64,
    /// Polygons of `[lon, lat]` vertices.
    #[serde(default)]
    pub land_mask: Vec<Vec<[f64; 2]>>,
    /// Remove the triangles of cells whose center lies on land.
    #[serde(default)]
    pub apply_land_mask: bool,
    /// Latitude of the longitude scaling; the box's mean latitude if unset.
    #[serde(default)]
    pub reference_lat: Option<f64>,
}

impl GridSpec {
    pub fn new(bbox: BBox, cell_diameter: f64) -> Self {
        GridSpec { bbox, cell_diameter, land_mask: Vec::new(), apply_land_mask: false, reference_lat: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cell_diameter > 0.0 && self.cell_diameter.is_finite()) {
            return Err(Error::InvalidArgument(format!("cell diameter must be positive, got {}", self.cell_diameter)));
        }
        let b = self.bbox;
        if !(b.min_lon < b.max_lon && b.min_lat < b.max_lat) {
            return Err(Error::InvalidArgument("bounding box is empty".into()));
        }
        if b.min_lat < -90.0 || b.max_lat > 90.0 {
            return Err(Error::InvalidArgument("latitudes must lie in [-90, 90]".into()));
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        let lat = self.reference_lat.unwrap_or(0.5 * (self.bbox.min_lat + self.bbox.max_lat));
        lat.to_radians().cos().max(1e-6)
    }
}

/// A hex grid triangulation plus the lattice bookkeeping needed to map points.
#[derive(Clone, Debug)]
pub struct HexGrid {
    pub complex: SimplicialComplex2,
    /// Lattice key `(a, b)` of each vertex.
    pub keys: Vec<(i64, i64)>,
    /// Vertex ids of cell centers.
    pub centers: Vec<usize>,
    index: HashMap<(i64, i64), usize>,
    radius: f64,
    scale: f64,
}

impl HexGrid {
    fn to_plane(&self, p: [f64; 2]) -> [f64; 2] {
        [p[0] * self.scale, p[1]]
    }

    /// Nearest grid vertex to a `[lon, lat]` point, if the grid has one among
    /// the lattice points surrounding it.
    pub fn nearest_vertex(&self, p: [f64; 2]) -> Option<usize> {
        let [x, y] = self.to_plane(p);
        let r = self.radius;
        let af = x / (SQRT3 * r / 2.0);
        let bf = y / r - af / 2.0;
        let (a0, b0) = (af.floor() as i64, bf.floor() as i64);
        let mut best: Option<(f64, usize)> = None;
        for da in -1..=2 {
            for db in -1..=2 {
                let key = (a0 + da, b0 + db);
                if let Some(&v) = self.index.get(&key) {
                    let q = lattice_xy(key, r);
                    let d = (q[0] - x).powi(2) + (q[1] - y).powi(2);
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, v));
                    }
                }
            }
        }
        best.map(|(_, v)| v)
    }
}

fn lattice_xy((a, b): (i64, i64), r: f64) -> [f64; 2] {
    [a as f64 * SQRT3 * r / 2.0, (a as f64 / 2.0 + b as f64) * r]
}

fn point_in_polygon(p: [f64; 2], poly: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + n - 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0] {
            inside = !inside;
        }
    }
    inside
}

/// Builds the grid: every cell whose center lies in the bounding box grown by
/// one circumradius, fanned into six triangles.
pub fn build_hex_grid(spec: &GridSpec) -> Result<HexGrid> {
    spec.validate()?;
    let scale = spec.scale();
    let r = spec.cell_diameter / 2.0;
    let b = spec.bbox;
    let (x0, x1) = (b.min_lon * scale - r, b.max_lon * scale + r);
    let (y0, y1) = (b.min_lat - r, b.max_lat + r);
    let (r0, r1) = ((y0 / (1.5 * r)).ceil() as i64, (y1 / (1.5 * r)).floor() as i64);
    let mut cells = Vec::new();
    for row in r0..=r1 {
        let q_lo = (x0 / (SQRT3 * r) - row as f64 / 2.0).ceil() as i64;
        let q_hi = (x1 / (SQRT3 * r) - row as f64 / 2.0).floor() as i64;
        for q in q_lo..=q_hi {
            cells.push((2 * q + row, row - q));
        }
    }
    if cells.is_empty() {
        return Err(Error::InvalidArgument("bounding box holds no hex cell".into()));
    }

    let mut keys: BTreeSet<(i64, i64)> = BTreeSet::new();
    for &(a, bb) in &cells {
        keys.insert((a, bb));
        for (da, db) in CORNERS {
            keys.insert((a + da, bb + db));
        }
    }
    // row-major vertex order: by b then a
    let mut keys: Vec<(i64, i64)> = keys.into_iter().collect();
    keys.sort_by_key(|&(a, bb)| (bb, a));
    let index: HashMap<(i64, i64), usize> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();

    let centers: Vec<usize> = cells.iter().map(|k| index[k]).collect();
    let coords: Vec<[f64; 2]> = keys
        .iter()
        .map(|&k| {
            let [x, y] = lattice_xy(k, r);
            [x / scale, y]
        })
        .collect();

    let mut triangles = Vec::new();
    let mut bare = Vec::new();
    for (ci, &(a, bb)) in cells.iter().enumerate() {
        let c = centers[ci];
        let masked = spec.apply_land_mask && spec.land_mask.iter().any(|poly| point_in_polygon(coords[c], poly));
        for i in 0..6 {
            let (da, db) = CORNERS[i];
            let (ea, eb) = CORNERS[(i + 1) % 6];
            let u = index[&(a + da, bb + db)];
            let v = index[&(a + ea, bb + eb)];
            if masked {
                bare.push([c, u]);
                bare.push([u, v]);
            } else {
                triangles.push([c, u, v]);
            }
        }
    }
    // masked edges shared with kept cells are already implied by triangles
    let mut implied: BTreeSet<[usize; 2]> = BTreeSet::new();
    for t in &triangles {
        let mut s = *t;
        s.sort_unstable();
        implied.extend([[s[0], s[1]], [s[0], s[2]], [s[1], s[2]]]);
    }
    let mut extra: Vec<[usize; 2]> = bare
        .into_iter()
        .map(|[u, v]| [u.min(v), u.max(v)])
        .filter(|e| !implied.contains(e))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    extra.sort_unstable();
    let complex = build_complex(keys.len(), &triangles, &extra)?.with_coords(coords)?;
    Ok(HexGrid { complex, keys, centers, index, radius: r, scale })
}

#[derive(Clone, Debug)]
pub struct IngestResult {
    pub grid: HexGrid,
    pub trajectories: Vec<Trajectory>,
    /// Source track id of each trajectory.
    pub track_ids: Vec<String>,
    pub dropped_points: usize,
    /// `(track id, reason)` of tracks that produced no usable trajectory.
    pub dropped_tracks: Vec<(String, String)>,
}

/// Discretizes tracks onto the grid: snap points to their nearest vertex,
/// collapse repeats, and join non-adjacent consecutive vertices by shortest
/// grid paths. Points outside the box are dropped and counted.
pub fn ingest_points(tracks: &[PointTrack], spec: &GridSpec) -> Result<IngestResult> {
    let grid = build_hex_grid(spec)?;
    let sc = &grid.complex;
    let adj = sc.vertex_adjacency();
    let xy = sc.coords().expect("grid has coordinates");
    let weights: Vec<f64> = sc
        .edges()
        .iter()
        .map(|&[u, v]| {
            let (p, q) = (grid.to_plane(xy[u]), grid.to_plane(xy[v]));
            (p[0] - q[0]).hypot(p[1] - q[1])
        })
        .collect();

    let mut out = IngestResult {
        trajectories: Vec::new(),
        track_ids: Vec::new(),
        dropped_points: 0,
        dropped_tracks: Vec::new(),
        grid: grid.clone(),
    };
    for track in tracks {
        let mut snapped: Vec<usize> = Vec::new();
        for &p in &track.points {
            let v = if spec.bbox.contains(p) { grid.nearest_vertex(p) } else { None };
            match v {
                Some(v) if snapped.last() != Some(&v) => snapped.push(v),
                Some(_) => {}
                None => out.dropped_points += 1,
            }
        }
        if snapped.is_empty() {
            out.dropped_tracks.push((track.id.clone(), "no points inside the bounding box".into()));
            continue;
        }
        if snapped.len() == 1 {
            out.dropped_tracks.push((track.id.clone(), "track stays at a single grid vertex".into()));
            continue;
        }
        let mut path = vec![snapped[0]];
        for pair in snapped.windows(2) {
            if sc.edge_id(pair[0], pair[1]).is_some() {
                path.push(pair[1]);
            } else {
                let link = shortest_path(&adj, &weights, pair[0], pair[1])?;
                path.extend_from_slice(&link[1..]);
            }
        }
        out.trajectories.push(Trajectory::new(path));
        out.track_ids.push(track.id.clone());
    }
    if out.trajectories.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no track survived ingestion ({} dropped)",
            out.dropped_tracks.len()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::flow_embed;
    use crate::topology::betti_numbers;

    fn spec() -> GridSpec {
        GridSpec::new(BBox { min_lon: 0.0, min_lat: 0.0, max_lon: 10.0, max_lat: 10.0 }, 1.0)
    }

    #[test]
    fn grid_is_a_disk_of_fans() {
        let g = build_hex_grid(&spec()).unwrap();
        let sc = &g.complex;
        assert_eq!(sc.n_triangles(), 6 * g.centers.len());
        let p = sc.punctured([]).unwrap();
        assert_eq!(betti_numbers(&p).unwrap(), (1, 0));
        for &c in &g.centers {
            assert_eq!(sc.vertex_adjacency()[c].len(), 6);
        }
    }

    #[test]
    fn single_vertex_track_dropped() {
        let g = build_hex_grid(&spec()).unwrap();
        let c = g.complex.coords().unwrap()[g.centers[40]];
        let tracks = vec![
            PointTrack { id: "still".into(), points: vec![c, [c[0] + 0.01, c[1]], [c[0], c[1] - 0.01]] },
            PointTrack { id: "moving".into(), points: vec![[1.0, 1.0], [8.0, 7.5]] },
        ];
        let res = ingest_points(&tracks, &spec()).unwrap();
        assert_eq!(res.trajectories.len(), 1);
        assert_eq!(res.dropped_tracks[0].0, "still");
    }

    #[test]
    fn neighbouring_vertices_give_one_edge() {
        let g = build_hex_grid(&spec()).unwrap();
        let xy = g.complex.coords().unwrap();
        let c = g.centers[40];
        let (nb, _) = g.complex.vertex_adjacency()[c][0];
        let tracks = vec![PointTrack { id: "t".into(), points: vec![xy[c], xy[nb]] }];
        let res = ingest_points(&tracks, &spec()).unwrap();
        assert_eq!(res.trajectories[0].n_steps(), 1);
    }

    #[test]
    fn spiral_has_divergence_only_at_endpoints() {
        let points: Vec<[f64; 2]> = (0..200)
            .map(|i| {
                let t = i as f64 * 0.08;
                let r = 0.4 * t;
                [5.0 + r * t.cos(), 5.0 + r * t.sin()]
            })
            .collect();
        let res = ingest_points(&[PointTrack { id: "s".into(), points }], &spec()).unwrap();
        let sc = &res.grid.complex;
        let t = &res.trajectories[0];
        let f = flow_embed(t, sc).unwrap();
        let div = sc.boundary_1().mul_vec(&f);
        let nz: Vec<(usize, f64)> = div.iter().enumerate().filter(|(_, d)| d.abs() > 1e-12).map(|(i, d)| (i, *d)).collect();
        assert_eq!(nz.len(), 2);
        assert!(nz.contains(&(t.vertices[0], -1.0)));
        assert!(nz.contains(&(*t.vertices.last().unwrap(), 1.0)));
    }

    #[test]
    fn shrinking_box_keeps_vertices() {
        let mut small = spec();
        small.reference_lat = Some(5.0);
        let mut big = small.clone();
        small.bbox = BBox { min_lon: 2.0, min_lat: 3.0, max_lon: 7.0, max_lat: 6.0 };
        let (gs, gb) = (build_hex_grid(&small).unwrap(), build_hex_grid(&big).unwrap());
        assert!(gs.keys.iter().all(|k| gb.keys.contains(k)));
        big.bbox.max_lon = 10.5;
        assert!(build_hex_grid(&big).unwrap().keys.len() >= gb.keys.len());
    }

    #[test]
    fn land_mask_removes_triangles_only() {
        let mut s = spec();
        s.land_mask = vec![vec![[4.0, 4.0], [6.0, 4.0], [6.0, 6.0], [4.0, 6.0]]];
        let open = build_hex_grid(&s).unwrap();
        s.apply_land_mask = true;
        let masked = build_hex_grid(&s).unwrap();
        assert!(masked.complex.n_triangles() < open.complex.n_triangles());
        assert_eq!(masked.complex.n_edges(), open.complex.n_edges());
        let p = masked.complex.punctured([]).unwrap();
        assert_eq!(betti_numbers(&p).unwrap().0, 1);
    }

    #[test]
    fn polygon_containment() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!(point_in_polygon([0.5, 0.5], &sq));
        assert!(!point_in_polygon([1.5, 0.5], &sq));
    }
}

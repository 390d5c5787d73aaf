//! Text file formats: complex documents, trajectory lines, reports, trace
//! exports and raw point tracks.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complex::{build_complex, SimplicialComplex2};
use crate::error::{Error, Result};
use crate::flow::Trajectory;
use crate::harmonic::HarmonicBasis;
use crate::search::SearchTrace;

/// Writes `bytes` next to `path` under a temporary name, then renames it into
/// place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().ok_or_else(|| Error::InvalidArgument(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Hex SHA-256 of the compact JSON form of `value`.
pub fn config_hash<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// On-disk form of a complex. Edges implied by triangles are not listed;
/// `extra_edges` holds the bare ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub n_vertices: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<[f64; 2]>>,
    pub triangles: Vec<[usize; 3]>,
    #[serde(default)]
    pub extra_edges: Vec<[usize; 2]>,
}

impl ComplexDoc {
    pub fn from_complex(sc: &SimplicialComplex2) -> Self {
        ComplexDoc {
            n_vertices: sc.n_vertices(),
            coords: sc.coords().map(<[_]>::to_vec),
            triangles: sc.triangles().to_vec(),
            extra_edges: sc.bare_edges(),
        }
    }

    pub fn to_complex(&self) -> Result<SimplicialComplex2> {
        let sc = build_complex(self.n_vertices, &self.triangles, &self.extra_edges)?;
        match &self.coords {
            Some(c) => sc.with_coords(c.clone()),
            None => Ok(sc),
        }
    }
}

pub fn write_complex(path: &Path, sc: &SimplicialComplex2) -> Result<()> {
    write_json(path, &ComplexDoc::from_complex(sc))
}

pub fn read_complex(path: &Path) -> Result<SimplicialComplex2> {
    read_json::<ComplexDoc>(path)?.to_complex()
}

#[derive(Serialize, Deserialize)]
struct TrajectoryRecord {
    v: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<usize>,
}

/// One JSON object per line: `{"v": [...], "label": 2}`. Blank lines are
/// skipped.
pub fn parse_trajectories(text: &str) -> Result<Vec<Trajectory>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let rec: TrajectoryRecord =
            serde_json::from_str(line).map_err(|e| Error::Format(format!("trajectory line {}: {e}", i + 1)))?;
        out.push(Trajectory { vertices: rec.v, label: rec.label });
    }
    Ok(out)
}

pub fn format_trajectories(ts: &[Trajectory]) -> Result<String> {
    let mut s = String::new();
    for t in ts {
        s += &serde_json::to_string(&TrajectoryRecord { v: t.vertices.clone(), label: t.label })?;
        s.push('\n');
    }
    Ok(s)
}

pub fn read_trajectories(path: &Path) -> Result<Vec<Trajectory>> {
    parse_trajectories(&fs::read_to_string(path)?)
}

pub fn write_trajectories(path: &Path, ts: &[Trajectory]) -> Result<()> {
    write_atomic(path, format_trajectories(ts)?.as_bytes())
}

/// A chosen hole: its triangle, vertices and nonzero harmonic entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandmarkRecord {
    pub triangle: usize,
    pub vertices: [usize; 3],
    pub harmonic: Vec<(usize, f64)>,
}

pub fn landmark_records(sc: &SimplicialComplex2, basis: &HarmonicBasis) -> Vec<LandmarkRecord> {
    basis
        .columns()
        .iter()
        .map(|h| LandmarkRecord { triangle: h.hole, vertices: sc.triangles()[h.hole], harmonic: h.sparse_entries() })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub landmarks: Vec<LandmarkRecord>,
    pub score_trace: Vec<(usize, f64)>,
    pub ari: Option<f64>,
    pub accuracy: Option<f64>,
    pub config_hash: String,
    pub seed: u64,
    pub mode: String,
    pub tau: f64,
    pub final_score: f64,
    pub evaluations: usize,
    pub cache_hits: usize,
    pub hit_max_steps: bool,
}

#[derive(Serialize, Deserialize)]
struct TraceRecord {
    step: usize,
    tuple: Vec<usize>,
    score: f64,
    cache_hits: usize,
}

/// Line-oriented goal-function trace: `{"step", "tuple", "score", "cache_hits"}`.
pub fn format_trace(trace: &SearchTrace) -> Result<String> {
    let mut s = String::new();
    for e in &trace.entries {
        s += &serde_json::to_string(&TraceRecord {
            step: e.step,
            tuple: e.holes.clone(),
            score: e.score,
            cache_hits: e.cache_hits,
        })?;
        s.push('\n');
    }
    Ok(s)
}

/// Raw positions of one drifting object, `[lon, lat]` in time order.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTrack {
    pub id: String,
    pub points: Vec<[f64; 2]>,
}

/// Parses `id, timestamp, lon, lat` lines. A first line whose coordinates do
/// not parse is taken as a header. Tracks keep first-appearance order; points
/// are ordered by timestamp (numeric when every timestamp parses as a number,
/// lexicographic otherwise).
pub fn parse_tracks(text: &str) -> Result<Vec<PointTrack>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows: Vec<(String, String, [f64; 2])> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 4 {
            return Err(Error::Format(format!("track line {}: expected 4 fields, got {}", i + 1, rec.len())));
        }
        let coords = (rec[2].parse::<f64>(), rec[3].parse::<f64>());
        match coords {
            (Ok(lon), Ok(lat)) => rows.push((rec[0].to_string(), rec[1].to_string(), [lon, lat])),
            _ if i == 0 => continue,
            _ => return Err(Error::Format(format!("track line {}: bad coordinates", i + 1))),
        }
    }
    let numeric = rows.iter().all(|r| r.1.parse::<f64>().is_ok());
    let mut order: Vec<String> = Vec::new();
    let mut grouped: std::collections::HashMap<String, Vec<(String, [f64; 2])>> = Default::default();
    for (id, ts, p) in rows {
        if !grouped.contains_key(&id) {
            order.push(id.clone());
        }
        grouped.entry(id).or_default().push((ts, p));
    }
    Ok(order
        .into_iter()
        .map(|id| {
            let mut pts = grouped.remove(&id).unwrap();
            if numeric {
                pts.sort_by(|a, b| a.0.parse::<f64>().unwrap().total_cmp(&b.0.parse::<f64>().unwrap()));
            } else {
                pts.sort_by(|a, b| a.0.cmp(&b.0));
            }
            PointTrack { id, points: pts.into_iter().map(|(_, p)| p).collect() }
        })
        .collect())
}

pub fn read_tracks(path: &Path) -> Result<Vec<PointTrack>> {
    parse_tracks(&fs::read_to_string(path)?)
}

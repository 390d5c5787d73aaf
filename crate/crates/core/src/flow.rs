//! Trajectories as signed edge flows, and their curl-only diffusion.

use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex2;
use crate::error::{Error, Result};
use crate::expm::{expm_action_columns, largest_eigenvalue};

/// A walk on the vertices of a complex, optionally labelled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub vertices: Vec<usize>,
    pub label: Option<usize>,
}

impl Trajectory {
    pub fn new(vertices: Vec<usize>) -> Self {
        Trajectory { vertices, label: None }
    }

    pub fn labelled(vertices: Vec<usize>, label: usize) -> Self {
        Trajectory { vertices, label: Some(label) }
    }

    pub fn n_steps(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }
}

/// A real signal on the oriented edges of a complex, indexed by edge id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeFlow(pub Vec<f64>);

impl std::ops::Deref for EdgeFlow {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// One edge flow per trajectory, in trajectory order.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowMatrix {
    n_edges: usize,
    columns: Vec<Vec<f64>>,
}

impl FlowMatrix {
    pub fn new(n_edges: usize, columns: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(c) = columns.iter().find(|c| c.len() != n_edges) {
            return Err(Error::DimensionMismatch { expected: n_edges, got: c.len() });
        }
        Ok(FlowMatrix { n_edges, columns })
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn n_flows(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// Columns `idx` in the given order.
    pub fn select(&self, idx: &[usize]) -> FlowMatrix {
        FlowMatrix { n_edges: self.n_edges, columns: idx.iter().map(|&i| self.columns[i].clone()).collect() }
    }
}

fn embed_at(t: &Trajectory, index: usize, sc: &SimplicialComplex2) -> Result<EdgeFlow> {
    if t.vertices.len() < 2 {
        return Err(Error::EmptyTrajectory { index });
    }
    let mut f = vec![0.0; sc.n_edges()];
    for w in t.vertices.windows(2) {
        let (a, b) = (w[0], w[1]);
        let e = sc.edge_id(a, b).ok_or(Error::InvalidTrajectory { index, from: a, to: b })?;
        f[e] += if a < b { 1.0 } else { -1.0 };
    }
    Ok(EdgeFlow(f))
}

/// Signed traversal counts: `+1` per step from the lower to the higher vertex
/// of an edge, `-1` per step the other way.
pub fn flow_embed(t: &Trajectory, sc: &SimplicialComplex2) -> Result<EdgeFlow> {
    embed_at(t, 0, sc)
}

/// Embeds every trajectory; errors carry the offending trajectory's index.
pub fn flow_matrix(ts: &[Trajectory], sc: &SimplicialComplex2) -> Result<FlowMatrix> {
    let columns = ts
        .iter()
        .enumerate()
        .map(|(i, t)| embed_at(t, i, sc).map(|f| f.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(FlowMatrix { n_edges: sc.n_edges(), columns })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSettings {
    /// `tau = tau_scale / lambda_max(L1_up)`.
    pub tau_scale: f64,
    pub rel_tol: f64,
}

impl Default for DiffusionSettings {
    fn default() -> Self {
        DiffusionSettings { tau_scale: 2.0, rel_tol: 1e-7 }
    }
}

/// Diffusion time scaled by the spectral radius of the up-Laplacian. Zero
/// when the complex has no triangles.
pub fn default_tau(sc: &SimplicialComplex2, tau_scale: f64) -> f64 {
    let lambda = largest_eigenvalue(sc.l1_up());
    if lambda > 0.0 {
        tau_scale / lambda
    } else {
        0.0
    }
}

/// Replaces every flow `f` by `exp(-tau L1_up) f`. Gradient and harmonic
/// components of the complex are left untouched.
pub fn diffuse(flows: &FlowMatrix, sc: &SimplicialComplex2, tau: f64) -> Result<FlowMatrix> {
    diffuse_with_tol(flows, sc, tau, DiffusionSettings::default().rel_tol)
}

pub fn diffuse_with_tol(flows: &FlowMatrix, sc: &SimplicialComplex2, tau: f64, rel_tol: f64) -> Result<FlowMatrix> {
    if tau < 0.0 {
        return Err(Error::NegativeTau(tau));
    }
    if flows.n_edges != sc.n_edges() {
        return Err(Error::DimensionMismatch { expected: sc.n_edges(), got: flows.n_edges });
    }
    if tau == 0.0 {
        return Ok(flows.clone());
    }
    let columns = expm_action_columns(sc.l1_up(), &flows.columns, tau, rel_tol)?;
    Ok(FlowMatrix { n_edges: flows.n_edges, columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;

    fn triangle() -> SimplicialComplex2 {
        build_complex(3, &[[0, 1, 2]], &[]).unwrap()
    }

    #[test]
    fn loop_around_triangle() {
        let sc = triangle();
        let f = flow_embed(&Trajectory::new(vec![0, 1, 2, 0]), &sc).unwrap();
        assert_eq!(f[sc.edge_id(0, 1).unwrap()], 1.0);
        assert_eq!(f[sc.edge_id(1, 2).unwrap()], 1.0);
        assert_eq!(f[sc.edge_id(0, 2).unwrap()], -1.0);
    }

    #[test]
    fn backtracking_cancels() {
        let f = flow_embed(&Trajectory::new(vec![0, 1, 0]), &triangle()).unwrap();
        assert!(f.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn double_loop_doubles() {
        let sc = triangle();
        let once = flow_embed(&Trajectory::new(vec![0, 1, 2, 0]), &sc).unwrap();
        let twice = flow_embed(&Trajectory::new(vec![0, 1, 2, 0, 1, 2, 0]), &sc).unwrap();
        for (a, b) in once.iter().zip(twice.iter()) {
            assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn invalid_steps_report_index() {
        let sc = build_complex(4, &[[0, 1, 2]], &[]).unwrap();
        let ts = vec![Trajectory::new(vec![0, 1]), Trajectory::new(vec![1, 3])];
        assert!(matches!(
            flow_matrix(&ts, &sc),
            Err(Error::InvalidTrajectory { index: 1, from: 1, to: 3 })
        ));
        assert!(matches!(
            flow_matrix(&[Trajectory::new(vec![2])], &sc),
            Err(Error::EmptyTrajectory { index: 0 })
        ));
    }

    #[test]
    fn zero_tau_is_identity() {
        let sc = triangle();
        let fm = flow_matrix(&[Trajectory::new(vec![0, 1, 2])], &sc).unwrap();
        assert_eq!(diffuse(&fm, &sc, 0.0).unwrap(), fm);
        assert!(matches!(diffuse(&fm, &sc, -0.1), Err(Error::NegativeTau(_))));
    }

    #[test]
    fn gradient_flow_is_not_diffused() {
        let sc = build_complex(4, &[[0, 1, 2], [0, 2, 3]], &[]).unwrap();
        let potential = [0.3, -1.0, 2.0, 0.5];
        let grad = sc.boundary_1().mul_vec_transpose(&potential);
        let fm = FlowMatrix::new(sc.n_edges(), vec![grad.clone()]).unwrap();
        let out = diffuse(&fm, &sc, 3.0).unwrap();
        for (a, b) in out.column(0).iter().zip(&grad) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn tau_default_uses_spectral_radius() {
        let sc = triangle();
        assert!((default_tau(&sc, 2.0) - 2.0 / 3.0).abs() < 1e-6);
        let bare = build_complex(2, &[], &[[0, 1]]).unwrap();
        assert_eq!(default_tau(&bare, 2.0), 0.0);
    }
}

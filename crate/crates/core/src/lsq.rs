//! Conjugate gradients on the normal equations (CGLS) for sparse
//! least-squares problems `min ||b - A x||_2`.
//!
//! Started from `x = 0`, CGLS stays in the row space of `A`, so on
//! rank-deficient systems it still converges to the minimum-norm solution and,
//! more importantly here, to the orthogonal projection residual.

use crate::error::{Error, Result};
use crate::sparse::{dot, norm2, LinearOperator};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LsqSettings {
    /// Stop once `||A^T r|| <= tol * ||A^T b||`.
    pub tol: f64,
    pub max_iter: usize,
}

#[derive(Clone, Debug)]
pub struct LsqSolution {
    pub x: Vec<f64>,
    /// `b - A x`, recomputed explicitly after the last iteration.
    pub residual: Vec<f64>,
    pub iterations: usize,
    /// `||A^T r|| / ||A^T b||` for the explicit residual.
    pub normal_residual: f64,
}

pub fn cgls<A: LinearOperator + ?Sized>(a: &A, b: &[f64], settings: LsqSettings) -> Result<LsqSolution> {
    let (m, n) = (a.nrows(), a.ncols());
    if b.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: b.len() });
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut s = vec![0.0; n];
    a.apply_transpose(&r, &mut s);
    let s0 = norm2(&s);
    if s0 == 0.0 {
        return Ok(LsqSolution { x, residual: r, iterations: 0, normal_residual: 0.0 });
    }
    let target = settings.tol * s0;
    let mut q = vec![0.0; m];
    let mut iterations = 0;

    // The recursively updated residual drifts from b - Ax; the outer loop
    // restarts from the explicit residual until the explicit test passes.
    loop {
        let mut p = s.clone();
        let mut gamma = dot(&s, &s);
        while iterations < settings.max_iter && gamma.sqrt() > target {
            a.apply(&p, &mut q);
            let delta = dot(&q, &q);
            if delta == 0.0 {
                break;
            }
            let alpha = gamma / delta;
            for (xi, pi) in x.iter_mut().zip(&p) {
                *xi += alpha * pi;
            }
            for (ri, qi) in r.iter_mut().zip(&q) {
                *ri -= alpha * qi;
            }
            a.apply_transpose(&r, &mut s);
            let gamma_new = dot(&s, &s);
            let beta = gamma_new / gamma;
            for (pi, si) in p.iter_mut().zip(&s) {
                *pi = si + beta * *pi;
            }
            gamma = gamma_new;
            iterations += 1;
        }

        a.apply(&x, &mut q);
        for i in 0..m {
            r[i] = b[i] - q[i];
        }
        a.apply_transpose(&r, &mut s);
        let achieved = norm2(&s);
        if achieved <= target {
            return Ok(LsqSolution { x, residual: r, iterations, normal_residual: achieved / s0 });
        }
        if iterations >= settings.max_iter {
            return Err(Error::LsqNotConverged { iterations, residual: achieved / s0 });
        }
    }
}

//! Action of the heat kernel `exp(-tau A)` of a symmetric positive
//! semidefinite sparse operator on vectors, using only matrix-vector products.
//!
//! The spectrum of `A` lies in `[0, ||A||_1]`, so shifting by `mu = ||A||_1/2`
//! leaves an operator of norm at most `mu`. The shifted exponential is applied
//! in `s` substeps of a truncated Taylor series, with `s` chosen so every
//! substep has norm at most one, and terms added until they drop below the
//! requested relative tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sparse::{norm2, LinearOperator, SparseOperator};

const MAX_TAYLOR_TERMS: usize = 60;

/// Applies `exp(-tau * op)` to `x`. `op` must be symmetric PSD.
pub fn expm_action(op: &SparseOperator, x: &[f64], tau: f64, rel_tol: f64) -> Result<Vec<f64>> {
    if tau < 0.0 {
        return Err(Error::NegativeTau(tau));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("rel_tol must be positive, got {rel_tol}")));
    }
    if x.len() != op.cols() {
        return Err(Error::DimensionMismatch { expected: op.cols(), got: x.len() });
    }
    let norm = op.norm_1();
    if tau == 0.0 || norm == 0.0 {
        return Ok(x.to_vec());
    }
    let mu = 0.5 * norm;
    let steps = (tau * mu).ceil().max(1.0) as usize;
    let h = tau / steps as f64;
    // per-substep tolerance; errors from early substeps may be damped less
    // than the solution itself, hence the extra margin
    let step_tol = rel_tol * 1e-3 / steps as f64;
    let decay = (-h * mu).exp();

    let mut v = x.to_vec();
    let mut term = vec![0.0; v.len()];
    let mut next = vec![0.0; v.len()];
    for _ in 0..steps {
        term.copy_from_slice(&v);
        let mut acc = v.clone();
        let mut prev_norm = f64::INFINITY;
        let mut converged = false;
        for j in 1..=MAX_TAYLOR_TERMS {
            // term <- -h (A - mu I) term / j
            op.apply(&term, &mut next);
            let c = -h / j as f64;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = c * (n - mu * *t);
            }
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
            let tn = norm2(&term);
            let an = norm2(&acc);
            if tn + prev_norm <= step_tol * an || an == 0.0 {
                converged = true;
                break;
            }
            prev_norm = tn;
        }
        if !converged {
            let an = norm2(&acc);
            return Err(Error::ExpmNotConverged { residual: prev_norm / an.max(f64::MIN_POSITIVE) });
        }
        for (vi, a) in v.iter_mut().zip(&acc) {
            *vi = decay * a;
        }
    }
    Ok(v)
}

/// Applies `exp(-tau * op)` to every column independently.
pub fn expm_action_columns(
    op: &SparseOperator,
    columns: &[Vec<f64>],
    tau: f64,
    rel_tol: f64,
) -> Result<Vec<Vec<f64>>> {
    columns.par_iter().map(|c| expm_action(op, c, tau, rel_tol)).collect()
}

/// Power-iteration estimate of the largest eigenvalue of a symmetric PSD
/// operator. Deterministic: the start vector comes from a fixed seed.
pub fn largest_eigenvalue(op: &SparseOperator) -> f64 {
    let n = op.cols();
    if n == 0 || op.nnz() == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    let mut w = vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..500 {
        let nv = norm2(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        op.apply(&v, &mut w);
        let next = crate::sparse::dot(&v, &w);
        std::mem::swap(&mut v, &mut w);
        if (next - lambda).abs() <= 1e-9 * next.abs() {
            return next;
        }
        lambda = next;
    }
    lambda
}

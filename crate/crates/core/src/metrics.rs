//! Partition agreement and classification accuracy.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::score::LabelVector;

fn comb2(n: u64) -> f64 {
    (n * n.saturating_sub(1) / 2) as f64
}

/// Adjusted Rand index under the permutation model, computed from the
/// contingency table of the two labelings.
pub fn adjusted_rand_index(a: &LabelVector, b: &LabelVector) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    if a.len() < 2 {
        return Err(Error::InvalidArgument("ARI needs at least two samples".into()));
    }
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&x, &y) in a.as_slice().iter().zip(b.as_slice()) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: f64 = table.values().map(|&n| comb2(n)).sum();
    let sum_a: f64 = rows.values().map(|&n| comb2(n)).sum();
    let sum_b: f64 = cols.values().map(|&n| comb2(n)).sum();
    let total = comb2(a.len() as u64);
    let expected = sum_a * sum_b / total;
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        // both partitions trivial (all singletons or one block) and identical
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

/// Fraction of positions where the labels agree.
pub fn accuracy(pred: &LabelVector, truth: &LabelVector) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: pred.len() });
    }
    if truth.is_empty() {
        return Ok(1.0);
    }
    let hits = pred.as_slice().iter().zip(truth.as_slice()).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Accuracy after the best one-to-one relabeling of `pred`, for clusterings
/// whose ids carry no meaning. Exhaustive over permutations for up to six
/// clusters, greedy on the contingency table beyond that.
pub fn matched_accuracy(pred: &LabelVector, truth: &LabelVector) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: pred.len() });
    }
    if truth.is_empty() {
        return Ok(1.0);
    }
    let kp = pred.n_classes();
    let kt = truth.n_classes();
    let mut table = vec![vec![0usize; kt]; kp];
    for (&p, &t) in pred.as_slice().iter().zip(truth.as_slice()) {
        table[p][t] += 1;
    }
    let best = if kp <= 6 {
        let mut best = 0;
        let mut perm: Vec<usize> = Vec::new();
        permute(&table, kt, &mut perm, &mut vec![false; kt], 0, &mut best);
        best
    } else {
        let mut used_p = vec![false; kp];
        let mut used_t = vec![false; kt];
        let mut cells: Vec<(usize, usize, usize)> =
            (0..kp).flat_map(|p| (0..kt).map(move |t| (p, t))).map(|(p, t)| (table[p][t], p, t)).collect();
        cells.sort_unstable_by(|a, b| b.cmp(a));
        let mut total = 0;
        for (n, p, t) in cells {
            if !used_p[p] && !used_t[t] {
                used_p[p] = true;
                used_t[t] = true;
                total += n;
            }
        }
        total
    };
    Ok(best as f64 / truth.len() as f64)
}

fn permute(
    table: &[Vec<usize>],
    kt: usize,
    perm: &mut Vec<usize>,
    used: &mut Vec<bool>,
    acc: usize,
    best: &mut usize,
) {
    let p = perm.len();
    if p == table.len() {
        *best = (*best).max(acc);
        return;
    }
    // a predicted cluster may also stay unmatched
    for t in 0..kt {
        if !used[t] {
            used[t] = true;
            perm.push(t);
            permute(table, kt, perm, used, acc + table[p][t], best);
            perm.pop();
            used[t] = false;
        }
    }
    perm.push(usize::MAX);
    permute(table, kt, perm, used, acc, best);
    perm.pop();
}

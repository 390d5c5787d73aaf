//! Compressed sparse matrices and the linear-operator interface used by the
//! iterative solvers.

use nalgebra::DMatrix;

/// Anything that can apply `y = A x` and `x = A^T y`.
pub trait LinearOperator: Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `y <- A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// `x <- A^T y`
    fn apply_transpose(&self, y: &[f64], x: &mut [f64]);
}

/// Row-compressed matrix that also keeps its transpose in compressed form, so
/// both products are cache-friendly gathers.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    // transpose in CSR, i.e. the matrix in CSC
    t_ptr: Vec<usize>,
    t_idx: Vec<usize>,
    t_values: Vec<f64>,
}

fn compress(
    major: usize,
    mut entries: Vec<(usize, usize, f64)>,
) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
    entries.sort_unstable_by_key(|a| (a.0, a.1));
    let mut ptr = vec![0usize; major + 1];
    let mut idx = Vec::with_capacity(entries.len());
    let mut vals: Vec<f64> = Vec::with_capacity(entries.len());
    let mut last: Option<(usize, usize)> = None;
    let mut rows_of = Vec::with_capacity(entries.len());
    for (r, c, v) in entries {
        if last == Some((r, c)) {
            *vals.last_mut().unwrap() += v;
        } else {
            idx.push(c);
            vals.push(v);
            rows_of.push(r);
            last = Some((r, c));
        }
    }
    // drop entries that cancelled to zero
    let mut k = 0;
    for i in 0..vals.len() {
        if vals[i] != 0.0 {
            idx[k] = idx[i];
            vals[k] = vals[i];
            rows_of[k] = rows_of[i];
            k += 1;
        }
    }
    idx.truncate(k);
    vals.truncate(k);
    rows_of.truncate(k);
    for &r in &rows_of {
        ptr[r + 1] += 1;
    }
    for i in 0..major {
        ptr[i + 1] += ptr[i];
    }
    (ptr, idx, vals)
}

impl SparseOperator {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicate positions
    /// are summed and exact zeros are dropped.
    pub fn from_triplets(rows: usize, cols: usize, triplets: Vec<(usize, usize, f64)>) -> Self {
        debug_assert!(triplets.iter().all(|&(r, c, _)| r < rows && c < cols));
        let transposed: Vec<_> = triplets.iter().map(|&(r, c, v)| (c, r, v)).collect();
        let (row_ptr, col_idx, values) = compress(rows, triplets);
        let (t_ptr, t_idx, t_values) = compress(cols, transposed);
        SparseOperator { rows, cols, row_ptr, col_idx, values, t_ptr, t_idx, t_values }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_triplets(rows, cols, Vec::new())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates over stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    /// Stored entries of one column as `(row, value)` pairs.
    pub fn column(&self, c: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.t_ptr[c]..self.t_ptr[c + 1]).map(move |k| (self.t_idx[k], self.t_values[k]))
    }

    /// Stored entries of one row as `(col, value)` pairs.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.col_idx[k], self.values[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        match self.col_idx[lo..hi].binary_search(&c) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    pub fn transpose(&self) -> SparseOperator {
        SparseOperator {
            rows: self.cols,
            cols: self.rows,
            row_ptr: self.t_ptr.clone(),
            col_idx: self.t_idx.clone(),
            values: self.t_values.clone(),
            t_ptr: self.row_ptr.clone(),
            t_idx: self.col_idx.clone(),
            t_values: self.values.clone(),
        }
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &SparseOperator) -> SparseOperator {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut triplets = Vec::new();
        for r in 0..self.rows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    triplets.push((r, c, a * b));
                }
            }
        }
        SparseOperator::from_triplets(self.rows, other.cols, triplets)
    }

    /// Entrywise sum of two equally-shaped matrices.
    pub fn add(&self, other: &SparseOperator) -> SparseOperator {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let triplets = self.triplets().chain(other.triplets()).collect();
        SparseOperator::from_triplets(self.rows, self.cols, triplets)
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|c| self.column(c).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && self.row_ptr == self.t_ptr
            && self.col_idx == self.t_idx
            && self.values == self.t_values
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.apply(x, &mut y);
        y
    }

    pub fn mul_vec_transpose(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.cols];
        self.apply_transpose(y, &mut x);
        x
    }
}

impl LinearOperator for SparseOperator {
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out = acc;
        }
    }

    fn apply_transpose(&self, y: &[f64], x: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        for (c, out) in x.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.t_ptr[c]..self.t_ptr[c + 1] {
                acc += self.t_values[k] * y[self.t_idx[k]];
            }
            *out = acc;
        }
    }
}

/// View of a matrix with some columns treated as zero. The view keeps the
/// column count of the underlying matrix; masked coordinates never receive
/// mass from `apply_transpose`.
pub struct ColumnMasked<'a> {
    inner: &'a SparseOperator,
    mask: Vec<bool>,
}

impl<'a> ColumnMasked<'a> {
    pub fn new(inner: &'a SparseOperator, masked: impl IntoIterator<Item = usize>) -> Self {
        let mut mask = vec![false; inner.cols()];
        for c in masked {
            mask[c] = true;
        }
        ColumnMasked { inner, mask }
    }
}

impl LinearOperator for ColumnMasked<'_> {
    fn nrows(&self) -> usize {
        self.inner.rows
    }

    fn ncols(&self) -> usize {
        self.inner.cols
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let a = self.inner;
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in a.row_ptr[r]..a.row_ptr[r + 1] {
                let c = a.col_idx[k];
                if !self.mask[c] {
                    acc += a.values[k] * x[c];
                }
            }
            *out = acc;
        }
    }

    fn apply_transpose(&self, y: &[f64], x: &mut [f64]) {
        let a = self.inner;
        for (c, out) in x.iter_mut().enumerate() {
            if self.mask[c] {
                *out = 0.0;
                continue;
            }
            let mut acc = 0.0;
            for k in a.t_ptr[c]..a.t_ptr[c + 1] {
                acc += a.t_values[k] * y[a.t_idx[k]];
            }
            *out = acc;
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

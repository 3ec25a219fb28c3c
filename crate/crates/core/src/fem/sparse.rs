//! Symmetric sparse matrices in CSR form, plus a banded Cholesky
//! factorization for the fixed Poisson operator of the divergence
//! projection.

/// Symmetric sparse matrix; both triangles are stored explicitly so that
/// matrix-vector products are a single row sweep.
#[derive(Clone)]
pub struct SparseOperator {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseOperator {
    /// Builds the pattern from per-row adjacency lists; values start at zero.
    pub fn from_adjacency(mut rows: Vec<Vec<u32>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
            col_idx.extend_from_slice(row);
            row_ptr.push(col_idx.len());
        }
        let vals = vec![0.0; col_idx.len()];
        Self {
            n,
            row_ptr,
            col_idx,
            vals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Flat value index of entry (i, j); the pair must be in the pattern.
    pub fn entry_index(&self, i: usize, j: usize) -> usize {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        let pos = self.col_idx[lo..hi]
            .binary_search(&(j as u32))
            .unwrap_or_else(|_| panic!("entry ({i}, {j}) not in sparsity pattern"));
        lo + pos
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let idx = self.entry_index(i, j);
        self.vals[idx] += v;
    }

    pub fn add_at(&mut self, flat_index: usize, v: f64) {
        self.vals[flat_index] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        match self.col_idx[lo..hi].binary_search(&(j as u32)) {
            Ok(pos) => self.vals[lo + pos],
            Err(_) => 0.0,
        }
    }

    pub fn clear_values(&mut self) {
        self.vals.fill(0.0);
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.col_idx[k] as usize];
            }
            y[i] = acc;
        }
    }

    /// x^T A y without forming A y.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let mut row = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                row += self.vals[k] * y[self.col_idx[k] as usize];
            }
            acc += x[i] * row;
        }
        acc
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Largest relative asymmetry max |a_ij - a_ji| / max |a_ij|.
    pub fn symmetry_error(&self) -> f64 {
        let scale = self
            .vals
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k] as usize;
                if j > i {
                    worst = worst.max((self.vals[k] - self.get(j, i)).abs());
                }
            }
        }
        worst / scale
    }

    /// Half bandwidth max |i - j| over stored entries.
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0usize;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                bw = bw.max(i.abs_diff(self.col_idx[k] as usize));
            }
        }
        bw
    }

    /// Replaces row and column `i` by the identity row/column. Used to pin
    /// one degree of freedom of a singular Neumann operator.
    pub fn pin_dof(&mut self, i: usize) {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            self.vals[k] = if self.col_idx[k] as usize == i { 1.0 } else { 0.0 };
        }
        for row in 0..self.n {
            if row == i {
                continue;
            }
            let lo = self.row_ptr[row];
            let hi = self.row_ptr[row + 1];
            if let Ok(pos) = self.col_idx[lo..hi].binary_search(&(i as u32)) {
                self.vals[lo + pos] = 0.0;
            }
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1])
                .map(move |k| (i, self.col_idx[k] as usize, self.vals[k]))
        })
    }
}

/// Cholesky factorization of a symmetric positive definite banded matrix.
/// Lower triangle stored row-major with `bw + 1` slots per row.
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedCholesky {
    /// Factors the matrix; returns `None` if a non-positive pivot appears.
    pub fn factor(op: &SparseOperator) -> Option<Self> {
        let n = op.n();
        let bw = op.bandwidth();
        let stride = bw + 1;
        let mut data = vec![0.0; n * stride];
        // data[i * stride + (j - i + bw)] holds L[i][j] for j in [i-bw, i].
        for (i, j, v) in op.entries() {
            if j <= i {
                data[i * stride + (j + bw - i)] = v;
            }
        }
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..i {
                let mut sum = data[i * stride + (j + bw - i)];
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    sum -= data[i * stride + (k + bw - i)] * data[j * stride + (k + bw - j)];
                }
                data[i * stride + (j + bw - i)] = sum / data[j * stride + bw];
            }
            let mut diag = data[i * stride + bw];
            for k in j0..i {
                let l = data[i * stride + (k + bw - i)];
                diag -= l * l;
            }
            if diag <= 0.0 || !diag.is_finite() {
                return None;
            }
            data[i * stride + bw] = diag.sqrt();
        }
        Some(Self { n, bw, data })
    }

    /// Solves A x = b in place.
    pub fn solve(&self, b: &mut [f64]) {
        let stride = self.bw + 1;
        // Forward substitution L y = b.
        for i in 0..self.n {
            let j0 = i.saturating_sub(self.bw);
            let mut sum = b[i];
            for j in j0..i {
                sum -= self.data[i * stride + (j + self.bw - i)] * b[j];
            }
            b[i] = sum / self.data[i * stride + self.bw];
        }
        // Backward substitution L^T x = y.
        for i in (0..self.n).rev() {
            let mut sum = b[i];
            let j1 = (i + self.bw).min(self.n - 1);
            for j in (i + 1)..=j1 {
                sum -= self.data[j * stride + (i + self.bw - j)] * b[j];
            }
            b[i] = sum / self.data[i * stride + self.bw];
        }
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }
}

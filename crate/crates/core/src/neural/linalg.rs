//! Dense row-major matrices and the handful of products the LSTM
//! forward/backward passes need.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// out += A x
    pub fn matvec_add(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let mut acc = 0.0;
            for (w, xi) in row.iter().zip(x) {
                acc += w * xi;
            }
            out[r] += acc;
        }
    }

    /// out += A^T y
    pub fn tr_matvec_add(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        for r in 0..self.rows {
            let yi = y[r];
            if yi == 0.0 {
                continue;
            }
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            for (o, w) in out.iter_mut().zip(row) {
                *o += yi * w;
            }
        }
    }

    /// A += y x^T
    pub fn add_outer(&mut self, y: &[f64], x: &[f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(x.len(), self.cols);
        for r in 0..self.rows {
            let yi = y[r];
            if yi == 0.0 {
                continue;
            }
            let row = &mut self.data[r * self.cols..(r + 1) * self.cols];
            for (w, xi) in row.iter_mut().zip(x) {
                *w += yi * xi;
            }
        }
    }
}

/// Random orthogonal matrix: the Q factor of a Householder QR of a
/// standard Gaussian matrix, with column signs fixed so the diagonal of
/// R is positive.
pub fn random_orthogonal<R: Rng>(n: usize, rng: &mut R) -> Mat {
    let mut a = Mat::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut q = Mat::from_fn(n, n, |r, c| if r == c { 1.0 } else { 0.0 });

    // Householder reflections applied to A; accumulated into Q.
    let mut v = vec![0.0; n];
    for k in 0..n {
        let mut norm2 = 0.0;
        for r in k..n {
            let x = a.at(r, k);
            v[r] = x;
            norm2 += x * x;
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if v[k] >= 0.0 { -norm } else { norm };
        v[k] -= alpha;
        let vnorm2: f64 = (k..n).map(|r| v[r] * v[r]).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A <- (I - 2 v v^T / v^T v) A
        for c in k..n {
            let dot: f64 = (k..n).map(|r| v[r] * a.at(r, c)).sum();
            let scale = 2.0 * dot / vnorm2;
            for r in k..n {
                let val = a.at(r, c) - scale * v[r];
                a.data_mut()[r * n + c] = val;
            }
        }
        // Q <- Q (I - 2 v v^T / v^T v)
        for r in 0..n {
            let dot: f64 = (k..n).map(|c| q.at(r, c) * v[c]).sum();
            let scale = 2.0 * dot / vnorm2;
            for c in k..n {
                let val = q.at(r, c) - scale * v[c];
                q.data_mut()[r * n + c] = val;
            }
        }
    }

    // sign-fix columns by the diagonal of R (stored in A)
    for c in 0..n {
        if a.at(c, c) < 0.0 {
            for r in 0..n {
                q.data_mut()[r * n + c] = -q.at(r, c);
            }
        }
    }
    q
}

/// max |Q^T Q - I|, used by tests and the initialization contract.
pub fn orthogonality_defect(q: &Mat) -> f64 {
    let n = q.rows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut dot = 0.0;
            for r in 0..n {
                dot += q.at(r, i) * q.at(r, j);
            }
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}

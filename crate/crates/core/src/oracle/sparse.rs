//! Compressed row storage for the handful of structured operators applied to
//! dense density matrices at every integrator stage.

use num_complex::Complex64;

use super::operators::CMatrix;

#[derive(Debug, Clone)]
pub(crate) struct SparseOp {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseOp {
    pub(crate) fn from_dense(m: &CMatrix) -> Self {
        let dim = m.nrows();
        let mut row_start = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_start.push(0);
        for i in 0..dim {
            for j in 0..dim {
                let v = m[[i, j]];
                if v != Complex64::new(0.0, 0.0) {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_start.push(cols.len());
        }
        SparseOp {
            dim,
            row_start,
            cols,
            vals,
        }
    }

    pub(crate) fn nnz(&self) -> usize {
        self.vals.len()
    }

    #[inline]
    fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_start[i]..self.row_start[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    /// out += scale · (self · rho), all matrices row-major `dim × dim`.
    pub(crate) fn left_mul_add(&self, scale: Complex64, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        for i in 0..d {
            let out_row = &mut out[i * d..(i + 1) * d];
            for (k, v) in self.row(i) {
                let c = scale * v;
                let rho_row = &rho[k * d..(k + 1) * d];
                for (o, r) in out_row.iter_mut().zip(rho_row) {
                    *o += c * r;
                }
            }
        }
    }

    /// out += scale · (rho · self).
    pub(crate) fn right_mul_add(&self, scale: Complex64, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        for i in 0..d {
            let rho_row = &rho[i * d..(i + 1) * d];
            let out_row = &mut out[i * d..(i + 1) * d];
            for (k, r) in rho_row.iter().enumerate() {
                if *r == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let c = scale * r;
                for (j, v) in self.row(k) {
                    out_row[j] += c * v;
                }
            }
        }
    }
}

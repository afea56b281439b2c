//! Horizontality residual, the wedge 2-form `Σ_j df^j ∧ df^{j+n}` and
//! low-rank certification.
//!
//! For a `2n × m` matrix `B` with rows `u_1..u_{2n}` the wedge matrix is
//! `W_{kl} = Σ_j (b_j^k b_{j+n}^l − b_j^l b_{j+n}^k)`, and for every pair of
//! vectors `v, w ∈ R^m`
//!
//! ```text
//! ⟨B w, J B v⟩ = Σ_{k,l} w_k v_l W_{lk},      J = [[0, −I_n], [I_n, 0]].
//! ```
//!
//! When `W = 0` the ranges of `B` and `JB` are orthogonal subspaces of the
//! same dimension in `R^{2n}`, so `rank B ≤ n`.

mod rank;
mod scan;

pub use rank::{numerical_rank, rank_certificate, singular_values, RankCertificate, Verdict};
pub use scan::{
    analyze_nodes, bv_graph_tangency, contact_residual, lowrank_scan, maxrank_scan, summarize,
    wedge_field, wedge_field_by_slicing, ContactResidualField, LowRankSummary, NodeRecord,
    Tolerances, WedgeField,
};

use crate::error::{Error, Result};

/// A dense row-major matrix with explicit shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Incompatible("ragged rows".into()));
        }
        Mat::new(rows.len(), cols, rows.iter().flatten().copied().collect())
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// The `2n × 2n` symplectic matrix `[[0, −I_n], [I_n, 0]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticJ {
    n: usize,
    corrupted: bool,
}

impl SymplecticJ {
    pub fn new(n: usize) -> Self {
        SymplecticJ {
            n,
            corrupted: false,
        }
    }

    /// `J` with its lower-left block negated, i.e. `J = [[0, −I], [−I, 0]]`.
    /// Used as a negative control: the pairing identity fails for it.
    pub fn corrupted(n: usize) -> Self {
        SymplecticJ { n, corrupted: true }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> Mat {
        let n = self.n;
        let mut j = Mat::zeros(2 * n, 2 * n);
        let lower = if self.corrupted { -1.0 } else { 1.0 };
        for i in 0..n {
            j.set(i, n + i, -1.0);
            j.set(n + i, i, lower);
        }
        j
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let lower = if self.corrupted { -1.0 } else { 1.0 };
        let mut out = vec![0.0; 2 * n];
        for i in 0..n {
            out[i] = -v[n + i];
            out[n + i] = lower * v[i];
        }
        out
    }
}

fn check_even_rows(b: &Mat) -> Result<usize> {
    if b.rows == 0 || b.rows % 2 != 0 || b.cols == 0 {
        return Err(Error::Incompatible(format!(
            "expected a 2n × m matrix, got {} × {}",
            b.rows, b.cols
        )));
    }
    Ok(b.rows / 2)
}

/// `Σ_j u_j ∧ u_{j+n}` as an antisymmetric `m × m` matrix.
pub fn wedge_sum(b: &Mat) -> Result<Mat> {
    let n = check_even_rows(b)?;
    let m = b.cols;
    let mut w = Mat::zeros(m, m);
    for k in 0..m {
        for l in (k + 1)..m {
            let mut s = 0.0;
            for j in 0..n {
                s += b.get(j, k) * b.get(j + n, l) - b.get(j, l) * b.get(j + n, k);
            }
            w.set(k, l, s);
            w.set(l, k, -s);
        }
    }
    Ok(w)
}

/// `|⟨B w, J B v⟩ − Σ_{k,l} w_k v_l W_{lk}|`.
pub fn j_pairing_check(b: &Mat, v: &[f64], w: &[f64]) -> Result<f64> {
    let n = check_even_rows(b)?;
    j_pairing_check_with(&SymplecticJ::new(n), b, v, w)
}

pub fn j_pairing_check_with(j: &SymplecticJ, b: &Mat, v: &[f64], w: &[f64]) -> Result<f64> {
    let n = check_even_rows(b)?;
    if j.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: j.n(),
        });
    }
    if v.len() != b.cols || w.len() != b.cols {
        return Err(Error::DimensionMismatch {
            expected: b.cols,
            found: if v.len() != b.cols { v.len() } else { w.len() },
        });
    }
    let bw = b.mul_vec(w);
    let jbv = j.apply(&b.mul_vec(v));
    let lhs: f64 = bw.iter().zip(&jbv).map(|(a, c)| a * c).sum();
    let wedge = wedge_sum(b)?;
    let mut rhs = 0.0;
    for k in 0..b.cols {
        for l in 0..b.cols {
            rhs += w[k] * v[l] * wedge.get(l, k);
        }
    }
    Ok((lhs - rhs).abs())
}

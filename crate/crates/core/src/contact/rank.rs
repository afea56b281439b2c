use nalgebra::DMatrix;
use serde::Serialize;

use super::{wedge_sum, Mat};
use crate::error::{Error, Result};

/// Default relative tolerance for numerical rank.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// The wedge vanishes and `σ_{n+1} ≤ tol_rank · σ_1`.
    WedgeNullRankLeqN,
    WedgeNonzero,
    /// The wedge vanishes but the rank bound was not observed.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankCertificate {
    pub singular_values: Vec<f64>,
    pub numerical_rank: usize,
    pub wedge_norm: f64,
    pub tol_wedge: f64,
    pub tol_rank: f64,
    pub verdict: Verdict,
}

/// Singular values in decreasing order.
pub fn singular_values(b: &Mat) -> Result<Vec<f64>> {
    if b.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::SvdFailure);
    }
    if b.rows == 0 || b.cols == 0 {
        return Ok(Vec::new());
    }
    let m = DMatrix::from_row_slice(b.rows, b.cols, &b.data);
    let svd = m
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or(Error::SvdFailure)?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// `#{σ_i > tol · σ_1}`; zero for the zero matrix.
pub fn numerical_rank(sigma: &[f64], tol: f64) -> usize {
    match sigma.first() {
        Some(&s1) if s1 > 0.0 => sigma.iter().filter(|&&s| s > tol * s1).count(),
        _ => 0,
    }
}

/// Checks the implication "wedge-null ⇒ rank ≤ n" on one matrix. No claim
/// is made when the wedge does not vanish.
///
/// `tol_wedge = None` selects `1e-10 · (1 + max|b_ij|²)`.
pub fn rank_certificate(b: &Mat, tol_wedge: Option<f64>, tol_rank: f64) -> Result<RankCertificate> {
    let n = b.rows / 2;
    let scale = b.max_abs();
    let tol_wedge = tol_wedge.unwrap_or(1e-10 * (1.0 + scale * scale));
    if !(tol_wedge > 0.0 && tol_rank > 0.0) {
        return Err(Error::Incompatible("tolerances must be positive".into()));
    }
    let wedge_norm = wedge_sum(b)?.max_abs();
    let sigma = singular_values(b)?;
    let rank = numerical_rank(&sigma, tol_rank);
    let verdict = if wedge_norm > tol_wedge {
        Verdict::WedgeNonzero
    } else {
        let s1 = sigma.first().copied().unwrap_or(0.0);
        let tail = sigma.get(n).copied().unwrap_or(0.0);
        if s1 == 0.0 || tail <= tol_rank * s1 {
            Verdict::WedgeNullRankLeqN
        } else {
            Verdict::Indeterminate
        }
    };
    Ok(RankCertificate {
        singular_values: sigma,
        numerical_rank: rank,
        wedge_norm,
        tol_wedge,
        tol_rank,
        verdict,
    })
}

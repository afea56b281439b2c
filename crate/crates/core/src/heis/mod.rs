//! Arithmetic of the Heisenberg group `H^n`, realised on `R^{2n+1}` with
//! coordinates `(x_1..x_n, y_1..y_n, t)`.
//!
//! The group law is
//!
//! ```text
//! (x, y, t) · (x', y', t') = (x + x', y + y', t + t' + Σ_j (x_j y'_j − y_j x'_j))
//! ```
//!
//! which is the unique law making the frame
//! `X_j = ∂_{x_j} − y_j ∂_t`, `X_{n+j} = ∂_{y_j} + x_j ∂_t` left invariant.
//! The horizontal distribution spanned by that frame is the kernel of the
//! contact form `θ = dt − Σ_j (x_j dy_j − y_j dx_j)`.

mod gauge;
mod geodesic;

pub use gauge::{gauge_distance, koranyi_norm, GaugeChoice};
pub use geodesic::{
    cc_distance, cc_distance_between, control_oracle_distance, shoot, CcMethod, CcSolution,
    ControlOracle, ControlOracleResult, Geodesic,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Heisenberg dimension `n`; the ambient space is `R^{2n+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct HeisDim(usize);

impl HeisDim {
    pub const ONE: HeisDim = HeisDim(1);

    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(HeisDim(n))
    }

    #[inline]
    pub fn n(self) -> usize {
        self.0
    }

    /// Number of ambient coordinates, `2n + 1`.
    #[inline]
    pub fn ambient(self) -> usize {
        2 * self.0 + 1
    }

    /// Infers `n` from an ambient coordinate count `2n + 1`.
    pub fn from_ambient(len: usize) -> Result<Self> {
        if len < 3 || len % 2 == 0 {
            return Err(Error::Incompatible(format!(
                "{len} coordinates is not of the form 2n+1 with n >= 1"
            )));
        }
        Ok(HeisDim((len - 1) / 2))
    }
}

impl TryFrom<usize> for HeisDim {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        HeisDim::new(n)
    }
}

impl From<HeisDim> for usize {
    fn from(d: HeisDim) -> usize {
        d.0
    }
}

/// A point of `H^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoint {
    x: Vec<f64>,
    y: Vec<f64>,
    t: f64,
}

impl HPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>, t: f64) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        if x.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if !t.is_finite() || x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("HPoint"));
        }
        Ok(HPoint { x, y, t })
    }

    pub fn identity(dim: HeisDim) -> Self {
        HPoint {
            x: vec![0.0; dim.n()],
            y: vec![0.0; dim.n()],
            t: 0.0,
        }
    }

    /// Convenience constructor for `H^1`.
    pub fn h1(x: f64, y: f64, t: f64) -> Self {
        HPoint {
            x: vec![x],
            y: vec![y],
            t,
        }
    }

    /// Builds a point from the flat layout `[x.., y.., t]`.
    pub fn from_coords(c: &[f64]) -> Result<Self> {
        let dim = HeisDim::from_ambient(c.len())?;
        let n = dim.n();
        HPoint::new(c[..n].to_vec(), c[n..2 * n].to_vec(), c[2 * n])
    }

    pub fn to_coords(&self) -> Vec<f64> {
        let mut c = Vec::with_capacity(self.x.len() * 2 + 1);
        c.extend_from_slice(&self.x);
        c.extend_from_slice(&self.y);
        c.push(self.t);
        c
    }

    pub fn dim(&self) -> HeisDim {
        HeisDim(self.x.len())
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Squared Euclidean norm of the horizontal part `(x, y)`.
    pub fn horizontal_norm_sq(&self) -> f64 {
        self.x.iter().chain(&self.y).map(|v| v * v).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.t == 0.0 && self.x.iter().chain(&self.y).all(|&v| v == 0.0)
    }

    fn check_dim(&self, other: &HPoint) -> Result<()> {
        if self.x.len() != other.x.len() {
            return Err(Error::DimensionMismatch {
                expected: self.x.len(),
                found: other.x.len(),
            });
        }
        Ok(())
    }
}

/// Symplectic twist `Σ_j (x_j y'_j − y_j x'_j)` of the group law.
fn twist(p: &HPoint, q: &HPoint) -> f64 {
    p.x.iter()
        .zip(&p.y)
        .zip(q.x.iter().zip(&q.y))
        .map(|((xp, yp), (xq, yq))| xp * yq - yp * xq)
        .sum()
}

pub fn group_mul(p: &HPoint, q: &HPoint) -> Result<HPoint> {
    p.check_dim(q)?;
    let x = p.x.iter().zip(&q.x).map(|(a, b)| a + b).collect();
    let y = p.y.iter().zip(&q.y).map(|(a, b)| a + b).collect();
    let t = p.t + q.t + twist(p, q);
    Ok(HPoint { x, y, t })
}

pub fn group_inv(p: &HPoint) -> HPoint {
    HPoint {
        x: p.x.iter().map(|v| -v).collect(),
        y: p.y.iter().map(|v| -v).collect(),
        t: -p.t,
    }
}

/// Anisotropic dilation `δ_r(x, y, t) = (r x, r y, r² t)`.
pub fn dilate(r: f64, p: &HPoint) -> Result<HPoint> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::NonPositiveScale(r));
    }
    Ok(HPoint {
        x: p.x.iter().map(|v| r * v).collect(),
        y: p.y.iter().map(|v| r * v).collect(),
        t: r * r * p.t,
    })
}

/// The left-invariant horizontal frame at `p`, as `2n` vectors of length
/// `2n + 1`: `X_i = e_i − y_i e_t` and `X_{n+i} = e_{n+i} + x_i e_t`.
pub fn horizontal_frame(p: &HPoint) -> Vec<Vec<f64>> {
    let n = p.x.len();
    let mut frame = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut v = vec![0.0; 2 * n + 1];
        v[i] = 1.0;
        v[2 * n] = -p.y[i];
        frame.push(v);
    }
    for i in 0..n {
        let mut v = vec![0.0; 2 * n + 1];
        v[n + i] = 1.0;
        v[2 * n] = p.x[i];
        frame.push(v);
    }
    frame
}

/// Coefficients of the contact form `dt − Σ_j (x_j dy_j − y_j dx_j)` at `p`,
/// in the order `(dx_1..dx_n, dy_1..dy_n, dt)`.
pub fn contact_covector(p: &HPoint) -> Vec<f64> {
    let n = p.x.len();
    let mut c = vec![0.0; 2 * n + 1];
    for j in 0..n {
        c[j] = p.y[j];
        c[n + j] = -p.x[j];
    }
    c[2 * n] = 1.0;
    c
}

/// Differential of left translation by `p`, applied to a tangent vector `v`
/// based at `q`. Returns the image vector based at `p · q`.
pub fn left_translate_vector(p: &HPoint, v: &[f64]) -> Vec<f64> {
    let n = p.x.len();
    let mut out = v.to_vec();
    let mut dt = 0.0;
    for j in 0..n {
        dt += p.x[j] * v[n + j] - p.y[j] * v[j];
    }
    out[2 * n] += dt;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_neutral() {
        let p = HPoint::h1(0.3, -1.2, 4.0);
        let e = HPoint::identity(HeisDim::ONE);
        assert_eq!(group_mul(&e, &p).unwrap(), p);
        assert_eq!(group_mul(&p, &e).unwrap(), p);
    }

    #[test]
    fn law_is_noncommutative() {
        let a = HPoint::h1(1.0, 0.0, 0.0);
        let b = HPoint::h1(0.0, 1.0, 0.0);
        assert_eq!(group_mul(&a, &b).unwrap(), HPoint::h1(1.0, 1.0, 1.0));
        assert_eq!(group_mul(&b, &a).unwrap(), HPoint::h1(1.0, 1.0, -1.0));
    }

    #[test]
    fn inverse_and_dilation_formulas() {
        assert_eq!(
            group_inv(&HPoint::h1(1.0, 2.0, 3.0)),
            HPoint::h1(-1.0, -2.0, -3.0)
        );
        assert!(group_inv(&HPoint::identity(HeisDim::ONE)).is_identity());
        let p = HPoint::h1(1.0, 0.0, 1.0);
        assert_eq!(dilate(2.0, &p).unwrap(), HPoint::h1(2.0, 0.0, 4.0));
        assert_eq!(dilate(1.0, &p).unwrap(), p);
        assert!(matches!(dilate(0.0, &p), Err(Error::NonPositiveScale(_))));
        assert!(matches!(dilate(-1.0, &p), Err(Error::NonPositiveScale(_))));
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let a = HPoint::h1(1.0, 0.0, 0.0);
        let b = HPoint::new(vec![0.0; 2], vec![0.0; 2], 0.0).unwrap();
        assert!(matches!(
            group_mul(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(HPoint::new(vec![0.0], vec![0.0, 1.0], 0.0).is_err());
        assert!(HPoint::new(vec![f64::NAN], vec![0.0], 0.0).is_err());
        assert!(HeisDim::new(0).is_err());
    }

    #[test]
    fn frame_examples() {
        let f = horizontal_frame(&HPoint::identity(HeisDim::ONE));
        assert_eq!(f, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        let f = horizontal_frame(&HPoint::h1(1.0, 2.0, 0.0));
        assert_eq!(f, vec![vec![1.0, 0.0, -2.0], vec![0.0, 1.0, 1.0]]);
    }

    #[test]
    fn covector_examples() {
        assert_eq!(
            contact_covector(&HPoint::identity(HeisDim::new(2).unwrap())),
            vec![0.0, 0.0, 0.0, 0.0, 1.0]
        );
        assert_eq!(
            contact_covector(&HPoint::h1(1.0, 2.0, 5.0)),
            vec![2.0, -1.0, 1.0]
        );
    }

    #[test]
    fn coords_roundtrip() {
        let p = HPoint::new(vec![1.0, 2.0], vec![3.0, 4.0], 5.0).unwrap();
        assert_eq!(p.to_coords(), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(HPoint::from_coords(&p.to_coords()).unwrap(), p);
        assert!(HPoint::from_coords(&[1.0, 2.0]).is_err());
    }
}

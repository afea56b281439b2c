//! Blow-ups `f_{z,r}(y) = (f(z + r y) − f(z)) / r`, their `L¹` distance to
//! the linearisation, oriented circle integrals and the circle estimate of
//! the wedge `Σ_j det(∇f^j, ∇f^{j+n})`.

mod circle;
mod report;

pub use circle::{
    analytic_wedge, circle_defect, contact_circle_defect, oriented_circle_integral,
    wedge_from_circles, CircleDefect, CirclePath, Convergence, RhoSchedule, WedgeEstimate,
    DEFAULT_CIRCLE_NODES, DEFAULT_RADII, DEFAULT_RADIUS,
};
pub use report::{blowup_report, BlowupReport, BlowupRow};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::heis::HeisDim;
use crate::jets::Mapping;

/// Radial Gauss–Legendre nodes of the polar quadrature on the unit disc.
pub const L1_RADIAL_NODES: usize = 24;
/// Angular trapezoid nodes of the polar quadrature on the unit disc.
pub const L1_ANGULAR_NODES: usize = 256;

/// The rescaled map `y ↦ (f(z + r y) − f(z)) / r` on the unit ball.
#[derive(Debug, Clone)]
pub struct RescaledMap<M> {
    base: M,
    center: Vec<f64>,
    scale: f64,
}

impl<M: Mapping> RescaledMap<M> {
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn base(&self) -> &M {
        &self.base
    }
}

impl<M: Mapping> Mapping for RescaledMap<M> {
    fn heis_dim(&self) -> HeisDim {
        self.base.heis_dim()
    }

    fn source_dim(&self) -> usize {
        self.base.source_dim()
    }

    fn eval(&self, y: &[f64], out: &mut [f64]) {
        self.base.rescaled(&self.center, self.scale, y, out)
    }

    fn jacobian(&self, y: &[f64]) -> Option<Vec<f64>> {
        let p: Vec<f64> = self
            .center
            .iter()
            .zip(y)
            .map(|(a, b)| a + self.scale * b)
            .collect();
        self.base.jacobian(&p)
    }

    fn contains_ball(&self, c: &[f64], s: f64) -> bool {
        let p: Vec<f64> = self
            .center
            .iter()
            .zip(c)
            .map(|(a, b)| a + self.scale * b)
            .collect();
        self.base.contains_ball(&p, self.scale * s)
    }

    fn interpolation_error(&self, y: &[f64]) -> f64 {
        let p: Vec<f64> = self
            .center
            .iter()
            .zip(y)
            .map(|(a, b)| a + self.scale * b)
            .collect();
        (self.base.interpolation_error(&p) + self.base.interpolation_error(&self.center))
            / self.scale
    }
}

/// `f_{z,r}`; fails unless `r > 0` and `B(z, r)` lies in the domain of `f`.
pub fn rescale<M: Mapping>(f: M, z: &[f64], r: f64) -> Result<RescaledMap<M>> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::NonPositiveScale(r));
    }
    if z.len() != f.source_dim() {
        return Err(Error::DimensionMismatch {
            expected: f.source_dim(),
            found: z.len(),
        });
    }
    if !f.contains_ball(z, r) {
        return Err(Error::BallOutsideDomain {
            center: z.to_vec(),
            radius: r,
        });
    }
    Ok(RescaledMap {
        base: f,
        center: z.to_vec(),
        scale: r,
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` (Golub–Welsch).
pub fn gauss_legendre(count: usize) -> Vec<(f64, f64)> {
    let mut jm = DMatrix::<f64>::zeros(count, count);
    for k in 1..count {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        jm[(k - 1, k)] = b;
        jm[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jm);
    let mut out: Vec<(f64, f64)> = (0..count)
        .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// `∫_{|y|<1} g(y) dy` by Gauss–Legendre in the radius and the trapezoid
/// rule in the angle.
pub fn disc_integral(radial: usize, angular: usize, mut g: impl FnMut([f64; 2]) -> f64) -> f64 {
    let dtheta = std::f64::consts::TAU / angular as f64;
    let mut total = 0.0;
    for (x, w) in gauss_legendre(radial) {
        let rho = 0.5 * (x + 1.0);
        let mut ring = 0.0;
        for a in 0..angular {
            let (s, c) = (a as f64 * dtheta).sin_cos();
            ring += g([rho * c, rho * s]);
        }
        total += 0.5 * w * rho * ring * dtheta;
    }
    total
}

/// `∫_𝔹 |f_{z,r}(y) − Df(z) y| dy` over the unit disc, with the analytic
/// Jacobian of `f`.
pub fn l1_blowup_error(f: &impl Mapping, z: &[f64], r: f64) -> Result<f64> {
    let df = f
        .jacobian(z)
        .ok_or_else(|| Error::Incompatible("map has no Jacobian; supply one".into()))?;
    l1_blowup_error_with(f, z, r, &df)
}

/// As [`l1_blowup_error`] with a supplied row-major `(2n+1) × 2` Jacobian.
pub fn l1_blowup_error_with(f: &impl Mapping, z: &[f64], r: f64, df: &[f64]) -> Result<f64> {
    if f.source_dim() != 2 {
        return Err(Error::Incompatible(format!(
            "blow-up errors are computed for m = 2, got m = {}",
            f.source_dim()
        )));
    }
    let w = f.heis_dim().ambient();
    if df.len() != 2 * w {
        return Err(Error::DimensionMismatch {
            expected: 2 * w,
            found: df.len(),
        });
    }
    let fr = rescale(f, z, r)?;
    let mut buf = vec![0.0; w];
    let err = disc_integral(L1_RADIAL_NODES, L1_ANGULAR_NODES, |y| {
        fr.eval(&y, &mut buf);
        (0..w)
            .map(|i| {
                let d = buf[i] - (df[2 * i] * y[0] + df[2 * i + 1] * y[1]);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    });
    if !err.is_finite() {
        return Err(Error::NonFinite("blow-up error"));
    }
    Ok(err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{GalleryMap, GridDomain, Interpolated, Shifted};
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let q = gauss_legendre(6);
        let w: f64 = q.iter().map(|p| p.1).sum();
        assert!((w - 2.0).abs() < 1e-14);
        let x10: f64 = q.iter().map(|(x, w)| w * x.powi(10)).sum();
        assert!((x10 - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn linear_rescaling_is_exact() {
        let map =
            GalleryMap::linear(vec![vec![0.3, -1.1], vec![2.0, 0.7], vec![1e-3, 5.0]]).unwrap();
        let fr = rescale(&map, &[0.123, -4.5], 1e-7).unwrap();
        let y = [0.25, -0.5];
        assert_eq!(fr.eval_vec(&y), map.eval_vec(&y));
    }

    #[test]
    fn constants_cancel_bitwise() {
        let map = GalleryMap::SineWave;
        let shifted = Shifted {
            base: map.clone(),
            offset: vec![1e3, -7.0, 0.1],
        };
        let a = rescale(&map, &[0.3, 0.4], 0.01).unwrap();
        let b = rescale(&shifted, &[0.3, 0.4], 0.01).unwrap();
        for y in [[0.5, 0.0], [-0.2, 0.9]] {
            assert_eq!(a.eval_vec(&y), b.eval_vec(&y));
        }
    }

    #[test]
    fn paraboloid_rescaling() {
        let fr = rescale(GalleryMap::Paraboloid, &[0.0, 0.0], 0.25).unwrap();
        assert_eq!(fr.eval_vec(&[0.5, -1.0]), vec![0.0, 0.0, 0.25 * 1.25]);
    }

    #[test]
    fn l1_errors() {
        let lin =
            GalleryMap::linear(vec![vec![1.0, 2.0], vec![0.0, -1.0], vec![3.0, 0.5]]).unwrap();
        assert!(l1_blowup_error(&lin, &[0.2, 0.1], 0.3).unwrap() <= 1e-12);
        for r in [0.5, 0.01] {
            let e = l1_blowup_error(&GalleryMap::Paraboloid, &[0.0, 0.0], r).unwrap();
            assert!((e - r * PI / 2.0).abs() < 1e-13 * r);
        }
        assert!(l1_blowup_error(&GalleryMap::Step, &[0.0, 0.0], 0.1).is_err());
    }

    #[test]
    fn domain_is_checked() {
        let d = GridDomain::cube(2, 0.0, 1.0, 11).unwrap();
        let s = GalleryMap::SineWave.sample(&d).unwrap();
        let f = Interpolated::new(&s).unwrap();
        assert!(rescale(f, &[0.5, 0.5], 0.4).is_ok());
        assert!(matches!(
            rescale(f, &[0.5, 0.5], 0.6),
            Err(Error::BallOutsideDomain { .. })
        ));
        assert!(rescale(f, &[0.5, 0.5], 0.0).is_err());
    }
}

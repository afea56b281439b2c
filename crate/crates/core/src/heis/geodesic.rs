//! Carnot–Carathéodory distance on `H^1` by geodesic shooting.
//!
//! Unit-speed geodesics from the identity project to circular arcs (or a
//! segment). With heading `φ`, curvature `κ` and length `L`, and total
//! turning `θ = κL`, the endpoint is
//!
//! ```text
//! x + i y = e^{iφ} L (e^{iθ} − 1) / (iθ),      t = L² (θ − sin θ) / θ².
//! ```
//!
//! For a target `(x, y, t)` with `ρ = |(x, y)| > 0` the ratio `|t| / ρ²`
//! equals `μ(θ) = (θ − sin θ) / (4 sin²(θ/2))`, which increases from 0 to
//! infinity on `[0, 2π)`. We root-find `θ` on that bracket and recover `L`.

use std::f64::consts::{PI, TAU};

use super::{group_inv, group_mul, koranyi_norm, HPoint};
use crate::error::{Error, Result};

/// Absolute tolerance on the turning parameter.
const THETA_TOL: f64 = 1e-10;
const MAX_ITER: usize = 200;

/// A unit-speed horizontal geodesic issued from the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geodesic {
    pub heading: f64,
    pub curvature: f64,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcMethod {
    Trivial,
    Shooting,
    ControlOracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcSolution {
    pub length: f64,
    pub geodesic: Option<Geodesic>,
    pub method: CcMethod,
    pub iterations: usize,
    /// Final bracket on the turning parameter (empty for trivial cases).
    pub bracket: (f64, f64),
    /// Korányi gap between the shot endpoint and the target.
    pub endpoint_residual: f64,
}

/// `(θ − sin θ)/θ²`, accurate near zero.
fn vertical_factor(theta: f64) -> f64 {
    if theta.abs() < 1e-3 {
        let t2 = theta * theta;
        theta * (1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0)
    } else {
        (theta - theta.sin()) / (theta * theta)
    }
}

/// `sin(θ/2) / (θ/2)`, the chord-to-arc ratio.
fn chord_factor(theta: f64) -> f64 {
    let h = 0.5 * theta;
    if h.abs() < 1e-4 {
        1.0 - h * h / 6.0
    } else {
        h.sin() / h
    }
}

fn mu(theta: f64) -> f64 {
    let c = chord_factor(theta);
    vertical_factor(theta) / (c * c)
}

/// Endpoint of a geodesic issued from the identity.
pub fn shoot(g: &Geodesic) -> HPoint {
    let theta = g.curvature * g.length;
    let chord = g.length * chord_factor(theta);
    let dir = g.heading + 0.5 * theta;
    HPoint::h1(
        chord * dir.cos(),
        chord * dir.sin(),
        g.length * g.length * vertical_factor(theta),
    )
}

/// Solves `μ(θ) = target` on `(0, 2π)` by a secant iteration safeguarded
/// by bisection. Returns `(θ, iterations, bracket)`.
fn solve_turning(target: f64) -> Result<(f64, usize, (f64, f64))> {
    let g = |th: f64| mu(th) - target;
    let mut lo = 0.0_f64;
    let mut hi = PI;
    let mut g_lo = -target;
    let mut g_hi = g(hi);
    let mut it = 0;
    while g_hi <= 0.0 {
        lo = hi;
        g_lo = g_hi;
        hi = TAU - 0.5 * (TAU - hi);
        g_hi = g(hi);
        it += 1;
        if it > MAX_ITER || hi >= TAU {
            return Err(Error::NoConvergence {
                lo,
                hi,
                residual: g_hi,
                iterations: it,
            });
        }
    }
    while hi - lo > THETA_TOL {
        it += 1;
        if it > MAX_ITER {
            return Err(Error::NoConvergence {
                lo,
                hi,
                residual: g_lo.abs().min(g_hi.abs()),
                iterations: it,
            });
        }
        let secant = lo - g_lo * (hi - lo) / (g_hi - g_lo);
        let mid = 0.5 * (lo + hi);
        // Fall back to bisection when the secant lands near an end.
        let width = hi - lo;
        let th = if secant.is_finite() && secant > lo + 0.05 * width && secant < hi - 0.05 * width {
            secant
        } else {
            mid
        };
        let gt = g(th);
        if gt == 0.0 {
            return Ok((th, it, (th, th)));
        }
        if gt < 0.0 {
            lo = th;
            g_lo = gt;
        } else {
            hi = th;
            g_hi = gt;
        }
    }
    let th = lo - g_lo * (hi - lo) / (g_hi - g_lo);
    let th = if th.is_finite() && (lo..=hi).contains(&th) {
        th
    } else {
        0.5 * (lo + hi)
    };
    Ok((th, it, (lo, hi)))
}

fn require_h1(p: &HPoint) -> Result<()> {
    if p.dim().n() != 1 {
        return Err(Error::UnsupportedGauge {
            gauge: "carnot-caratheodory",
            n: p.dim().n(),
        });
    }
    Ok(())
}

/// Carnot–Carathéodory distance from the identity to `p` in `H^1`.
pub fn cc_distance(p: &HPoint) -> Result<CcSolution> {
    require_h1(p)?;
    if p.is_identity() {
        return Ok(CcSolution {
            length: 0.0,
            geodesic: None,
            method: CcMethod::Trivial,
            iterations: 0,
            bracket: (0.0, 0.0),
            endpoint_residual: 0.0,
        });
    }
    let (x, y, t) = (p.x()[0], p.y()[0], p.t());
    let rho = x.hypot(y);
    let phase = y.atan2(x);

    let (geodesic, iterations, bracket) = if t == 0.0 {
        let g = Geodesic {
            heading: phase,
            curvature: 0.0,
            length: rho,
        };
        return Ok(CcSolution {
            length: rho,
            geodesic: Some(g),
            method: CcMethod::Trivial,
            iterations: 0,
            bracket: (0.0, 0.0),
            endpoint_residual: 0.0,
        });
    } else if rho == 0.0 {
        let length = (TAU * t.abs()).sqrt();
        let g = Geodesic {
            heading: 0.0,
            curvature: t.signum() * TAU / length,
            length,
        };
        (g, 0, (TAU, TAU))
    } else {
        match solve_turning(t.abs() / (rho * rho)) {
            Ok((theta, it, br)) => {
                let length = rho / chord_factor(theta);
                let signed = t.signum() * theta;
                let g = Geodesic {
                    heading: phase - 0.5 * signed,
                    curvature: signed / length,
                    length,
                };
                (g, it, br)
            }
            Err(err) => return fallback(p, err),
        }
    };

    let end = shoot(&geodesic);
    let residual = koranyi_norm(&group_mul(&group_inv(&end), p)?);
    if residual > 1e-6 * (1.0 + koranyi_norm(p)) {
        return fallback(
            p,
            Error::NoConvergence {
                lo: bracket.0,
                hi: bracket.1,
                residual,
                iterations,
            },
        );
    }
    Ok(CcSolution {
        length: geodesic.length,
        geodesic: Some(geodesic),
        method: CcMethod::Shooting,
        iterations,
        bracket,
        endpoint_residual: residual,
    })
}

fn fallback(p: &HPoint, err: Error) -> Result<CcSolution> {
    match ControlOracle::default().distance(p) {
        Some(r) => Ok(CcSolution {
            length: r.length,
            geodesic: None,
            method: CcMethod::ControlOracle,
            iterations: r.sequences,
            bracket: (f64::NAN, f64::NAN),
            endpoint_residual: r.gap,
        }),
        None => Err(err),
    }
}

/// `d_cc(p, q) = d_cc(e, p⁻¹ q)`.
pub fn cc_distance_between(p: &HPoint, q: &HPoint) -> Result<f64> {
    require_h1(p)?;
    if p == q {
        return Ok(0.0);
    }
    Ok(cc_distance(&group_mul(&group_inv(p), q)?)?.length)
}

/// Brute-force search over piecewise-constant horizontal controls.
///
/// A control sequence is `segments` straight unit-speed pieces whose
/// headings advance by a constant turn; it is indexed by total turning
/// (`turn_grid` values in `[−2π, 2π]`) and initial heading (`heading_grid`
/// values). Each sequence is rescaled (horizontal by `ℓ`, vertical by `ℓ²`)
/// to match the target's vertical coordinate, and accepted if its endpoint
/// lies within `tolerance · N(target)` of the target in the Korányi gauge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOracle {
    pub segments: usize,
    pub turn_grid: usize,
    pub heading_grid: usize,
    pub tolerance: f64,
}

impl Default for ControlOracle {
    fn default() -> Self {
        ControlOracle {
            segments: 64,
            turn_grid: 401,
            heading_grid: 256,
            tolerance: 1e-2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOracleResult {
    pub length: f64,
    pub sequences: usize,
    pub accepted: usize,
    pub gap: f64,
}

impl ControlOracle {
    pub fn sequence_count(&self) -> usize {
        self.turn_grid * self.heading_grid
    }

    /// Endpoint of the unit-segment polygon with initial heading 0.
    fn polygon(&self, total_turn: f64) -> (f64, f64, f64) {
        let beta = total_turn / self.segments as f64;
        let (mut px, mut py, mut t) = (0.0, 0.0, 0.0);
        for k in 0..self.segments {
            let a = beta * k as f64;
            let (dx, dy) = (a.cos(), a.sin());
            t += px * dy - py * dx;
            px += dx;
            py += dy;
        }
        (px, py, t)
    }

    pub fn distance(&self, target: &HPoint) -> Option<ControlOracleResult> {
        if target.dim().n() != 1 {
            return None;
        }
        let (tx, ty, tt) = (target.x()[0], target.y()[0], target.t());
        let scale = koranyi_norm(target);
        if scale == 0.0 {
            return Some(ControlOracleResult {
                length: 0.0,
                sequences: 0,
                accepted: 0,
                gap: 0.0,
            });
        }
        let rho = tx.hypot(ty);
        let mut best: Option<(f64, f64)> = None;
        let mut accepted = 0;
        for i in 0..self.turn_grid {
            let turn = if self.turn_grid == 1 {
                TAU
            } else {
                -TAU + 2.0 * TAU * i as f64 / (self.turn_grid - 1) as f64
            };
            let (ex, ey, et) = self.polygon(turn);
            let eh = ex.hypot(ey);
            let ell = if tt != 0.0 {
                if et == 0.0 || et.signum() != tt.signum() {
                    continue;
                }
                (tt / et).sqrt()
            } else if eh > 0.0 {
                rho / eh
            } else {
                continue;
            };
            for j in 0..self.heading_grid {
                let a = TAU * j as f64 / self.heading_grid as f64;
                let (c, s) = (a.cos(), a.sin());
                let end = HPoint::h1(
                    ell * (c * ex - s * ey),
                    ell * (s * ex + c * ey),
                    ell * ell * et,
                );
                let gap = group_mul(&group_inv(&end), target)
                    .map(|d| koranyi_norm(&d))
                    .unwrap_or(f64::INFINITY);
                if gap <= self.tolerance * scale {
                    accepted += 1;
                    let len = ell * self.segments as f64;
                    if best.is_none_or(|(l, _)| len < l) {
                        best = Some((len, gap));
                    }
                }
            }
        }
        best.map(|(length, gap)| ControlOracleResult {
            length,
            sequences: self.sequence_count(),
            accepted,
            gap,
        })
    }
}

/// Distance via [`ControlOracle`], exposed for cross-checks.
pub fn control_oracle_distance(p: &HPoint, oracle: &ControlOracle) -> Option<f64> {
    oracle.distance(p).map(|r| r.length)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horizontal_points_are_exact() {
        for r in [0.5, 1.0, 3.0] {
            let s = cc_distance(&HPoint::h1(r, 0.0, 0.0)).unwrap();
            assert_eq!(s.length, r);
        }
        assert_eq!(cc_distance(&HPoint::h1(0.0, 0.0, 0.0)).unwrap().length, 0.0);
    }

    #[test]
    fn vertical_axis_closed_form() {
        // A closed loop enclosing area A lifts to height 2A; the circle
        // is optimal, so L² = 2π|t|.
        let s = cc_distance(&HPoint::h1(0.0, 0.0, 1.0)).unwrap();
        assert!((s.length - TAU.sqrt()).abs() < 1e-15);
        // The gauge is a square root in the horizontal directions.
        assert!(s.endpoint_residual < 1e-7);
    }

    #[test]
    fn shooting_hits_the_target() {
        for &(x, y, t) in &[
            (1.0, 0.0, 0.3),
            (0.2, -0.7, -1.5),
            (-2.0, 1.0, 40.0),
            (1e-3, 0.0, 1.0),
        ] {
            let p = HPoint::h1(x, y, t);
            let s = cc_distance(&p).unwrap();
            assert_eq!(s.method, CcMethod::Shooting);
            let end = shoot(&s.geodesic.unwrap());
            for (a, b) in end.to_coords().iter().zip(p.to_coords()) {
                assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn turning_solver_reports_bracket() {
        let (th, it, (lo, hi)) = solve_turning(0.4).unwrap();
        assert!(lo <= th && th <= hi);
        assert!(hi - lo <= THETA_TOL);
        assert!(it > 0);
        assert!((mu(th) - 0.4).abs() < 1e-9);
    }

    #[test]
    fn rejects_higher_dimensions() {
        let p = HPoint::new(vec![1.0, 0.0], vec![0.0, 0.0], 0.0).unwrap();
        assert!(matches!(
            cc_distance(&p),
            Err(Error::UnsupportedGauge { .. })
        ));
    }
}

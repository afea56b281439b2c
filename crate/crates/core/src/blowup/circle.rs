use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use super::rescale;
use crate::error::{Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::jets::Mapping;

pub const DEFAULT_CIRCLE_NODES: usize = 1 << 14;
pub const DEFAULT_RADIUS: f64 = 0.5;
pub const DEFAULT_RADII: [f64; 3] = [0.3, 0.5, 0.7];

/// Differences of successive estimates used for the convergence slope.
const SLOPE_WINDOW: usize = 5;

/// `ψ(t) = (x₁ + r cos t, x₂ + r sin t)` sampled at `t_i = −π + 2πi/K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CirclePath {
    center: [f64; 2],
    radius: f64,
    nodes: usize,
}

impl CirclePath {
    pub fn new(center: [f64; 2], radius: f64, nodes: usize) -> Result<Self> {
        if nodes < 8 {
            return Err(Error::TooFewNodes { min: 8, got: nodes });
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::NonPositiveScale(radius));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("circle center"));
        }
        Ok(CirclePath {
            center,
            radius,
            nodes,
        })
    }

    pub fn center(&self) -> [f64; 2] {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn point(&self, i: usize) -> [f64; 2] {
        let t = -PI + TAU * i as f64 / self.nodes as f64;
        let (s, c) = t.sin_cos();
        [
            self.center[0] + self.radius * c,
            self.center[1] + self.radius * s,
        ]
    }
}

/// `Σ_i a_i (b_{i+1} − b_{i−1}) / 2`: the trapezoid rule for `∫ a (b∘ψ)′ dt`
/// with a centred periodic difference, whose `dt` factors cancel. The
/// difference damps the harmonic `e^{ijt}` by `sin(jh)/(jh)`; dividing by
/// `sin(h)/h` makes first harmonics exact.
fn loop_sum(a: &[f64], b: &[f64]) -> f64 {
    let k = a.len();
    let h = TAU / k as f64;
    (0..k)
        .map(|i| a[i] * (b[(i + 1) % k] - b[(i + k - 1) % k]))
        .sum::<f64>()
        * 0.5
        * (h / h.sin())
}

/// `∮ u dv = ∫_{−π}^{π} (u∘ψ)(v∘ψ)′ dt`.
pub fn oriented_circle_integral(
    u: impl Fn([f64; 2]) -> f64,
    v: impl Fn([f64; 2]) -> f64,
    c: &CirclePath,
) -> f64 {
    let us: Vec<f64> = (0..c.nodes).map(|i| u(c.point(i))).collect();
    let vs: Vec<f64> = (0..c.nodes).map(|i| v(c.point(i))).collect();
    loop_sum(&us, &vs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleDefect {
    pub defect: f64,
    /// Largest interpolation error bound of the rescaled values on the circle.
    pub interpolation_error: f64,
    /// Resulting bound on the defect, `2 ε · Σ_c ∮|du^c|`.
    pub defect_error: f64,
}

/// `∮_{path} Σ_j (u^j du^{j+n} − u^{j+n} du^j)` for `u = f_{z,ρ}`.
pub fn circle_defect(
    f: &impl Mapping,
    z: &[f64],
    rho: f64,
    path: &CirclePath,
) -> Result<CircleDefect> {
    if f.source_dim() != 2 {
        return Err(Error::Incompatible(format!(
            "circle integrals need m = 2, got m = {}",
            f.source_dim()
        )));
    }
    let reach = path.center[0].hypot(path.center[1]) + path.radius;
    if reach > 1.0 {
        return Err(Error::Incompatible(format!(
            "circle of reach {reach} leaves the unit ball of the blow-up"
        )));
    }
    let fr = rescale(f, z, rho)?;
    let dim = f.heis_dim();
    let (n, w) = (dim.n(), dim.ambient());
    let k = path.nodes;
    let samples: Vec<(Vec<f64>, f64)> = (0..k)
        .into_par_iter()
        .map(|i| {
            let y = path.point(i);
            (fr.eval_vec(&y), fr.interpolation_error(&y))
        })
        .collect();
    if samples
        .iter()
        .any(|(v, _)| v.iter().any(|x| !x.is_finite()))
    {
        return Err(Error::NonFinite("rescaled map on circle"));
    }
    let comp = |c: usize| -> Vec<f64> { samples.iter().map(|(v, _)| v[c]).collect() };
    let cols: Vec<Vec<f64>> = (0..w).map(comp).collect();
    let mut defect = 0.0;
    for j in 0..n {
        defect += loop_sum(&cols[j], &cols[j + n]) - loop_sum(&cols[j + n], &cols[j]);
    }
    let eps = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    let variation: f64 = cols[..2 * n]
        .iter()
        .map(|c| (0..k).map(|i| (c[(i + 1) % k] - c[i]).abs()).sum::<f64>())
        .sum();
    Ok(CircleDefect {
        defect,
        interpolation_error: eps,
        defect_error: 2.0 * eps * variation,
    })
}

/// The defect on `∂B(0, r)` with [`DEFAULT_CIRCLE_NODES`] nodes.
pub fn contact_circle_defect(f: &impl Mapping, z: &[f64], rho: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Incompatible(format!(
            "circle radius {r} outside (0, 1)"
        )));
    }
    let path = CirclePath::new([0.0, 0.0], r, DEFAULT_CIRCLE_NODES)?;
    Ok(circle_defect(f, z, rho, &path)?.defect)
}

/// `Σ_j det(∇f^j(z), ∇f^{j+n}(z))` from the analytic Jacobian (`m = 2`).
pub fn analytic_wedge(f: &impl Mapping, z: &[f64]) -> Option<f64> {
    if f.source_dim() != 2 {
        return None;
    }
    let jac = f.jacobian(z)?;
    let n = f.heis_dim().n();
    Some(
        (0..n)
            .map(|j| jac[2 * j] * jac[2 * (j + n) + 1] - jac[2 * j + 1] * jac[2 * (j + n)])
            .sum(),
    )
}

/// `ρ_k = ρ₀ 2^{−k}`, `k = 0..=steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoSchedule {
    pub rho0: f64,
    pub steps: usize,
}

impl Default for RhoSchedule {
    fn default() -> Self {
        RhoSchedule {
            rho0: 0.5,
            steps: 8,
        }
    }
}

impl RhoSchedule {
    pub fn new(rho0: f64, steps: usize) -> Result<Self> {
        if !(rho0 > 0.0 && rho0.is_finite()) {
            return Err(Error::NonPositiveScale(rho0));
        }
        if steps < 2 {
            return Err(Error::TooFewNodes { min: 2, got: steps });
        }
        Ok(RhoSchedule { rho0, steps })
    }

    pub fn rhos(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|k| self.rho0 * 0.5f64.powi(k as i32))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Convergence {
    /// Successive differences decrease; the estimate is extrapolated.
    Converged,
    /// Successive differences are at roundoff level throughout the window.
    Stationary,
    /// Successive differences grow somewhere in the window.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WedgeEstimate {
    pub radius: f64,
    pub rhos: Vec<f64>,
    /// `defect(ρ_k, r) / (2π r²)`.
    pub estimates: Vec<f64>,
    pub defects: Vec<f64>,
    /// Bound on each estimate from interpolation error (zero for analytic maps).
    pub estimate_errors: Vec<f64>,
    /// Fit of `log|e_k − e_{k+1}|` against `log ρ_k` over the window.
    pub slope_fit: Option<LineFit>,
    pub slope: Option<f64>,
    pub estimate: f64,
    pub convergence: Convergence,
}

/// Estimates the wedge at `z` from circle defects over a `ρ` schedule.
pub fn wedge_from_circles(
    f: &impl Mapping,
    z: &[f64],
    schedule: &RhoSchedule,
    r: f64,
) -> Result<WedgeEstimate> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Incompatible(format!(
            "circle radius {r} outside (0, 1)"
        )));
    }
    let path = CirclePath::new([0.0, 0.0], r, DEFAULT_CIRCLE_NODES)?;
    let rhos = schedule.rhos();
    let area = TAU * r * r;
    let fz = rescale(f, z, schedule.rho0)?.base().eval_vec(z);
    let size = fz.iter().fold(0.0f64, |a, v| a.max(v.abs()));

    let mut defects = Vec::with_capacity(rhos.len());
    let mut estimates = Vec::with_capacity(rhos.len());
    let mut estimate_errors = Vec::with_capacity(rhos.len());
    for &rho in &rhos {
        let d = circle_defect(f, z, rho, &path)?;
        defects.push(d.defect);
        estimates.push(d.defect / area);
        estimate_errors.push(d.defect_error / area);
    }
    let floor: Vec<f64> = rhos
        .iter()
        .zip(&estimates)
        .map(|(rho, e)| {
            16.0 * f64::EPSILON * (path.nodes as f64).sqrt() * (1.0 + size + e.abs()) / rho
        })
        .collect();

    let diffs: Vec<f64> = estimates.windows(2).map(|p| p[0] - p[1]).collect();
    let start = diffs.len().saturating_sub(SLOPE_WINDOW);
    let mut significant = Vec::new();
    let mut previous = f64::INFINITY;
    let mut monotone = true;
    for k in start..diffs.len() {
        let a = if diffs[k].abs() > floor[k].max(floor[k + 1]) {
            significant.push(k);
            diffs[k].abs()
        } else {
            0.0
        };
        monotone &= a <= previous;
        previous = a;
    }
    let last = *estimates.last().expect("nonempty schedule");

    let (convergence, slope_fit, estimate) = if !monotone {
        (Convergence::Indeterminate, None, last)
    } else if significant.len() < 2 {
        (Convergence::Stationary, None, last)
    } else {
        let x: Vec<f64> = significant.iter().map(|&k| rhos[k].ln()).collect();
        let y: Vec<f64> = significant.iter().map(|&k| diffs[k].abs().ln()).collect();
        let fit = fit_line(&x, &y)?;
        let k = diffs.len() - 1;
        let estimate = if significant.last() == Some(&k) && fit.slope > 0.0 {
            estimates[k + 1] - diffs[k] / (2f64.powf(fit.slope) - 1.0)
        } else {
            last
        };
        (Convergence::Converged, Some(fit), estimate)
    };
    Ok(WedgeEstimate {
        radius: r,
        rhos,
        estimates,
        defects,
        estimate_errors,
        slope: slope_fit.map(|f| f.slope),
        slope_fit,
        estimate,
        convergence,
    })
}

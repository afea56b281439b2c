use crate::heis::HeisDim;

use super::grid::SampledMap;

/// A map `Ω ⊂ R^m → R^{2n+1}` that can be evaluated anywhere in its domain.
pub trait Mapping: Sync {
    fn heis_dim(&self) -> HeisDim;

    fn source_dim(&self) -> usize;

    fn eval(&self, y: &[f64], out: &mut [f64]);

    /// Analytic Jacobian, row-major `(2n+1) × m`, when available.
    fn jacobian(&self, _y: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// `(f(z + r y) − f(z)) / r`.
    fn rescaled(&self, z: &[f64], r: f64, y: &[f64], out: &mut [f64]) {
        let w = self.heis_dim().ambient();
        let p: Vec<f64> = z.iter().zip(y).map(|(a, b)| a + r * b).collect();
        let mut base = vec![0.0; w];
        self.eval(z, &mut base);
        self.eval(&p, out);
        for (o, b) in out.iter_mut().zip(&base) {
            *o = (*o - b) / r;
        }
    }

    fn contains_ball(&self, _center: &[f64], _r: f64) -> bool {
        true
    }

    /// Bound on the error of `eval` at `y` against the underlying data;
    /// zero for analytic maps.
    fn interpolation_error(&self, _y: &[f64]) -> f64 {
        0.0
    }

    fn eval_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.heis_dim().ambient()];
        self.eval(y, &mut out);
        out
    }
}

impl<M: Mapping + ?Sized> Mapping for &M {
    fn heis_dim(&self) -> HeisDim {
        (**self).heis_dim()
    }
    fn source_dim(&self) -> usize {
        (**self).source_dim()
    }
    fn eval(&self, y: &[f64], out: &mut [f64]) {
        (**self).eval(y, out)
    }
    fn jacobian(&self, y: &[f64]) -> Option<Vec<f64>> {
        (**self).jacobian(y)
    }
    fn rescaled(&self, z: &[f64], r: f64, y: &[f64], out: &mut [f64]) {
        (**self).rescaled(z, r, y, out)
    }
    fn contains_ball(&self, center: &[f64], r: f64) -> bool {
        (**self).contains_ball(center, r)
    }
    fn interpolation_error(&self, y: &[f64]) -> f64 {
        (**self).interpolation_error(y)
    }
}

/// `f + c` for a constant vector `c`. Rescaling ignores `c` exactly.
#[derive(Debug, Clone)]
pub struct Shifted<M> {
    pub base: M,
    pub offset: Vec<f64>,
}

impl<M: Mapping> Mapping for Shifted<M> {
    fn heis_dim(&self) -> HeisDim {
        self.base.heis_dim()
    }
    fn source_dim(&self) -> usize {
        self.base.source_dim()
    }
    fn eval(&self, y: &[f64], out: &mut [f64]) {
        self.base.eval(y, out);
        for (o, c) in out.iter_mut().zip(&self.offset) {
            *o += c;
        }
    }
    fn jacobian(&self, y: &[f64]) -> Option<Vec<f64>> {
        self.base.jacobian(y)
    }
    fn rescaled(&self, z: &[f64], r: f64, y: &[f64], out: &mut [f64]) {
        self.base.rescaled(z, r, y, out)
    }
    fn contains_ball(&self, center: &[f64], r: f64) -> bool {
        self.base.contains_ball(center, r)
    }
    fn interpolation_error(&self, y: &[f64]) -> f64 {
        self.base.interpolation_error(y)
    }
}

/// Restricts a map to the box `[lo, hi]`; only affects domain checks.
#[derive(Debug, Clone)]
pub struct Bounded<M> {
    pub base: M,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl<M: Mapping> Mapping for Bounded<M> {
    fn heis_dim(&self) -> HeisDim {
        self.base.heis_dim()
    }
    fn source_dim(&self) -> usize {
        self.base.source_dim()
    }
    fn eval(&self, y: &[f64], out: &mut [f64]) {
        self.base.eval(y, out)
    }
    fn jacobian(&self, y: &[f64]) -> Option<Vec<f64>> {
        self.base.jacobian(y)
    }
    fn rescaled(&self, z: &[f64], r: f64, y: &[f64], out: &mut [f64]) {
        self.base.rescaled(z, r, y, out)
    }
    fn contains_ball(&self, center: &[f64], r: f64) -> bool {
        center.len() == self.lo.len()
            && center
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(&c, (&l, &h))| c - r >= l && c + r <= h)
    }
    fn interpolation_error(&self, y: &[f64]) -> f64 {
        self.base.interpolation_error(y)
    }
}

/// Bilinear interpolation of a sampled map on a 2D grid.
#[derive(Debug, Clone, Copy)]
pub struct Interpolated<'a> {
    map: &'a SampledMap,
}

impl<'a> Interpolated<'a> {
    /// Fails unless the source dimension is 2.
    pub fn new(map: &'a SampledMap) -> crate::Result<Self> {
        if map.domain().m() != 2 {
            return Err(crate::Error::Incompatible(format!(
                "bilinear interpolation needs m = 2, got m = {}",
                map.domain().m()
            )));
        }
        Ok(Interpolated { map })
    }
}

impl Mapping for Interpolated<'_> {
    fn heis_dim(&self) -> HeisDim {
        self.map.dim()
    }
    fn source_dim(&self) -> usize {
        2
    }
    fn eval(&self, y: &[f64], out: &mut [f64]) {
        let d = self.map.domain();
        let (cell, frac) = self.locate(y);
        let w = self.map.dim().ambient();
        out[..w].fill(0.0);
        for (di, wi) in [(0, 1.0 - frac[0]), (1, frac[0])] {
            for (dj, wj) in [(0, 1.0 - frac[1]), (1, frac[1])] {
                let lin = d.linear_index(&[cell[0] + di, cell[1] + dj]);
                let v = self.map.at(lin);
                for c in 0..w {
                    out[c] += wi * wj * v[c];
                }
            }
        }
    }
    fn contains_ball(&self, center: &[f64], r: f64) -> bool {
        self.map.domain().contains_ball(center, r)
    }
    /// `(h₁²|∂₁₁f| + h₂²|∂₂₂f|) / 8`, with second derivatives replaced by
    /// second differences at the corners of the containing cell.
    fn interpolation_error(&self, y: &[f64]) -> f64 {
        let d = self.map.domain();
        let (cell, _) = self.locate(y);
        let w = self.map.dim().ambient();
        let mut bound = 0.0f64;
        for di in 0..2 {
            for dj in 0..2 {
                let i = [cell[0] + di, cell[1] + dj];
                let mut corner = 0.0;
                for k in 0..2 {
                    let mut c = i;
                    c[k] = c[k].clamp(1, d.counts()[k] - 2);
                    let mid = self.map.at(d.linear_index(&c));
                    c[k] -= 1;
                    let lo = self.map.at(d.linear_index(&c));
                    c[k] += 2;
                    let hi = self.map.at(d.linear_index(&c));
                    corner += (0..w)
                        .map(|a| (hi[a] - 2.0 * mid[a] + lo[a]).abs())
                        .fold(0.0, f64::max);
                }
                bound = bound.max(corner / 8.0);
            }
        }
        bound
    }
}

impl Interpolated<'_> {
    fn locate(&self, y: &[f64]) -> ([usize; 2], [f64; 2]) {
        let d = self.map.domain();
        let mut cell = [0usize; 2];
        let mut frac = [0.0; 2];
        for k in 0..2 {
            let s = (y[k] - d.origin()[k]) / d.spacing()[k];
            let last = (d.counts()[k] - 2) as f64;
            let i = s.floor().clamp(0.0, last);
            cell[k] = i as usize;
            frac[k] = s - i;
        }
        (cell, frac)
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heis::HeisDim;

/// Upper bound on grid nodes unless a caller asks for more.
pub const DEFAULT_NODE_CAP: usize = 1 << 24;

/// Uniform tensor grid on a box of `R^m`. Nodes are ordered with the last
/// axis varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    counts: Vec<usize>,
}

impl GridDomain {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        Self::with_cap(origin, spacing, counts, DEFAULT_NODE_CAP)
    }

    pub fn with_cap(
        origin: Vec<f64>,
        spacing: Vec<f64>,
        counts: Vec<usize>,
        cap: usize,
    ) -> Result<Self> {
        let m = origin.len();
        if m == 0 {
            return Err(Error::InvalidGrid(
                "source dimension must be at least 1".into(),
            ));
        }
        if spacing.len() != m || counts.len() != m {
            return Err(Error::InvalidGrid(format!(
                "origin has {m} axes but spacing has {} and counts {}",
                spacing.len(),
                counts.len()
            )));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::NonFinite("grid origin"));
        }
        for (k, (&h, &o)) in spacing.iter().zip(&origin).enumerate() {
            if !(h > 0.0 && h.is_finite()) || o + h == o {
                return Err(Error::InvalidGrid(format!(
                    "degenerate spacing {h} on axis {k}"
                )));
            }
        }
        if let Some(k) = counts.iter().position(|&c| c < 3) {
            return Err(Error::InvalidGrid(format!(
                "axis {k} has {} nodes; at least 3 are needed",
                counts[k]
            )));
        }
        let total = counts
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .filter(|&t| t <= cap)
            .ok_or_else(|| Error::InvalidGrid(format!("more than {cap} nodes")))?;
        debug_assert!(total > 0);
        Ok(GridDomain {
            origin,
            spacing,
            counts,
        })
    }

    /// `count` nodes per axis spanning `[lo, hi]` on every axis.
    pub fn cube(m: usize, lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidGrid("need at least 2 nodes per axis".into()));
        }
        let h = (hi - lo) / (count - 1) as f64;
        GridDomain::new(vec![lo; m], vec![h; m], vec![count; m])
    }

    pub fn m(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn node_count(&self) -> usize {
        self.counts.iter().product()
    }

    /// Linear stride of each axis.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.m()];
        for k in (0..self.m().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.counts[k + 1];
        }
        s
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.counts)
            .fold(0, |acc, (&i, &c)| acc * c + i)
    }

    pub fn multi_index(&self, mut lin: usize) -> Vec<usize> {
        let mut idx = vec![0; self.m()];
        for k in (0..self.m()).rev() {
            idx[k] = lin % self.counts[k];
            lin /= self.counts[k];
        }
        idx
    }

    pub fn coord_of(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(k, &i)| self.origin[k] + i as f64 * self.spacing[k])
            .collect()
    }

    pub fn coord(&self, lin: usize) -> Vec<f64> {
        self.coord_of(&self.multi_index(lin))
    }

    pub fn upper(&self) -> Vec<f64> {
        (0..self.m())
            .map(|k| self.origin[k] + (self.counts[k] - 1) as f64 * self.spacing[k])
            .collect()
    }

    pub fn is_interior(&self, idx: &[usize]) -> bool {
        idx.iter()
            .zip(&self.counts)
            .all(|(&i, &c)| i > 0 && i + 1 < c)
    }

    /// Node index closest to `y`, if `y` lies on a node within `tol` per axis.
    pub fn node_at(&self, y: &[f64], tol: f64) -> Option<usize> {
        if y.len() != self.m() {
            return None;
        }
        let mut idx = Vec::with_capacity(self.m());
        for k in 0..self.m() {
            let s = (y[k] - self.origin[k]) / self.spacing[k];
            let i = s.round();
            if i < 0.0 || i >= self.counts[k] as f64 || (s - i).abs() * self.spacing[k] > tol {
                return None;
            }
            idx.push(i as usize);
        }
        Some(self.linear_index(&idx))
    }

    /// Whether the closed ball `B(center, r)` lies inside the node hull.
    pub fn contains_ball(&self, center: &[f64], r: f64) -> bool {
        let hi = self.upper();
        center.len() == self.m()
            && center
                .iter()
                .enumerate()
                .all(|(k, &c)| c - r >= self.origin[k] && c + r <= hi[k])
    }
}

/// Vector-valued samples on a [`GridDomain`], `width` components per node.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub(crate) domain: GridDomain,
    pub(crate) width: usize,
    pub(crate) values: Vec<f64>,
}

impl GridField {
    pub fn new(domain: GridDomain, width: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || values.len() != domain.node_count() * width {
            return Err(Error::InvalidGrid(format!(
                "{} values do not fill {} nodes of width {width}",
                values.len(),
                domain.node_count()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid values"));
        }
        Ok(GridField {
            domain,
            width,
            values,
        })
    }

    /// Samples `f` at every node.
    pub fn from_fn(
        domain: GridDomain,
        width: usize,
        f: impl Fn(&[f64], &mut [f64]),
    ) -> Result<Self> {
        let mut values = vec![0.0; domain.node_count() * width];
        for (lin, out) in values.chunks_mut(width).enumerate() {
            f(&domain.coord(lin), out);
        }
        GridField::new(domain, width, values)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, lin: usize) -> &[f64] {
        &self.values[lin * self.width..(lin + 1) * self.width]
    }
}

/// Samples of a map `Ω → R^{2n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledMap {
    field: GridField,
    dim: HeisDim,
}

impl SampledMap {
    pub fn new(domain: GridDomain, dim: HeisDim, values: Vec<f64>) -> Result<Self> {
        Ok(SampledMap {
            field: GridField::new(domain, dim.ambient(), values)?,
            dim,
        })
    }

    pub fn from_field(field: GridField) -> Result<Self> {
        let dim = HeisDim::from_ambient(field.width)?;
        Ok(SampledMap { field, dim })
    }

    pub fn dim(&self) -> HeisDim {
        self.dim
    }

    pub fn domain(&self) -> &GridDomain {
        &self.field.domain
    }

    pub fn field(&self) -> &GridField {
        &self.field
    }

    pub fn values(&self) -> &[f64] {
        &self.field.values
    }

    pub fn at(&self, lin: usize) -> &[f64] {
        self.field.at(lin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip_and_strides() {
        let g = GridDomain::new(vec![0.0, 1.0, -1.0], vec![0.1, 0.2, 0.5], vec![3, 4, 5]).unwrap();
        assert_eq!(g.strides(), vec![20, 5, 1]);
        for lin in 0..g.node_count() {
            assert_eq!(g.linear_index(&g.multi_index(lin)), lin);
        }
        assert_eq!(g.coord_of(&[2, 1, 4]), vec![0.2, 1.2, 1.0]);
        assert_eq!(
            g.node_at(&[0.2, 1.2, 1.0], 1e-12),
            Some(g.linear_index(&[2, 1, 4]))
        );
        assert_eq!(g.node_at(&[0.25, 1.2, 1.0], 1e-12), None);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridDomain::new(vec![0.0], vec![0.1], vec![2]).is_err());
        assert!(GridDomain::new(vec![0.0], vec![0.0], vec![5]).is_err());
        assert!(GridDomain::new(vec![1e20], vec![1e-10], vec![5]).is_err());
        assert!(GridDomain::new(vec![0.0, 0.0], vec![0.1], vec![5, 5]).is_err());
        assert!(GridDomain::with_cap(vec![0.0; 2], vec![0.1; 2], vec![100, 100], 1000).is_err());
    }

    #[test]
    fn field_shape_is_checked() {
        let g = GridDomain::cube(2, 0.0, 1.0, 3).unwrap();
        assert!(GridField::new(g.clone(), 3, vec![0.0; 26]).is_err());
        assert!(GridField::new(g.clone(), 3, vec![0.0; 27]).is_ok());
        let mut v = vec![0.0; 27];
        v[4] = f64::NAN;
        assert!(GridField::new(g, 3, v).is_err());
    }

    #[test]
    fn ball_containment() {
        let g = GridDomain::cube(2, 0.0, 1.0, 11).unwrap();
        assert!(g.contains_ball(&[0.5, 0.5], 0.5));
        assert!(!g.contains_ball(&[0.5, 0.5], 0.51));
        assert!(!g.contains_ball(&[0.1, 0.5], 0.2));
    }
}

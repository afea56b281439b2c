//! Grid-sampled maps and their first-order jets.
//!
//! Jacobians use central differences on interior nodes and first-order
//! one-sided differences on the boundary. Boundary nodes are flagged and
//! every scan in [`crate::contact`] skips them.
//!
//! Fast convergence of approximating sequences has no finite-grid analogue
//! and is deliberately not represented here.

mod gallery;
mod grid;
mod lebesgue;
mod mapping;
mod slice;

pub use gallery::{sample_analytic, GalleryMap};
pub use grid::{GridDomain, GridField, SampledMap, DEFAULT_NODE_CAP};
pub use lebesgue::lebesgue_point_error;
pub use mapping::{Bounded, Interpolated, Mapping, Shifted};
pub use slice::{slice, slice_columns, SliceSpec};

use rayon::prelude::*;

use crate::error::Result;
use crate::heis::HeisDim;

/// Per-node values and Jacobians of a sampled map.
#[derive(Debug, Clone, PartialEq)]
pub struct JetField {
    domain: GridDomain,
    dim: HeisDim,
    values: Vec<f64>,
    jac: Vec<f64>,
    boundary: Vec<bool>,
}

impl JetField {
    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn dim(&self) -> HeisDim {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.domain.m()
    }

    pub fn value(&self, node: usize) -> &[f64] {
        let w = self.dim.ambient();
        &self.values[node * w..(node + 1) * w]
    }

    /// Row-major `(2n+1) × m` Jacobian at `node`.
    pub fn jacobian(&self, node: usize) -> &[f64] {
        let s = self.dim.ambient() * self.m();
        &self.jac[node * s..(node + 1) * s]
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary[node]
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.boundary.len()).filter(|&i| !self.boundary[i])
    }

    pub fn interior_count(&self) -> usize {
        self.boundary.iter().filter(|b| !**b).count()
    }

    /// All Jacobians as a grid field of width `(2n+1)·m`.
    pub fn jacobian_field(&self) -> GridField {
        GridField {
            domain: self.domain.clone(),
            width: self.dim.ambient() * self.m(),
            values: self.jac.clone(),
        }
    }
}

/// Finite-difference Jacobian of a generic field, row-major
/// `width × m` per node, plus the boundary mask.
pub fn fd_jacobian(field: &GridField) -> (Vec<f64>, Vec<bool>) {
    let d = &field.domain;
    let m = d.m();
    let w = field.width;
    let strides = d.strides();
    let counts = d.counts();
    let nodes = d.node_count();
    let mut jac = vec![0.0; nodes * w * m];
    jac.par_chunks_mut(w * m)
        .enumerate()
        .for_each(|(lin, out)| {
            let idx = d.multi_index(lin);
            for k in 0..m {
                let h = d.spacing()[k];
                let i = idx[k];
                let (a, b, denom) = if i == 0 {
                    (lin + strides[k], lin, h)
                } else if i + 1 == counts[k] {
                    (lin, lin - strides[k], h)
                } else {
                    (lin + strides[k], lin - strides[k], 2.0 * h)
                };
                let (va, vb) = (field.at(a), field.at(b));
                for c in 0..w {
                    out[c * m + k] = (va[c] - vb[c]) / denom;
                }
            }
        });
    let boundary = (0..nodes)
        .map(|lin| !d.is_interior(&d.multi_index(lin)))
        .collect();
    (jac, boundary)
}

pub fn jacobian_fd(f: &SampledMap) -> Result<JetField> {
    let (jac, boundary) = fd_jacobian(f.field());
    Ok(JetField {
        domain: f.domain().clone(),
        dim: f.dim(),
        values: f.values().to_vec(),
        jac,
        boundary,
    })
}

/// Jet field from an analytic Jacobian, for comparisons against
/// [`jacobian_fd`]. Boundary flags match the finite-difference version.
pub fn jacobian_analytic(map: &impl Mapping, domain: &GridDomain) -> Option<JetField> {
    let sampled = sample_analytic(map, domain).ok()?;
    let mut jac = Vec::with_capacity(domain.node_count() * map.heis_dim().ambient() * domain.m());
    for lin in 0..domain.node_count() {
        jac.extend(map.jacobian(&domain.coord(lin))?);
    }
    let boundary = (0..domain.node_count())
        .map(|lin| !domain.is_interior(&domain.multi_index(lin)))
        .collect();
    Some(JetField {
        domain: domain.clone(),
        dim: map.heis_dim(),
        values: sampled.values().to_vec(),
        jac,
        boundary,
    })
}

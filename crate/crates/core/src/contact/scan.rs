use rayon::prelude::*;
use serde::Serialize;

use super::rank::{numerical_rank, singular_values, DEFAULT_RANK_TOL};
use super::{wedge_sum, Mat};
use crate::error::{Error, Result};
use crate::jets::{fd_jacobian, slice, GridDomain, GridField, JetField, SampledMap, SliceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative singular-value threshold.
    pub rank: f64,
    /// Absolute wedge threshold; `None` means `1e-10 · (1 + max|B|²)`.
    pub wedge: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: DEFAULT_RANK_TOL,
            wedge: None,
        }
    }
}

/// Per-node covectors `∇f^{2n+1} − Σ_j (f^j ∇f^{j+n} − f^{j+n} ∇f^j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactResidualField {
    pub domain: GridDomain,
    pub values: Vec<f64>,
}

impl ContactResidualField {
    pub fn at(&self, node: usize) -> &[f64] {
        let m = self.domain.m();
        &self.values[node * m..(node + 1) * m]
    }

    pub fn norm(&self, node: usize) -> f64 {
        self.at(node).iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Per-node antisymmetric `m × m` wedge matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct WedgeField {
    pub domain: GridDomain,
    pub values: Vec<f64>,
}

impl WedgeField {
    pub fn at(&self, node: usize) -> &[f64] {
        let m = self.domain.m();
        &self.values[node * m * m..(node + 1) * m * m]
    }

    pub fn max_abs(&self, node: usize) -> f64 {
        self.at(node).iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

fn residual_at(jets: &JetField, node: usize, out: &mut [f64]) {
    let n = jets.dim().n();
    let m = jets.m();
    let f = jets.value(node);
    let jac = jets.jacobian(node);
    for k in 0..m {
        let mut s = jac[2 * n * m + k];
        for j in 0..n {
            s -= f[j] * jac[(j + n) * m + k] - f[j + n] * jac[j * m + k];
        }
        out[k] = s;
    }
}

/// Rows `1..2n` of the Jacobian at `node`.
fn horizontal_block(jets: &JetField, node: usize) -> Mat {
    let n = jets.dim().n();
    let m = jets.m();
    Mat {
        rows: 2 * n,
        cols: m,
        data: jets.jacobian(node)[..2 * n * m].to_vec(),
    }
}

pub fn contact_residual(jets: &JetField) -> ContactResidualField {
    let m = jets.m();
    let mut values = vec![0.0; jets.domain().node_count() * m];
    values
        .par_chunks_mut(m)
        .enumerate()
        .for_each(|(node, out)| residual_at(jets, node, out));
    ContactResidualField {
        domain: jets.domain().clone(),
        values,
    }
}

pub fn wedge_field(jets: &JetField) -> WedgeField {
    let m = jets.m();
    let mut values = vec![0.0; jets.domain().node_count() * m * m];
    values
        .par_chunks_mut(m * m)
        .enumerate()
        .for_each(|(node, out)| {
            let w = wedge_sum(&horizontal_block(jets, node)).expect("2n rows");
            out.copy_from_slice(&w.data);
        });
    WedgeField {
        domain: jets.domain().clone(),
        values,
    }
}

/// Wedge field assembled pair by pair from two-dimensional sections: for
/// each plane `{k, l}` and each base node, the section is differentiated
/// on its own and contributes the entry `W_{kl}`.
pub fn wedge_field_by_slicing(f: &SampledMap) -> Result<WedgeField> {
    let d = f.domain();
    let m = d.m();
    let n = f.dim().n();
    if m < 2 {
        return Err(Error::Incompatible("the wedge needs m >= 2".into()));
    }
    let mut values = vec![0.0; d.node_count() * m * m];
    for k in 0..m {
        for l in (k + 1)..m {
            for spec in SliceSpec::all_bases(d, k, l) {
                let section = slice(f.field(), &spec)?;
                let (jac, _) = fd_jacobian(&section);
                let plane = section.domain();
                for lin in 0..plane.node_count() {
                    let ij = plane.multi_index(lin);
                    let mut full = Vec::with_capacity(m);
                    let mut rest = spec.base.iter();
                    for a in 0..m {
                        full.push(if a == k {
                            ij[0]
                        } else if a == l {
                            ij[1]
                        } else {
                            *rest.next().unwrap()
                        });
                    }
                    let node = d.linear_index(&full);
                    let g = &jac[lin * f.dim().ambient() * 2..(lin + 1) * f.dim().ambient() * 2];
                    let mut s = 0.0;
                    for j in 0..n {
                        s += g[2 * j] * g[2 * (j + n) + 1] - g[2 * j + 1] * g[2 * (j + n)];
                    }
                    values[node * m * m + k * m + l] = s;
                    values[node * m * m + l * m + k] = -s;
                }
            }
        }
    }
    Ok(WedgeField {
        domain: d.clone(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeRecord {
    pub node: usize,
    pub coords: Vec<f64>,
    pub boundary: bool,
    pub residual: Vec<f64>,
    pub residual_norm: f64,
    pub wedge_max: f64,
    /// Numerical rank of the full Jacobian.
    pub rank: usize,
}

pub fn analyze_nodes(jets: &JetField, tol: &Tolerances) -> Result<Vec<NodeRecord>> {
    let m = jets.m();
    let w = jets.dim().ambient();
    (0..jets.domain().node_count())
        .into_par_iter()
        .map(|node| {
            let mut residual = vec![0.0; m];
            residual_at(jets, node, &mut residual);
            let wedge_max = wedge_sum(&horizontal_block(jets, node))?.max_abs();
            let full = Mat {
                rows: w,
                cols: m,
                data: jets.jacobian(node).to_vec(),
            };
            let rank = numerical_rank(&singular_values(&full)?, tol.rank);
            Ok(NodeRecord {
                node,
                coords: jets.domain().coord(node),
                boundary: jets.is_boundary(node),
                residual_norm: residual.iter().map(|v| v * v).sum::<f64>().sqrt(),
                residual,
                wedge_max,
                rank,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowRankSummary {
    pub interior_nodes: usize,
    /// Fraction of interior nodes with numerical rank `≤ n`.
    pub lowrank_fraction: f64,
    /// Fraction of interior nodes with numerical rank `= m`.
    pub maxrank_fraction: f64,
    pub max_residual: f64,
    pub max_wedge: f64,
}

pub fn summarize(records: &[NodeRecord], n: usize, m: usize) -> LowRankSummary {
    let mut count = 0usize;
    let (mut low, mut full) = (0usize, 0usize);
    let (mut max_res, mut max_wedge) = (0.0f64, 0.0f64);
    for r in records.iter().filter(|r| !r.boundary) {
        count += 1;
        low += (r.rank <= n) as usize;
        full += (r.rank == m) as usize;
        max_res = max_res.max(r.residual_norm);
        max_wedge = max_wedge.max(r.wedge_max);
    }
    let frac = |c: usize| {
        if count == 0 {
            0.0
        } else {
            c as f64 / count as f64
        }
    };
    LowRankSummary {
        interior_nodes: count,
        lowrank_fraction: frac(low),
        maxrank_fraction: frac(full),
        max_residual: max_res,
        max_wedge,
    }
}

pub fn lowrank_scan(jets: &JetField, tol: &Tolerances) -> Result<LowRankSummary> {
    let records = analyze_nodes(jets, tol)?;
    Ok(summarize(&records, jets.dim().n(), jets.m()))
}

pub fn maxrank_scan(jets: &JetField, tol: f64) -> Result<f64> {
    if jets.m() > jets.dim().ambient() {
        return Err(Error::Incompatible(format!(
            "m = {} exceeds 2n+1 = {}",
            jets.m(),
            jets.dim().ambient()
        )));
    }
    let tol = Tolerances {
        rank: tol,
        wedge: None,
    };
    Ok(lowrank_scan(jets, &tol)?.maxrank_fraction)
}

/// Deviation `∇g − (−x₂, x₁)` of a scalar function on a planar grid from
/// the tangency field of a horizontal graph `(x₁, x₂, g)`.
pub fn bv_graph_tangency(g: &GridField) -> Result<GridField> {
    let d = g.domain();
    if d.m() != 2 || g.width() != 1 {
        return Err(Error::Incompatible(
            "expected a scalar field on a 2D grid".into(),
        ));
    }
    let (grad, _) = fd_jacobian(g);
    let mut values = Vec::with_capacity(grad.len());
    for node in 0..d.node_count() {
        let x = d.coord(node);
        values.push(grad[2 * node] + x[1]);
        values.push(grad[2 * node + 1] - x[0]);
    }
    GridField::new(d.clone(), 2, values)
}

use rustc_hash::FxHashMap;
use serde::Serialize;

use super::BoxMetric;
use crate::error::{Error, Result};
use crate::heis::{HPoint, HeisDim};
use crate::jets::{GridDomain, Mapping, SampledMap};

/// Clouds above this size are not searched exhaustively for isolated points.
const BRUTE_FORCE_LIMIT: usize = 20_000;

/// Largest gap between neighbouring samples, in a box quasi-metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spacing {
    pub value: f64,
    /// `value` only bounds the true spacing from below.
    pub lower_bound: bool,
}

/// A finite sample of a set in `H^n`, visited in a fixed order.
///
/// Points are passed as coordinate slices `(x, y, t)` of length `2n+1`.
pub trait PointSource: Sync {
    fn dim(&self) -> HeisDim;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of pieces the source can be split into for parallel visits.
    fn max_partitions(&self) -> usize;

    /// Visits the points of piece `part` out of `parts`. Pieces are disjoint
    /// and cover the source.
    ///
    /// Sources that know which samples are neighbours return, per
    /// coordinate, the largest difference between neighbouring samples of
    /// the piece and its boundary.
    fn visit(&self, part: usize, parts: usize, f: &mut dyn FnMut(&[f64])) -> Option<Vec<f64>>;

    /// Largest distance from a sample to its nearest neighbour. `probe` is
    /// a hint for the scale of interest.
    fn spacing(&self, metric: BoxMetric, probe: f64) -> Spacing;
}

fn piece(len: usize, part: usize, parts: usize) -> std::ops::Range<usize> {
    (len * part / parts)..(len * (part + 1) / parts)
}

/// Explicit samples with optional per-point weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: HeisDim,
    coords: Vec<f64>,
    weights: Option<Vec<f64>>,
}

impl PointCloud {
    /// `coords` holds `2n+1` values per point.
    pub fn new(dim: HeisDim, coords: Vec<f64>, weights: Option<Vec<f64>>) -> Result<Self> {
        let w = dim.ambient();
        if coords.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if coords.len() % w != 0 {
            return Err(Error::DimensionMismatch {
                expected: w,
                found: coords.len() % w,
            });
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("cloud coordinates"));
        }
        if let Some(ws) = &weights {
            if ws.len() != coords.len() / w {
                return Err(Error::DimensionMismatch {
                    expected: coords.len() / w,
                    found: ws.len(),
                });
            }
            if ws.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::NonFinite("cloud weights"));
            }
        }
        Ok(PointCloud {
            dim,
            coords,
            weights,
        })
    }

    pub fn from_points(points: &[HPoint]) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyCloud)?.dim();
        let mut coords = Vec::with_capacity(points.len() * dim.ambient());
        for p in points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim.n(),
                    found: p.dim().n(),
                });
            }
            coords.extend(p.to_coords());
        }
        PointCloud::new(dim, coords, None)
    }

    /// Node values of a sampled map, each weighted by the cell volume.
    pub fn from_sampled(map: &SampledMap) -> Result<Self> {
        let d = map.domain();
        let vol: f64 = d.spacing().iter().product();
        PointCloud::new(
            map.dim(),
            map.values().to_vec(),
            Some(vec![vol; d.node_count()]),
        )
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let w = self.dim.ambient();
        &self.coords[i * w..(i + 1) * w]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Applies `g` to every point.
    pub fn map_points(&self, mut g: impl FnMut(&[f64]) -> Vec<f64>) -> Result<PointCloud> {
        let mut coords = Vec::with_capacity(self.coords.len());
        for i in 0..self.len() {
            coords.extend(g(self.point(i)));
        }
        PointCloud::new(self.dim, coords, self.weights.clone())
    }

    fn nearest_brute(&self, i: usize, metric: BoxMetric) -> f64 {
        let p = self.point(i);
        (0..self.len())
            .filter(|&j| j != i)
            .map(|j| metric.distance(p, self.point(j)))
            .fold(f64::INFINITY, f64::min)
    }
}

impl PointSource for PointCloud {
    fn dim(&self) -> HeisDim {
        self.dim
    }

    fn len(&self) -> usize {
        self.coords.len() / self.dim.ambient()
    }

    fn max_partitions(&self) -> usize {
        self.len()
    }

    fn visit(&self, part: usize, parts: usize, f: &mut dyn FnMut(&[f64])) -> Option<Vec<f64>> {
        for i in piece(self.len(), part, parts) {
            f(self.point(i));
        }
        None
    }

    /// Neighbours are searched among the adjacent cells of a box grid at
    /// scale `probe`; points with none there are searched exhaustively when
    /// the cloud is small, otherwise the result is a lower bound.
    fn spacing(&self, metric: BoxMetric, probe: f64) -> Spacing {
        let len = self.len();
        if len == 1 {
            return Spacing {
                value: 0.0,
                lower_bound: false,
            };
        }
        let w = self.dim.ambient();
        let sides = metric.sides(w, probe);
        let cell = |p: &[f64]| -> Vec<i64> {
            p.iter()
                .zip(&sides)
                .map(|(c, s)| (c / s).floor() as i64)
                .collect()
        };
        let mut grid: FxHashMap<Vec<i64>, Vec<usize>> = FxHashMap::default();
        for i in 0..len {
            grid.entry(cell(self.point(i))).or_default().push(i);
        }
        let offsets: Vec<Vec<i64>> = (0..3usize.pow(w as u32))
            .map(|mut c| {
                (0..w)
                    .map(|_| {
                        let o = (c % 3) as i64 - 1;
                        c /= 3;
                        o
                    })
                    .collect()
            })
            .collect();
        let mut value = 0.0f64;
        let mut lower_bound = false;
        for i in 0..len {
            let p = self.point(i);
            let base = cell(p);
            let mut best = f64::INFINITY;
            for off in &offsets {
                let key: Vec<i64> = base.iter().zip(off).map(|(a, b)| a + b).collect();
                if let Some(ids) = grid.get(&key) {
                    for &j in ids {
                        if j != i {
                            best = best.min(metric.distance(p, self.point(j)));
                        }
                    }
                }
            }
            if best > probe {
                if len <= BRUTE_FORCE_LIMIT {
                    best = self.nearest_brute(i, metric);
                } else {
                    best = best.min(probe);
                    lower_bound = true;
                }
            }
            value = value.max(best);
        }
        Spacing { value, lower_bound }
    }
}

/// A map sampled lazily on a parameter grid. Points are produced while
/// streaming, so grids far larger than memory can be counted.
#[derive(Debug, Clone)]
pub struct MapCloud<M> {
    map: M,
    domain: GridDomain,
}

impl<M: Mapping> MapCloud<M> {
    pub fn new(map: M, domain: GridDomain) -> Result<Self> {
        if map.source_dim() != domain.m() {
            return Err(Error::DimensionMismatch {
                expected: map.source_dim(),
                found: domain.m(),
            });
        }
        Ok(MapCloud { map, domain })
    }

    /// `counts[k]` nodes spanning `[lo[k], hi[k]]`, with no node cap.
    pub fn uniform(map: M, lo: &[f64], hi: &[f64], counts: &[usize]) -> Result<Self> {
        let spacing: Vec<f64> = (0..lo.len())
            .map(|k| (hi[k] - lo[k]) / (counts[k].max(2) - 1) as f64)
            .collect();
        let domain = GridDomain::with_cap(lo.to_vec(), spacing, counts.to_vec(), usize::MAX)?;
        MapCloud::new(map, domain)
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn map(&self) -> &M {
        &self.map
    }

    /// Parameter-space volume of one cell.
    pub fn cell_weight(&self) -> f64 {
        self.domain.spacing().iter().product()
    }

    /// Calls `f(prefix, y)` for every row of nodes along the last axis,
    /// where `prefix` indexes the other axes (empty when `m = 1`) and `y`
    /// holds their coordinates. The first axis is restricted to `rows`.
    fn walk_rows(&self, rows: std::ops::Range<usize>, mut f: impl FnMut(&[usize], &mut [f64])) {
        let d = &self.domain;
        let m = d.m();
        let mut y = vec![0.0; m];
        if m == 1 {
            f(&[], &mut y);
            return;
        }
        if rows.is_empty() {
            return;
        }
        let mut idx = vec![0usize; m - 1];
        idx[0] = rows.start;
        loop {
            for k in 0..m - 1 {
                y[k] = d.origin()[k] + idx[k] as f64 * d.spacing()[k];
            }
            f(&idx, &mut y);
            let mut k = m - 1;
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                idx[k] += 1;
                let limit = if k == 0 { rows.end } else { d.counts()[k] };
                if idx[k] < limit {
                    break;
                }
                if k == 0 {
                    return;
                }
                idx[k] = 0;
            }
        }
    }
}

impl<M: Mapping> PointSource for MapCloud<M> {
    fn dim(&self) -> HeisDim {
        self.map.heis_dim()
    }

    fn len(&self) -> usize {
        self.domain.node_count()
    }

    fn max_partitions(&self) -> usize {
        self.domain.counts()[0]
    }

    /// The previous node and the previous row are kept while streaming;
    /// neighbours along slower axes, and across the start of a piece, are
    /// evaluated directly.
    fn visit(&self, part: usize, parts: usize, f: &mut dyn FnMut(&[f64])) -> Option<Vec<f64>> {
        let d = &self.domain;
        let m = d.m();
        let w = self.dim().ambient();
        let first = piece(d.counts()[0], part, parts);
        let (o, h) = (d.origin()[m - 1], d.spacing()[m - 1]);
        let along = if m == 1 {
            first.clone()
        } else {
            0..d.counts()[m - 1]
        };
        let mut row = vec![0.0; if m >= 2 { along.len() * w } else { 0 }];
        let mut row_valid = false;
        let mut prev = vec![0.0; w];
        let mut cur = vec![0.0; w];
        let mut other = vec![0.0; w];
        let mut ynb = vec![0.0; m];
        let mut gaps = vec![0.0f64; w];
        fn widen(gaps: &mut [f64], a: &[f64], b: &[f64]) {
            for ((g, x), y) in gaps.iter_mut().zip(a).zip(b) {
                *g = g.max((x - y).abs());
            }
        }
        self.walk_rows(first, |idx, y| {
            let slow = m >= 2 && idx[m - 2] > 0;
            for j in along.clone() {
                y[m - 1] = o + j as f64 * h;
                self.map.eval(y, &mut cur);
                f(&cur);
                if j > along.start {
                    widen(&mut gaps, &cur, &prev);
                } else if j > 0 {
                    ynb.copy_from_slice(y);
                    ynb[m - 1] = o + (j - 1) as f64 * h;
                    self.map.eval(&ynb, &mut other);
                    widen(&mut gaps, &cur, &other);
                }
                if slow {
                    let slot = &mut row[(j - along.start) * w..(j - along.start + 1) * w];
                    if row_valid {
                        widen(&mut gaps, &cur, slot);
                    } else {
                        ynb.copy_from_slice(y);
                        ynb[m - 2] =
                            d.origin()[m - 2] + (idx[m - 2] - 1) as f64 * d.spacing()[m - 2];
                        self.map.eval(&ynb, &mut other);
                        widen(&mut gaps, &cur, &other);
                    }
                }
                for k in 0..m.saturating_sub(2) {
                    if idx[k] > 0 {
                        ynb.copy_from_slice(y);
                        ynb[k] = d.origin()[k] + (idx[k] - 1) as f64 * d.spacing()[k];
                        self.map.eval(&ynb, &mut other);
                        widen(&mut gaps, &cur, &other);
                    }
                }
                if m >= 2 {
                    row[(j - along.start) * w..(j - along.start + 1) * w].copy_from_slice(&cur);
                }
                std::mem::swap(&mut prev, &mut cur);
            }
            row_valid = true;
        });
        Some(gaps)
    }

    /// Largest distance between images of grid-adjacent nodes.
    fn spacing(&self, metric: BoxMetric, _probe: f64) -> Spacing {
        let gaps = self
            .visit(0, 1, &mut |_| {})
            .expect("map clouds track gaps");
        Spacing {
            value: metric.from_gaps(&gaps),
            lower_bound: false,
        }
    }
}

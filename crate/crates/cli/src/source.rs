//! Map sources shared by the commands.

use std::path::Path;

use heislab::heis::HeisDim;
use heislab::io::{sampled_map_from_csv, sampled_map_from_json};
use heislab::jets::{GalleryMap, GridDomain, Mapping, SampledMap};

use crate::config::Config;
use crate::error::{CliError, CliResult};

pub enum MapSource {
    Gallery(GalleryMap),
    Sampled(SampledMap),
}

impl MapSource {
    /// From `gallery = id` or `input = path.{csv,json}`; exactly one.
    pub fn from_config(c: &Config) -> CliResult<Self> {
        match (c.raw("gallery"), c.raw("input")) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "give either `gallery` or `input`, not both".into(),
            )),
            (None, None) => Err(CliError::Config(
                "missing map source: set `gallery` or `input`".into(),
            )),
            (Some(id), None) => Ok(MapSource::Gallery(id.parse()?)),
            (None, Some(path)) => Ok(MapSource::Sampled(read_sampled(Path::new(path))?)),
        }
    }

    pub fn source_dim(&self) -> usize {
        match self {
            MapSource::Gallery(g) => g.source_dim(),
            MapSource::Sampled(s) => s.domain().m(),
        }
    }

    pub fn heis_dim(&self) -> HeisDim {
        match self {
            MapSource::Gallery(g) => g.heis_dim(),
            MapSource::Sampled(s) => s.dim(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            MapSource::Gallery(g) => format!("gallery:{g}"),
            MapSource::Sampled(_) => "input".into(),
        }
    }
}

pub fn read_sampled(path: &Path) -> CliResult<SampledMap> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let parsed = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => sampled_map_from_json(&text),
        Some("csv") => sampled_map_from_csv(&text),
        _ => {
            return Err(CliError::Config(format!(
                "{}: expected a .csv or .json file",
                path.display()
            )))
        }
    };
    Ok(parsed?)
}

/// Per-axis values from a list of one or `m` entries.
pub fn per_axis<T: Copy>(name: &str, v: Vec<T>, m: usize) -> CliResult<Vec<T>> {
    match v.len() {
        1 => Ok(vec![v[0]; m]),
        k if k == m => Ok(v),
        k => Err(CliError::Config(format!(
            "`{name}` has {k} entries; expected 1 or {m}"
        ))),
    }
}

/// Box `[lo, hi]` and node counts from `lo`, `hi` and `count`.
pub fn grid_from_config(c: &Config, m: usize) -> CliResult<(Vec<f64>, Vec<f64>, Vec<usize>)> {
    let lo = per_axis("lo", c.list::<f64>("lo")?.unwrap_or(vec![-1.0]), m)?;
    let hi = per_axis("hi", c.list::<f64>("hi")?.unwrap_or(vec![1.0]), m)?;
    let counts = per_axis("count", c.list::<usize>("count")?.unwrap_or(vec![129]), m)?;
    if lo.iter().zip(&hi).any(|(a, b)| !(a < b)) {
        return Err(CliError::Config("every `lo` must be below `hi`".into()));
    }
    Ok((lo, hi, counts))
}

pub fn domain_from_box(lo: &[f64], hi: &[f64], counts: &[usize]) -> CliResult<GridDomain> {
    let spacing = lo
        .iter()
        .zip(hi)
        .zip(counts)
        .map(|((a, b), &c)| (b - a) / (c.max(2) - 1) as f64)
        .collect();
    Ok(GridDomain::new(lo.to_vec(), spacing, counts.to_vec())?)
}

/// Restriction of a map to the plane through `base` spanned by two axes.
pub struct PlaneRestriction<M> {
    pub base: M,
    pub axes: [usize; 2],
    pub point: Vec<f64>,
}

impl<M: Mapping> PlaneRestriction<M> {
    fn lift(&self, y: &[f64]) -> Vec<f64> {
        let mut p = self.point.clone();
        p[self.axes[0]] = y[0];
        p[self.axes[1]] = y[1];
        p
    }
}

impl<M: Mapping> Mapping for PlaneRestriction<M> {
    fn heis_dim(&self) -> HeisDim {
        self.base.heis_dim()
    }
    fn source_dim(&self) -> usize {
        2
    }
    fn eval(&self, y: &[f64], out: &mut [f64]) {
        self.base.eval(&self.lift(y), out)
    }
    fn jacobian(&self, y: &[f64]) -> Option<Vec<f64>> {
        let m = self.base.source_dim();
        let full = self.base.jacobian(&self.lift(y))?;
        Some(
            full.chunks(m)
                .flat_map(|row| [row[self.axes[0]], row[self.axes[1]]])
                .collect(),
        )
    }
}

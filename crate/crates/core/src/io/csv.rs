use serde::{Deserialize, Serialize};

use super::{f17, to_json_string};
use crate::contact::NodeRecord;
use crate::error::{Error, Result};
use crate::heis::HeisDim;
use crate::jets::{GridDomain, SampledMap};
use crate::measure::{CoverReport, PointCloud, PointSource};

fn value_names(dim: HeisDim) -> Vec<String> {
    let n = dim.n();
    let mut names: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
    names.extend((1..=n).map(|j| format!("y{j}")));
    names.push("t".into());
    names
}

fn push_row(s: &mut String, fields: impl IntoIterator<Item = String>) {
    let mut first = true;
    for f in fields {
        if !first {
            s.push(',');
        }
        s.push_str(&f);
        first = false;
    }
    s.push('\n');
}

/// One row per node: source coordinates `s1..sm`, then the values.
pub fn sampled_map_to_csv(f: &SampledMap) -> String {
    let d = f.domain();
    let mut s = String::new();
    let header = (1..=d.m())
        .map(|k| format!("s{k}"))
        .chain(value_names(f.dim()));
    push_row(&mut s, header);
    for node in 0..d.node_count() {
        push_row(
            &mut s,
            d.coord(node)
                .into_iter()
                .chain(f.at(node).iter().copied())
                .map(f17),
        );
    }
    s
}

/// Numeric records with their 1-based line numbers; `#` starts a comment.
fn records(text: &str) -> Result<Vec<(u64, Vec<String>)>> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(::csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| {
            let r = r.map_err(|e| Error::Parse(e.to_string()))?;
            let line = r.position().map_or(0, |p| p.line());
            Ok((line, r.iter().map(str::to_string).collect()))
        })
        .filter(|r: &Result<(u64, Vec<String>)>| !matches!(r, Ok((_, f)) if f.len() == 1 && f[0].is_empty()))
        .collect()
}

fn parse_row(fields: &[String], line: u64) -> Result<Vec<f64>> {
    fields
        .iter()
        .map(|c| {
            c.parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {line}: `{c}`: {e}")))
        })
        .collect()
}

/// Inverse of [`sampled_map_to_csv`]. The grid is recovered from the
/// coordinate columns, which must list a uniform grid in node order.
pub fn sampled_map_from_csv(text: &str) -> Result<SampledMap> {
    let mut lines = records(text)?.into_iter();
    let (_, cols) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty file".into()))?;
    let m = cols.iter().take_while(|c| c.starts_with('s')).count();
    let dim = HeisDim::from_ambient(cols.len() - m)?;
    if m == 0 || cols[m..] != value_names(dim)[..] {
        return Err(Error::Parse(format!(
            "unexpected header `{}`",
            cols.join(",")
        )));
    }
    let rows = lines
        .map(|(i, l)| parse_row(&l, i))
        .collect::<Result<Vec<_>>>()?;
    if let Some(r) = rows.iter().find(|r| r.len() != cols.len()) {
        return Err(Error::Parse(format!(
            "row with {} fields, expected {}",
            r.len(),
            cols.len()
        )));
    }
    let mut origin = Vec::with_capacity(m);
    let mut spacing = Vec::with_capacity(m);
    let mut counts = Vec::with_capacity(m);
    for k in 0..m {
        let mut axis: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        axis.sort_by(f64::total_cmp);
        axis.dedup();
        let c = axis.len();
        origin.push(axis[0]);
        spacing.push(if c > 1 {
            (axis[c - 1] - axis[0]) / (c - 1) as f64
        } else {
            0.0
        });
        counts.push(c);
    }
    let domain = GridDomain::new(origin, spacing, counts)?;
    if rows.len() != domain.node_count() {
        return Err(Error::Parse(format!(
            "{} rows do not fill a {:?} grid",
            rows.len(),
            domain.counts()
        )));
    }
    let mut values = Vec::with_capacity(rows.len() * dim.ambient());
    for (node, r) in rows.iter().enumerate() {
        let c = domain.coord(node);
        for k in 0..m {
            if (c[k] - r[k]).abs() > 1e-9 * (1.0 + c[k].abs()) {
                return Err(Error::Parse(format!(
                    "row {} is not at grid node {node}",
                    node + 1
                )));
            }
        }
        values.extend_from_slice(&r[m..]);
    }
    SampledMap::new(domain, dim, values)
}

#[derive(Serialize, Deserialize)]
struct SampledMapFile {
    n: usize,
    domain: GridDomain,
    values: Vec<Vec<f64>>,
}

pub fn sampled_map_to_json(f: &SampledMap) -> Result<String> {
    let file = SampledMapFile {
        n: f.dim().n(),
        domain: f.domain().clone(),
        values: (0..f.domain().node_count())
            .map(|i| f.at(i).to_vec())
            .collect(),
    };
    to_json_string(&file)
}

pub fn sampled_map_from_json(text: &str) -> Result<SampledMap> {
    let file: SampledMapFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let d = &file.domain;
    let domain = GridDomain::new(
        d.origin().to_vec(),
        d.spacing().to_vec(),
        d.counts().to_vec(),
    )?;
    let dim = HeisDim::new(file.n)?;
    if let Some(v) = file.values.iter().find(|v| v.len() != dim.ambient()) {
        return Err(Error::DimensionMismatch {
            expected: dim.ambient(),
            found: v.len(),
        });
    }
    SampledMap::new(domain, dim, file.values.concat())
}

/// Per-node residuals, wedge maxima and ranks.
pub fn nodes_to_csv(records: &[NodeRecord]) -> String {
    let m = records.first().map_or(0, |r| r.coords.len());
    let mut s = String::new();
    let header = std::iter::once("node".to_string())
        .chain((1..=m).map(|k| format!("s{k}")))
        .chain(["boundary".to_string()])
        .chain((1..=m).map(|k| format!("rho{k}")))
        .chain(["residual_norm", "wedge_max", "rank"].map(String::from));
    push_row(&mut s, header);
    for r in records {
        let row = std::iter::once(r.node.to_string())
            .chain(r.coords.iter().copied().map(f17))
            .chain([(r.boundary as u8).to_string()])
            .chain(r.residual.iter().copied().map(f17))
            .chain([f17(r.residual_norm), f17(r.wedge_max), r.rank.to_string()]);
        push_row(&mut s, row);
    }
    s
}

/// Reads `x…, y…, t` rows. A first line that does not parse as numbers is
/// taken as a header.
pub fn cloud_from_csv(text: &str) -> Result<PointCloud> {
    let mut coords = Vec::new();
    let mut width = None;
    for (k, (i, fields)) in records(text)?.into_iter().enumerate() {
        let row = match parse_row(&fields, i) {
            Ok(r) => r,
            Err(_) if k == 0 => continue,
            Err(e) => return Err(e),
        };
        let w = *width.get_or_insert(row.len());
        if row.len() != w {
            return Err(Error::Parse(format!(
                "line {i}: {} fields, expected {w}",
                row.len()
            )));
        }
        coords.extend(row);
    }
    let w = width.ok_or(Error::EmptyCloud)?;
    PointCloud::new(HeisDim::from_ambient(w)?, coords, None)
}

pub fn cloud_to_csv(cloud: &PointCloud) -> String {
    let mut s = String::new();
    push_row(&mut s, value_names(cloud.dim()));
    for i in 0..cloud.len() {
        push_row(&mut s, cloud.point(i).iter().copied().map(f17));
    }
    s
}

pub fn cover_table_csv(reports: &[CoverReport]) -> String {
    let mut s = String::from("gauge,delta,count,exponent,content\n");
    for r in reports {
        let opt = |v: Option<f64>| v.map(f17).unwrap_or_default();
        push_row(
            &mut s,
            [
                r.gauge.name().to_string(),
                f17(r.delta),
                r.count.to_string(),
                opt(r.exponent),
                opt(r.content),
            ],
        );
    }
    s
}

//! The experiment commands. Each writes its outputs into the `out`
//! directory and returns the file names written.

use std::path::{Path, PathBuf};

use serde::Serialize;

use heislab::blowup::{blowup_report, RhoSchedule, DEFAULT_RADII};
use heislab::contact::{
    analyze_nodes, maxrank_scan, summarize, wedge_field, wedge_field_by_slicing, LowRankSummary,
    Tolerances,
};
use heislab::heis::GaugeChoice;
use heislab::io::{
    cloud_from_csv, cover_table_csv, heatmap_svg, loglog_svg, nodes_to_csv, to_json_string, Series,
};
use heislab::jets::{
    jacobian_analytic, jacobian_fd, Bounded, GalleryMap, Interpolated, JetField, Mapping,
};
use heislab::measure::{
    box_counts, contents_from_counts, dyadic_scales, fit_counts, ContentSeries, DimensionFit,
    MapCloud, PointSource,
};

use crate::certify::{certify, CertifyOptions, CertifyReport};
use crate::config::{key, Config, Key};
use crate::error::{CliError, CliResult};
use crate::source::{domain_from_box, grid_from_config, per_axis, MapSource, PlaneRestriction};

pub const COMMON_KEYS: [Key; 2] = [
    key("out", Some("heislab-out"), "output directory"),
    key("svg", Some("true"), "also write SVG plots"),
];

pub const ANALYZE_KEYS: &[Key] = &[
    key("gallery", None, "gallery map id, or linear:a,b;c,d;..."),
    key("input", None, "sampled map file (.csv or .json)"),
    key(
        "lo",
        Some("-1"),
        "lower corner of the grid box (one value or one per axis)",
    ),
    key("hi", Some("1"), "upper corner of the grid box"),
    key("count", Some("129"), "nodes per axis"),
    key(
        "jacobian",
        Some("fd"),
        "fd (central differences) or analytic",
    ),
    key(
        "rank-tol",
        Some("1e-8"),
        "relative singular-value tolerance",
    ),
    key(
        "wedge-tol",
        None,
        "absolute wedge tolerance (default scales with the Jacobian)",
    ),
];

pub const BLOWUP_KEYS: &[Key] = &[
    key("gallery", None, "gallery map id"),
    key("input", None, "sampled map file on a 2D grid"),
    key("center", None, "blow-up point z, comma separated"),
    key(
        "plane",
        None,
        "two 1-based axes spanning the plane, for m > 2",
    ),
    key("lo", Some("-1"), "lower corner of the domain box"),
    key("hi", Some("1"), "upper corner of the domain box"),
    key("rho0", Some("0.5"), "largest blow-up scale"),
    key("steps", Some("8"), "number of halvings of rho0"),
    key(
        "radii",
        Some("0.3,0.5,0.7"),
        "circle radii in the unit disc",
    ),
];

pub const MEASURE_KEYS: &[Key] = &[
    key("gallery", None, "gallery map id sampled on a grid"),
    key("cloud", None, "point cloud CSV (x..., y..., t per row)"),
    key("lo", Some("0"), "lower corner of the parameter box"),
    key("hi", Some("1"), "upper corner of the parameter box"),
    key("count", Some("1025"), "nodes per parameter axis"),
    key("scales", None, "explicit scale list; overrides scale-exps"),
    key(
        "scale-exps",
        Some("2,7"),
        "a,b for the dyadic schedule 2^-a .. 2^-b",
    ),
    key("gauge", Some("both"), "koranyi, euclidean, cc or both"),
    key(
        "exponent",
        None,
        "content exponent s (default m + 1 for gallery maps)",
    ),
    key("rank-tol", Some("1e-8"), "tolerance of the max-rank check"),
];

pub const CERTIFY_KEYS: &[Key] = &[
    key("seed", Some("1"), "random seed"),
    key("trials", Some("1000"), "trials per battery"),
    key("ns", Some("1,2,3"), "Heisenberg dimensions n to draw from"),
    key(
        "corrupt-j",
        Some("false"),
        "negate the lower block of J (negative control)",
    ),
];

pub fn keys_for(command: &str) -> Option<&'static [Key]> {
    match command {
        "analyze" => Some(ANALYZE_KEYS),
        "blowup" => Some(BLOWUP_KEYS),
        "measure" => Some(MEASURE_KEYS),
        "certify" => Some(CERTIFY_KEYS),
        _ => None,
    }
}

pub struct Outputs {
    dir: PathBuf,
    pub files: Vec<String>,
}

impl Outputs {
    pub fn new(c: &Config) -> CliResult<Self> {
        let dir = PathBuf::from(c.raw("out").unwrap_or("heislab-out"));
        std::fs::create_dir_all(&dir)?;
        Ok(Outputs {
            dir,
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, text: &str) -> CliResult<()> {
        std::fs::write(self.dir.join(name), text)?;
        self.files.push(name.to_string());
        Ok(())
    }
}

#[derive(Serialize)]
struct PairWedge {
    k: usize,
    l: usize,
    max_abs: f64,
}

#[derive(Serialize)]
struct AnalyzeSummary {
    source: String,
    n: usize,
    m: usize,
    counts: Vec<usize>,
    jacobian: String,
    rank_tol: f64,
    summary: LowRankSummary,
    /// Fraction of interior nodes of rank `m`; absent when `m > 2n + 1`.
    maxrank_fraction: Option<f64>,
    /// Largest `|W_kl|` per axis pair over interior nodes, from sections.
    pairs: Vec<PairWedge>,
    /// Largest difference between the sectioned and the direct wedge.
    slicing_discrepancy: Option<f64>,
}

fn jets_for(src: &MapSource, c: &Config) -> CliResult<(heislab::jets::SampledMap, JetField)> {
    let m = src.source_dim();
    let method = c.raw("jacobian").unwrap_or("fd");
    let sampled = match src {
        MapSource::Gallery(g) => {
            let (lo, hi, counts) = grid_from_config(c, m)?;
            g.sample(&domain_from_box(&lo, &hi, &counts)?)?
        }
        MapSource::Sampled(s) => s.clone(),
    };
    let jets = match (method, src) {
        ("fd", _) => jacobian_fd(&sampled)?,
        ("analytic", MapSource::Gallery(g)) => jacobian_analytic(g, sampled.domain())
            .ok_or_else(|| CliError::Config(format!("{g} has no analytic Jacobian")))?,
        ("analytic", _) => {
            return Err(CliError::Config(
                "analytic Jacobians need a gallery map".into(),
            ))
        }
        (other, _) => {
            return Err(CliError::Config(format!(
                "unknown jacobian method `{other}`"
            )))
        }
    };
    Ok((sampled, jets))
}

pub fn analyze(c: &Config, out: &mut Outputs) -> CliResult<()> {
    let src = MapSource::from_config(c)?;
    let tol = Tolerances {
        rank: c.positive("rank-tol")?.unwrap_or(1e-8),
        wedge: c.positive("wedge-tol")?,
    };
    let (sampled, jets) = jets_for(&src, c)?;
    let d = sampled.domain();
    let (n, m) = (sampled.dim().n(), d.m());
    let records = analyze_nodes(&jets, &tol)?;
    let summary = summarize(&records, n, m);
    let maxrank_fraction = if m <= sampled.dim().ambient() {
        Some(maxrank_scan(&jets, tol.rank)?)
    } else {
        None
    };

    let mut pairs = Vec::new();
    let mut slicing_discrepancy = None;
    if m >= 2 {
        let direct = wedge_field(&jets);
        let sliced = if m > 2 {
            Some(wedge_field_by_slicing(&sampled)?)
        } else {
            None
        };
        let field = sliced.as_ref().unwrap_or(&direct);
        for k in 0..m {
            for l in k + 1..m {
                let max_abs = jets
                    .interior_nodes()
                    .map(|node| field.at(node)[k * m + l].abs())
                    .fold(0.0, f64::max);
                pairs.push(PairWedge {
                    k: k + 1,
                    l: l + 1,
                    max_abs,
                });
            }
        }
        if let (Some(s), "fd") = (&sliced, c.raw("jacobian").unwrap_or("fd")) {
            let gap = jets
                .interior_nodes()
                .flat_map(|node| {
                    s.at(node)
                        .iter()
                        .zip(direct.at(node))
                        .map(|(a, b)| (a - b).abs())
                })
                .fold(0.0, f64::max);
            slicing_discrepancy = Some(gap);
        }
    }

    out.write("nodes.csv", &nodes_to_csv(&records))?;
    let report = AnalyzeSummary {
        source: src.describe(),
        n,
        m,
        counts: d.counts().to_vec(),
        jacobian: c.raw("jacobian").unwrap_or("fd").to_string(),
        rank_tol: tol.rank,
        summary,
        maxrank_fraction,
        pairs,
        slicing_discrepancy,
    };
    out.write("summary.json", &to_json_string(&report)?)?;
    if m == 2 && c.flag("svg")? {
        let (rows, cols) = (d.counts()[0], d.counts()[1]);
        let residual: Vec<f64> = records
            .iter()
            .map(|r| {
                if r.boundary {
                    f64::NAN
                } else {
                    r.residual_norm
                }
            })
            .collect();
        let wedge: Vec<f64> = records
            .iter()
            .map(|r| if r.boundary { f64::NAN } else { r.wedge_max })
            .collect();
        out.write(
            "residual.svg",
            &heatmap_svg("contact residual norm", rows, cols, &residual)?,
        )?;
        out.write(
            "wedge.svg",
            &heatmap_svg("wedge max |W|", rows, cols, &wedge)?,
        )?;
    }
    Ok(())
}

pub fn blowup(c: &Config, out: &mut Outputs) -> CliResult<()> {
    let src = MapSource::from_config(c)?;
    let center: Vec<f64> = c
        .list("center")?
        .ok_or_else(|| CliError::Config("missing required key `center`".into()))?;
    let schedule = RhoSchedule::new(c.positive("rho0")?.unwrap_or(0.5), c.require("steps")?)?;
    let radii: Vec<f64> = c.list("radii")?.unwrap_or(DEFAULT_RADII.to_vec());
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
        return Err(CliError::Config(format!(
            "circle radius {r} outside (0, 1)"
        )));
    }
    let m = src.source_dim();
    if center.len() != m {
        return Err(CliError::Config(format!(
            "`center` has {} entries; the map has m = {m}",
            center.len()
        )));
    }
    let report = match &src {
        MapSource::Gallery(g) => {
            let lo = per_axis("lo", c.list::<f64>("lo")?.unwrap_or(vec![-1.0]), m)?;
            let hi = per_axis("hi", c.list::<f64>("hi")?.unwrap_or(vec![1.0]), m)?;
            match (m, c.list::<usize>("plane")?) {
                (2, None) => {
                    let f = Bounded { base: g, lo, hi };
                    blowup_report(&f, &center, &schedule, &radii, None)?
                }
                (_, Some(p)) => {
                    if p.len() != 2 || p[0] == p[1] || p.iter().any(|&a| a == 0 || a > m) {
                        return Err(CliError::Config(format!(
                            "`plane` must name two distinct axes in 1..={m}"
                        )));
                    }
                    let axes = [p[0] - 1, p[1] - 1];
                    let f = Bounded {
                        base: PlaneRestriction {
                            base: g,
                            axes,
                            point: center.clone(),
                        },
                        lo: axes.iter().map(|&a| lo[a]).collect(),
                        hi: axes.iter().map(|&a| hi[a]).collect(),
                    };
                    let z = [center[axes[0]], center[axes[1]]];
                    blowup_report(&f, &z, &schedule, &radii, None)?
                }
                (_, None) => {
                    return Err(CliError::Config(format!(
                        "m = {m}: choose a plane with `plane = k,l`"
                    )))
                }
            }
        }
        MapSource::Sampled(s) => {
            let f = Interpolated::new(s)?;
            let jets = jacobian_fd(s)?;
            let d = s.domain();
            let node = d
                .node_at(&center, 1e-9 * d.spacing()[0])
                .filter(|&node| !jets.is_boundary(node))
                .ok_or_else(|| {
                    CliError::Config("`center` must be an interior grid node of the input".into())
                })?;
            blowup_report(&f, &center, &schedule, &radii, Some(jets.jacobian(node)))?
        }
    };
    out.write("blowup.csv", &report.to_csv())?;
    out.write("blowup.json", &to_json_string(&report)?)?;
    if c.flag("svg")? {
        let mut series = vec![Series {
            label: "L1 blow-up error",
            points: report
                .rhos
                .iter()
                .copied()
                .zip(report.l1_errors.iter().copied())
                .collect(),
        }];
        let labels: Vec<String> = report
            .wedge
            .iter()
            .map(|w| format!("estimate steps, r = {}", w.radius))
            .collect();
        for (w, label) in report.wedge.iter().zip(&labels) {
            series.push(Series {
                label,
                points: w
                    .estimates
                    .windows(2)
                    .zip(&w.rhos)
                    .map(|(e, &rho)| (rho, (e[0] - e[1]).abs()))
                    .collect(),
            });
        }
        if series
            .iter()
            .any(|s| s.points.iter().any(|&(x, y)| x > 0.0 && y > 0.0))
        {
            out.write(
                "blowup.svg",
                &loglog_svg("blow-up convergence", "rho", "error", &series)?,
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct MeasureReport {
    source: String,
    points: usize,
    scales: Vec<f64>,
    fits: Vec<DimensionFit>,
    contents: Vec<ContentSeries>,
    /// Fraction of sampled parameters where the Jacobian has rank `m`.
    maxrank_fraction: Option<f64>,
    /// Whether the max-rank hypothesis holds on at least 99% of the grid;
    /// slopes are compared with `m + 1` only then.
    hypothesis_holds: Option<bool>,
}

const RANK_CHECK_NODES: usize = 33;

fn maxrank_check(g: &GalleryMap, lo: &[f64], hi: &[f64], tol: f64) -> CliResult<Option<f64>> {
    let m = g.source_dim();
    if m > g.heis_dim().ambient() {
        return Ok(None);
    }
    let d = domain_from_box(lo, hi, &vec![RANK_CHECK_NODES; m])?;
    match jacobian_analytic(g, &d) {
        Some(jets) => Ok(Some(maxrank_scan(&jets, tol)?)),
        None => Ok(None),
    }
}

pub fn measure(c: &Config, out: &mut Outputs) -> CliResult<()> {
    let scales = match c.list::<f64>("scales")? {
        Some(s) => s,
        None => {
            let e = c.list::<i32>("scale-exps")?.unwrap_or(vec![2, 7]);
            if e.len() != 2 || e[0] > e[1] {
                return Err(CliError::Config(
                    "`scale-exps` must be a,b with a <= b".into(),
                ));
            }
            dyadic_scales(e[0], e[1])
        }
    };
    let gauges = match c.raw("gauge").unwrap_or("both") {
        "both" => vec![GaugeChoice::Euclidean, GaugeChoice::Koranyi],
        other => vec![other.parse::<GaugeChoice>()?],
    };
    let rank_tol = c.positive("rank-tol")?.unwrap_or(1e-8);
    let exponent = c.get::<f64>("exponent")?;

    let (source, describe, default_s, rank): (
        Box<dyn PointSource>,
        String,
        Option<f64>,
        Option<f64>,
    ) = match (c.raw("gallery"), c.raw("cloud")) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "give either `gallery` or `cloud`, not both".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Config(
                "missing point source: set `gallery` or `cloud`".into(),
            ))
        }
        (Some(id), None) => {
            let g: GalleryMap = id.parse()?;
            let m = g.source_dim();
            let lo = per_axis("lo", c.list::<f64>("lo")?.unwrap_or(vec![0.0]), m)?;
            let hi = per_axis("hi", c.list::<f64>("hi")?.unwrap_or(vec![1.0]), m)?;
            let counts = per_axis("count", c.list::<usize>("count")?.unwrap_or(vec![1025]), m)?;
            let rank = maxrank_check(&g, &lo, &hi, rank_tol)?;
            let describe = format!("gallery:{g}");
            let cloud = MapCloud::uniform(g, &lo, &hi, &counts)?;
            (Box::new(cloud), describe, Some(m as f64 + 1.0), rank)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
            (
                Box::new(cloud_from_csv(&text)?),
                format!("cloud:{path}"),
                None,
                None,
            )
        }
    };
    let s = exponent.or(default_s);

    let mut fits = Vec::new();
    let mut contents = Vec::new();
    let mut table = Vec::new();
    for &g in &gauges {
        let counts = box_counts(source.as_ref(), &scales, g)?;
        fits.push(fit_counts(&scales, &counts, g)?);
        match s {
            Some(s) => {
                let series = contents_from_counts(&scales, &counts, s, g);
                table.extend(series.reports.iter().copied());
                contents.push(series);
            }
            None => table.extend(
                contents_from_counts(&scales, &counts, 0.0, g)
                    .reports
                    .into_iter()
                    .map(|mut r| {
                        r.exponent = None;
                        r.content = None;
                        r
                    }),
            ),
        }
    }
    out.write("counts.csv", &cover_table_csv(&table))?;
    let report = MeasureReport {
        source: describe,
        points: source.len(),
        scales: scales.clone(),
        fits,
        contents,
        maxrank_fraction: rank,
        hypothesis_holds: rank.map(|f| f >= 0.99),
    };
    out.write("measure.json", &to_json_string(&report)?)?;
    if c.flag("svg")? {
        let labels: Vec<String> = report
            .fits
            .iter()
            .map(|f| format!("{} (slope {:.3})", f.gauge.name(), f.slope))
            .collect();
        let series: Vec<Series> = report
            .fits
            .iter()
            .zip(&labels)
            .map(|(f, label)| Series {
                label,
                points: f
                    .scales
                    .iter()
                    .map(|d| 1.0 / d)
                    .zip(f.counts.iter().map(|&n| n as f64))
                    .collect(),
            })
            .collect();
        out.write(
            "counts.svg",
            &loglog_svg("box counts", "1/delta", "N(delta)", &series)?,
        )?;
    }
    Ok(())
}

pub fn certify_cmd(c: &Config, out: &mut Outputs) -> CliResult<CertifyReport> {
    let ns: Vec<usize> = c.list("ns")?.unwrap_or(vec![1, 2, 3]);
    if ns.is_empty() || ns.contains(&0) {
        return Err(CliError::Config("`ns` must list dimensions n >= 1".into()));
    }
    let trials: usize = c.require("trials")?;
    if trials == 0 {
        return Err(CliError::Config("`trials` must be positive".into()));
    }
    let report = certify(&CertifyOptions {
        seed: c.require("seed")?,
        trials,
        ns,
        corrupted_j: c.flag("corrupt-j")?,
    })?;
    out.write("certify.json", &to_json_string(&report)?)?;
    Ok(report)
}

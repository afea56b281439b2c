//! Box counting in `H^n` and dimension fits.
//!
//! Under the Korányi (or Carnot–Carathéodory) gauge a box at scale `δ` has
//! side `δ` in each horizontal coordinate and `δ²` in `t`, so dilations map
//! boxes to boxes. Under the Euclidean gauge boxes are cubes of side `δ`.
//! The grid origin is `0`.
//!
//! Counting streams the source once at the finest scale. When every other
//! scale is the finest one times a power of two, the coarser counts come
//! from merging box indices; otherwise each scale is streamed separately.
//! A source is refused unless its spacing is at most a quarter of the
//! finest scale, since an under-resolved cloud saturates at its sample
//! count and fakes a small dimension.

mod cover;
mod source;

pub use cover::greedy_cover;
pub use source::{MapCloud, PointCloud, PointSource, Spacing};

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::heis::GaugeChoice;

/// Required ratio between the finest scale and the sample spacing.
pub const RESOLUTION_FACTOR: f64 = 4.0;
pub const MIN_FIT_SCALES: usize = 4;
pub const MIN_FIT_DECADES: f64 = 1.5;

/// The box shape attached to a gauge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoxMetric {
    /// Side `δ` horizontally and `δ²` vertically.
    Anisotropic,
    /// Side `δ` on every axis.
    Cubic,
}

impl BoxMetric {
    pub fn of(gauge: GaugeChoice) -> Self {
        match gauge {
            GaugeChoice::Euclidean => BoxMetric::Cubic,
            GaugeChoice::Koranyi | GaugeChoice::CarnotCaratheodory => BoxMetric::Anisotropic,
        }
    }

    /// `max(|Δx|, |Δy|, |Δt|^{1/2})` or `max |Δ|`.
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        let w = a.len();
        let mut d = 0.0f64;
        for i in 0..w - 1 {
            d = d.max((a[i] - b[i]).abs());
        }
        let dt = (a[w - 1] - b[w - 1]).abs();
        d.max(match self {
            BoxMetric::Anisotropic => dt.sqrt(),
            BoxMetric::Cubic => dt,
        })
    }

    /// Spacing from per-coordinate maxima of neighbour differences.
    pub fn from_gaps(self, gaps: &[f64]) -> f64 {
        let w = gaps.len();
        let h = gaps[..w - 1].iter().copied().fold(0.0, f64::max);
        h.max(match self {
            BoxMetric::Anisotropic => gaps[w - 1].sqrt(),
            BoxMetric::Cubic => gaps[w - 1],
        })
    }

    pub(crate) fn sides(self, w: usize, delta: f64) -> Vec<f64> {
        let mut s = vec![delta; w];
        if self == BoxMetric::Anisotropic {
            s[w - 1] = delta * delta;
        }
        s
    }
}

/// Packs box indices of a `w`-dimensional point into a `u128`.
#[derive(Debug, Clone)]
struct BoxKeys {
    metric: BoxMetric,
    sides: Vec<f64>,
    /// Multipliers replacing the divisions when every side is a power of
    /// two, where `c · (1/s) = c / s` exactly.
    recip: Option<Vec<f64>>,
    bits: u32,
}

impl BoxKeys {
    fn new(metric: BoxMetric, w: usize, delta: f64) -> Self {
        let sides = metric.sides(w, delta);
        let recip = sides
            .iter()
            .all(|s| s.log2().fract() == 0.0 && 2f64.powi(s.log2() as i32) == *s)
            .then(|| sides.iter().map(|s| 1.0 / s).collect());
        BoxKeys {
            metric,
            sides,
            recip,
            bits: 128 / w as u32,
        }
    }

    #[inline]
    fn key(&self, p: &[f64]) -> Result<u128> {
        let half = (1u128 << (self.bits - 1)) as f64;
        let mut key = 0u128;
        for (a, (c, s)) in p.iter().zip(&self.sides).enumerate() {
            let q = match &self.recip {
                Some(r) => c * r[a],
                None => c / s,
            };
            if !(q >= -half && q < half) {
                return Err(Error::BoxIndexOverflow(*c));
            }
            // `floor` without a libm call: truncate, then step down for
            // negative non-integers.
            let t = q as i64;
            let i = t - ((t as f64) > q) as i64;
            key = (key << self.bits) | (i as i128 + half as i128) as u128;
        }
        Ok(key)
    }

    /// Indices of the box at scale `δ·2^j` containing the box `key`.
    fn coarsen(&self, key: u128, j: u32) -> u128 {
        let w = self.sides.len();
        let mask = (1u128 << self.bits) - 1;
        let half = 1i128 << (self.bits - 1);
        let mut out = 0u128;
        for axis in 0..w {
            let shift = self.bits * (w - 1 - axis) as u32;
            let i = ((key >> shift) & mask) as i128 - half;
            let s = if axis == w - 1 && self.metric == BoxMetric::Anisotropic {
                2 * j
            } else {
                j
            };
            out |= (((i >> s) + half) as u128) << shift;
        }
        out
    }
}

/// Occupied boxes, plus neighbour gaps when the source tracks them.
fn occupied(
    source: &dyn PointSource,
    keys: &BoxKeys,
) -> Result<(FxHashSet<u128>, Option<Vec<f64>>)> {
    let parts = rayon::current_num_threads()
        .min(source.max_partitions())
        .max(1);
    let pieces = (0..parts)
        .into_par_iter()
        .map(|part| {
            let mut set = FxHashSet::default();
            let mut last = None;
            let mut err = None;
            let gaps = source.visit(part, parts, &mut |p| {
                if err.is_some() {
                    return;
                }
                match keys.key(p) {
                    Ok(k) if last != Some(k) => {
                        set.insert(k);
                        last = Some(k);
                    }
                    Ok(_) => {}
                    Err(e) => err = Some(e),
                }
            });
            err.map_or(Ok((set, gaps)), Err)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut gaps: Option<Vec<f64>> = None;
    let mut sets = Vec::with_capacity(pieces.len());
    for (set, g) in pieces {
        if let Some(g) = g {
            match &mut gaps {
                Some(acc) => acc.iter_mut().zip(g).for_each(|(a, b)| *a = a.max(b)),
                None => gaps = Some(g),
            }
        }
        sets.push(set);
    }
    sets.sort_by_key(|s| std::cmp::Reverse(s.len()));
    let mut iter = sets.into_iter();
    let mut all = iter.next().unwrap_or_default();
    for s in iter {
        all.extend(s);
    }
    Ok((all, gaps))
}

fn under_resolved(s: Spacing, delta_min: f64) -> Result<Spacing> {
    let required = delta_min / RESOLUTION_FACTOR;
    if s.value > required || (s.lower_bound && s.value >= required) {
        return Err(Error::UnderResolved {
            spacing: s.value,
            required,
            delta_min,
            factor: RESOLUTION_FACTOR,
        });
    }
    Ok(s)
}

/// Checks that the source resolves `delta_min`.
pub fn check_resolution(
    source: &dyn PointSource,
    delta_min: f64,
    gauge: GaugeChoice,
) -> Result<Spacing> {
    if source.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let s = source.spacing(BoxMetric::of(gauge), delta_min / RESOLUTION_FACTOR);
    under_resolved(s, delta_min)
}

fn validate_scales(scales: &[f64]) -> Result<f64> {
    if scales.is_empty() {
        return Err(Error::BadSchedule {
            min_scales: 1,
            min_decades: 0.0,
            scales: 0,
            decades: 0.0,
        });
    }
    if let Some(&bad) = scales.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(Error::NonPositiveScale(bad));
    }
    Ok(scales.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Occupied-box counts at each scale, in the order given. The source must
/// resolve the smallest scale; sources that track neighbour gaps are
/// checked during the finest pass, others before it.
pub fn box_counts(
    source: &dyn PointSource,
    scales: &[f64],
    gauge: GaugeChoice,
) -> Result<Vec<usize>> {
    let delta_min = validate_scales(scales)?;
    gauge.validate(source.dim().n())?;
    if source.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let metric = BoxMetric::of(gauge);
    let w = source.dim().ambient();
    let finest = |keys: &BoxKeys| -> Result<FxHashSet<u128>> {
        let (set, gaps) = occupied(source, keys)?;
        match gaps {
            Some(g) => under_resolved(
                Spacing {
                    value: metric.from_gaps(&g),
                    lower_bound: false,
                },
                delta_min,
            )?,
            None => check_resolution(source, delta_min, gauge)?,
        };
        Ok(set)
    };

    let levels: Option<Vec<u32>> = scales
        .iter()
        .map(|&d| {
            let j = (d / delta_min).log2().round();
            ((0.0..60.0).contains(&j) && delta_min * 2f64.powi(j as i32) == d).then_some(j as u32)
        })
        .collect();
    match levels {
        Some(levels) => {
            let keys = BoxKeys::new(metric, w, delta_min);
            let mut order: Vec<usize> = (0..scales.len()).collect();
            order.sort_by_key(|&i| levels[i]);
            let mut counts = vec![0; scales.len()];
            let mut set = finest(&keys)?;
            let mut level = 0;
            for i in order {
                if levels[i] > level {
                    let step = levels[i] - level;
                    set = set.into_iter().map(|k| keys.coarsen(k, step)).collect();
                    level = levels[i];
                }
                counts[i] = set.len();
            }
            Ok(counts)
        }
        None => {
            let mut counts = Vec::with_capacity(scales.len());
            let first = finest(&BoxKeys::new(metric, w, delta_min))?.len();
            for &d in scales {
                counts.push(if d == delta_min {
                    first
                } else {
                    occupied(source, &BoxKeys::new(metric, w, d))?.0.len()
                });
            }
            Ok(counts)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverReport {
    pub delta: f64,
    pub count: usize,
    pub gauge: GaugeChoice,
    pub exponent: Option<f64>,
    /// `count · δ^exponent`.
    pub content: Option<f64>,
}

impl CoverReport {
    pub fn at_exponent(mut self, s: f64) -> Self {
        self.exponent = Some(s);
        self.content = Some(self.count as f64 * self.delta.powf(s));
        self
    }
}

pub fn heis_box_count(
    source: &dyn PointSource,
    delta: f64,
    gauge: GaugeChoice,
) -> Result<CoverReport> {
    let count = box_counts(source, &[delta], gauge)?[0];
    Ok(CoverReport {
        delta,
        count,
        gauge,
        exponent: None,
        content: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionFit {
    pub gauge: GaugeChoice,
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    /// Slope of `log N` against `log(1/δ)`.
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    /// Half-width of the 95% confidence interval for the slope.
    pub half_width: f64,
}

fn check_schedule(scales: &[f64]) -> Result<()> {
    let lo = validate_scales(scales)?;
    let hi = scales.iter().copied().fold(0.0, f64::max);
    let decades = (hi / lo).log10();
    let mut distinct = scales.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < MIN_FIT_SCALES || decades < MIN_FIT_DECADES {
        return Err(Error::BadSchedule {
            min_scales: MIN_FIT_SCALES,
            min_decades: MIN_FIT_DECADES,
            scales: distinct.len(),
            decades,
        });
    }
    Ok(())
}

/// Fits a line to counts already computed.
pub fn fit_counts(scales: &[f64], counts: &[usize], gauge: GaugeChoice) -> Result<DimensionFit> {
    check_schedule(scales)?;
    let x: Vec<f64> = scales.iter().map(|d| -d.ln()).collect();
    let y: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let LineFit {
        slope,
        intercept,
        residual,
        half_width,
        ..
    } = fit_line(&x, &y)?;
    Ok(DimensionFit {
        gauge,
        scales: scales.to_vec(),
        counts: counts.to_vec(),
        slope,
        intercept,
        residual,
        half_width,
    })
}

pub fn dimension_estimate(
    source: &dyn PointSource,
    scales: &[f64],
    gauge: GaugeChoice,
) -> Result<DimensionFit> {
    check_schedule(scales)?;
    let counts = box_counts(source, scales, gauge)?;
    fit_counts(scales, &counts, gauge)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContentSeries {
    pub exponent: f64,
    pub reports: Vec<CoverReport>,
    pub min: f64,
    pub max: f64,
}

impl ContentSeries {
    /// `max / min` over the schedule.
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }
}

/// Contents `N(δ) δ^s` over a schedule. A finite-scale trend only.
pub fn content_at_exponent(
    source: &dyn PointSource,
    scales: &[f64],
    s: f64,
    gauge: GaugeChoice,
) -> Result<ContentSeries> {
    let counts = box_counts(source, scales, gauge)?;
    Ok(contents_from_counts(scales, &counts, s, gauge))
}

/// [`content_at_exponent`] for counts already computed.
pub fn contents_from_counts(
    scales: &[f64],
    counts: &[usize],
    s: f64,
    gauge: GaugeChoice,
) -> ContentSeries {
    let reports: Vec<CoverReport> = scales
        .iter()
        .zip(counts)
        .map(|(&delta, &count)| {
            CoverReport {
                delta,
                count,
                gauge,
                exponent: None,
                content: None,
            }
            .at_exponent(s)
        })
        .collect();
    let contents = reports.iter().map(|r| r.content.expect("set above"));
    let min = contents.clone().fold(f64::INFINITY, f64::min);
    let max = contents.fold(0.0, f64::max);
    ContentSeries {
        exponent: s,
        reports,
        min,
        max,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedFits {
    pub euclidean: DimensionFit,
    pub heisenberg: DimensionFit,
}

pub fn euclid_vs_heis_compare(source: &dyn PointSource, scales: &[f64]) -> Result<PairedFits> {
    Ok(PairedFits {
        euclidean: dimension_estimate(source, scales, GaugeChoice::Euclidean)?,
        heisenberg: dimension_estimate(source, scales, GaugeChoice::Koranyi)?,
    })
}

/// `2^{-a}, …, 2^{-b}`.
pub fn dyadic_scales(a: i32, b: i32) -> Vec<f64> {
    (a..=b).map(|k| 2f64.powi(-k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heis::HPoint;
    use crate::jets::GalleryMap;

    fn segment(map: GalleryMap, count: usize) -> MapCloud<GalleryMap> {
        MapCloud::uniform(map, &[0.0], &[1.0], &[count]).unwrap()
    }

    #[test]
    fn single_point() {
        let cloud = PointCloud::from_points(&[HPoint::h1(0.3, -2.0, 5.0)]).unwrap();
        for d in [1.0, 0.1, 1e-3] {
            assert_eq!(
                heis_box_count(&cloud, d, GaugeChoice::Koranyi)
                    .unwrap()
                    .count,
                1
            );
        }
        let c = content_at_exponent(&cloud, &[0.5, 0.25], 3.0, GaugeChoice::Koranyi).unwrap();
        assert_eq!(c.reports[1].content, Some(0.25f64.powi(3)));
    }

    #[test]
    fn segments() {
        let h = segment(GalleryMap::HorizontalSegment, 4097);
        for k in 2..8 {
            let d = 2f64.powi(-k);
            let n = heis_box_count(&h, d, GaugeChoice::Koranyi).unwrap().count;
            assert!(n >= (1.0 / d).floor() as usize && n <= (1.0 / d).ceil() as usize + 1);
        }
        let v = segment(GalleryMap::VerticalSegment, (1 << 16) + 1);
        for k in 2..6 {
            let d = 2f64.powi(-k);
            let n = heis_box_count(&v, d, GaugeChoice::Koranyi).unwrap().count as f64;
            let target = d.powi(-2);
            assert!(n >= target / 2.0 && n <= target * 2.0);
        }
    }

    #[test]
    fn dyadic_and_direct_counts_agree() {
        let cloud = MapCloud::uniform(
            GalleryMap::SineWave,
            &[-1.0, -1.0],
            &[1.0, 1.0],
            &[301, 301],
        )
        .unwrap();
        let scales = [0.5, 0.125, 0.25, 0.0625];
        for g in [GaugeChoice::Koranyi, GaugeChoice::Euclidean] {
            let fast = box_counts(&cloud, &scales, g).unwrap();
            for (d, n) in scales.iter().zip(&fast) {
                assert_eq!(heis_box_count(&cloud, *d, g).unwrap().count, *n);
            }
            // 0.3 breaks the dyadic pattern and forces one pass per scale.
            let slow = box_counts(&cloud, &[0.5, 0.3, 0.125], g).unwrap();
            assert_eq!((slow[0], slow[2]), (fast[0], fast[1]));
        }
    }

    #[test]
    fn under_resolution_is_refused() {
        let h = segment(GalleryMap::HorizontalSegment, 11);
        let err = heis_box_count(&h, 0.01, GaugeChoice::Koranyi).unwrap_err();
        assert!(matches!(err, Error::UnderResolved { .. }), "{err}");
        let far = PointCloud::from_points(&[HPoint::h1(0.0, 0.0, 0.0), HPoint::h1(1.0, 0.0, 0.0)])
            .unwrap();
        assert!(heis_box_count(&far, 0.1, GaugeChoice::Koranyi).is_err());
    }

    #[test]
    fn schedules_are_checked() {
        let h = segment(GalleryMap::HorizontalSegment, 1025);
        assert!(matches!(
            dimension_estimate(&h, &[0.1, 0.05, 0.025], GaugeChoice::Koranyi),
            Err(Error::BadSchedule { .. })
        ));
        assert!(matches!(
            dimension_estimate(&h, &dyadic_scales(2, 5), GaugeChoice::Koranyi),
            Err(Error::BadSchedule { .. })
        ));
        let fit = dimension_estimate(&h, &dyadic_scales(2, 7), GaugeChoice::Koranyi).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.1);
    }

    #[test]
    fn coarsening_floors_negative_indices() {
        let keys = BoxKeys::new(BoxMetric::Anisotropic, 3, 0.25);
        let k = keys.key(&[-0.3, 0.6, -0.01]).unwrap();
        let coarse = BoxKeys::new(BoxMetric::Anisotropic, 3, 0.5);
        assert_eq!(keys.coarsen(k, 1), coarse.key(&[-0.3, 0.6, -0.01]).unwrap());
        assert!(keys.key(&[1e40, 0.0, 0.0]).is_err());
    }
}

use std::collections::BTreeMap;

use super::source::{PointCloud, PointSource};
use crate::error::{Error, Result};
use crate::heis::GaugeChoice;

fn koranyi(c: &[f64], q: &[f64], n: usize) -> f64 {
    let mut h2 = 0.0;
    let mut omega = 0.0;
    for j in 0..n {
        let (dx, dy) = (q[j] - c[j], q[j + n] - c[j + n]);
        h2 += dx * dx + dy * dy;
        omega += c[j] * q[j + n] - c[j + n] * q[j];
    }
    let tau = q[2 * n] - c[2 * n] - omega;
    (h2 * h2 + tau * tau).sqrt().sqrt()
}

fn euclidean(c: &[f64], q: &[f64]) -> f64 {
    c.iter()
        .zip(q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Number of centres chosen by a greedy cover with closed gauge balls of
/// radius `delta`: points are taken in order and each point not yet within
/// `delta` of a centre becomes one.
///
/// Centres are bucketed by horizontal cell and vertical cell. Korányi balls
/// are sheared, `|t_q − t_c| ≤ δ² + |c_h| δ`, so the vertical search window
/// widens with the distance from the `t`-axis.
pub fn greedy_cover(cloud: &PointCloud, delta: f64, gauge: GaugeChoice) -> Result<usize> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::NonPositiveScale(delta));
    }
    let n = cloud.dim().n();
    let w = 2 * n + 1;
    let (tside, sheared) = match gauge {
        GaugeChoice::Euclidean => (delta, false),
        GaugeChoice::Koranyi => (delta * delta, true),
        GaugeChoice::CarnotCaratheodory => {
            return Err(Error::UnsupportedGauge {
                gauge: gauge.name(),
                n,
            })
        }
    };
    let horizontal_cells = 3usize.pow(2 * n as u32);
    let mut buckets: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    let mut centers = 0usize;
    for i in 0..cloud.len() {
        let q = cloud.point(i);
        let reach = if sheared {
            let qh = (0..2 * n).map(|k| q[k] * q[k]).sum::<f64>().sqrt();
            delta * delta + (qh + delta) * delta
        } else {
            delta
        };
        let tlo = ((q[w - 1] - reach) / tside).floor() as i64;
        let thi = ((q[w - 1] + reach) / tside).floor() as i64;
        let hcell: Vec<i64> = (0..2 * n).map(|k| (q[k] / delta).floor() as i64).collect();
        let mut covered = false;
        'search: for mut code in 0..horizontal_cells {
            let mut lo = Vec::with_capacity(w);
            for c in &hcell {
                lo.push(c + (code % 3) as i64 - 1);
                code /= 3;
            }
            let mut hi = lo.clone();
            lo.push(tlo);
            hi.push(thi);
            for ids in buckets.range(lo..=hi).map(|(_, v)| v) {
                for &j in ids {
                    let c = cloud.point(j);
                    let d = if sheared {
                        koranyi(c, q, n)
                    } else {
                        euclidean(c, q)
                    };
                    if d <= delta {
                        covered = true;
                        break 'search;
                    }
                }
            }
        }
        if !covered {
            let mut key = hcell;
            key.push((q[w - 1] / tside).floor() as i64);
            buckets.entry(key).or_default().push(i);
            centers += 1;
        }
    }
    Ok(centers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heis::{gauge_distance, HPoint};

    fn brute(cloud: &PointCloud, delta: f64, gauge: GaugeChoice) -> usize {
        let mut centers: Vec<HPoint> = Vec::new();
        for i in 0..cloud.len() {
            let q = HPoint::from_coords(cloud.point(i)).unwrap();
            if !centers
                .iter()
                .any(|c| gauge_distance(c, &q, gauge).unwrap() <= delta)
            {
                centers.push(q);
            }
        }
        centers.len()
    }

    #[test]
    fn matches_exhaustive_greedy() {
        // A twisted curve far from the t-axis exercises the shear.
        let pts: Vec<HPoint> = (0..600)
            .map(|i| {
                let s = i as f64 / 600.0;
                HPoint::h1(2.0 + s.cos(), 3.0 * s, 5.0 * s * s - 1.0)
            })
            .collect();
        let cloud = PointCloud::from_points(&pts).unwrap();
        for d in [0.5, 0.2, 0.05] {
            for g in [GaugeChoice::Koranyi, GaugeChoice::Euclidean] {
                assert_eq!(
                    greedy_cover(&cloud, d, g).unwrap(),
                    brute(&cloud, d, g),
                    "{d} {g:?}"
                );
            }
        }
    }

    #[test]
    fn rejects_bad_scale() {
        let cloud = PointCloud::from_points(&[HPoint::h1(0.0, 0.0, 0.0)]).unwrap();
        assert!(greedy_cover(&cloud, 0.0, GaugeChoice::Koranyi).is_err());
        assert_eq!(greedy_cover(&cloud, 1.0, GaugeChoice::Koranyi).unwrap(), 1);
    }
}

use serde::{Deserialize, Serialize};

use super::{cc_distance, group_inv, group_mul, HPoint};
use crate::error::{Error, Result};

/// Which distance realises the sub-Riemannian metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeChoice {
    /// `N(p) = ((|x|² + |y|²)² + t²)^{1/4}`, `d(p, q) = N(p⁻¹ q)`.
    Koranyi,
    /// Carnot–Carathéodory distance, `H^1` only.
    CarnotCaratheodory,
    Euclidean,
}

impl GaugeChoice {
    pub fn name(self) -> &'static str {
        match self {
            GaugeChoice::Koranyi => "koranyi",
            GaugeChoice::CarnotCaratheodory => "carnot-caratheodory",
            GaugeChoice::Euclidean => "euclidean",
        }
    }

    /// Rejects combinations that have no implementation, such as the CC
    /// distance for `n != 1`.
    pub fn validate(self, n: usize) -> Result<Self> {
        if self == GaugeChoice::CarnotCaratheodory && n != 1 {
            return Err(Error::UnsupportedGauge {
                gauge: self.name(),
                n,
            });
        }
        Ok(self)
    }
}

impl std::str::FromStr for GaugeChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "koranyi" | "heisenberg" => Ok(GaugeChoice::Koranyi),
            "cc" | "carnot-caratheodory" => Ok(GaugeChoice::CarnotCaratheodory),
            "euclidean" => Ok(GaugeChoice::Euclidean),
            other => Err(Error::Parse(format!("unknown gauge `{other}`"))),
        }
    }
}

pub fn koranyi_norm(p: &HPoint) -> f64 {
    let h = p.horizontal_norm_sq();
    (h * h + p.t() * p.t()).sqrt().sqrt()
}

pub fn gauge_distance(p: &HPoint, q: &HPoint, g: GaugeChoice) -> Result<f64> {
    let n = p.dim().n();
    g.validate(n)?;
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: q.dim().n(),
        });
    }
    if p == q {
        return Ok(0.0);
    }
    match g {
        GaugeChoice::Euclidean => Ok(p
            .to_coords()
            .iter()
            .zip(q.to_coords())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()),
        GaugeChoice::Koranyi => Ok(koranyi_norm(&group_mul(&group_inv(p), q)?)),
        GaugeChoice::CarnotCaratheodory => Ok(cc_distance(&group_mul(&group_inv(p), q)?)?.length),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heis::{dilate, HeisDim};

    #[test]
    fn koranyi_examples() {
        assert_eq!(koranyi_norm(&HPoint::h1(1.0, 0.0, 0.0)), 1.0);
        assert_eq!(koranyi_norm(&HPoint::h1(0.0, 0.0, 1.0)), 1.0);
        let p = dilate(3.0, &HPoint::h1(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(koranyi_norm(&p), 3.0);
    }

    #[test]
    fn self_distance_is_exact_zero() {
        let p = HPoint::h1(0.1, 0.7, -2.0);
        for g in [
            GaugeChoice::Koranyi,
            GaugeChoice::Euclidean,
            GaugeChoice::CarnotCaratheodory,
        ] {
            assert_eq!(gauge_distance(&p, &p, g).unwrap(), 0.0);
        }
    }

    #[test]
    fn cc_rejected_outside_h1() {
        let d2 = HeisDim::new(2).unwrap();
        let p = HPoint::identity(d2);
        let q = HPoint::new(vec![1.0, 0.0], vec![0.0, 0.0], 0.0).unwrap();
        assert!(matches!(
            gauge_distance(&p, &q, GaugeChoice::CarnotCaratheodory),
            Err(Error::UnsupportedGauge { n: 2, .. })
        ));
        assert!(GaugeChoice::CarnotCaratheodory.validate(1).is_ok());
    }

    #[test]
    fn parse_names() {
        assert_eq!(
            "koranyi".parse::<GaugeChoice>().unwrap(),
            GaugeChoice::Koranyi
        );
        assert_eq!(
            "cc".parse::<GaugeChoice>().unwrap(),
            GaugeChoice::CarnotCaratheodory
        );
        assert!("taxicab".parse::<GaugeChoice>().is_err());
    }
}

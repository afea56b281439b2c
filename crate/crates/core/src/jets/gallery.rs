//! Analytic maps used to exercise the horizontality and measure checks.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::heis::HeisDim;

use super::grid::{GridDomain, SampledMap};
use super::mapping::Mapping;

#[derive(Debug, Clone, PartialEq)]
pub enum GalleryMap {
    /// `y ↦ A y` with `A` given by its `2n+1` rows.
    Linear(Vec<Vec<f64>>),
    /// `(cos y₁, sin y₁, y₁)`: horizontal, rank 1.
    HorizontalCylinder,
    /// The cylinder composed with `y₁ + y₂²/2`: horizontal, rank 1, with a
    /// genuinely two-dimensional parametrisation.
    WarpedCylinder,
    /// `(y₁, y₁², y₁³/3)`: horizontal lift of a parabola.
    ParabolaLift,
    /// `(y₁, y₂, 0)`.
    VerticalGraph,
    /// `(y₁, y₂, y₁ y₂)`.
    GraphProduct,
    /// `(y₁, y₂, sin y₁ cos y₂)`.
    GraphSine,
    /// `(y₁, y₂, y₁²)`.
    Quadratic,
    /// `(0, 0, |y|²)`.
    Paraboloid,
    /// `(y₁ + y₂²/2, y₂ + y₁²/2, y₁ y₂)`.
    TwistedQuadratic,
    /// `(y₁ + 0.3 sin y₂, y₂ + 0.3 sin y₁, 0)`.
    Swirl,
    /// `(sin y₁, sin y₂, 0)`.
    SineWave,
    /// `(y₁, y₂ + y₁² y₂ / 2, 0)`: wedge `1 + y₁²/2`.
    Stretch,
    /// `H^2`, `m = 2`: `(y₁ + y₂²/2, y₂ − y₁²/4, y₁²/2, y₁ y₂, 0)`.
    QuadraticN2,
    /// `H^2`, `m = 3`: a Legendrian surface `(u, v, u+v, u+v², v³/3)` pulled
    /// back along `u = y₁ + y₃/2`, `v = y₂ − y₃/4`. Horizontal, rank 2.
    LagrangianN2,
    /// `H^2`, `m = 3`: `(y₁, y₂, y₃, 0, 0)`.
    VerticalN2,
    /// `m = 1`: `(s, 0, 0)`.
    HorizontalSegment,
    /// `m = 1`: `(0, 0, s)`.
    VerticalSegment,
    /// `m = 2`: `(s, 0, u)`.
    VerticalPlane,
    /// `m = 1`: the identity element.
    Point,
    /// `m = 2`: a constant map.
    Constant,
    /// `m = 2`: `(1_{y₁ ≥ 1/2}, 0, 0)`.
    Step,
}

const IDS: &[(&str, GalleryMap)] = &[
    ("horizontal-cylinder", GalleryMap::HorizontalCylinder),
    ("warped-cylinder", GalleryMap::WarpedCylinder),
    ("parabola-lift", GalleryMap::ParabolaLift),
    ("vertical-graph", GalleryMap::VerticalGraph),
    ("id-embed", GalleryMap::VerticalGraph),
    ("graph-product", GalleryMap::GraphProduct),
    ("graph-sine", GalleryMap::GraphSine),
    ("quadratic", GalleryMap::Quadratic),
    ("paraboloid", GalleryMap::Paraboloid),
    ("twisted-quadratic", GalleryMap::TwistedQuadratic),
    ("swirl", GalleryMap::Swirl),
    ("sine-wave", GalleryMap::SineWave),
    ("stretch", GalleryMap::Stretch),
    ("quadratic-n2", GalleryMap::QuadraticN2),
    ("lagrangian-n2", GalleryMap::LagrangianN2),
    ("vertical-n2", GalleryMap::VerticalN2),
    ("horizontal-segment", GalleryMap::HorizontalSegment),
    ("vertical-segment", GalleryMap::VerticalSegment),
    ("vertical-plane", GalleryMap::VerticalPlane),
    ("point", GalleryMap::Point),
    ("constant", GalleryMap::Constant),
    ("step", GalleryMap::Step),
];

impl GalleryMap {
    /// Every named map (linear maps are parameterised and not listed).
    pub fn catalogue() -> impl Iterator<Item = (&'static str, &'static GalleryMap)> {
        IDS.iter().map(|(id, m)| (*id, m))
    }

    pub fn id(&self) -> String {
        match self {
            GalleryMap::Linear(rows) => {
                let body: Vec<String> = rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|v| v.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    })
                    .collect();
                format!("linear:{}", body.join(";"))
            }
            other => IDS
                .iter()
                .find(|(_, m)| m == other)
                .map(|(id, _)| id.to_string())
                .expect("every named map has an id"),
        }
    }

    pub fn linear(rows: Vec<Vec<f64>>) -> Result<Self> {
        HeisDim::from_ambient(rows.len())?;
        let m = rows.first().map_or(0, Vec::len);
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::Incompatible(
                "linear map rows must share a nonzero length".into(),
            ));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("linear map"));
        }
        Ok(GalleryMap::Linear(rows))
    }

    /// Whether the map is `C¹` (has an analytic Jacobian everywhere).
    pub fn is_smooth(&self) -> bool {
        !matches!(self, GalleryMap::Step)
    }

    /// Samples the map at every node of `domain`.
    pub fn sample(&self, domain: &GridDomain) -> Result<SampledMap> {
        sample_analytic(self, domain)
    }
}

impl FromStr for GalleryMap {
    type Err = Error;

    /// Named ids, or `linear:a11,a12;a21,a22;...` with one row per output.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(body) = s.strip_prefix("linear:") {
            let rows = body
                .split(';')
                .map(|row| {
                    row.split(',')
                        .map(|v| {
                            v.trim()
                                .parse::<f64>()
                                .map_err(|e| Error::Parse(format!("{v}: {e}")))
                        })
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            return GalleryMap::linear(rows);
        }
        IDS.iter()
            .find(|(id, _)| *id == s)
            .map(|(_, m)| m.clone())
            .ok_or_else(|| Error::UnknownMap(s.to_string()))
    }
}

impl fmt::Display for GalleryMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl Mapping for GalleryMap {
    fn heis_dim(&self) -> HeisDim {
        match self {
            GalleryMap::Linear(rows) => HeisDim::from_ambient(rows.len()).expect("validated"),
            GalleryMap::QuadraticN2 | GalleryMap::LagrangianN2 | GalleryMap::VerticalN2 => {
                HeisDim::new(2).unwrap()
            }
            _ => HeisDim::ONE,
        }
    }

    fn source_dim(&self) -> usize {
        match self {
            GalleryMap::Linear(rows) => rows[0].len(),
            GalleryMap::HorizontalSegment | GalleryMap::VerticalSegment | GalleryMap::Point => 1,
            GalleryMap::LagrangianN2 | GalleryMap::VerticalN2 => 3,
            _ => 2,
        }
    }

    fn eval(&self, y: &[f64], out: &mut [f64]) {
        use GalleryMap::*;
        match self {
            Linear(rows) => {
                for (o, row) in out.iter_mut().zip(rows) {
                    *o = row.iter().zip(y).map(|(a, b)| a * b).sum();
                }
            }
            HorizontalCylinder => {
                out[0] = y[0].cos();
                out[1] = y[0].sin();
                out[2] = y[0];
            }
            WarpedCylinder => {
                let s = y[0] + 0.5 * y[1] * y[1];
                out[0] = s.cos();
                out[1] = s.sin();
                out[2] = s;
            }
            ParabolaLift => {
                out[0] = y[0];
                out[1] = y[0] * y[0];
                out[2] = y[0] * y[0] * y[0] / 3.0;
            }
            VerticalGraph => {
                out[0] = y[0];
                out[1] = y[1];
                out[2] = 0.0;
            }
            GraphProduct => {
                out[0] = y[0];
                out[1] = y[1];
                out[2] = y[0] * y[1];
            }
            GraphSine => {
                out[0] = y[0];
                out[1] = y[1];
                out[2] = y[0].sin() * y[1].cos();
            }
            Quadratic => {
                out[0] = y[0];
                out[1] = y[1];
                out[2] = y[0] * y[0];
            }
            Paraboloid => {
                out[0] = 0.0;
                out[1] = 0.0;
                out[2] = y[0] * y[0] + y[1] * y[1];
            }
            TwistedQuadratic => {
                out[0] = y[0] + 0.5 * y[1] * y[1];
                out[1] = y[1] + 0.5 * y[0] * y[0];
                out[2] = y[0] * y[1];
            }
            Swirl => {
                out[0] = y[0] + 0.3 * y[1].sin();
                out[1] = y[1] + 0.3 * y[0].sin();
                out[2] = 0.0;
            }
            SineWave => {
                out[0] = y[0].sin();
                out[1] = y[1].sin();
                out[2] = 0.0;
            }
            Stretch => {
                out[0] = y[0];
                out[1] = y[1] + 0.5 * y[0] * y[0] * y[1];
                out[2] = 0.0;
            }
            QuadraticN2 => {
                out[0] = y[0] + 0.5 * y[1] * y[1];
                out[1] = y[1] - 0.25 * y[0] * y[0];
                out[2] = 0.5 * y[0] * y[0];
                out[3] = y[0] * y[1];
                out[4] = 0.0;
            }
            LagrangianN2 => {
                let u = y[0] + 0.5 * y[2];
                let v = y[1] - 0.25 * y[2];
                out[0] = u;
                out[1] = v;
                out[2] = u + v;
                out[3] = u + v * v;
                out[4] = v * v * v / 3.0;
            }
            VerticalN2 => {
                out[0] = y[0];
                out[1] = y[1];
                out[2] = y[2];
                out[3] = 0.0;
                out[4] = 0.0;
            }
            HorizontalSegment => {
                out[0] = y[0];
                out[1] = 0.0;
                out[2] = 0.0;
            }
            VerticalSegment => {
                out[0] = 0.0;
                out[1] = 0.0;
                out[2] = y[0];
            }
            VerticalPlane => {
                out[0] = y[0];
                out[1] = 0.0;
                out[2] = y[1];
            }
            Point => out[..3].fill(0.0),
            Constant => {
                out[0] = 0.5;
                out[1] = -0.25;
                out[2] = 1.0;
            }
            Step => {
                out[0] = if y[0] >= 0.5 { 1.0 } else { 0.0 };
                out[1] = 0.0;
                out[2] = 0.0;
            }
        }
    }

    fn jacobian(&self, y: &[f64]) -> Option<Vec<f64>> {
        use GalleryMap::*;
        let j = match self {
            Linear(rows) => rows.iter().flatten().copied().collect(),
            HorizontalCylinder => vec![-y[0].sin(), 0.0, y[0].cos(), 0.0, 1.0, 0.0],
            WarpedCylinder => {
                let s = y[0] + 0.5 * y[1] * y[1];
                let (sn, cs) = s.sin_cos();
                vec![-sn, -sn * y[1], cs, cs * y[1], 1.0, y[1]]
            }
            ParabolaLift => vec![1.0, 0.0, 2.0 * y[0], 0.0, y[0] * y[0], 0.0],
            VerticalGraph => vec![1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            GraphProduct => vec![1.0, 0.0, 0.0, 1.0, y[1], y[0]],
            GraphSine => vec![
                1.0,
                0.0,
                0.0,
                1.0,
                y[0].cos() * y[1].cos(),
                -y[0].sin() * y[1].sin(),
            ],
            Quadratic => vec![1.0, 0.0, 0.0, 1.0, 2.0 * y[0], 0.0],
            Paraboloid => vec![0.0, 0.0, 0.0, 0.0, 2.0 * y[0], 2.0 * y[1]],
            TwistedQuadratic => vec![1.0, y[1], y[0], 1.0, y[1], y[0]],
            Swirl => vec![1.0, 0.3 * y[1].cos(), 0.3 * y[0].cos(), 1.0, 0.0, 0.0],
            SineWave => vec![y[0].cos(), 0.0, 0.0, y[1].cos(), 0.0, 0.0],
            Stretch => vec![1.0, 0.0, y[0] * y[1], 1.0 + 0.5 * y[0] * y[0], 0.0, 0.0],
            QuadraticN2 => vec![
                1.0,
                y[1], //
                -0.5 * y[0],
                1.0, //
                y[0],
                0.0, //
                y[1],
                y[0], //
                0.0,
                0.0,
            ],
            LagrangianN2 => {
                let v = y[1] - 0.25 * y[2];
                vec![
                    1.0,
                    0.0,
                    0.5, //
                    0.0,
                    1.0,
                    -0.25, //
                    1.0,
                    1.0,
                    0.25, //
                    1.0,
                    2.0 * v,
                    0.5 - 0.5 * v, //
                    0.0,
                    v * v,
                    -0.25 * v * v,
                ]
            }
            VerticalN2 => {
                let mut j = vec![0.0; 15];
                j[0] = 1.0;
                j[4] = 1.0;
                j[8] = 1.0;
                j
            }
            HorizontalSegment => vec![1.0, 0.0, 0.0],
            VerticalSegment => vec![0.0, 0.0, 1.0],
            VerticalPlane => vec![1.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            Point => vec![0.0; 3],
            Constant => vec![0.0; 6],
            Step => return None,
        };
        Some(j)
    }

    fn rescaled(&self, z: &[f64], r: f64, y: &[f64], out: &mut [f64]) {
        match self {
            GalleryMap::Linear(_) | GalleryMap::VerticalGraph => self.eval(y, out),
            _ => {
                let w = self.heis_dim().ambient();
                let p: Vec<f64> = z.iter().zip(y).map(|(a, b)| a + r * b).collect();
                let mut base = vec![0.0; w];
                self.eval(z, &mut base);
                self.eval(&p, out);
                for (o, b) in out.iter_mut().zip(&base) {
                    *o = (*o - b) / r;
                }
            }
        }
    }
}

/// Evaluates a map exactly at the nodes of `domain`.
pub fn sample_analytic(map: &impl Mapping, domain: &GridDomain) -> Result<SampledMap> {
    if map.source_dim() != domain.m() {
        return Err(Error::DimensionMismatch {
            expected: map.source_dim(),
            found: domain.m(),
        });
    }
    let dim = map.heis_dim();
    let w = dim.ambient();
    let mut values = vec![0.0; domain.node_count() * w];
    for (lin, out) in values.chunks_mut(w).enumerate() {
        map.eval(&domain.coord(lin), out);
    }
    SampledMap::new(domain.clone(), dim, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(map: &GalleryMap, y: &[f64]) {
        let jac = map.jacobian(y).unwrap();
        let m = map.source_dim();
        let w = map.heis_dim().ambient();
        let h = 1e-6;
        for k in 0..m {
            let mut yp = y.to_vec();
            let mut ym = y.to_vec();
            yp[k] += h;
            ym[k] -= h;
            let (fp, fm) = (map.eval_vec(&yp), map.eval_vec(&ym));
            for i in 0..w {
                let d = (fp[i] - fm[i]) / (2.0 * h);
                assert!(
                    (d - jac[i * m + k]).abs() < 1e-6,
                    "{map}: d{k} f{i} = {d} vs {}",
                    jac[i * m + k]
                );
            }
        }
    }

    #[test]
    fn analytic_jacobians_match_differences() {
        for (_, map) in GalleryMap::catalogue() {
            if map.is_smooth() {
                let y: Vec<f64> = [0.3, -0.7, 0.45][..map.source_dim()].to_vec();
                fd_check(map, &y);
            }
        }
    }

    #[test]
    fn evaluation_examples() {
        let c = GalleryMap::HorizontalCylinder.eval_vec(&[0.0, 0.7]);
        assert_eq!(c, vec![1.0, 0.0, 0.0]);
        let v = GalleryMap::VerticalGraph.eval_vec(&[0.25, 0.5]);
        assert_eq!(v, vec![0.25, 0.5, 0.0]);
        let g = GalleryMap::GraphProduct.eval_vec(&[1.0, 2.0]);
        assert_eq!(g, vec![1.0, 2.0, 2.0]);
    }

    #[test]
    fn ids_roundtrip() {
        for (id, map) in GalleryMap::catalogue() {
            let parsed: GalleryMap = id.parse().unwrap();
            assert_eq!(&parsed, map);
        }
        let lin: GalleryMap = "linear:1,0;2,0;0,0".parse().unwrap();
        assert_eq!(lin.id().parse::<GalleryMap>().unwrap(), lin);
        assert!(matches!(
            "nope".parse::<GalleryMap>(),
            Err(Error::UnknownMap(_))
        ));
        assert!("linear:1,0;2,0".parse::<GalleryMap>().is_err());
        assert!("linear:1,0;2;0,0".parse::<GalleryMap>().is_err());
    }

    #[test]
    fn sampling_checks_source_dimension() {
        let d = GridDomain::cube(3, 0.0, 1.0, 4).unwrap();
        assert!(GalleryMap::HorizontalCylinder.sample(&d).is_err());
        assert!(GalleryMap::VerticalN2.sample(&d).is_ok());
    }
}

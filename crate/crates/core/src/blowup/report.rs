use serde::Serialize;

use super::circle::{analytic_wedge, wedge_from_circles, RhoSchedule, WedgeEstimate};
use super::l1_blowup_error_with;
use crate::error::{Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::io::f17;
use crate::jets::Mapping;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlowupRow {
    pub rho: f64,
    pub r: f64,
    pub l1_error: f64,
    pub defect: f64,
    pub estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupReport {
    pub center: Vec<f64>,
    pub rhos: Vec<f64>,
    pub l1_errors: Vec<f64>,
    /// Fit of `log l1_error` against `log ρ`; absent when fewer than two
    /// errors are positive.
    pub l1_slope: Option<LineFit>,
    pub analytic_wedge: Option<f64>,
    /// One circle estimate per radius.
    pub wedge: Vec<WedgeEstimate>,
    pub rows: Vec<BlowupRow>,
}

impl BlowupReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("rho,r,l1_error,defect,estimate\n");
        for row in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                f17(row.rho),
                f17(row.r),
                f17(row.l1_error),
                f17(row.defect),
                f17(row.estimate)
            ));
        }
        s
    }
}

/// Convergence table of a blow-up at `z` over `schedule` and `radii`.
///
/// `df` overrides the analytic Jacobian of `f` at `z`; one of the two must
/// be available.
pub fn blowup_report(
    f: &impl Mapping,
    z: &[f64],
    schedule: &RhoSchedule,
    radii: &[f64],
    df: Option<&[f64]>,
) -> Result<BlowupReport> {
    let df = match df {
        Some(d) => d.to_vec(),
        None => f
            .jacobian(z)
            .ok_or_else(|| Error::Incompatible("map has no Jacobian; supply one".into()))?,
    };
    if radii.is_empty() {
        return Err(Error::Incompatible("no circle radii".into()));
    }
    let rhos = schedule.rhos();
    let l1_errors = rhos
        .iter()
        .map(|&rho| l1_blowup_error_with(f, z, rho, &df))
        .collect::<Result<Vec<f64>>>()?;
    let positive: Vec<usize> = (0..rhos.len()).filter(|&k| l1_errors[k] > 0.0).collect();
    let l1_slope = if positive.len() >= 2 {
        let x: Vec<f64> = positive.iter().map(|&k| rhos[k].ln()).collect();
        let y: Vec<f64> = positive.iter().map(|&k| l1_errors[k].ln()).collect();
        fit_line(&x, &y).ok()
    } else {
        None
    };
    let wedge = radii
        .iter()
        .map(|&r| wedge_from_circles(f, z, schedule, r))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for w in &wedge {
        for k in 0..rhos.len() {
            rows.push(BlowupRow {
                rho: rhos[k],
                r: w.radius,
                l1_error: l1_errors[k],
                defect: w.defects[k],
                estimate: w.estimates[k],
            });
        }
    }
    Ok(BlowupReport {
        center: z.to_vec(),
        rhos,
        l1_errors,
        l1_slope,
        analytic_wedge: analytic_wedge(f, z),
        wedge,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::DEFAULT_RADII;
    use crate::jets::GalleryMap;

    #[test]
    fn identity_gives_a_zero_table() {
        let r = blowup_report(
            &GalleryMap::VerticalGraph,
            &[0.2, 0.3],
            &RhoSchedule::default(),
            &DEFAULT_RADII,
            None,
        )
        .unwrap();
        assert!(r.l1_errors.iter().all(|&e| e == 0.0));
        assert!(r.l1_slope.is_none());
        assert_eq!(r.rows.len(), 27);
        let csv = r.to_csv();
        assert!(csv.starts_with("rho,r,l1_error,defect,estimate\n"));
        assert_eq!(csv.lines().count(), 28);
    }

    #[test]
    fn quadratic_l1_slope_is_one() {
        let r = blowup_report(
            &GalleryMap::Quadratic,
            &[0.1, 0.1],
            &RhoSchedule::default(),
            &[0.5],
            None,
        )
        .unwrap();
        assert!((r.l1_slope.unwrap().slope - 1.0).abs() < 1e-10);
    }
}

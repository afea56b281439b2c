//! Ordinary least-squares lines, used for log-log slopes.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    pub slope_stderr: f64,
    /// Half-width of the two-sided 95% confidence interval for the slope;
    /// infinite with fewer than three points.
    pub half_width: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::TooFewNodes {
            min: 2,
            got: x.len(),
        });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("fit data"));
    }
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Incompatible("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - (intercept + slope * a);
            e * e
        })
        .sum();
    let dof = x.len() - 2;
    let (slope_stderr, half_width) = if dof == 0 {
        (f64::INFINITY, f64::INFINITY)
    } else {
        let se = (sse / dof as f64 / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, dof as f64)
            .expect("positive degrees of freedom")
            .inverse_cdf(0.975);
        (se, t * se)
    };
    Ok(LineFit {
        slope,
        intercept,
        residual: (sse / k).sqrt(),
        slope_stderr,
        half_width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = fit_line(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-15 && (f.intercept - 1.0).abs() < 1e-15);
        assert_eq!(f.residual, 0.0);
        assert_eq!(f.half_width, 0.0);
    }

    #[test]
    fn confidence_uses_t_quantile() {
        let x = [0.0, 1.0, 2.0];
        let y = [0.0, 1.0, 0.0];
        let f = fit_line(&x, &y).unwrap();
        // One degree of freedom: t = 12.706.
        assert!((f.half_width / f.slope_stderr - 12.7062).abs() < 1e-3);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_line(&[1.0], &[1.0]).is_err());
        assert!(fit_line(&[1.0, 1.0], &[0.0, 2.0]).is_err());
        assert!(fit_line(&[0.0, 1.0], &[0.0, 2.0])
            .unwrap()
            .half_width
            .is_infinite());
    }
}

use crate::error::{Error, Result};

use super::grid::GridField;

const SUBSAMPLES: usize = 4;

/// `r^{-m} ∫_{B(z, r)} |u(y) − u(z)| dy` for the node `z`.
///
/// Each node owns the cell of side `h` centred on it. Cells entirely inside
/// the ball contribute their full volume; cells crossing the sphere are
/// weighted by the fraction of a `4^m` subsample lattice that falls inside.
pub fn lebesgue_point_error(u: &GridField, node: usize, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::NonPositiveScale(r));
    }
    let d = u.domain();
    let m = d.m();
    let z = d.coord(node);
    if !d.contains_ball(&z, r) {
        return Err(Error::BallOutsideDomain {
            center: z,
            radius: r,
        });
    }
    let uz = u.at(node).to_vec();
    let zi = d.multi_index(node);
    let h = d.spacing();

    let lo: Vec<usize> = (0..m)
        .map(|k| zi[k].saturating_sub((r / h[k]).ceil() as usize + 1))
        .collect();
    let hi: Vec<usize> = (0..m)
        .map(|k| (zi[k] + (r / h[k]).ceil() as usize + 1).min(d.counts()[k] - 1))
        .collect();
    let cell_volume: f64 = h.iter().product();
    let r2 = r * r;

    let mut idx = lo.clone();
    let mut total = 0.0;
    let mut sub = vec![0usize; m];
    loop {
        let c = d.coord_of(&idx);
        let (mut near, mut far) = (0.0, 0.0);
        for k in 0..m {
            let off = (c[k] - z[k]).abs();
            let half = 0.5 * h[k];
            far += (off + half).powi(2);
            near += (off - half).max(0.0).powi(2);
        }
        let weight = if far <= r2 {
            1.0
        } else if near >= r2 {
            0.0
        } else {
            // Fraction of the cell inside the ball.
            let samples = SUBSAMPLES.pow(m as u32);
            let mut inside = 0usize;
            sub.fill(0);
            for _ in 0..samples {
                let mut dist = 0.0;
                for k in 0..m {
                    let p = c[k] - 0.5 * h[k] + (sub[k] as f64 + 0.5) / SUBSAMPLES as f64 * h[k];
                    dist += (p - z[k]).powi(2);
                }
                if dist < r2 {
                    inside += 1;
                }
                for s in sub.iter_mut().rev() {
                    *s += 1;
                    if *s < SUBSAMPLES {
                        break;
                    }
                    *s = 0;
                }
            }
            inside as f64 / samples as f64
        };
        if weight > 0.0 {
            let v = u.at(d.linear_index(&idx));
            let diff: f64 = v
                .iter()
                .zip(&uz)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            total += weight * diff;
        }
        // Advance the odometer over the index box.
        let mut k = m;
        loop {
            if k == 0 {
                return Ok(total * cell_volume / r.powi(m as i32));
            }
            k -= 1;
            if idx[k] < hi[k] {
                idx[k] += 1;
                break;
            }
            idx[k] = lo[k];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{GalleryMap, GridDomain};

    #[test]
    fn constant_map_has_zero_error() {
        let d = GridDomain::cube(2, 0.0, 1.0, 41).unwrap();
        let f = GalleryMap::Constant.sample(&d).unwrap();
        let node = d.node_at(&[0.5, 0.5], 1e-12).unwrap();
        assert_eq!(lebesgue_point_error(f.field(), node, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn ball_must_fit() {
        let d = GridDomain::cube(2, 0.0, 1.0, 41).unwrap();
        let f = GalleryMap::Constant.sample(&d).unwrap();
        let node = d.node_at(&[0.5, 0.5], 1e-12).unwrap();
        assert!(matches!(
            lebesgue_point_error(f.field(), node, 0.6),
            Err(Error::BallOutsideDomain { .. })
        ));
        assert!(lebesgue_point_error(f.field(), node, 0.0).is_err());
    }
}

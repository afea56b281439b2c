use crate::error::{Error, Result};

use super::grid::{GridDomain, GridField};
use super::JetField;

/// A coordinate plane `Γ = {k, l}` and a base node `z` in the complementary
/// lattice. Axes are zero-based; `base` lists indices of the remaining axes
/// in increasing axis order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceSpec {
    pub axes: (usize, usize),
    pub base: Vec<usize>,
}

impl SliceSpec {
    pub fn new(k: usize, l: usize, base: Vec<usize>) -> Result<Self> {
        if k >= l {
            return Err(Error::Incompatible(format!(
                "slice axes must satisfy k < l, got ({k}, {l})"
            )));
        }
        Ok(SliceSpec { axes: (k, l), base })
    }

    /// All base nodes of the complementary lattice for the plane `{k, l}`.
    pub fn all_bases(domain: &GridDomain, k: usize, l: usize) -> Vec<SliceSpec> {
        let others: Vec<usize> = (0..domain.m()).filter(|&a| a != k && a != l).collect();
        let total: usize = others.iter().map(|&a| domain.counts()[a]).product();
        (0..total)
            .map(|mut lin| {
                let mut base = vec![0; others.len()];
                for (slot, &a) in others.iter().enumerate().rev() {
                    base[slot] = lin % domain.counts()[a];
                    lin /= domain.counts()[a];
                }
                SliceSpec { axes: (k, l), base }
            })
            .collect()
    }

    fn validate(&self, domain: &GridDomain) -> Result<()> {
        let (k, l) = self.axes;
        let m = domain.m();
        if k >= l || l >= m {
            return Err(Error::Incompatible(format!(
                "slice axes ({k}, {l}) invalid for m = {m}"
            )));
        }
        if self.base.len() != m - 2 {
            return Err(Error::SliceOutOfRange);
        }
        let others = (0..m).filter(|&a| a != k && a != l);
        for (&b, a) in self.base.iter().zip(others) {
            if b >= domain.counts()[a] {
                return Err(Error::SliceOutOfRange);
            }
        }
        Ok(())
    }

    /// Full multi-index of slice node `(i, j)`.
    fn full_index(&self, m: usize, i: usize, j: usize) -> Vec<usize> {
        let (k, l) = self.axes;
        let mut rest = self.base.iter();
        (0..m)
            .map(|a| {
                if a == k {
                    i
                } else if a == l {
                    j
                } else {
                    *rest.next().expect("validated")
                }
            })
            .collect()
    }

    fn plane_domain(&self, d: &GridDomain) -> Result<GridDomain> {
        let (k, l) = self.axes;
        GridDomain::new(
            vec![d.origin()[k], d.origin()[l]],
            vec![d.spacing()[k], d.spacing()[l]],
            vec![d.counts()[k], d.counts()[l]],
        )
    }
}

/// The section `u^z(y) = u(z + y)` on the `Γ`-plane through `z`.
pub fn slice(u: &GridField, s: &SliceSpec) -> Result<GridField> {
    let d = u.domain();
    s.validate(d)?;
    let plane = s.plane_domain(d)?;
    let (ck, cl) = (plane.counts()[0], plane.counts()[1]);
    let mut values = Vec::with_capacity(ck * cl * u.width());
    for i in 0..ck {
        for j in 0..cl {
            let lin = d.linear_index(&s.full_index(d.m(), i, j));
            values.extend_from_slice(u.at(lin));
        }
    }
    GridField::new(plane, u.width(), values)
}

/// The `Γ`-columns of a jet field restricted to the section through `z`,
/// as a field of width `2·(2n+1)` (row-major `(2n+1) × 2`).
pub fn slice_columns(jets: &JetField, s: &SliceSpec) -> Result<GridField> {
    let d = jets.domain();
    s.validate(d)?;
    let plane = s.plane_domain(d)?;
    let (k, l) = s.axes;
    let m = d.m();
    let w = jets.dim().ambient();
    let (ck, cl) = (plane.counts()[0], plane.counts()[1]);
    let mut values = Vec::with_capacity(ck * cl * 2 * w);
    for i in 0..ck {
        for j in 0..cl {
            let lin = d.linear_index(&s.full_index(m, i, j));
            let jac = jets.jacobian(lin);
            for c in 0..w {
                values.push(jac[c * m + k]);
                values.push(jac[c * m + l]);
            }
        }
    }
    GridField::new(plane, 2 * w, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_section() {
        let d = GridDomain::cube(3, 0.0, 1.0, 5).unwrap();
        let u =
            GridField::from_fn(d.clone(), 1, |x, o| o[0] = x[0] + 2.0 * x[1] + 3.0 * x[2]).unwrap();
        let s = SliceSpec::new(0, 1, vec![2]).unwrap();
        let sl = slice(&u, &s).unwrap();
        for lin in 0..sl.domain().node_count() {
            let y = sl.domain().coord(lin);
            assert!((sl.at(lin)[0] - (y[0] + 2.0 * y[1] + 1.5)).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_section() {
        let d = GridDomain::cube(3, 0.0, 1.0, 4).unwrap();
        let u = GridField::from_fn(d, 2, |_, o| o.copy_from_slice(&[7.0, -1.0])).unwrap();
        let sl = slice(&u, &SliceSpec::new(1, 2, vec![3]).unwrap()).unwrap();
        assert!(sl.values().chunks(2).all(|c| c == [7.0, -1.0]));
    }

    #[test]
    fn out_of_range_base() {
        let d = GridDomain::cube(3, 0.0, 1.0, 4).unwrap();
        let u = GridField::from_fn(d.clone(), 1, |_, o| o[0] = 0.0).unwrap();
        assert!(matches!(
            slice(&u, &SliceSpec::new(0, 2, vec![4]).unwrap()),
            Err(Error::SliceOutOfRange)
        ));
        assert!(slice(
            &u,
            &SliceSpec {
                axes: (1, 3),
                base: vec![0]
            }
        )
        .is_err());
        assert!(SliceSpec::new(2, 1, vec![]).is_err());
        assert_eq!(SliceSpec::all_bases(&d, 0, 2).len(), 4);
    }
}

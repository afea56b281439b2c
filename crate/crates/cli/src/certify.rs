//! Randomised batteries for the pairing identity and the wedge-null rank
//! bound.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use heislab::contact::{
    j_pairing_check_with, rank_certificate, singular_values, wedge_sum, Mat, SymplecticJ, Verdict,
};
use heislab::Result;

/// Rank tolerance used when certifying wedge-null matrices.
pub const CERTIFY_RANK_TOL: f64 = 1e-10;
/// Relative tolerance of the pairing identity.
pub const PAIRING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatteryReport {
    pub name: &'static str,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    /// Largest observed ratio of the checked quantity to its bound, where
    /// meaningful.
    pub worst_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyReport {
    pub seed: u64,
    pub trials: usize,
    pub ns: Vec<usize>,
    pub corrupted_j: bool,
    pub batteries: Vec<BatteryReport>,
    pub all_passed: bool,
}

#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub seed: u64,
    pub trials: usize,
    pub ns: Vec<usize>,
    pub corrupted_j: bool,
}

/// Random `(n, m)` with `n` from `ns` and `n < m ≤ 2n`.
fn shape(rng: &mut ChaCha8Rng, ns: &[usize]) -> (usize, usize) {
    let n = ns[rng.gen_range(0..ns.len())];
    (n, rng.gen_range(n + 1..=2 * n))
}

fn entries(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> Vec<f64> {
    (0..len).map(|_| scale * rng.gen_range(-1.0..1.0)).collect()
}

fn scale(rng: &mut ChaCha8Rng) -> f64 {
    10f64.powf(rng.gen_range(-3.0..3.0))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Mat {
    let s = scale(rng);
    Mat::new(rows, cols, entries(rng, rows * cols, s)).expect("shape")
}

/// Rows `u_{j+n} = c_j u_j`: every pair is parallel.
pub fn paired_parallel(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Mat {
    let s = scale(rng);
    let mut b = Mat::zeros(2 * n, m);
    for j in 0..n {
        let c = rng.gen_range(-2.0..2.0);
        for k in 0..m {
            let u = s * rng.gen_range(-1.0..1.0);
            b.set(j, k, u);
            b.set(j + n, k, c * u);
        }
    }
    b
}

/// `B = [U; C U]` with `C` symmetric: all rows lie in the row space of `U`
/// and the wedge cancels in pairs.
pub fn symmetric_shared(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Mat {
    let s = scale(rng);
    let u = entries(rng, n * m, s);
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-2.0..2.0);
            c[i * n + j] = v;
            c[j * n + i] = v;
        }
    }
    let mut b = Mat::zeros(2 * n, m);
    for i in 0..n {
        for k in 0..m {
            b.set(i, k, u[i * m + k]);
            b.set(i + n, k, (0..n).map(|j| c[i * n + j] * u[j * m + k]).sum());
        }
    }
    b
}

fn tally(name: &'static str, outcomes: impl Iterator<Item = (bool, f64)>) -> BatteryReport {
    let mut r = BatteryReport {
        name,
        trials: 0,
        passed: 0,
        failed: 0,
        worst_ratio: 0.0,
    };
    for (ok, ratio) in outcomes {
        r.trials += 1;
        if ok {
            r.passed += 1;
        } else {
            r.failed += 1;
        }
        r.worst_ratio = r.worst_ratio.max(ratio);
    }
    r
}

/// `|⟨Bw, JBv⟩ − Σ w_k v_l W_lk| ≤ 1e-12 (1 + ‖B‖² ‖v‖ ‖w‖)`, with `‖B‖` the
/// spectral norm.
pub fn pairing_battery(
    rng: &mut ChaCha8Rng,
    trials: usize,
    ns: &[usize],
    corrupted: bool,
) -> Result<BatteryReport> {
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let (n, m) = shape(rng, ns);
        let b = random_matrix(rng, 2 * n, m);
        let (sv, sw) = (scale(rng), scale(rng));
        let v = entries(rng, m, sv);
        let w = entries(rng, m, sw);
        let j = if corrupted {
            SymplecticJ::corrupted(n)
        } else {
            SymplecticJ::new(n)
        };
        let res = j_pairing_check_with(&j, &b, &v, &w)?;
        let norm = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();
        let sb = singular_values(&b)?[0];
        let bound = PAIRING_TOL * (1.0 + sb * sb * norm(&v) * norm(&w));
        out.push((res <= bound, res / bound));
    }
    Ok(tally("j-pairing", out.into_iter()))
}

/// Constructed wedge-null matrices must certify `σ_{n+1} ≤ 1e-10 σ₁`.
pub fn wedge_null_battery(
    rng: &mut ChaCha8Rng,
    trials: usize,
    ns: &[usize],
) -> Result<BatteryReport> {
    let mut out = Vec::with_capacity(trials);
    for k in 0..trials {
        let (n, m) = shape(rng, ns);
        let b = if k % 2 == 0 {
            paired_parallel(rng, n, m)
        } else {
            symmetric_shared(rng, n, m)
        };
        let cert = rank_certificate(&b, None, CERTIFY_RANK_TOL)?;
        let s = &cert.singular_values;
        let ratio = if s[0] > 0.0 {
            s.get(n).copied().unwrap_or(0.0) / (CERTIFY_RANK_TOL * s[0])
        } else {
            0.0
        };
        out.push((cert.verdict == Verdict::WedgeNullRankLeqN, ratio));
    }
    Ok(tally("wedge-null-rank", out.into_iter()))
}

/// Random matrices with `m ≥ n + 1` must report a nonzero wedge.
pub fn full_rank_battery(
    rng: &mut ChaCha8Rng,
    trials: usize,
    ns: &[usize],
) -> Result<BatteryReport> {
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let (n, m) = shape(rng, ns);
        let b = random_matrix(rng, 2 * n, m);
        let cert = rank_certificate(&b, None, CERTIFY_RANK_TOL)?;
        out.push((
            cert.verdict == Verdict::WedgeNonzero,
            cert.tol_wedge / cert.wedge_norm,
        ));
    }
    Ok(tally("full-rank-wedge", out.into_iter()))
}

/// `W_kl = −W_lk` bitwise off the diagonal, zero on it.
pub fn antisymmetry_battery(
    rng: &mut ChaCha8Rng,
    trials: usize,
    ns: &[usize],
) -> Result<BatteryReport> {
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let (n, m) = shape(rng, ns);
        let w = wedge_sum(&random_matrix(rng, 2 * n, m))?;
        let ok = (0..m).all(|k| {
            w.get(k, k) == 0.0
                && (k + 1..m).all(|l| w.get(k, l).to_bits() == (-w.get(l, k)).to_bits())
        });
        out.push((ok, 0.0));
    }
    Ok(tally("wedge-antisymmetry", out.into_iter()))
}

pub fn certify(opts: &CertifyOptions) -> Result<CertifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let batteries = vec![
        pairing_battery(&mut rng, opts.trials, &opts.ns, opts.corrupted_j)?,
        wedge_null_battery(&mut rng, opts.trials, &opts.ns)?,
        full_rank_battery(&mut rng, opts.trials, &opts.ns)?,
        antisymmetry_battery(&mut rng, opts.trials, &opts.ns)?,
    ];
    Ok(CertifyReport {
        seed: opts.seed,
        trials: opts.trials,
        ns: opts.ns.clone(),
        corrupted_j: opts.corrupted_j,
        all_passed: batteries.iter().all(|b| b.failed == 0),
        batteries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(corrupted_j: bool) -> CertifyOptions {
        CertifyOptions {
            seed: 7,
            trials: 200,
            ns: vec![1, 2, 3],
            corrupted_j,
        }
    }

    #[test]
    fn default_batteries_pass() {
        let r = certify(&opts(false)).unwrap();
        assert!(r.all_passed, "{r:?}");
        assert!(r.batteries.iter().all(|b| b.trials == 200));
    }

    #[test]
    fn corrupted_j_fails_the_pairing() {
        let r = certify(&opts(true)).unwrap();
        assert!(!r.all_passed);
        assert!(r.batteries[0].failed > 0);
        assert!(r.batteries[1..].iter().all(|b| b.failed == 0));
    }

    #[test]
    fn families_are_wedge_null_with_low_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            for m in n + 1..=2 * n {
                for b in [
                    paired_parallel(&mut rng, n, m),
                    symmetric_shared(&mut rng, n, m),
                ] {
                    let w = wedge_sum(&b).unwrap().max_abs();
                    assert!(w <= 1e-12 * (1.0 + b.max_abs().powi(2)), "{w}");
                    let s = singular_values(&b).unwrap();
                    assert!(s[n] <= 1e-12 * s[0]);
                }
            }
        }
    }

    #[test]
    fn same_seed_same_report() {
        assert_eq!(
            certify(&opts(false)).unwrap(),
            certify(&opts(false)).unwrap()
        );
    }
}

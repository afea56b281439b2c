//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when
//! any criterion fails.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use heislab::blowup::{
    circle_defect, l1_blowup_error, oriented_circle_integral, wedge_from_circles, CirclePath,
    Convergence, RhoSchedule, DEFAULT_CIRCLE_NODES, DEFAULT_RADIUS,
};
use heislab::contact::{contact_residual, lowrank_scan, maxrank_scan, wedge_field, Tolerances};
use heislab::fit::fit_line;
use heislab::heis::GaugeChoice;
use heislab::jets::{jacobian_fd, GalleryMap, GridDomain, JetField};
use heislab::measure::{
    content_at_exponent, dimension_estimate, dyadic_scales, euclid_vs_heis_compare, MapCloud,
};
use heislab_cli::certify::{full_rank_battery, pairing_battery, wedge_null_battery};

type Check = Result<(bool, String), String>;

fn seeded(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + tag)
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn c1_pairing() -> Check {
    let start = Instant::now();
    let r = pairing_battery(&mut seeded(1), 1000, &[1, 2, 3], false).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    Ok((
        r.failed == 0 && r.trials == 1000 && t < Duration::from_secs(5),
        format!(
            "{}/{} within bound, worst ratio {:.2e}, {}",
            r.passed,
            r.trials,
            r.worst_ratio,
            secs(t)
        ),
    ))
}

fn c2_rank_bound() -> Check {
    let start = Instant::now();
    let mut rng = seeded(2);
    let null = wedge_null_battery(&mut rng, 1000, &[1, 2, 3]).map_err(|e| e.to_string())?;
    let full = full_rank_battery(&mut rng, 1000, &[1, 2, 3]).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    Ok((
        null.failed == 0 && full.failed == 0 && t < Duration::from_secs(10),
        format!(
            "wedge-null certified {}/{} (worst sigma ratio {:.2e} of bound), full-rank nonzero {}/{}, {}",
            null.passed,
            null.trials,
            null.worst_ratio,
            full.passed,
            full.trials,
            secs(t)
        ),
    ))
}

fn c3_circle_integrals() -> Check {
    let start = Instant::now();
    let unit = CirclePath::new([0.0, 0.0], 1.0, 1 << 14).map_err(|e| e.to_string())?;
    let green = (oriented_circle_integral(|p| p[0], |p| p[1], &unit) - PI).abs();
    let mut rng = seeded(3);
    let mut exact = 0.0f64;
    for _ in 0..50 {
        let coeffs: Vec<(i32, i32, f64)> = (0..=5)
            .flat_map(|a| (0..=5 - a).map(move |b| (a, b)))
            .map(|(a, b)| (a, b, rng.gen_range(-1.0..1.0)))
            .collect();
        let v = |p: [f64; 2]| {
            coeffs
                .iter()
                .map(|&(a, b, c)| c * p[0].powi(a) * p[1].powi(b))
                .sum::<f64>()
        };
        let path = CirclePath::new(
            [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
            rng.gen_range(0.1..1.0),
            1 << 14,
        )
        .map_err(|e| e.to_string())?;
        exact = exact.max(oriented_circle_integral(|_| 1.0, v, &path).abs());
    }
    let t = start.elapsed();
    Ok((
        green <= 1e-6 && exact <= 1e-8 && t < Duration::from_secs(1),
        format!(
            "|y1 dy2 - pi| = {green:.2e}, max |dv| = {exact:.2e} over 50 quintics, {}",
            secs(t)
        ),
    ))
}

fn c4_green() -> Check {
    let mut rng = seeded(4);
    let path = CirclePath::new([0.0, 0.0], 0.5, DEFAULT_CIRCLE_NODES).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let n = 1 + trial % 2;
        let rows: Vec<Vec<f64>> = (0..2 * n + 1)
            .map(|_| (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect();
        let wedge: f64 = (0..n)
            .map(|j| rows[j][0] * rows[j + n][1] - rows[j][1] * rows[j + n][0])
            .sum();
        let map = GalleryMap::linear(rows).map_err(|e| e.to_string())?;
        let defect = circle_defect(&map, &[0.3, -0.2], 1.0, &path)
            .map_err(|e| e.to_string())?
            .defect;
        worst = worst.max((defect - TAU * 0.25 * wedge).abs() / (1.0 + wedge.abs()));
    }
    Ok((
        worst <= 1e-6,
        format!("max relative defect error {worst:.2e} over 100 linear maps"),
    ))
}

struct Sups {
    residual: f64,
    wedge: f64,
}

fn sups(jets: &JetField) -> Sups {
    let rho = contact_residual(jets);
    let w = wedge_field(jets);
    Sups {
        residual: jets
            .interior_nodes()
            .map(|i| rho.norm(i))
            .fold(0.0, f64::max),
        wedge: jets
            .interior_nodes()
            .map(|i| w.max_abs(i))
            .fold(0.0, f64::max),
    }
}

fn jets_on(map: &GalleryMap, count: usize) -> Result<JetField, String> {
    let d = GridDomain::cube(2, -1.0, 1.0, count).map_err(|e| e.to_string())?;
    jacobian_fd(&map.sample(&d).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}

/// The cylinder's Jacobian has an identically zero second column, so its
/// discrete wedge vanishes at every resolution and the halving ratio of the
/// wedge is 0/0. The warped cylinder is horizontal with a wedge that is only
/// zero in the limit and supplies the rate.
fn c5_horizontal_low_rank() -> Check {
    let cyl = GalleryMap::HorizontalCylinder;
    let (coarse, fine) = (jets_on(&cyl, 256)?, jets_on(&cyl, 511)?);
    let low = lowrank_scan(&coarse, &Tolerances::default()).map_err(|e| e.to_string())?;
    let (a, b) = (sups(&coarse), sups(&fine));
    let ratio = a.residual / b.residual;
    let warped = GalleryMap::WarpedCylinder;
    let (wa, wb) = (sups(&jets_on(&warped, 256)?), sups(&jets_on(&warped, 511)?));
    let wratio = wa.wedge / wb.wedge;
    let rratio = wa.residual / wb.residual;
    let in_band = |r: f64| (3.5..=4.5).contains(&r);
    let pass = a.residual <= 1e-3
        && a.wedge <= 1e-3
        && low.lowrank_fraction == 1.0
        && in_band(ratio)
        && a.wedge == 0.0
        && b.wedge == 0.0
        && wa.wedge <= 1e-3
        && wa.residual <= 1e-3
        && in_band(wratio)
        && in_band(rratio);
    Ok((
        pass,
        format!(
            "cylinder: residual {:.2e} (ratio {ratio:.3}), wedge {:.1e} at both h, lowrank {}; \
             warped: residual {:.2e} (ratio {rratio:.3}), wedge {:.2e} (ratio {wratio:.3})",
            a.residual, a.wedge, low.lowrank_fraction, wa.residual, wa.wedge
        ),
    ))
}

fn c6_vertical_graph() -> Check {
    let d = GridDomain::new(vec![0.0, 0.0], vec![0.25, 0.25], vec![17, 17])
        .map_err(|e| e.to_string())?;
    let jets = jacobian_fd(
        &GalleryMap::VerticalGraph
            .sample(&d)
            .map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    let node = d
        .node_at(&[1.0, 2.0], 1e-12)
        .ok_or("(1, 2) is not a node")?;
    let rho = contact_residual(&jets);
    let r = rho.at(node);
    let res_err = (r[0] - 2.0).abs().max((r[1] + 1.0).abs());
    let w = wedge_field(&jets);
    let wedge_err = jets
        .interior_nodes()
        .map(|i| (w.at(i)[1] - 1.0).abs())
        .fold(0.0, f64::max);
    let maxrank = maxrank_scan(&jets, 1e-8).map_err(|e| e.to_string())?;
    Ok((
        res_err <= 1e-10 && wedge_err <= 1e-12 && maxrank == 1.0,
        format!("residual at (1,2) = ({:.12}, {:.12}), max |W - 1| = {wedge_err:.1e}, maxrank {maxrank}", r[0], r[1]),
    ))
}

fn c7_blowup() -> Check {
    let rs: Vec<f64> = (2..=8).map(|k| 2f64.powi(-k)).collect();
    let z = [0.1, 0.2];
    let errs = rs
        .iter()
        .map(|&r| l1_blowup_error(&GalleryMap::Quadratic, &z, r))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let x: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let y: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let slope = fit_line(&x, &y).map_err(|e| e.to_string())?.slope;
    let mut rng = seeded(7);
    let rows: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let linear = GalleryMap::linear(rows).map_err(|e| e.to_string())?;
    let mut lin_err = 0.0f64;
    for &r in &rs {
        lin_err = lin_err.max(l1_blowup_error(&linear, &z, r).map_err(|e| e.to_string())?);
    }
    Ok((
        (slope - 1.0).abs() <= 0.05 && lin_err <= 1e-12,
        format!("quadratic slope {slope:.6}, linear max error {lin_err:.1e}"),
    ))
}

fn c8_wedge_from_circles() -> Check {
    type Oracle = fn(f64, f64) -> f64;
    let maps: [(GalleryMap, Oracle); 3] = [
        (GalleryMap::Swirl, |a, b| 1.0 - 0.09 * a.cos() * b.cos()),
        (GalleryMap::Stretch, |a, _| 1.0 + 0.5 * a * a),
        (GalleryMap::QuadraticN2, |a, b| -a * b - 0.5 * a * a - b),
    ];
    let mut rng = seeded(8);
    let (mut worst, mut min_slope, mut all_converged) = (0.0f64, f64::INFINITY, true);
    for (map, oracle) in &maps {
        for _ in 0..10 {
            let z = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let e = wedge_from_circles(map, &z, &RhoSchedule::default(), DEFAULT_RADIUS)
                .map_err(|e| e.to_string())?;
            worst = worst.max((e.estimate - oracle(z[0], z[1])).abs());
            min_slope = min_slope.min(e.slope.unwrap_or(f64::NEG_INFINITY));
            all_converged &= e.convergence == Convergence::Converged;
        }
    }
    Ok((
        worst <= 1e-3 && min_slope >= 1.0,
        format!(
            "max error {worst:.2e}, min rho-slope {min_slope:.3}, all converged {all_converged}"
        ),
    ))
}

fn c9_dimensions() -> Check {
    let start = Instant::now();
    let scales = dyadic_scales(2, 7);
    let k = GaugeChoice::Koranyi;
    let err = |e: heislab::Error| e.to_string();
    let hseg = MapCloud::uniform(
        GalleryMap::HorizontalSegment,
        &[0.0],
        &[1.0],
        &[(1 << 9) + 1],
    )
    .map_err(err)?;
    let h = dimension_estimate(&hseg, &scales, k).map_err(err)?.slope;
    let vseg = MapCloud::uniform(
        GalleryMap::VerticalSegment,
        &[0.0],
        &[1.0],
        &[(1 << 18) + 1],
    )
    .map_err(err)?;
    let v = dimension_estimate(&vseg, &scales, k).map_err(err)?.slope;
    let plane = MapCloud::uniform(
        GalleryMap::VerticalPlane,
        &[0.0, 0.0],
        &[1.0, 1.0],
        &[(1 << 9) + 1, (1 << 18) + 1],
    )
    .map_err(err)?;
    let pair = euclid_vs_heis_compare(&plane, &scales).map_err(err)?;
    let (pe, ph) = (pair.euclidean.slope, pair.heisenberg.slope);
    let t = start.elapsed();
    Ok((
        (h - 1.0).abs() <= 0.1
            && (v - 2.0).abs() <= 0.15
            && (ph - 3.0).abs() <= 0.2
            && (pe - 2.0).abs() <= 0.15
            && t < Duration::from_secs(300),
        format!(
            "horizontal segment {h:.3}, vertical segment {v:.3}, plane {ph:.3} (Heisenberg) vs {pe:.3} (Euclidean), {}",
            secs(t)
        ),
    ))
}

fn c10_positivity() -> Check {
    let err = |e: heislab::Error| e.to_string();
    let scales = dyadic_scales(4, 8);
    let k = GaugeChoice::Koranyi;
    let plane = MapCloud::uniform(
        GalleryMap::VerticalPlane,
        &[0.0, 0.0],
        &[1.0, 1.0],
        &[(1 << 10) + 1, (1 << 20) + 1],
    )
    .map_err(err)?;
    let series = content_at_exponent(&plane, &scales, 3.0, k).map_err(err)?;
    let seg = MapCloud::uniform(
        GalleryMap::HorizontalSegment,
        &[0.0],
        &[1.0],
        &[(1 << 10) + 1],
    )
    .map_err(err)?;
    let decay = content_at_exponent(&seg, &scales, 3.0, k).map_err(err)?;
    let c: Vec<f64> = decay
        .reports
        .iter()
        .map(|r| r.content.unwrap_or(0.0))
        .collect();
    let min_decay = c
        .windows(2)
        .map(|p| p[0] / p[1])
        .fold(f64::INFINITY, f64::min);
    Ok((
        series.spread() <= 4.0 && min_decay >= 4.0,
        format!(
            "plane contents {:.4}..{:.4} (spread {:.4}), segment min decay per halving {min_decay:.3}",
            series.min,
            series.max,
            series.spread()
        ),
    ))
}

fn run_analyze(dir: &Path, threads: &str) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_heislab"))
        .args(["analyze", "--gallery", "swirl", "--count", "129", "--out"])
        .arg(dir)
        .env("HEISLAB_THREADS", threads)
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    status
        .success()
        .then_some(())
        .ok_or(format!("analyze exited with {status}"))
}

fn c11_determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("t1"), tmp.path().join("t8"));
    run_analyze(&a, "1")?;
    run_analyze(&b, "8")?;
    let mut names: Vec<String> = std::fs::read_dir(&a)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
        .filter(|n| n != "manifest.json")
        .collect();
    names.sort();
    let mut differing = Vec::new();
    for n in &names {
        let x = std::fs::read(a.join(n)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join(n)).map_err(|e| e.to_string())?;
        if x != y {
            differing.push(n.clone());
        }
    }
    Ok((
        differing.is_empty() && !names.is_empty(),
        format!(
            "compared {} files ({}), differing: {:?}",
            names.len(),
            names.join(", "),
            differing
        ),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("J-pairing identity", c1_pairing),
        ("wedge-null rank bound", c2_rank_bound),
        ("oriented circle integrals", c3_circle_integrals),
        ("Green defect of linear maps", c4_green),
        ("horizontal maps have low rank", c5_horizontal_low_rank),
        ("non-horizontal witness", c6_vertical_graph),
        ("L1 blow-up", c7_blowup),
        ("wedge from circles", c8_wedge_from_circles),
        ("dimension exponents", c9_dimensions),
        ("positivity trend", c10_positivity),
        ("determinism across thread counts", c11_determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!(
            "{} {:>2} {name}: {detail} [{}]",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            secs(start.elapsed())
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

use heislab::heis::{
    cc_distance, cc_distance_between, contact_covector, dilate, gauge_distance, group_inv,
    group_mul, horizontal_frame, koranyi_norm, left_translate_vector, ControlOracle, GaugeChoice,
    HPoint,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn point(n: usize, r: f64) -> impl Strategy<Value = HPoint> {
    prop::collection::vec(-r..r, 2 * n + 1).prop_map(|c| HPoint::from_coords(&c).unwrap())
}

fn triple(r: f64) -> impl Strategy<Value = (HPoint, HPoint, HPoint)> {
    (1usize..=3).prop_flat_map(move |n| (point(n, r), point(n, r), point(n, r)))
}

fn pair(r: f64) -> impl Strategy<Value = (HPoint, HPoint)> {
    (1usize..=3).prop_flat_map(move |n| (point(n, r), point(n, r)))
}

fn close(a: &HPoint, b: &HPoint, tol: f64) -> bool {
    a.to_coords()
        .iter()
        .zip(b.to_coords())
        .all(|(u, v)| (u - v).abs() <= tol * (1.0 + v.abs()))
}

// Law written out coordinate by coordinate, independent of the library.
fn mul_oracle(p: &[f64], q: &[f64]) -> Vec<f64> {
    let n = (p.len() - 1) / 2;
    let mut out: Vec<f64> = p.iter().zip(q).map(|(a, b)| a + b).collect();
    for j in 0..n {
        out[2 * n] += p[j] * q[n + j] - p[n + j] * q[j];
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn law_matches_coordinate_formula((p, q) in pair(10.0)) {
        let got = group_mul(&p, &q).unwrap().to_coords();
        let want = mul_oracle(&p.to_coords(), &q.to_coords());
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn associativity((p, q, r) in triple(10.0)) {
        let lhs = group_mul(&group_mul(&p, &q).unwrap(), &r).unwrap();
        let rhs = group_mul(&p, &group_mul(&q, &r).unwrap()).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn inverse_is_two_sided(p in (1usize..=3).prop_flat_map(|n| point(n, 10.0))) {
        let e = HPoint::identity(p.dim());
        prop_assert!(close(&group_mul(&p, &group_inv(&p)).unwrap(), &e, 1e-14));
        prop_assert!(close(&group_mul(&group_inv(&p), &p).unwrap(), &e, 1e-14));
    }

    #[test]
    fn dilation_is_an_automorphism((p, q) in pair(2.0), r in 0.1f64..10.0) {
        let lhs = dilate(r, &group_mul(&p, &q).unwrap()).unwrap();
        let rhs = group_mul(&dilate(r, &p).unwrap(), &dilate(r, &q).unwrap()).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-13));
    }

    #[test]
    fn koranyi_distance_is_left_invariant((p, q) in pair(3.0), g in (1usize..=3).prop_flat_map(|n| point(n, 3.0))) {
        prop_assume!(g.dim() == p.dim());
        let d = gauge_distance(&p, &q, GaugeChoice::Koranyi).unwrap();
        let gp = group_mul(&g, &p).unwrap();
        let gq = group_mul(&g, &q).unwrap();
        let dg = gauge_distance(&gp, &gq, GaugeChoice::Koranyi).unwrap();
        prop_assert!((d - dg).abs() <= 1e-12 * (1.0 + d));
    }

    #[test]
    fn koranyi_norm_is_homogeneous(p in (1usize..=3).prop_flat_map(|n| point(n, 3.0)), r in 0.1f64..10.0) {
        let lhs = koranyi_norm(&dilate(r, &p).unwrap());
        prop_assert!((lhs - r * koranyi_norm(&p)).abs() <= 1e-13 * (1.0 + lhs));
    }

    #[test]
    fn koranyi_distance_satisfies_triangle_inequality((p, q, r) in triple(3.0)) {
        let g = GaugeChoice::Koranyi;
        let pr = gauge_distance(&p, &r, g).unwrap();
        let via = gauge_distance(&p, &q, g).unwrap() + gauge_distance(&q, &r, g).unwrap();
        prop_assert!(pr <= via * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn frame_is_left_invariant((p, q) in pair(5.0)) {
        let pq = group_mul(&p, &q).unwrap();
        for (xq, xpq) in horizontal_frame(&q).iter().zip(horizontal_frame(&pq)) {
            let pushed = left_translate_vector(&p, xq);
            for (a, b) in pushed.iter().zip(&xpq) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }
    }
}

#[test]
fn frame_annihilates_contact_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..1000 {
        let n = 1 + k % 3;
        let c: Vec<f64> = (0..2 * n + 1).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let p = HPoint::from_coords(&c).unwrap();
        let theta = contact_covector(&p);
        for x in horizontal_frame(&p) {
            let pairing: f64 = theta.iter().zip(&x).map(|(a, b)| a * b).sum();
            assert!(pairing.abs() <= 1e-15, "θ(X) = {pairing} at {c:?}");
        }
    }
}

#[test]
fn cc_vertical_unit_agrees_with_control_oracle() {
    let target = HPoint::h1(0.0, 0.0, 1.0);
    let cc = cc_distance(&target).unwrap().length;
    let oracle = ControlOracle::default();
    assert!(oracle.sequence_count() >= 10_000);
    let found = oracle
        .distance(&target)
        .expect("oracle found no admissible control");
    assert!(
        (cc - found.length).abs() <= 1e-2,
        "cc {cc} oracle {}",
        found.length
    );
    assert!((cc - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
}

#[test]
fn cc_is_homogeneous_and_inverse_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let p = HPoint::h1(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let d1 = cc_distance(&p).unwrap().length;
        let d2 = cc_distance(&dilate(2.0, &p).unwrap()).unwrap().length;
        assert!((d2 / d1 - 2.0).abs() <= 1e-8, "ratio {}", d2 / d1);
        let di = cc_distance(&group_inv(&p)).unwrap().length;
        assert!((d1 - di).abs() <= 1e-8 * d1);
    }
}

#[test]
fn cc_and_koranyi_are_bi_lipschitz_equivalent() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let e = HPoint::h1(0.0, 0.0, 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..400 {
        let q = HPoint::h1(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        );
        let cc = cc_distance_between(&e, &q).unwrap();
        let ratio = cc / koranyi_norm(&q);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    // Horizontal points give ratio 1; the vertical axis gives sqrt(2π)/1.
    println!(
        "empirical bi-Lipschitz constant C = {:.4} (ratio range [{lo:.4}, {hi:.4}])",
        hi.max(1.0 / lo)
    );
    assert!(lo >= 1.0 - 1e-9);
    assert!(hi <= (2.0 * std::f64::consts::PI).sqrt() + 1e-9);
}

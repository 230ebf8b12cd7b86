mod common;

use std::f64::consts::{PI, TAU};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coprime_floors::counting::{inner_count, Polynomial, ProblemSpec};
use coprime_floors::equidist::{
    discrepancy_box_lower, discrepancy_exact_1d, et_koksma_upper, koksma_rhs, monotone_check, nu_sequence,
    quadratic_bound, reciprocal_sum, weyl_bound_report, weyl_sum, MonotoneVariant, PointSet, WeylBoundOptions,
};
use coprime_floors::realnum::RealSpec;

use common::{brute_discrepancy_1d, problem_matrix};

fn random_1d(rng: &mut ChaCha8Rng, n: usize) -> PointSet {
    let pts = (0..n).map(|_| vec![rng.gen::<f64>()]).collect();
    PointSet::new(1, pts, "random").unwrap()
}

#[test]
fn exact_1d_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..50 {
        let n = 1 + (i * 37) % 200;
        let mut ps = random_1d(&mut rng, n);
        // Repeated coordinates exercise the one-sided limits.
        if i % 5 == 0 && n > 3 {
            ps.points[1] = ps.points[0].clone();
            ps.points[2] = vec![0.0];
        }
        let exact = discrepancy_exact_1d(&ps).unwrap();
        let brute = brute_discrepancy_1d(&ps.column(0));
        assert!((exact - brute).abs() < 1e-12, "set {i}: {exact} vs {brute}");
        assert_eq!(discrepancy_box_lower(&ps).unwrap().value, exact);
    }
}

#[test]
fn kronecker_points_against_brute_force() {
    let p = ProblemSpec::linear(RealSpec::sqrt(2)).unwrap();
    let ps = nu_sequence(&p, 1, 100).unwrap();
    let exact = discrepancy_exact_1d(&ps).unwrap();
    assert!(exact > 0.0 && exact < 1.0);
    assert!((exact - brute_discrepancy_1d(&ps.column(0))).abs() < 1e-12);
}

#[test]
fn points_near_the_origin() {
    for n in [1usize, 10, 100] {
        let pts = (0..n).map(|i| vec![1e-9 * i as f64, 1e-9 * i as f64]).collect();
        let ps = PointSet::new(2, pts, "corner").unwrap();
        assert!(discrepancy_box_lower(&ps).unwrap().value > 1.0 - 1e-6);
    }
}

#[test]
fn sandwich_for_every_cutoff() {
    let mut sets = Vec::new();
    for (_, p) in problem_matrix().iter().filter(|(_, p)| p.k() <= 2) {
        for d in [1u64, 2, 5] {
            sets.push(nu_sequence(p, d, 200).unwrap());
        }
    }
    for ps in &sets {
        let lower = discrepancy_box_lower(ps).unwrap().value;
        for h in [5u32, 10, 20, 50] {
            let (upper, _) = koksma_rhs(ps, h, 3.0).unwrap();
            assert!(lower <= upper, "{:?} H={h}: {lower} > {upper}", ps.provenance);
        }
    }
}

#[test]
fn one_dimensional_report_is_ordered() {
    let p = ProblemSpec::linear(RealSpec::sqrt(2)).unwrap();
    let ps = nu_sequence(&p, 1, 1000).unwrap();
    let r = et_koksma_upper(&ps, 20, 3.0).unwrap();
    let exact = r.exact.unwrap();
    assert!(r.box_lower <= exact && exact <= r.et_upper);
    assert_eq!(r.weyl_terms.len(), 40);
    let (one, _) = koksma_rhs(&ps, 1, 3.0).unwrap();
    assert!(one >= 3.0);
}

#[test]
fn nu_points_for_two_coordinates() {
    let p = ProblemSpec::new(vec![RealSpec::sqrt(2), RealSpec::sqrt(3)], vec![1, 2]).unwrap();
    let ps = nu_sequence(&p, 2, 2).unwrap();
    // ({√2 n}, {2√3 n²})
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let want = [[s2.fract(), (2.0 * s3).fract()], [(2.0 * s2).fract(), (8.0 * s3).fract()]];
    for (got, w) in ps.points.iter().zip(want) {
        assert!((got[0] - w[0]).abs() < 1e-14 && (got[1] - w[1]).abs() < 1e-14);
    }
}

/// `|Σ_{n ≤ N} e(h·n² √2)|` with phases from exact integer square roots at
/// 2^-128 resolution.
fn quadratic_oracle(h: u64, big_n: u64) -> f64 {
    let one: BigInt = BigInt::from(1u32) << 128;
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for n in 1..=big_n {
        let s: BigInt = BigInt::from(h) * BigInt::from(n).pow(2);
        let sq: BigInt = BigInt::from(2u32) * &s * &s * &one * &one;
        let t = sq.sqrt();
        let frac = BigRational::new(t % &one, one.clone()).to_f64().unwrap();
        re += (TAU * frac).cos();
        im += (TAU * frac).sin();
    }
    re.hypot(im)
}

#[test]
fn quadratic_weyl_sum_matches_oracle() {
    let p = ProblemSpec::new(vec![RealSpec::sqrt(3), RealSpec::sqrt(2)], vec![1, 2]).unwrap();
    let s = weyl_sum(&p, 1, &[0, 1], 1000).unwrap();
    assert!((s.magnitude - quadratic_oracle(1, 1000)).abs() < 1e-9);
    assert!(s.error_bound < 1000.0 * 2f64.powi(-49));
}

#[test]
fn linear_weyl_sums_follow_geometric_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    while done < 100 {
        let c: i64 = rng.gen_range(2..500);
        let r = (c as f64).sqrt();
        if r.fract() == 0.0 {
            continue;
        }
        let h: i64 = rng.gen_range(1..50);
        let n: u64 = rng.gen_range(1..3000);
        let p = ProblemSpec::linear(RealSpec::sqrt(c)).unwrap();
        let got = weyl_sum(&p, 1, &[h], n).unwrap().magnitude;
        let theta = (h as f64 * r).fract();
        let denom = (PI * theta).sin();
        if denom.abs() < 1e-3 {
            continue;
        }
        let want = ((PI * theta * n as f64).sin() / denom).abs();
        // The f64 closed form loses about n·|θ| ulps in the numerator.
        assert!((got - want).abs() < 1e-8 * (n as f64) / denom.abs(), "c={c} h={h} n={n}: {got} vs {want}");
        done += 1;
    }
}

#[test]
fn rational_half_turns_cancel() {
    let p = ProblemSpec::allowing_rational(vec![RealSpec::rational(1, 2)], vec![1]).unwrap();
    let s = weyl_sum(&p, 1, &[1], 2).unwrap();
    assert!(s.re.abs() < 1e-15 && s.im.abs() < 1e-15);
}

#[test]
fn count_deviation_is_controlled_by_discrepancy() {
    let x = 2000u64;
    for (name, p) in problem_matrix().iter().filter(|(_, p)| p.k() <= 2) {
        for d in [2u64, 3, 5] {
            let n = x / d;
            let ps = nu_sequence(p, d, n).unwrap();
            let c = 3f64.powi(p.k() as i32);
            let upper = et_koksma_upper(&ps, 20, c).unwrap().et_upper;
            let a = inner_count(p, d, x).unwrap() as f64;
            let dev = (a - n as f64 * (d as f64).powi(-(p.k() as i32))).abs();
            assert!(dev <= n as f64 * upper, "{name} d={d}: {dev} > {}", n as f64 * upper);
        }
    }
}

#[test]
fn delta_for_the_29_convergent() {
    let r = weyl_bound_report(
        &RealSpec::sqrt(2),
        2,
        1,
        1000,
        &Polynomial::new(vec![]),
        &WeylBoundOptions { q: Some(29), epsilon: None },
    )
    .unwrap();
    let want = 1.0 / 29.0 + 1e-3 + 29e-6 + 1e-3;
    assert!((r.delta - want).abs() < 1e-15);
    assert!((r.bound_little_o - 1000f64.powf(1.05) * want.sqrt()).abs() < 1e-9);
    assert!(r.actual <= 1000.0);
}

#[test]
fn reciprocal_sum_small_case() {
    let r = reciprocal_sum(&RealSpec::sqrt(2), 2, 10, None).unwrap();
    assert!((r.exact_sum - 8.242640687).abs() < 1e-8);
    let big = reciprocal_sum(&RealSpec::golden_ratio(), 500, 40, None).unwrap();
    assert!(big.exact_sum <= 500.0 * 40.0);
}

#[test]
fn quadratic_bound_single_term() {
    let zero = Polynomial::new(vec![]);
    let r = quadratic_bound(&RealSpec::sqrt(2), 1, 1, 1, &zero).unwrap();
    assert!(r.actual * r.actual <= r.rhs + 1e-12);
    let lin = Polynomial::new(vec![RealSpec::rational(1, 7), RealSpec::sqrt(5)]);
    let a = quadratic_bound(&RealSpec::sqrt(3), 4, 3, 300, &lin).unwrap();
    let b = quadratic_bound(&RealSpec::sqrt(3), -4, 3, 300, &lin).unwrap();
    assert_eq!(a.rhs, b.rhs);
}

#[test]
fn decreasing_sequence_under_the_stated_hypothesis() {
    // (2/3^{m-1})^{1/(m²-m)}: 0.8165, 0.7782, … although 2 ≤ 3.
    assert!(!monotone_check(2.0, 3.0, 6, MonotoneVariant::InverseGeometric).unwrap());
    assert!(!monotone_check(10.0, 1.0, 4, MonotoneVariant::InverseGeometric).unwrap());
    // u² ≤ v is enough.
    assert!(monotone_check(2.0, 4.0, 30, MonotoneVariant::InverseGeometric).unwrap());
    for u in [1.0, 2.0, 1e6] {
        assert!(monotone_check(u, 1.0, 5, MonotoneVariant::Geometric).unwrap());
    }
}

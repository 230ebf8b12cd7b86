mod common;

use num_bigint::BigInt;
use num_rational::BigRational;

use coprime_floors::dioph::{convergents, estimate_type, find_window, TypeMode};
use coprime_floors::realnum::{Real, RealSpec};

fn real(s: RealSpec) -> Real {
    Real::new(s).unwrap()
}

/// Convergents `(a, q)` from the recurrence for a periodic expansion.
fn recurrence(a0: i128, period: &[i128], max_q: u128) -> Vec<(i128, u128)> {
    let (mut p0, mut q0, mut p1, mut q1) = (1i128, 0i128, a0, 1i128);
    let mut out = vec![(a0, 1u128)];
    for a in period.iter().cycle() {
        let (p, q) = (a * p1 + p0, a * q1 + q0);
        if q as u128 > max_q {
            break;
        }
        out.push((p, q as u128));
        (p0, q0, p1, q1) = (p1, q1, p, q);
    }
    out
}

fn pairs(alpha: &Real, max_q: u128) -> Vec<(i128, u128)> {
    convergents(alpha, max_q).unwrap().list.iter().map(|c| (c.a, c.q)).collect()
}

#[test]
fn sqrt2_follows_pell_recurrence() {
    let got = pairs(&real(RealSpec::sqrt(2)), 1 << 60);
    let want = recurrence(1, &[2], 1 << 60);
    assert_eq!(got[..want.len() - 1], want[..want.len() - 1]);
    assert!(got.len() + 1 >= want.len());
}

#[test]
fn golden_ratio_gives_fibonacci() {
    let got = pairs(&real(RealSpec::golden_ratio()), 1 << 50);
    // q_0 = q_1 = 1 collapse to the closer convergent 2/1.
    let want = recurrence(1, &[1], 1 << 50);
    assert_eq!(got[0], (2, 1));
    for (g, w) in got.iter().skip(1).zip(want.iter().skip(2)) {
        assert_eq!(g, w);
    }
}

#[test]
fn sqrt3_alternating_quotients() {
    let got = pairs(&real(RealSpec::sqrt(3)), 100_000);
    // 1/1 and 2/1 share q = 1; the closer one stays.
    let want = recurrence(1, &[1, 2], 100_000);
    assert_eq!(&got[..want.len() - 1], &want[1..]);
}

#[test]
fn convergent_quality_below_one_over_q() {
    for s in [RealSpec::sqrt(2), RealSpec::sqrt(7), RealSpec::golden_ratio(), common::liouville()] {
        let r = real(s.clone());
        for c in convergents(&r, 1 << 40).unwrap().list {
            let hi = c.quality.hi.to_rational();
            assert!(hi < BigRational::new(BigInt::from(1), BigInt::from(c.q)), "{s} q={}", c.q);
        }
    }
}

#[test]
fn rational_expansion_terminates() {
    let cs = convergents(&real("cf:[3;7,15,1]".parse().unwrap()), 1_000_000).unwrap();
    assert!(cs.terminated);
    let last = cs.list.last().unwrap();
    assert_eq!((last.a, last.q), (355, 113));
}

#[test]
fn windows_and_type() {
    let s2 = real(RealSpec::sqrt(2));
    let w = find_window(&s2, 1000.0, 0.5, TypeMode::Polynomial).unwrap();
    assert_eq!(w.q, 985);
    assert!(w.satisfied);
    let t = estimate_type(&s2, 1 << 60, TypeMode::Polynomial).unwrap();
    assert!((t.tau_hat - 1.0).abs() < 0.1, "{}", t.tau_hat);
}

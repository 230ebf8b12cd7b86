mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

use coprime_floors::realnum::{eval_enclosure, floor_scaled, frac_below, Real, RealSpec};
use coprime_floors::Error;

use common::{floor_golden_times, floor_sqrt_times, liouville};

#[test]
fn liouville_enclosure_contains_partial_sum() {
    // 2^-2 + 2^-4 + 2^-16 + 2^-256, with the rest below 2·2^-65536.
    let two = BigInt::from(2);
    let partial: BigRational = [2u32, 4, 16, 256]
        .iter()
        .map(|&c| BigRational::new(BigInt::one(), two.pow(c)))
        .sum();
    let slack = BigRational::new(BigInt::one(), two.pow(65_000u32));
    for bits in [64u32, 200, 300, 1000] {
        let iv = eval_enclosure(&liouville(), bits).unwrap();
        assert!(iv.hi.to_rational() > partial, "bits={bits}");
        assert!(iv.lo.to_rational() < &partial + &slack, "bits={bits}");
        assert!(iv.width() <= BigRational::new(BigInt::one(), two.pow(bits)), "bits={bits}");
    }
}

#[test]
fn enclosures_shrink_with_precision() {
    for spec in [RealSpec::sqrt(2), RealSpec::golden_ratio(), liouville()] {
        let mut last = None;
        for bits in [16u32, 32, 64, 128, 256] {
            let w = eval_enclosure(&spec, bits).unwrap().width();
            if let Some(prev) = last {
                assert!(w <= prev);
            }
            last = Some(w);
        }
    }
}

#[test]
fn continued_fraction_and_rational_floors() {
    let pi_approx: RealSpec = "cf:[3;7,15,1]".parse().unwrap();
    // 355/113
    for s in [1u128, 113, 1000, 123_456_789] {
        let want = BigInt::from(355u128 * s / 113);
        assert_eq!(floor_scaled(&pi_approx, s).unwrap().value, want);
    }
}

#[test]
fn ambiguous_decimal_is_an_error() {
    // 1.414 ± 10^-3 cannot decide ⌊10^6 α⌋.
    let d: RealSpec = "dec:1.414:3".parse().unwrap();
    assert!(matches!(floor_scaled(&d, 1_000_000), Err(Error::PrecisionExhausted { .. })));
    assert_eq!(floor_scaled(&d, 1).unwrap().value, BigInt::from(1));
}

#[test]
fn rational_threshold_is_strict() {
    let half = RealSpec::rational(1, 2);
    // {1/2 · 1} = 1/2 is not below 1/2.
    assert!(!frac_below(&half, 1, 1, 2).unwrap());
    assert!(frac_below(&half, 1, 2, 3).unwrap());
}

fn text_forms() -> impl Strategy<Value = String> {
    prop_oneof![
        (-1000i64..1000, 1i64..1000).prop_map(|(p, q)| format!("rat:{p}/{q}")),
        (-50i64..50, 1i64..50, 2i64..60, 1i64..20)
            .prop_filter("non-square radicand", |(_, _, d, _)| ((*d as f64).sqrt().round() as i64).pow(2) != *d)
            .prop_map(|(a, b, d, c)| format!("surd:({a}+{b}*sqrt({d}))/{c}")),
        (0i64..10, proptest::collection::vec(1i64..30, 0..6)).prop_map(|(a0, rest)| {
            if rest.is_empty() {
                format!("cf:[{a0}]")
            } else {
                let r: Vec<String> = rest.iter().map(|x| x.to_string()).collect();
                format!("cf:[{a0};{}]", r.join(","))
            }
        }),
        (0u32..100, 2u32..8).prop_map(|(base, depth)| format!("liouville:base={},rule=poly,tau=2,c1=2,depth={depth}", base % 7 + 2)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sqrt_floors_match_integer_square_root(c in prop::sample::select(vec![2u64, 3, 5, 7, 11, 1_000_003]), s in 1u128..(1u128 << 100)) {
        let got = floor_scaled(&RealSpec::sqrt(c as i64), s).unwrap().value;
        prop_assert_eq!(got, floor_sqrt_times(c, s));
    }

    #[test]
    fn golden_floors_match_oracle(s in 1u128..(1u128 << 110)) {
        prop_assert_eq!(floor_scaled(&RealSpec::golden_ratio(), s).unwrap().value, floor_golden_times(s));
    }

    #[test]
    fn frac_below_agrees_with_floors(s in 1u128..(1u128 << 60), den in 1u64..1000) {
        // {α s} < 1/den  ⇔  ⌊den·α·s⌋ - den·⌊α·s⌋ = 0
        let spec = RealSpec::sqrt(3);
        let a = floor_scaled(&spec, s).unwrap().value;
        let b = floor_scaled(&spec, s * den as u128).unwrap().value;
        prop_assert_eq!(frac_below(&spec, s, 1, den).unwrap(), b - a * den == BigInt::from(0));
    }

    #[test]
    fn text_form_round_trips(text in text_forms()) {
        let spec: RealSpec = text.parse().unwrap();
        prop_assert_eq!(spec.to_string(), text.clone());
        let again: RealSpec = spec.to_string().parse().unwrap();
        prop_assert_eq!(&again, &spec);
        let json = serde_json::to_string(&spec).unwrap();
        let back: RealSpec = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, spec);
    }

    #[test]
    fn fast_and_exact_routes_agree(s in 1u128..(1u128 << 90)) {
        let r = Real::new(RealSpec::sqrt(5)).unwrap();
        prop_assert_eq!(BigInt::from(r.floor_value(s).unwrap()), r.floor_scaled(s).unwrap().value);
    }
}

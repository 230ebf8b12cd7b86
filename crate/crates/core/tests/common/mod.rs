#![allow(dead_code)]

use std::path::PathBuf;

use num_bigint::BigInt;

use coprime_floors::counting::ProblemSpec;
use coprime_floors::realnum::RealSpec;

pub const LIOUVILLE: &str = "liouville:base=2,rule=poly,tau=2,c1=2,depth=8";

pub fn golden() -> RealSpec {
    RealSpec::golden_ratio()
}

pub fn liouville() -> RealSpec {
    LIOUVILLE.parse().unwrap()
}

/// The twelve counting problems: every exponent pattern against rotated
/// coefficient choices, one with a lacunary coefficient.
pub fn problem_matrix() -> Vec<(String, ProblemSpec)> {
    let s2 = RealSpec::sqrt(2);
    let s3 = RealSpec::sqrt(3);
    let g = golden();
    let rows: Vec<(Vec<RealSpec>, Vec<u32>)> = vec![
        (vec![s2.clone()], vec![1]),
        (vec![s3.clone()], vec![1]),
        (vec![g.clone()], vec![1]),
        (vec![s2.clone(), s3.clone()], vec![1, 2]),
        (vec![s3.clone(), g.clone()], vec![1, 2]),
        (vec![g.clone(), s2.clone()], vec![1, 2]),
        (vec![liouville(), s2.clone()], vec![1, 2]),
        (vec![s2.clone(), s3.clone()], vec![1, 3]),
        (vec![s3.clone(), g.clone()], vec![1, 3]),
        (vec![g.clone(), s2.clone()], vec![1, 3]),
        (vec![s2.clone(), s3.clone(), g.clone()], vec![1, 2, 4]),
        (vec![g, s2, s3], vec![1, 2, 4]),
    ];
    rows.into_iter()
        .map(|(a, m)| {
            let p = ProblemSpec::new(a, m).unwrap();
            (p.to_string(), p)
        })
        .collect()
}

/// `fixtures/` at the workspace root, or `COPRIME_FIXTURE_DIR`.
pub fn fixture_dir() -> PathBuf {
    std::env::var_os("COPRIME_FIXTURE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"))
}

/// `⌊√c · s⌋` for a positive non-square `c`, by exact integer square root.
pub fn floor_sqrt_times(c: u64, s: u128) -> BigInt {
    let s = BigInt::from(s);
    (BigInt::from(c) * &s * &s).sqrt()
}

/// `⌊φ·s⌋` with `φ = (1 + √5)/2`, using `⌊x/2⌋ = ⌊⌊x⌋/2⌋`.
pub fn floor_golden_times(s: u128) -> BigInt {
    (BigInt::from(s) + floor_sqrt_times(5, s)) / 2
}

/// Extreme discrepancy of 1D points by brute force over every interval with
/// endpoints at a point, just past a point, `0` or `1`.
pub fn brute_discrepancy_1d(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    // (position, whether the point itself is excluded)
    let mut los: Vec<(f64, bool)> = vec![(0.0, false)];
    let mut his: Vec<(f64, bool)> = vec![(1.0, false)];
    for &y in ys {
        los.push((y, false));
        los.push((y, true));
        his.push((y, false));
        his.push((y, true));
    }
    let mut sorted = ys.to_vec();
    sorted.sort_by(f64::total_cmp);
    let below = |t: f64| sorted.partition_point(|&y| y < t);
    let at_most = |t: f64| sorted.partition_point(|&y| y <= t);
    let mut best = 0.0f64;
    for &(a, open_a) in &los {
        let start = if open_a { at_most(a) } else { below(a) };
        for &(b, through_b) in &his {
            if b < a || (b == a && !through_b) {
                continue;
            }
            let end = if through_b { at_most(b) } else { below(b) };
            let count = end.saturating_sub(start) as f64;
            best = best.max((count / n - (b - a)).abs());
        }
    }
    best
}

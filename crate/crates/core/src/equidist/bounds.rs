use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::discrepancy::ComplexSum;
use super::weyl::{monomial_phase, sum_phases};
use crate::counting::Polynomial;
use crate::dioph::convergents;
use crate::error::{Error, Result};
use crate::realnum::{Real, RealSpec};
use crate::util::ser_display;

/// Default `ε` standing in for the unspecified `o(1)` in `N^{1+o(1)}`.
pub const DEFAULT_EPSILON: f64 = 0.05;

/// Block size for parallel sums over `v` or `ν`.
const BLOCK: u64 = 4096;

fn prepare(spec: &RealSpec) -> Result<Real> {
    Real::new(spec.clone())
}

fn lower_reals(g: &Polynomial) -> Result<Vec<Real>> {
    g.coeffs.iter().map(|c| Real::new(c.clone())).collect()
}

/// `a/q` with `|qα - a| < 1/q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Approximant {
    pub a: i128,
    pub q: u128,
}

/// Checks that `q` admits `a` with `|α - a/q| < 1/q²`.
fn approximant_for(alpha: &Real, q: u128) -> Result<Approximant> {
    if q == 0 {
        return Err(Error::precondition("q must be at least 1"));
    }
    let (fl, f) = alpha.floor_frac(q)?;
    let (a, dist) = if f > 0.5 { (fl + 1, 1.0 - f) } else { (fl, f) };
    if dist * q as f64 >= 1.0 {
        return Err(Error::precondition(format!(
            "q = {q} does not satisfy |α - a/q| < 1/q²"
        )));
    }
    Ok(Approximant { a, q })
}

/// The convergent with the largest denominator at most `limit`.
fn best_convergent(alpha: &Real, limit: u128) -> Result<Approximant> {
    let cs = convergents(alpha, limit)?;
    cs.list
        .iter()
        .rev()
        .find(|c| c.q <= limit)
        .map(|c| Approximant { a: c.a, q: c.q })
        .ok_or_else(|| Error::NoConvergent(format!("no convergent with q ≤ {limit}")))
}

fn chosen(alpha: &Real, q: Option<u128>, limit: u128) -> Result<Approximant> {
    match q {
        Some(q) => approximant_for(alpha, q),
        None => best_convergent(alpha, limit.max(1)),
    }
}

/// Measured size of `Σ_{n ≤ N} e(hαn^m + g(n))` against the two bound
/// shapes `N^{1+ε} Δ^{1/(m²-m)}` and `N log N · Δ^{1/(m²-m+2)}`.
///
/// The `N^ε` factor is a heuristic stand-in for `N^{o(1)}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylBoundReport {
    pub m: u32,
    pub h: i64,
    pub a: i128,
    pub q: u128,
    #[serde(rename = "N")]
    pub n: u64,
    /// `|h|/q + 1/N + q/N^m + gcd(q, h)/N^{m-1}`, exactly.
    #[serde(serialize_with = "ser_display")]
    pub delta_exact: BigRational,
    pub delta: f64,
    pub epsilon: f64,
    pub bound_little_o: f64,
    pub bound_log: f64,
    pub actual: f64,
    pub actual_error: f64,
    /// `actual / bound_little_o`
    pub ratio: f64,
    /// `actual / bound_log`
    pub ratio_log: f64,
}

/// `|h|/q + 1/N + q/N^m + gcd(q, h)/N^{m-1}`.
pub fn weyl_delta(q: u128, h: i64, big_n: u64, m: u32) -> BigRational {
    let q_big = BigInt::from(q);
    let h_big = BigInt::from(h.unsigned_abs());
    let n = BigInt::from(big_n);
    let r = |num: BigInt, den: BigInt| BigRational::new(num, den);
    r(h_big.clone(), q_big.clone())
        + r(1.into(), n.clone())
        + r(q_big.clone(), n.pow(m))
        + r(q_big.gcd(&h_big), n.pow(m - 1))
}

/// Options for [`weyl_bound_report`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WeylBoundOptions {
    /// Denominator of the approximation; defaults to the largest convergent
    /// denominator up to `N`.
    pub q: Option<u128>,
    /// Defaults to [`DEFAULT_EPSILON`].
    pub epsilon: Option<f64>,
}

pub fn weyl_bound_report(
    spec: &RealSpec,
    m: u32,
    h: i64,
    big_n: u64,
    g: &Polynomial,
    opts: &WeylBoundOptions,
) -> Result<WeylBoundReport> {
    if m < 2 {
        return Err(Error::precondition("degree m must be at least 2"));
    }
    if h == 0 {
        return Err(Error::precondition("h must be nonzero"));
    }
    if big_n == 0 {
        return Err(Error::precondition("N must be at least 1"));
    }
    if g.degree().is_some_and(|deg| deg >= m as usize) {
        return Err(Error::precondition(format!("g must have degree below {m}")));
    }
    let alpha = prepare(spec)?;
    let approx = chosen(&alpha, opts.q, big_n as u128)?;
    let epsilon = opts.epsilon.unwrap_or(DEFAULT_EPSILON);
    let delta_exact = weyl_delta(approx.q, h, big_n, m);
    let delta = delta_exact.to_f64().unwrap_or(f64::NAN);
    let n = big_n as f64;
    let mm = (m * m - m) as f64;
    let bound_little_o = n.powf(1.0 + epsilon) * delta.powf(1.0 / mm);
    let bound_log = n * n.ln() * delta.powf(1.0 / (mm + 2.0));
    let lower = lower_reals(g)?;
    let s = sum_phases(big_n, 1 + lower.len(), |k| monomial_phase(&alpha, h, m, &lower, k))?;
    Ok(WeylBoundReport {
        m,
        h,
        a: approx.a,
        q: approx.q,
        n: big_n,
        delta_exact,
        delta,
        epsilon,
        bound_little_o,
        bound_log,
        actual: s.magnitude,
        actual_error: s.error_bound,
        ratio: s.magnitude / bound_little_o,
        ratio_log: s.magnitude / bound_log,
    })
}

/// `N (|h|/q + q/N)`.
pub fn linear_bound(q: u64, h: i64, big_n: u64) -> Result<f64> {
    if q == 0 || h == 0 || big_n == 0 {
        return Err(Error::precondition("q, h and N must be nonzero"));
    }
    let n = big_n as f64;
    Ok(n * (h.unsigned_abs() as f64 / q as f64 + q as f64 / n))
}

/// `|Σ_{n ≤ N} e(hαn)| ≤ min(N, 1/(2⟦hα⟧))` checked at every `N ≤ n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearCheck {
    pub h: i64,
    pub n_max: u64,
    /// `⟦hα⟧`
    pub distance: f64,
    /// `1/(2⟦hα⟧)`
    pub cap: f64,
    /// Smallest `bound - |S_N|` seen.
    pub min_slack: f64,
    /// Values of `N` where `|S_N|` exceeded the bound by more than the
    /// summation error.
    pub violations: Vec<u64>,
    pub error_bound: f64,
}

pub fn linear_exact_check(spec: &RealSpec, h: i64, n_max: u64) -> Result<LinearCheck> {
    if h == 0 || n_max == 0 {
        return Err(Error::precondition("h and N must be nonzero"));
    }
    let alpha = prepare(spec)?;
    let distance = alpha.dist_to_nearest(h as i128)?;
    // ⟦hα⟧ carries an absolute error below 2^-50.
    let cap = 1.0 / (2.0 * (distance - 2f64.powi(-50)).max(0.0));
    let per_term = std::f64::consts::TAU * 2f64.powi(-60) + 2f64.powi(-50);
    let mut s = ComplexSum::default();
    let mut min_slack = f64::INFINITY;
    let mut violations = Vec::new();
    for n in 1..=n_max {
        s.add_turns(monomial_phase(&alpha, h, 1, &[], n)? as i64 as f64 / 2f64.powi(64));
        let bound = (n as f64).min(cap);
        let slack = bound - s.norm();
        min_slack = min_slack.min(slack);
        if slack < -(n as f64 * per_term) {
            violations.push(n);
        }
    }
    Ok(LinearCheck {
        h,
        n_max,
        distance,
        cap,
        min_slack,
        violations,
        error_bound: n_max as f64 * per_term,
    })
}

/// Both sides of `|Σ_{n ≤ N} e(hdαn² + g(n))|² ≪ Σ_{v ≤ N} min(N, 1/⟦2hdvα⟧)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticBound {
    /// `Σ_{v ≤ N} min(N, 1/⟦2hdvα⟧)`
    pub rhs: f64,
    /// `√rhs`, the bound with implied constant 1.
    pub bound: f64,
    pub actual: f64,
    /// `actual² / rhs`
    pub ratio: f64,
}

pub fn quadratic_bound(spec: &RealSpec, h: i64, d: u64, big_n: u64, g: &Polynomial) -> Result<QuadraticBound> {
    if h == 0 || d == 0 || big_n == 0 {
        return Err(Error::precondition("h, d and N must be nonzero"));
    }
    if g.degree().is_some_and(|deg| deg >= 2) {
        return Err(Error::precondition("g must be linear"));
    }
    let alpha = prepare(spec)?;
    let hd = h
        .checked_mul(i64::try_from(d).map_err(|_| Error::precondition("d too large"))?)
        .ok_or_else(|| Error::ResourceLimit("h·d overflows".into()))?;
    let n = big_n as f64;
    let blocks: Vec<f64> = (0..big_n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut acc = 0.0;
            for v in b * BLOCK + 1..=((b + 1) * BLOCK).min(big_n) {
                let dist = alpha.dist_to_nearest(2 * hd as i128 * v as i128)?;
                acc += if dist * n <= 1.0 { n } else { 1.0 / dist };
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let rhs: f64 = blocks.iter().sum();
    let lower = lower_reals(g)?;
    let s = sum_phases(big_n, 1 + lower.len(), |k| monomial_phase(&alpha, hd, 2, &lower, k))?;
    Ok(QuadraticBound {
        rhs,
        bound: rhs.sqrt(),
        actual: s.magnitude,
        ratio: s.magnitude * s.magnitude / rhs,
    })
}

/// Both sides of `Σ_{ν ≤ K} min(N, 1/⟦να⟧) ≪ (N + q log q)(K/q + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReciprocalSum {
    pub exact_sum: f64,
    pub bound: f64,
    pub q: u128,
    /// `exact_sum / bound`
    pub ratio: f64,
}

/// `q` defaults to the largest convergent denominator up to `K`.
pub fn reciprocal_sum(spec: &RealSpec, big_k: u64, big_n: u64, q: Option<u128>) -> Result<ReciprocalSum> {
    if big_k == 0 || big_n == 0 {
        return Err(Error::precondition("K and N must be at least 1"));
    }
    let alpha = prepare(spec)?;
    let q = chosen(&alpha, q, big_k as u128)?.q;
    let n = big_n as f64;
    let blocks: Vec<f64> = (0..big_k.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut acc = 0.0;
            for v in b * BLOCK + 1..=((b + 1) * BLOCK).min(big_k) {
                let dist = alpha.dist_to_nearest(v as i128)?;
                acc += if dist * n <= 1.0 { n } else { 1.0 / dist };
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let exact_sum: f64 = blocks.iter().sum();
    let qf = q as f64;
    let bound = (n + qf * qf.ln()) * (big_k as f64 / qf + 1.0);
    Ok(ReciprocalSum {
        exact_sum,
        bound,
        q,
        ratio: exact_sum / bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneVariant {
    /// `m ↦ (u / v^{m-1})^{1/(m²-m)}`
    InverseGeometric,
    /// `m ↦ (v^m / u)^{1/(m²-m+2)}`
    Geometric,
}

/// Logarithms of the sequence for `m = 2, …, M`.
pub fn monotone_sequence(u: f64, v: f64, big_m: u32, variant: MonotoneVariant) -> Result<Vec<f64>> {
    if !(u > 0.0) || !(v >= 1.0) || big_m < 2 {
        return Err(Error::precondition("need u > 0, v ≥ 1 and M ≥ 2"));
    }
    let (a, b) = (u.ln(), v.ln());
    Ok((2..=big_m)
        .map(|m| {
            let m = m as f64;
            match variant {
                MonotoneVariant::InverseGeometric => (a - (m - 1.0) * b) / (m * m - m),
                MonotoneVariant::Geometric => (m * b - a) / (m * m - m + 2.0),
            }
        })
        .collect())
}

/// Whether the sequence is nondecreasing for `m = 2, …, M`, compared in log
/// space with a relative tolerance of `10^-12`.
pub fn monotone_check(u: f64, v: f64, big_m: u32, variant: MonotoneVariant) -> Result<bool> {
    let seq = monotone_sequence(u, v, big_m, variant)?;
    Ok(seq
        .windows(2)
        .all(|w| w[1] >= w[0] - 1e-12 * w[0].abs().max(w[1].abs()).max(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> RealSpec {
        RealSpec::sqrt(2)
    }

    #[test]
    fn delta_formula() {
        let d = weyl_delta(29, 1, 1000, 2);
        let want = BigRational::new(1.into(), 29.into())
            + BigRational::new(1.into(), 1000.into())
            + BigRational::new(29.into(), 1_000_000.into())
            + BigRational::new(1.into(), 1000.into());
        assert_eq!(d, want);
        let g = weyl_delta(29, 29, 1000, 2) - weyl_delta(29, 1, 1000, 2);
        // |h|/q grows by 28/29 and the gcd term by 28/N.
        assert_eq!(g, BigRational::new(28.into(), 29.into()) + BigRational::new(28.into(), 1000.into()));
    }

    #[test]
    fn default_denominator_is_a_convergent() {
        let r = weyl_bound_report(&sqrt2(), 2, 1, 1000, &Polynomial::new(vec![]), &Default::default()).unwrap();
        assert_eq!((r.a, r.q), (1393, 985));
        assert!(r.actual <= 1000.0);
        let r = weyl_bound_report(
            &sqrt2(),
            2,
            1,
            1000,
            &Polynomial::new(vec![]),
            &WeylBoundOptions { q: Some(29), epsilon: None },
        )
        .unwrap();
        assert_eq!(r.a, 41);
        assert!(weyl_bound_report(
            &sqrt2(),
            2,
            1,
            1000,
            &Polynomial::new(vec![]),
            &WeylBoundOptions { q: Some(30), epsilon: None },
        )
        .is_err());
    }

    #[test]
    fn linear_bound_arithmetic() {
        assert_eq!(linear_bound(5, 1, 100).unwrap(), 25.0);
        assert!(linear_bound(4, 2, 100).unwrap() >= 50.0);
    }

    #[test]
    fn linear_exact_form_holds() {
        let c = linear_exact_check(&sqrt2(), 3, 10_000).unwrap();
        assert!(c.violations.is_empty());
        assert!((c.cap - 2.0607).abs() < 1e-3);
    }

    #[test]
    fn quadratic_single_term_and_symmetry() {
        let zero = Polynomial::new(vec![]);
        let one = quadratic_bound(&sqrt2(), 1, 1, 1, &zero).unwrap();
        assert_eq!(one.rhs, 1.0);
        assert!((one.actual - 1.0).abs() < 1e-12);
        let p = quadratic_bound(&sqrt2(), 3, 2, 200, &zero).unwrap();
        let m = quadratic_bound(&sqrt2(), -3, 2, 200, &zero).unwrap();
        assert_eq!(p.rhs, m.rhs);
    }

    #[test]
    fn reciprocal_small_case() {
        let r = reciprocal_sum(&sqrt2(), 2, 10, None).unwrap();
        let s2 = 2f64.sqrt();
        let want = 1.0 / (s2 - 1.0) + 1.0 / (3.0 - 2.0 * s2);
        assert!((r.exact_sum - want).abs() < 1e-9);
        assert!(reciprocal_sum(&sqrt2(), 0, 10, None).is_err());
    }

    #[test]
    fn monotone_cases() {
        assert!(monotone_check(5.0, 1.0, 5, MonotoneVariant::Geometric).unwrap());
        assert!(!monotone_check(10.0, 1.0, 4, MonotoneVariant::InverseGeometric).unwrap());
        assert!(monotone_check(2.0, 4.0, 6, MonotoneVariant::InverseGeometric).unwrap());
    }
}

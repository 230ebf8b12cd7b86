//! Continued fractions, approximation windows and empirical type estimates.
//!
//! Partial quotients of an irrational `α` are read off the common prefix of
//! the continued-fraction expansions of both endpoints of an enclosure. The
//! set of reals sharing a prefix is an interval, so every quotient in the
//! common prefix is certified. Precision doubles until the requested
//! denominators are reached.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::realnum::{Interval, Real};

/// A convergent `a/q` with an enclosure of `⟦qα⟧ = |qα - a|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Convergent {
    pub a: i128,
    pub q: u128,
    /// Position in the continued-fraction expansion, starting at 0.
    pub index: usize,
    pub quality: Interval,
}

/// Convergents up to some bound on `q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Convergents {
    pub list: Vec<Convergent>,
    /// The expansion ended: `α` is rational and equals the last convergent.
    pub terminated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeMode {
    Polynomial,
    Exponential,
}

/// Outcome of a search for `a/q` with `lower < q ≤ Q` and `|α - a/q| < 1/(qQ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxWindow {
    pub a: i128,
    pub q: u128,
    #[serde(rename = "Q")]
    pub big_q: f64,
    pub lower: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeEstimate {
    pub tau_hat: f64,
    /// `(q_i, growth ratio to q_{i+1})` for every consecutive pair with `q_i ≥ 2`.
    pub samples: Vec<(u128, f64)>,
    pub mode: TypeMode,
}

/// One row of the convergent table export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergentRow {
    pub index: usize,
    pub a: i128,
    pub q: u128,
    pub log_ratio: Option<f64>,
    pub quality_lo: String,
    pub quality_hi: String,
}

/// Partial quotients shared by the expansions of `lo` and `hi`.
///
/// Returns the quotients and whether the expansion of `lo == hi` ended.
fn common_quotients(lo: &BigRational, hi: &BigRational, want: impl Fn(&[BigInt]) -> bool) -> (Vec<BigInt>, bool) {
    let mut x = lo.clone();
    let mut y = hi.clone();
    let mut out = Vec::new();
    loop {
        let a = x.floor();
        if a != y.floor() {
            return (out, false);
        }
        out.push(a.to_integer());
        let fx = &x - &a;
        let fy = &y - &a;
        if fx.is_zero() || fy.is_zero() {
            return (out, fx.is_zero() && fy.is_zero());
        }
        if want(&out) {
            return (out, false);
        }
        x = fx.recip();
        y = fy.recip();
    }
}

/// `(p_n, q_n)` from partial quotients, stopping once `q` exceeds `max_q`.
fn recurrence(quotients: &[BigInt], max_q: u128) -> Vec<(BigInt, BigInt)> {
    let bound = BigInt::from(max_q);
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    let mut out = Vec::new();
    for a in quotients {
        let p = a * &p0 + &p1;
        let q = a * &q0 + &q1;
        if q > bound {
            out.push((p, q));
            break;
        }
        out.push((p.clone(), q.clone()));
        (p1, q1, p0, q0) = (p0, q0, p, q);
    }
    out
}

fn quality(iv: &Interval, a: &BigInt, q: &BigInt, bits: u32) -> Interval {
    // Both endpoints of an enclosure share one exponent.
    let shift = (-iv.lo.exponent) as usize;
    let lo = q * &iv.lo.mantissa - (a << shift);
    let hi = q * &iv.hi.mantissa - (a << shift);
    let (lo, hi) = if hi.is_negative() {
        (-hi, -lo)
    } else if lo.is_negative() {
        (BigInt::zero(), hi.max(-lo))
    } else {
        (lo, hi)
    };
    Interval::from_fixed(lo, hi, shift as u32, bits)
}

fn to_i128(v: &BigInt) -> Result<i128> {
    v.to_i128()
        .ok_or_else(|| Error::ResourceLimit(format!("convergent numerator {v} exceeds i128")))
}

/// All convergents of `α` with `q ≤ max_q`, in increasing order of `q`.
///
/// When two leading convergents share `q = 1` only the closer one is kept,
/// so denominators increase strictly.
pub fn convergents(alpha: &Real, max_q: u128) -> Result<Convergents> {
    if max_q == 0 {
        return Err(Error::precondition("max_q must be positive"));
    }
    let q_bits = 128 - max_q.leading_zeros();
    let mut bits = (64 + 2 * q_bits).min(alpha.max_bits());
    loop {
        let iv = alpha.enclosure(bits)?;
        let (lo, hi) = match alpha.exact_value() {
            Some(v) => (v.clone(), v.clone()),
            None => (iv.lo.to_rational(), iv.hi.to_rational()),
        };
        let (quotients, terminated) = common_quotients(&lo, &hi, |qs| {
            recurrence(qs, max_q).last().is_some_and(|(_, q)| *q > BigInt::from(max_q))
        });
        let pairs = recurrence(&quotients, max_q);
        let reached = pairs.last().is_some_and(|(_, q)| *q > BigInt::from(max_q));
        if reached || terminated {
            // Irrational: convergent n needs quotient n+1 to fix its side of α.
            let usable = if terminated { pairs.len() } else { pairs.len().min(quotients.len() - 1) };
            let mut list: Vec<Convergent> = Vec::new();
            for (index, (p, q)) in pairs.iter().enumerate().take(usable) {
                if *q > BigInt::from(max_q) {
                    break;
                }
                let c = Convergent {
                    a: to_i128(p)?,
                    q: q.to_u128().expect("q ≤ max_q"),
                    index,
                    quality: quality(&iv, p, q, bits),
                };
                if list.last().is_some_and(|prev| prev.q == c.q) {
                    list.pop();
                }
                list.push(c);
            }
            return Ok(Convergents { list, terminated });
        }
        if bits >= alpha.max_bits() {
            return Err(Error::exhausted(bits));
        }
        bits = (bits * 2).min(alpha.max_bits());
    }
}

fn window_lower(big_q: f64, varpi: f64, mode: TypeMode) -> f64 {
    match mode {
        TypeMode::Polynomial => big_q.powf(varpi),
        TypeMode::Exponential => big_q.ln().powf(varpi + 1.0),
    }
}

/// The convergent with the largest `q ≤ Q`, and whether it clears the
/// window floor `Q^ϖ` (polynomial) or `(ln Q)^{ϖ+1}` (exponential).
///
/// Unsatisfied windows are returned, not reported as errors.
pub fn find_window(alpha: &Real, big_q: f64, varpi: f64, mode: TypeMode) -> Result<ApproxWindow> {
    if !(big_q >= 2.0) || !big_q.is_finite() {
        return Err(Error::precondition("Q must be at least 2"));
    }
    match mode {
        TypeMode::Polynomial if !(varpi > 0.0 && varpi < 1.0) => {
            return Err(Error::precondition("varpi must lie in (0, 1) in polynomial mode"))
        }
        TypeMode::Exponential if !(varpi > 0.0) => {
            return Err(Error::precondition("varpi must be positive"))
        }
        _ => {}
    }
    let cap = big_q.floor().min(u128::MAX as f64) as u128;
    let list = convergents(alpha, cap)?.list;
    let best = list
        .last()
        .ok_or_else(|| Error::NoConvergent(format!("no convergent with q ≤ {big_q}")))?;
    let lower = window_lower(big_q, varpi, mode);
    // |qα - a| < 1/Q, decided on the certified upper end of ⟦qα⟧.
    let q_exact = BigRational::from_float(big_q).expect("finite");
    let close = best.quality.hi.to_rational() * q_exact < BigRational::one();
    Ok(ApproxWindow {
        a: best.a,
        q: best.q,
        big_q,
        lower,
        satisfied: close && (best.q as f64) > lower,
    })
}

/// Growth of consecutive convergent denominators as a finite proxy for
/// the type (polynomial) or exponential type of `α`.
///
/// `tau_hat` is the largest ratio among pairs whose smaller denominator is
/// at least `√max_q`, so the value tracks the large-`q` behaviour rather
/// than the first few quotients. Every ratio is kept in `samples`.
pub fn estimate_type(alpha: &Real, max_q: u128, mode: TypeMode) -> Result<TypeEstimate> {
    let list = convergents(alpha, max_q)?.list;
    if list.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} convergents below {max_q}, need 3",
            list.len()
        )));
    }
    let samples: Vec<(u128, f64)> = list
        .windows(2)
        .filter(|w| w[0].q >= 2)
        .map(|w| {
            let (a, b) = (w[0].q as f64, w[1].q as f64);
            let r = match mode {
                TypeMode::Polynomial => b.ln() / a.ln(),
                TypeMode::Exponential => b.ln().ln() / a.ln(),
            };
            (w[0].q, r)
        })
        .collect();
    let tail_from = (max_q as f64).sqrt();
    let tail = samples.iter().filter(|(q, _)| *q as f64 >= tail_from);
    let tau_hat = tail
        .map(|s| s.1)
        .reduce(f64::max)
        .or_else(|| samples.last().map(|s| s.1))
        .ok_or_else(|| Error::InsufficientData("no denominator pair with q ≥ 2".into()))?;
    Ok(TypeEstimate {
        tau_hat,
        samples,
        mode,
    })
}

/// Rows for the `index,a,q,log_ratio,quality_lo,quality_hi` table.
pub fn convergent_rows(list: &[Convergent]) -> Vec<ConvergentRow> {
    list.iter()
        .enumerate()
        .map(|(i, c)| ConvergentRow {
            index: c.index,
            a: c.a,
            q: c.q,
            log_ratio: list
                .get(i + 1)
                .filter(|_| c.q >= 2)
                .map(|n| (n.q as f64).ln() / (c.q as f64).ln()),
            quality_lo: c.quality.lo.to_decimal(30, false),
            quality_hi: c.quality.hi.to_decimal(30, true),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realnum::RealSpec;

    fn real(s: &str) -> Real {
        Real::new(s.parse().unwrap()).unwrap()
    }

    fn fractions(c: &Convergents) -> Vec<(i128, u128)> {
        c.list.iter().map(|c| (c.a, c.q)).collect()
    }

    #[test]
    fn sqrt2_convergents() {
        let c = convergents(&Real::new(RealSpec::sqrt(2)).unwrap(), 30).unwrap();
        assert_eq!(fractions(&c), vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]);
        assert!(!c.terminated);
    }

    #[test]
    fn golden_denominators_are_fibonacci() {
        let c = convergents(&Real::new(RealSpec::golden_ratio()).unwrap(), 15).unwrap();
        let qs: Vec<u128> = c.list.iter().map(|c| c.q).collect();
        assert_eq!(qs, vec![1, 2, 3, 5, 8, 13]);
    }

    #[test]
    fn rational_expansion_terminates() {
        let c = convergents(&real("rat:22/7"), 100).unwrap();
        assert_eq!(fractions(&c), vec![(3, 1), (22, 7)]);
        assert!(c.terminated);
    }

    #[test]
    fn window_examples() {
        let s2 = Real::new(RealSpec::sqrt(2)).unwrap();
        let w = find_window(&s2, 12.0, 0.5, TypeMode::Polynomial).unwrap();
        assert_eq!((w.a, w.q), (17, 12));
        assert!((w.lower - 12f64.sqrt()).abs() < 1e-12);
        assert!(w.satisfied);
        let w = find_window(&s2, 12.0, 0.99, TypeMode::Polynomial).unwrap();
        assert_eq!(w.q, 12);
        assert!(w.satisfied);
        let phi = Real::new(RealSpec::golden_ratio()).unwrap();
        let w = find_window(&phi, 13.0, 0.5, TypeMode::Polynomial).unwrap();
        assert_eq!(w.q, 13);
        assert!(w.satisfied);
    }

    #[test]
    fn window_rejects_small_q() {
        let s2 = Real::new(RealSpec::sqrt(2)).unwrap();
        assert!(find_window(&s2, 1.5, 0.5, TypeMode::Polynomial).is_err());
    }

    #[test]
    fn type_of_quadratic_irrationals_is_near_one() {
        for spec in [RealSpec::sqrt(2), RealSpec::golden_ratio()] {
            let t = estimate_type(&Real::new(spec).unwrap(), 10u128.pow(12), TypeMode::Polynomial).unwrap();
            assert!(t.tau_hat >= 1.0 && t.tau_hat < 1.1, "{}", t.tau_hat);
        }
    }

    #[test]
    fn csv_rows_carry_ratios() {
        let c = convergents(&Real::new(RealSpec::sqrt(2)).unwrap(), 30).unwrap();
        let rows = convergent_rows(&c.list);
        assert_eq!(rows[0].log_ratio, None);
        assert!((rows[1].log_ratio.unwrap() - 5f64.ln() / 2f64.ln()).abs() < 1e-12);
        assert_eq!(rows.last().unwrap().log_ratio, None);
    }
}

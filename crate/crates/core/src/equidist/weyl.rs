use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::discrepancy::ComplexSum;
use crate::counting::ProblemSpec;
use crate::error::{Error, Result};
use crate::realnum::{LinearForm, Real};

/// Terms per block of a parallel exponential sum. Fixed so the reduction
/// order never depends on the thread count.
const BLOCK: u64 = 4096;

/// A computed exponential sum `Σ_{n ≤ N} e(φ(n))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylSum {
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    /// Bound on `|computed - true|`.
    pub error_bound: f64,
    #[serde(rename = "N")]
    pub n: u64,
}

/// Phase in turns, taken from `[-1/2, 1/2)`.
fn turns(phase: u64) -> f64 {
    phase as i64 as f64 / 2f64.powi(64)
}

/// Sums `e(phase(n) / 2^64)` over `n = 1, …, N`.
///
/// Each phase is within `k·2^-60` of the truth, so a term is off by at most
/// `2πk·2^-60` before rounding; `sin_cos` and compensated summation add less
/// than `2^-50` per term.
pub(crate) fn sum_phases<F>(big_n: u64, k: usize, phase: F) -> Result<WeylSum>
where
    F: Fn(u64) -> Result<u64> + Sync,
{
    let blocks: Vec<ComplexSum> = (0..big_n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut s = ComplexSum::default();
            for n in b * BLOCK + 1..=((b + 1) * BLOCK).min(big_n) {
                s.add_turns(turns(phase(n)?));
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let mut total = ComplexSum::default();
    for b in &blocks {
        let (re, im) = b.value();
        total.add(re, im);
    }
    let (re, im) = total.value();
    let per_term = std::f64::consts::TAU * k as f64 * 2f64.powi(-60) + 2f64.powi(-50);
    Ok(WeylSum {
        re,
        im,
        magnitude: re.hypot(im),
        error_bound: big_n as f64 * per_term,
        n: big_n,
    })
}

/// `Σ_{n ≤ N} e(Σ_j h_j (α_j d^{m_j-1} n^{m_j} + g_j(dn)/d))`.
pub fn weyl_sum(problem: &ProblemSpec, d: u64, hvec: &[i64], big_n: u64) -> Result<WeylSum> {
    if d == 0 {
        return Err(Error::precondition("d must be at least 1"));
    }
    if hvec.len() != problem.k() {
        return Err(Error::precondition(format!(
            "frequency vector has {} entries for k = {}",
            hvec.len(),
            problem.k()
        )));
    }
    if hvec.iter().all(|&h| h == 0) {
        return Err(Error::precondition("frequency vector must be nonzero"));
    }
    problem.check_scale(d.saturating_mul(big_n))?;
    sum_phases(big_n, problem.k(), |n| {
        let mut p = 0u64;
        for (j, &h) in hvec.iter().enumerate() {
            p = p.wrapping_add(problem.phase_u64(j, d, n, h)?);
        }
        Ok(p)
    })
}

/// Fraction of `c·α·n^m + g(n)` as 64-bit fixed point.
pub(crate) fn monomial_phase(alpha: &Real, c: i64, m: u32, g: &[Real], n: u64) -> Result<u64> {
    let nm = crate::counting::pow_u128(n, m)?;
    if g.is_empty() {
        let s = nm
            .checked_mul(c.unsigned_abs() as u128)
            .ok_or_else(|| Error::ResourceLimit(format!("{c}·{n}^{m} exceeds 128 bits")))?;
        let f = alpha.frac_u64(s)?;
        return Ok(if c < 0 { f.wrapping_neg() } else { f });
    }
    let mut form = LinearForm::new(alpha.max_bits());
    form.push(alpha, BigRational::from_integer(BigInt::from(nm) * c));
    let mut power = BigInt::from(1);
    for r in g {
        form.push(r, BigRational::from_integer(power.clone()));
        power *= n;
    }
    form.frac_u64()
}

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::realnum::Interval;

/// `B_0, B_2, …, B_{2p}` as exact rationals (Akiyama–Tanigawa).
fn even_bernoulli(p: usize) -> Vec<BigRational> {
    let n = 2 * p;
    let mut a: Vec<BigRational> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(p + 1);
    for m in 0..=n {
        a.push(BigRational::new(BigInt::one(), BigInt::from(m + 1)));
        for j in (1..=m).rev() {
            a[j - 1] = BigRational::from_integer(BigInt::from(j)) * (&a[j - 1] - &a[j]);
        }
        if m % 2 == 0 {
            out.push(a[0].clone());
        }
    }
    out
}

fn rat(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// An enclosure of `ζ(s)` of width at most `2^(1-bits)`.
///
/// Sums `n^{-s}` for `n < N` and closes the tail with Euler–Maclaurin to
/// order `2p`. The remainder is bounded by the first omitted correction,
/// `|B_{2p}|/(2p)! · s(s+1)…(s+2p-2) · N^{1-s-2p}`, which is rigorous
/// because every derivative of `t^{-s}` has constant sign.
pub fn zeta_int(s: u32, bits: u32) -> Result<Interval> {
    if s < 2 {
        return Err(Error::precondition("zeta_int needs s ≥ 2"));
    }
    if !(8..=4096).contains(&bits) {
        return Err(Error::precondition("bits must lie in 8..=4096"));
    }
    let big_n = (bits as u64) / 4 + 10;
    let tol = BigRational::new(BigInt::one(), BigInt::one() << (bits as usize + 2));
    let nn = rat(big_n);
    let n_pow_s = nn.pow(s as i32);

    let mut sum = BigRational::zero();
    for n in 1..big_n {
        sum += rat(n).pow(s as i32).recip();
    }
    // ∫_N^∞ t^{-s} dt + f(N)/2
    sum += (&n_pow_s / &nn * rat(s as u64 - 1)).recip();
    sum += (rat(2) * &n_pow_s).recip();

    let max_p = 4 * big_n as usize;
    let mut bern = even_bernoulli(16);
    let mut factorial = BigRational::one(); // (2k)!
    let mut rising = rat(s as u64); // s(s+1)…(s+2k-2)
    let mut n_pow = &n_pow_s * &nn; // N^{s+2k-1}
    let mut remainder = None;
    for k in 1..=max_p {
        if k >= bern.len() {
            bern = even_bernoulli(2 * k);
        }
        factorial *= rat((2 * k - 1) as u64) * rat((2 * k) as u64);
        if k > 1 {
            rising *= rat(s as u64 + 2 * k as u64 - 3) * rat(s as u64 + 2 * k as u64 - 2);
        }
        let term = &bern[k] / &factorial * &rising / &n_pow;
        if term.abs() < tol {
            remainder = Some(term.abs());
            break;
        }
        sum += term;
        n_pow *= &nn * &nn;
    }
    let r = remainder.ok_or_else(|| Error::ResourceLimit(format!("ζ({s}) to {bits} bits")))?;
    let shift = bits as usize + 2;
    let scale = BigRational::from_integer(BigInt::one() << shift);
    let lo = ((&sum - &r) * &scale).floor().to_integer();
    let hi = ((&sum + &r) * &scale).ceil().to_integer();
    Ok(Interval::from_fixed(lo, hi, bits + 2, bits))
}

/// An enclosure of `1/ζ(s)`.
pub fn inverse_zeta(s: u32, bits: u32) -> Result<Interval> {
    zeta_int(s, bits)?
        .recip(bits + 2)
        .ok_or_else(|| Error::precondition("ζ enclosure contains zero"))
}

/// `π` to 60 decimals, for checks against closed forms.
#[cfg(test)]
pub(crate) const PI_60: &str = "3.141592653589793238462643383279502884197169399375105820974944";

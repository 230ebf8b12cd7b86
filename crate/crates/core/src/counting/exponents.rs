use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Error exponent guaranteed under a type-exponent hypothesis, or the
/// regime where that hypothesis gives nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exponent {
    Value(BigRational),
    Undefined,
}

impl Exponent {
    pub fn value(&self) -> Option<&BigRational> {
        match self {
            Exponent::Value(v) => Some(v),
            Exponent::Undefined => None,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.value().and_then(|v| v.to_f64())
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Value(v) => write!(f, "{v}"),
            Exponent::Undefined => f.write_str("undefined"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn top_exponent(ms: &[u32]) -> Result<u64> {
    if ms.first() != Some(&1) || ms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpec(
            "exponents must be 1 = m_1 < m_2 < … < m_k".into(),
        ));
    }
    Ok(*ms.last().expect("nonempty") as u64)
}

/// Exponent `γ` for coefficients of type at most `τ`:
/// `1/(3τ+2)` when `k = 1`, otherwise `⅛·min{1/(m_k τ), 1/(m_k² - m_k)}`.
pub fn theoretical_gamma(ms: &[u32], tau: &BigRational) -> Result<BigRational> {
    let mk = top_exponent(ms)?;
    if *tau < BigRational::one() {
        return Err(Error::precondition("τ must be at least 1"));
    }
    if ms.len() == 1 {
        return Ok((int(3) * tau + int(2)).recip());
    }
    let a = (int(mk) * tau).recip();
    let b = int(mk * mk - mk).recip();
    Ok(a.min(b) / int(8))
}

/// Exponent `γ★` for coefficients of exponential type at most `τ★`:
/// `min{1/τ★, (1/τ★ + 1)/2}` when `k = 1`, otherwise
/// `(1 - (m_k² - m_k + 1)τ★)/((m_k² + 2)τ★)`, undefined once
/// `τ★ ≥ 1/(m_k² - m_k + 1)`.
pub fn theoretical_gamma_star(ms: &[u32], tau_star: &BigRational) -> Result<Exponent> {
    let mk = top_exponent(ms)?;
    if !tau_star.is_positive() {
        return Err(Error::precondition("τ★ must be positive"));
    }
    let inv = tau_star.recip();
    if ms.len() == 1 {
        let half = (&inv + BigRational::one()) / int(2);
        return Ok(Exponent::Value(inv.min(half)));
    }
    let c = int(mk * mk - mk + 1);
    let num = BigRational::one() - &c * tau_star;
    if num <= BigRational::zero() {
        return Ok(Exponent::Undefined);
    }
    Ok(Exponent::Value(num / (int(mk * mk + 2) * tau_star)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn gamma_values() {
        assert_eq!(theoretical_gamma(&[1], &r(1, 1)).unwrap(), r(1, 5));
        assert_eq!(theoretical_gamma(&[1, 2], &r(1, 1)).unwrap(), r(1, 16));
        assert_eq!(theoretical_gamma(&[1, 3], &r(2, 1)).unwrap(), r(1, 48));
        assert!(theoretical_gamma(&[1], &r(1, 2)).is_err());
    }

    #[test]
    fn gamma_star_values() {
        assert_eq!(theoretical_gamma_star(&[1], &r(1, 1)).unwrap(), Exponent::Value(r(1, 1)));
        assert_eq!(theoretical_gamma_star(&[1, 2], &r(1, 5)).unwrap(), Exponent::Value(r(1, 3)));
        assert_eq!(theoretical_gamma_star(&[1, 2], &r(1, 2)).unwrap(), Exponent::Undefined);
        // The boundary itself is undefined.
        assert_eq!(theoretical_gamma_star(&[1, 2], &r(1, 3)).unwrap(), Exponent::Undefined);
    }
}

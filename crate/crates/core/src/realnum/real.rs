use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::interval::Interval;
use super::source::Source;
use super::spec::RealSpec;
use crate::error::{Error, Result};

/// Default ceiling for adaptive precision.
pub const DEFAULT_MAX_BITS: u32 = 1 << 20;

/// Fractional bits of the cached enclosure used by the fast path.
const FAST_BITS: u32 = 128;

/// Absolute accuracy promised by [`Real::floor_frac`].
pub const FRAC_ACCURACY: f64 = 1.0 / (1u64 << 50) as f64;

/// `int + frac·2^-128`
#[derive(Debug, Clone, Copy)]
struct Fixed128 {
    int: i128,
    frac: u128,
}

impl Fixed128 {
    fn from_big(v: &BigInt) -> Option<Self> {
        let int = v >> FAST_BITS as usize;
        let frac = (v - (&int << FAST_BITS as usize)).to_u128()?;
        Some(Fixed128 {
            int: int.to_i128()?,
            frac,
        })
    }

    fn to_big(self) -> BigInt {
        (BigInt::from(self.int) << FAST_BITS as usize) + BigInt::from(self.frac)
    }

    /// `floor(self·s)` and the fractional bits of `self·s`.
    #[inline]
    fn scaled(self, s: u128) -> Option<(i128, u128)> {
        let si = i128::try_from(s).ok()?;
        let (hi, lo) = mul_wide(self.frac, s);
        let ip = self.int.checked_mul(si)?.checked_add(hi as i128)?;
        Some((ip, lo))
    }
}

/// Full 256-bit product of two `u128`s as `(high, low)`.
#[inline]
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const M: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & M);
    let (b1, b0) = (b >> 64, b & M);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & M) + (p10 & M);
    let lo = (p00 & M) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

#[inline]
fn frac_to_f64(bits: u128) -> f64 {
    bits as f64 / 2f64.powi(128)
}

/// An integer floor together with the enclosure proving it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifiedFloor {
    #[serde(serialize_with = "crate::util::ser_display")]
    pub value: BigInt,
    /// Encloses `α·scale`; both endpoints floor to `value`.
    pub certificate: Interval,
    pub scale: u128,
    pub bits_used: u32,
}

/// A real number prepared for repeated certified evaluation.
///
/// Construction validates the spec and caches a 128-bit enclosure, so the
/// common case of `⌊α·s⌋` for `s < 2^100` costs two wide multiplications.
#[derive(Debug, Clone)]
pub struct Real {
    spec: RealSpec,
    source: Source,
    fast: Option<(Fixed128, Fixed128)>,
    max_bits: u32,
}

impl Real {
    pub fn new(spec: RealSpec) -> Result<Real> {
        let source = Source::from_spec(&spec)?;
        let fast = if source.exact().is_some() {
            None
        } else {
            let f = source.enclose(FAST_BITS);
            Fixed128::from_big(&f.lo).zip(Fixed128::from_big(&f.hi))
        };
        Ok(Real {
            spec,
            source,
            fast,
            max_bits: DEFAULT_MAX_BITS,
        })
    }

    pub fn with_max_bits(mut self, max_bits: u32) -> Self {
        self.max_bits = max_bits.max(8);
        self
    }

    pub fn spec(&self) -> &RealSpec {
        &self.spec
    }

    pub fn max_bits(&self) -> u32 {
        self.max_bits
    }

    pub fn is_rational(&self) -> bool {
        self.source.exact().is_some()
    }

    pub fn exact_value(&self) -> Option<&BigRational> {
        self.source.exact()
    }

    /// An interval containing the value, of width at most
    /// `2^(1-bits)·max(1, |value|)`. Widths never grow as `bits` grows.
    pub fn enclosure(&self, bits: u32) -> Result<Interval> {
        if bits < 8 {
            return Err(Error::precondition("enclosure needs at least 8 bits"));
        }
        if bits > self.max_bits {
            return Err(Error::exhausted(bits));
        }
        let g = bits + 2;
        let mut p = g + 8;
        loop {
            let f = self.source.enclose(p);
            let tight = (&f.hi - &f.lo) <= (BigInt::one() << (p - g) as usize);
            if tight || f.saturated || p > 4 * g {
                // Snap outward onto the 2^-g grid.
                let k = (p - g) as usize;
                let lo = &f.lo >> k;
                let hi = -((-&f.hi) >> k);
                let iv = Interval::from_fixed(lo, hi, g, bits);
                if !iv.meets_precision(bits) {
                    return Err(Error::exhausted(bits));
                }
                return Ok(iv);
            }
            p += 16;
        }
    }

    fn fast_floor(&self, s: u128) -> Option<(i128, u128, u128)> {
        let (lo, hi) = self.fast?;
        let (a, fa) = lo.scaled(s)?;
        let (b, fb) = hi.scaled(s)?;
        (a == b).then_some((a, fa, fb))
    }

    /// `⌊α·scale⌋`, certified. This is the hot path of every count.
    #[inline]
    pub fn floor_value(&self, scale: u128) -> Result<i128> {
        if let Some((v, _, _)) = self.fast_floor(scale) {
            return Ok(v);
        }
        let (v, _) = self.single(scale).floor()?;
        v.to_i128()
            .ok_or_else(|| Error::ResourceLimit(format!("floor at scale {scale} exceeds i128")))
    }

    /// `⌊α·scale⌋` with its certificate.
    pub fn floor_scaled(&self, scale: u128) -> Result<CertifiedFloor> {
        if scale == 0 {
            return Err(Error::precondition("scale must be positive"));
        }
        if let (Some((v, _, _)), Some((lo, hi))) = (self.fast_floor(scale), self.fast) {
            let s = BigInt::from(scale);
            return Ok(CertifiedFloor {
                value: v.into(),
                certificate: Interval::from_fixed(
                    lo.to_big() * &s,
                    hi.to_big() * &s,
                    FAST_BITS,
                    FAST_BITS,
                ),
                scale,
                bits_used: FAST_BITS,
            });
        }
        let (value, certificate) = self.single(scale).floor()?;
        Ok(CertifiedFloor {
            value,
            bits_used: certificate.precision_bits,
            certificate,
            scale,
        })
    }

    /// `⌊α·scale⌋` and `{α·scale}`, the latter within [`FRAC_ACCURACY`].
    pub fn floor_frac(&self, scale: u128) -> Result<(i128, f64)> {
        if let Some((v, fa, fb)) = self.fast_floor(scale) {
            if frac_to_f64(fb - fa) <= FRAC_ACCURACY / 2.0 {
                return Ok((v, frac_to_f64(fa / 2 + fb / 2)));
            }
        }
        let (v, f) = self.single(scale).floor_frac()?;
        let v = v
            .to_i128()
            .ok_or_else(|| Error::ResourceLimit(format!("floor at scale {scale} exceeds i128")))?;
        Ok((v, f))
    }

    /// Whether `{α·scale} < num/den`, strictly.
    pub fn frac_below(&self, scale: u128, num: u64, den: u64) -> Result<bool> {
        if den == 0 || num == 0 || num > den {
            return Err(Error::precondition("threshold must lie in (0, 1]"));
        }
        if let Some((_, fa, fb)) = self.fast_floor(scale) {
            // Compare frac·2^128·den against num·2^128 on the high word.
            if mul_wide(fb, den as u128).0 < num as u128 {
                return Ok(true);
            }
            if mul_wide(fa, den as u128).0 >= num as u128 {
                return Ok(false);
            }
        }
        let t = BigRational::new(num.into(), den.into());
        self.single(scale).frac_below(&t)
    }

    /// `⟦α·scale⟧`, the distance to the nearest integer, within [`FRAC_ACCURACY`].
    /// Exactly zero only when `α·scale` is an integer.
    pub fn dist_to_nearest(&self, scale: i128) -> Result<f64> {
        let s = scale.unsigned_abs();
        if let Some(v) = self.exact_value() {
            let x = v * BigRational::from_integer(s.into());
            let f = &x - x.floor();
            let d = if f > BigRational::new(1.into(), 2.into()) {
                BigRational::one() - f
            } else {
                f
            };
            return Ok(d.to_f64().unwrap_or(0.0));
        }
        let (_, f) = self.floor_frac(s)?;
        Ok(f.min(1.0 - f))
    }

    /// `{α·scale}` as a 64-bit fixed-point fraction, within `2^-60`.
    pub fn frac_u64(&self, scale: u128) -> Result<u64> {
        if let Some((_, fa, fb)) = self.fast_floor(scale) {
            if fb - fa <= 1u128 << 66 {
                return Ok((fa >> 64) as u64);
            }
        }
        self.single(scale).frac_u64()
    }

    fn single(&self, scale: u128) -> LinearForm<'_> {
        let mut form = LinearForm::new(self.max_bits);
        form.push(self, BigRational::from_integer(scale.into()));
        form
    }
}

/// `Σ α_i · scale_i` over prepared reals with rational scales.
///
/// Rational reals are summed exactly; irrational ones are enclosed at a
/// common precision that doubles until the requested decision is certain.
#[derive(Debug, Clone)]
pub struct LinearForm<'a> {
    terms: Vec<(&'a Real, BigRational)>,
    max_bits: u32,
}

struct FormEnclosure {
    lo: BigRational,
    hi: BigRational,
    exact: bool,
    saturated: bool,
}

impl<'a> LinearForm<'a> {
    pub fn new(max_bits: u32) -> Self {
        LinearForm {
            terms: Vec::new(),
            max_bits,
        }
    }

    pub fn push(&mut self, real: &'a Real, scale: BigRational) {
        if !scale.is_zero() {
            self.max_bits = self.max_bits.min(real.max_bits);
            self.terms.push((real, scale));
        }
    }

    fn enclose(&self, p: u32) -> FormEnclosure {
        let mut exact = BigRational::zero();
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        let mut any_irrational = false;
        let mut saturated = false;
        for (real, scale) in &self.terms {
            if let Some(v) = real.source.exact() {
                exact += v * scale;
                continue;
            }
            any_irrational = true;
            let (u, v) = (scale.numer(), scale.denom());
            let extra = u.bits() as u32 + 2;
            let f = real.source.enclose(p + extra);
            saturated |= f.saturated;
            let (a, b) = if u.is_negative() {
                (&f.hi * u, &f.lo * u)
            } else {
                (&f.lo * u, &f.hi * u)
            };
            let d = v << extra as usize;
            lo += a.div_floor(&d);
            hi += -((-b).div_floor(&d));
        }
        let ulp = BigRational::new(BigInt::one(), BigInt::one() << p as usize);
        FormEnclosure {
            lo: &exact + BigRational::from_integer(lo) * &ulp,
            hi: &exact + BigRational::from_integer(hi) * &ulp,
            exact: !any_irrational,
            saturated,
        }
    }

    fn start_bits(&self) -> u32 {
        let scale_bits = self
            .terms
            .iter()
            .map(|(_, s)| s.numer().bits() as u32)
            .max()
            .unwrap_or(0);
        (64 + scale_bits).min(self.max_bits)
    }

    /// Runs `decide` on enclosures of doubling precision until it answers.
    fn refine<T>(&self, mut decide: impl FnMut(&FormEnclosure, u32) -> Option<T>) -> Result<T> {
        let mut p = self.start_bits();
        loop {
            let e = self.enclose(p);
            if let Some(t) = decide(&e, p) {
                return Ok(t);
            }
            if e.saturated || p >= self.max_bits {
                return Err(Error::exhausted(p));
            }
            p = (p * 2).min(self.max_bits);
        }
    }

    /// Certified floor and a dyadic certificate whose endpoints both floor to it.
    pub fn floor(&self) -> Result<(BigInt, Interval)> {
        self.refine(|e, p| {
            let f = e.lo.floor();
            if f != e.hi.floor() {
                return None;
            }
            let scale = BigRational::from_integer(BigInt::one() << p as usize);
            let lo = (&e.lo * &scale).floor().to_integer();
            let hi = (&e.hi * &scale).ceil().to_integer();
            let cert = Interval::from_fixed(lo, hi, p, p);
            let f = f.to_integer();
            (cert.lo.floor() == f && cert.hi.floor() == f).then_some((f, cert))
        })
    }

    /// Whether the fractional part is strictly below `t`.
    pub fn frac_below(&self, t: &BigRational) -> Result<bool> {
        self.refine(|e, _| {
            let f = e.lo.floor();
            if e.exact {
                return Some(&e.lo - &f < *t);
            }
            if f != e.hi.floor() {
                return None;
            }
            if &e.hi - &f < *t {
                Some(true)
            } else if &e.lo - &f >= *t {
                Some(false)
            } else {
                None
            }
        })
    }

    /// The fractional part as a 64-bit fixed-point fraction, within `2^-60`.
    pub fn frac_u64(&self) -> Result<u64> {
        let tol = BigRational::new(BigInt::one(), BigInt::one() << 62usize);
        let unit = BigRational::from_integer(BigInt::one() << 64usize);
        self.refine(|e, _| {
            let f = e.lo.floor();
            if !e.exact && (f != e.hi.floor() || &e.hi - &e.lo > tol) {
                return None;
            }
            ((&e.lo - &f) * &unit).floor().to_integer().to_u64()
        })
    }

    /// Floor and fractional part, the latter within [`FRAC_ACCURACY`].
    pub fn floor_frac(&self) -> Result<(BigInt, f64)> {
        let tol = BigRational::new(BigInt::one(), BigInt::one() << 51usize);
        self.refine(|e, _| {
            let f = e.lo.floor();
            if !e.exact && (f != e.hi.floor() || &e.hi - &e.lo > tol) {
                return None;
            }
            let mid = (&e.lo + &e.hi) / BigRational::from_integer(2.into()) - &f;
            Some((f.to_integer(), mid.to_f64().unwrap_or(0.0)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> Real {
        Real::new(RealSpec::sqrt(2)).unwrap()
    }

    #[test]
    fn mul_wide_matches_bigint() {
        let a = 0xDEAD_BEEF_0123_4567_89AB_CDEF_FEDC_BA98u128;
        let b = 0x1234_5678_9ABC_DEF0_0FED_CBA9_8765_4321u128;
        let (hi, lo) = mul_wide(a, b);
        let full = BigInt::from(a) * BigInt::from(b);
        assert_eq!((BigInt::from(hi) << 128usize) + BigInt::from(lo), full);
    }

    #[test]
    fn fast_and_slow_paths_agree() {
        let r = sqrt2();
        for s in [1u128, 10, 1_000_000, 123_456_789_012_345, 10u128.pow(20)] {
            let fast = r.floor_value(s).unwrap();
            let (slow, _) = r.single(s).floor().unwrap();
            assert_eq!(BigInt::from(fast), slow, "scale {s}");
        }
    }

    #[test]
    fn rational_floor_is_exact() {
        let r = Real::new(RealSpec::rational(7, 2)).unwrap();
        assert_eq!(r.floor_value(3).unwrap(), 10);
        assert_eq!(r.floor_value(2).unwrap(), 7);
        let third = Real::new(RealSpec::rational(1, 3)).unwrap();
        assert_eq!(third.floor_scaled(3).unwrap().value, BigInt::from(1));
        assert_eq!(third.floor_scaled(2).unwrap().value, BigInt::from(0));
    }

    #[test]
    fn decimal_ambiguity_is_an_error() {
        let r = Real::new("dec:1.41421356237:11".parse().unwrap()).unwrap();
        assert_eq!(r.floor_value(1000).unwrap(), 1414);
        // At 10^12 the literal cannot decide the floor.
        assert!(matches!(
            r.floor_value(10u128.pow(12)),
            Err(Error::PrecisionExhausted { .. })
        ));
    }

    #[test]
    fn rational_threshold_is_strict() {
        // {1/4 · 2} = 1/2, not below 1/2.
        let r = Real::new(RealSpec::rational(1, 4)).unwrap();
        assert!(!r.frac_below(2, 1, 2).unwrap());
        assert!(r.frac_below(2, 3, 4).unwrap());
    }

    #[test]
    fn max_bits_caps_escalation() {
        // 1 - 2^-300 style closeness: Liouville with a term far below the ceiling.
        let spec: RealSpec = "liouville:base=2,rule=poly,tau=2,c1=3,depth=4".parse().unwrap();
        let r = Real::new(spec).unwrap().with_max_bits(64);
        // α·2^9 = 64 + 2^-72-ish: needs more than 64 bits to see the tail sign,
        // but the floor is still decidable because the tail is positive.
        assert_eq!(r.floor_value(1 << 9).unwrap(), 65);
    }
}

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// `mantissa · 2^exponent`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    pub mantissa: BigInt,
    pub exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        Dyadic { mantissa, exponent }
    }

    pub fn from_int(v: BigInt) -> Self {
        Dyadic::new(v, 0)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as usize)
        } else {
            BigRational::new(
                self.mantissa.clone(),
                BigInt::one() << (-self.exponent) as usize,
            )
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.exponent >= 0 {
            &self.mantissa << self.exponent as usize
        } else {
            // Arithmetic right shift on BigInt rounds toward -inf.
            &self.mantissa >> (-self.exponent) as usize
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Keep the top 64 bits so huge mantissas do not overflow the conversion.
        let bits = self.mantissa.bits() as i64;
        let drop = (bits - 64).max(0);
        let m = (&self.mantissa >> drop as usize).to_f64().unwrap_or(f64::NAN);
        m * 2f64.powi((self.exponent + drop) as i32)
    }

    /// Decimal expansion with `digits` fractional digits, rounded down
    /// (`up == false`) or up.
    pub fn to_decimal(&self, digits: u32, up: bool) -> String {
        rational_to_decimal(&self.to_rational(), digits, up)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as usize;
        let b = &other.mantissa << (other.exponent - e) as usize;
        a.cmp(&b)
    }
}

/// Directed-rounding decimal rendering of an exact rational.
pub fn rational_to_decimal(v: &BigRational, digits: u32, up: bool) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = v * BigRational::from_integer(scale.clone());
    let m = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    let neg = m.is_negative();
    let (ip, fp) = m.abs().div_rem(&scale);
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{:0>width$}", fp.to_string(), width = digits as usize)
    }
}

/// A closed interval with dyadic endpoints known to contain some real.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
    pub precision_bits: u32,
}

impl Interval {
    /// `[lo·2^-shift, hi·2^-shift]`
    pub fn from_fixed(lo: BigInt, hi: BigInt, shift: u32, precision_bits: u32) -> Self {
        debug_assert!(lo <= hi);
        Interval {
            lo: Dyadic::new(lo, -(shift as i64)),
            hi: Dyadic::new(hi, -(shift as i64)),
            precision_bits,
        }
    }

    pub fn width(&self) -> BigRational {
        self.hi.to_rational() - self.lo.to_rational()
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo.to_rational() <= v && v <= &self.hi.to_rational()
    }

    pub fn midpoint_f64(&self) -> f64 {
        (self.lo.to_rational() + self.hi.to_rational()).to_f64().unwrap_or(f64::NAN) / 2.0
    }

    /// Whether `hi - lo ≤ 2^(1-bits)·max(1, |lo|)`.
    pub fn meets_precision(&self, bits: u32) -> bool {
        let lo = self.lo.to_rational();
        let mag = if lo.abs() > BigRational::one() { lo.abs() } else { BigRational::one() };
        let tol = mag / BigRational::from_integer(BigInt::one() << (bits as usize - 1));
        self.width() <= tol
    }

    /// Intersection of two enclosures of the same real.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo <= hi).then(|| Interval {
            lo,
            hi,
            precision_bits: self.precision_bits.max(other.precision_bits),
        })
    }

    /// Enclosure of `1/v` for an interval not containing zero, rounded
    /// outward to `bits` fractional bits.
    pub fn recip(&self, bits: u32) -> Option<Interval> {
        let lo = self.lo.to_rational();
        let hi = self.hi.to_rational();
        if lo.is_zero() || hi.is_zero() || lo.is_negative() != hi.is_negative() {
            return None;
        }
        let scale = BigRational::from_integer(BigInt::one() << bits as usize);
        let new_lo = (hi.recip() * &scale).floor().to_integer();
        let new_hi = (lo.recip() * &scale).ceil().to_integer();
        Some(Interval::from_fixed(new_lo, new_hi, bits, bits))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            self.lo.to_decimal(20, false),
            self.hi.to_decimal(20, true)
        )
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Interval", 3)?;
        st.serialize_field("lo", &self.lo.to_decimal(30, false))?;
        st.serialize_field("hi", &self.hi.to_decimal(30, true))?;
        st.serialize_field("precision_bits", &self.precision_bits)?;
        st.end()
    }
}

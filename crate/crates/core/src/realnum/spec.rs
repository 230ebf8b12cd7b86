//! Exact descriptions of real numbers and their text form.
//!
//! | form | example |
//! |------|---------|
//! | rational | `rat:22/7` |
//! | quadratic surd `(a + b√d)/c` | `surd:(1+1*sqrt(5))/2` |
//! | finite continued fraction | `cf:[3;7,15,1]` |
//! | decimal literal with stated correct digits | `dec:1.41421356237:11` |
//! | lacunary series `Σ base^(-c_j)` | `liouville:base=2,rule=exp,theta=0.5,depth=8` |
//!
//! `Display` and `FromStr` are exact inverses on every value produced by the
//! parser.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponents at or beyond this value contribute less than `2^-CAP` and are
/// never materialized.
pub const EXPONENT_CAP: u64 = 1 << 40;

/// Largest number of fractional digits accepted in a growth parameter.
const MAX_PARAM_FRACTION_DIGITS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RealSpec {
    /// `p/q` with `q > 0`; not reduced, so that the text form round-trips.
    Rational { p: BigInt, q: BigInt },
    /// `(a + b·√d)/c` with `d` not a perfect square, `b ≠ 0`, `c > 0`.
    QuadraticSurd {
        a: BigInt,
        b: BigInt,
        d: BigInt,
        c: BigInt,
    },
    /// `[a0; a1, a2, ...]`, `a_i ≥ 1` for `i ≥ 1`.
    FiniteCf { quotients: Vec<BigInt> },
    /// A decimal numeral whose first `precision` fractional digits are
    /// correct: the true value lies within `10^-precision` of the literal.
    Decimal { digits: String, precision: u32 },
    Liouville(LiouvilleSpec),
}

/// `Σ_j base^(-c_j)` with `c_{j+1} = f(c_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LiouvilleSpec {
    pub base: u32,
    pub rule: GrowthRule,
    /// First exponent; `None` picks the smallest `c ≥ 2` with `f(c) > c`.
    pub first: Option<u64>,
    /// Maximum number of series terms ever summed explicitly.
    pub depth: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GrowthRule {
    /// `c ↦ ⌊c^tau⌋`
    Polynomial { tau: DecimalParam },
    /// `c ↦ ⌊2^(theta·c)⌋`
    Exponential { theta: DecimalParam },
}

/// A positive decimal parameter kept verbatim for round-tripping.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecimalParam(String);

impl DecimalParam {
    pub fn new(text: &str) -> Result<Self> {
        let (ip, fp) = split_decimal(text)
            .ok_or_else(|| Error::InvalidSpec(format!("`{text}` is not a decimal parameter")))?;
        if text.starts_with('-') || text.starts_with('+') {
            return Err(Error::InvalidSpec(format!("`{text}` must be unsigned")));
        }
        if fp.len() > MAX_PARAM_FRACTION_DIGITS {
            return Err(Error::InvalidSpec(format!(
                "`{text}` has more than {MAX_PARAM_FRACTION_DIGITS} fractional digits"
            )));
        }
        let p = Self(text.to_string());
        if p.ratio().is_zero() || ip.is_empty() && fp.is_empty() {
            return Err(Error::InvalidSpec(format!("`{text}` must be positive")));
        }
        Ok(p)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Exact value, reduced.
    pub fn ratio(&self) -> BigRational {
        decimal_to_ratio(&self.0).expect("validated at construction")
    }
}

/// Explicit exponents of a lacunary series plus the exponent bounding its tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiouvilleSchedule {
    pub terms: Vec<u64>,
    /// Next exponent after `terms`; the omitted tail lies in `(0, 2·base^-tail]`.
    /// Saturates at [`EXPONENT_CAP`].
    pub tail: u64,
}

impl LiouvilleSpec {
    fn next_exponent(&self, c: u64) -> u64 {
        match &self.rule {
            GrowthRule::Polynomial { tau } => {
                let r = tau.ratio();
                let (p, q) = (r.numer().to_u64().unwrap(), r.denom().to_u64().unwrap());
                // c^(p/q) >= CAP  <=>  p·log2(c) >= 40·q, checked with margin first.
                let log2c = (c as f64).log2();
                if log2c * p as f64 > (q as f64) * 41.0 {
                    return EXPONENT_CAP;
                }
                let root = BigUint::from(c).pow(p as u32).nth_root(q as u32);
                root.to_u64().map_or(EXPONENT_CAP, |v| v.min(EXPONENT_CAP))
            }
            GrowthRule::Exponential { theta } => {
                let r = theta.ratio();
                let (p, q) = (r.numer().to_u64().unwrap(), r.denom().to_u64().unwrap());
                let e = (p as u128) * (c as u128);
                if e >= 41 * q as u128 {
                    return EXPONENT_CAP;
                }
                let root = (BigUint::one() << (e as usize)).nth_root(q as u32);
                root.to_u64().map_or(EXPONENT_CAP, |v| v.min(EXPONENT_CAP))
            }
        }
    }

    pub fn first_exponent(&self) -> Result<u64> {
        if let Some(c) = self.first {
            return Ok(c);
        }
        (2..1_000_000u64)
            .find(|&c| self.next_exponent(c) > c)
            .ok_or_else(|| Error::InvalidSpec("growth rule never exceeds identity".into()))
    }

    pub fn schedule(&self) -> Result<LiouvilleSchedule> {
        let mut c = self.first_exponent()?;
        if c == 0 {
            return Err(Error::InvalidSpec("first exponent must be positive".into()));
        }
        let mut terms = Vec::with_capacity(self.depth as usize);
        while terms.len() < self.depth as usize && c < EXPONENT_CAP {
            terms.push(c);
            let next = self.next_exponent(c);
            if next <= c {
                return Err(Error::InvalidSpec(format!(
                    "exponent schedule not strictly increasing at {c} -> {next}"
                )));
            }
            c = next;
        }
        Ok(LiouvilleSchedule {
            terms,
            tail: c.min(EXPONENT_CAP),
        })
    }
}

impl RealSpec {
    pub fn rational(p: i64, q: i64) -> Self {
        RealSpec::Rational {
            p: p.into(),
            q: q.into(),
        }
    }

    /// `(a + b√d)/c`
    pub fn surd(a: i64, b: i64, d: i64, c: i64) -> Self {
        RealSpec::QuadraticSurd {
            a: a.into(),
            b: b.into(),
            d: d.into(),
            c: c.into(),
        }
    }

    /// `√n` for non-square `n`.
    pub fn sqrt(n: i64) -> Self {
        Self::surd(0, 1, n, 1)
    }

    pub fn golden_ratio() -> Self {
        Self::surd(1, 1, 5, 2)
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, RealSpec::Rational { .. } | RealSpec::FiniteCf { .. })
    }

    /// Checks the invariants of the variant.
    pub fn validate(&self) -> Result<()> {
        match self {
            RealSpec::Rational { q, .. } => {
                if !q.is_positive() {
                    return Err(Error::InvalidSpec("rational denominator must be positive".into()));
                }
            }
            RealSpec::QuadraticSurd { b, d, c, .. } => {
                if b.is_zero() {
                    return Err(Error::InvalidSpec("surd coefficient b must be nonzero".into()));
                }
                if !d.is_positive() {
                    return Err(Error::InvalidSpec("surd radicand must be positive".into()));
                }
                let r = d.sqrt();
                if &(&r * &r) == d {
                    return Err(Error::InvalidSpec(format!("surd radicand {d} is a perfect square")));
                }
                if !c.is_positive() {
                    return Err(Error::InvalidSpec("surd denominator must be positive".into()));
                }
            }
            RealSpec::FiniteCf { quotients } => {
                if quotients.is_empty() {
                    return Err(Error::InvalidSpec("continued fraction has no quotients".into()));
                }
                if quotients[1..].iter().any(|a| !a.is_positive()) {
                    return Err(Error::InvalidSpec(
                        "partial quotients after the first must be positive".into(),
                    ));
                }
            }
            RealSpec::Decimal { digits, precision } => {
                let (_, frac) = split_decimal(digits).ok_or_else(|| {
                    Error::InvalidSpec(format!("`{digits}` is not a decimal numeral"))
                })?;
                if *precision as usize > frac.len() {
                    return Err(Error::InvalidSpec(format!(
                        "stated precision {precision} exceeds the {} fractional digits given",
                        frac.len()
                    )));
                }
            }
            RealSpec::Liouville(l) => {
                if l.base < 2 {
                    return Err(Error::InvalidSpec("series base must be at least 2".into()));
                }
                if l.depth == 0 {
                    return Err(Error::InvalidSpec("series depth must be positive".into()));
                }
                l.schedule()?;
            }
        }
        Ok(())
    }

    /// Exact value for the rational variants.
    pub fn exact_value(&self) -> Option<BigRational> {
        match self {
            RealSpec::Rational { p, q } => Some(BigRational::new(p.clone(), q.clone())),
            RealSpec::FiniteCf { quotients } => {
                // Backward evaluation of a0 + 1/(a1 + 1/(...)).
                let mut it = quotients.iter().rev();
                let mut acc = BigRational::from_integer(it.next()?.clone());
                for a in it {
                    acc = BigRational::from_integer(a.clone()) + acc.recip();
                }
                Some(acc)
            }
            _ => None,
        }
    }
}

/// Splits an optionally signed decimal numeral into integer and fraction digits.
fn split_decimal(s: &str) -> Option<(&str, &str)> {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    let (ip, fp) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if ip.is_empty() || !all_digits(ip) || !all_digits(fp) || body.ends_with('.') {
        return None;
    }
    Some((ip, fp))
}

/// Exact rational value of a decimal numeral.
pub(crate) fn decimal_to_ratio(s: &str) -> Option<BigRational> {
    let (ip, fp) = split_decimal(s)?;
    let mantissa: BigInt = format!("{ip}{fp}").parse().ok()?;
    let mantissa = if s.starts_with('-') { -mantissa } else { mantissa };
    let scale = BigInt::from(10u32).pow(fp.len() as u32);
    Some(BigRational::new(mantissa, scale))
}

impl fmt::Display for RealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealSpec::Rational { p, q } => write!(f, "rat:{p}/{q}"),
            RealSpec::QuadraticSurd { a, b, d, c } => {
                let sign = if b.sign() == Sign::Minus { '-' } else { '+' };
                write!(f, "surd:({a}{sign}{}*sqrt({d}))/{c}", b.abs())
            }
            RealSpec::FiniteCf { quotients } => {
                write!(f, "cf:[{}", quotients[0])?;
                if quotients.len() > 1 {
                    let rest: Vec<String> = quotients[1..].iter().map(|a| a.to_string()).collect();
                    write!(f, ";{}", rest.join(","))?;
                }
                write!(f, "]")
            }
            RealSpec::Decimal { digits, precision } => write!(f, "dec:{digits}:{precision}"),
            RealSpec::Liouville(l) => {
                write!(f, "liouville:base={},", l.base)?;
                match &l.rule {
                    GrowthRule::Polynomial { tau } => write!(f, "rule=poly,tau={}", tau.as_str())?,
                    GrowthRule::Exponential { theta } => {
                        write!(f, "rule=exp,theta={}", theta.as_str())?
                    }
                }
                if let Some(c) = l.first {
                    write!(f, ",c1={c}")?;
                }
                write!(f, ",depth={}", l.depth)
            }
        }
    }
}

fn parse_err(detail: impl Into<String>) -> Error {
    Error::Parse {
        what: "real specification",
        detail: detail.into(),
    }
}

fn int(s: &str) -> Result<BigInt> {
    // BigInt::from_str accepts a leading '+', which would break round-tripping.
    if s.starts_with('+') || s.is_empty() {
        return Err(parse_err(format!("`{s}` is not an integer")));
    }
    s.parse().map_err(|_| parse_err(format!("`{s}` is not an integer")))
}

impl FromStr for RealSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, body) = s
            .split_once(':')
            .ok_or_else(|| parse_err(format!("`{s}` has no variant tag")))?;
        let spec = match tag {
            "rat" => {
                let (p, q) = body
                    .split_once('/')
                    .ok_or_else(|| parse_err("expected rat:p/q"))?;
                RealSpec::Rational { p: int(p)?, q: int(q)? }
            }
            "surd" => parse_surd(body)?,
            "cf" => {
                let inner = body
                    .strip_prefix('[')
                    .and_then(|b| b.strip_suffix(']'))
                    .ok_or_else(|| parse_err("expected cf:[a0;a1,...]"))?;
                let mut quotients = Vec::new();
                match inner.split_once(';') {
                    Some((a0, rest)) => {
                        quotients.push(int(a0)?);
                        for a in rest.split(',') {
                            quotients.push(int(a)?);
                        }
                    }
                    None => quotients.push(int(inner)?),
                }
                RealSpec::FiniteCf { quotients }
            }
            "dec" => {
                let (digits, prec) = body
                    .rsplit_once(':')
                    .ok_or_else(|| parse_err("expected dec:digits:precision"))?;
                if split_decimal(digits).is_none() || digits.starts_with('+') {
                    return Err(parse_err(format!("`{digits}` is not a decimal numeral")));
                }
                let precision: u32 = prec
                    .parse()
                    .map_err(|_| parse_err(format!("`{prec}` is not a digit count")))?;
                if prec != precision.to_string() {
                    return Err(parse_err(format!("`{prec}` is not in canonical form")));
                }
                RealSpec::Decimal {
                    digits: digits.to_string(),
                    precision,
                }
            }
            "liouville" => parse_liouville(body)?,
            other => return Err(parse_err(format!("unknown variant `{other}`"))),
        };
        spec.validate()?;
        // Reject non-canonical spellings (e.g. `007`) so the text form is a bijection.
        if spec.to_string() != s {
            return Err(parse_err(format!("`{s}` is not in canonical form (expected `{spec}`)")));
        }
        Ok(spec)
    }
}

fn parse_surd(body: &str) -> Result<RealSpec> {
    let err = || parse_err("expected surd:(a+b*sqrt(d))/c");
    let inner = body.strip_prefix('(').ok_or_else(err)?;
    let (num, c) = inner.rsplit_once(")/").ok_or_else(err)?;
    let (lin, d) = num.split_once("*sqrt(").ok_or_else(err)?;
    let d = d.strip_suffix(')').ok_or_else(err)?;
    // `lin` is `a+b` or `a-b`; skip a possible leading sign of `a`.
    let split = lin[1..].find(['+', '-']).map(|i| i + 1).ok_or_else(err)?;
    let (a, b) = lin.split_at(split);
    let b = match b.as_bytes()[0] {
        b'+' => int(&b[1..])?,
        _ => -int(&b[1..])?,
    };
    Ok(RealSpec::QuadraticSurd {
        a: int(a)?,
        b,
        d: int(d)?,
        c: int(c)?,
    })
}

fn parse_liouville(body: &str) -> Result<RealSpec> {
    let mut base = None;
    let mut rule = None;
    let mut param = None;
    let mut first = None;
    let mut depth = None;
    for kv in body.split(',') {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| parse_err(format!("`{kv}` is not key=value")))?;
        let num = |v: &str| -> Result<u64> {
            v.parse().map_err(|_| parse_err(format!("`{v}` is not an integer")))
        };
        match k {
            "base" => base = Some(num(v)? as u32),
            "rule" => rule = Some(v.to_string()),
            "tau" | "theta" => param = Some((k.to_string(), DecimalParam::new(v)?)),
            "c1" => first = Some(num(v)?),
            "depth" => depth = Some(num(v)? as u32),
            other => return Err(parse_err(format!("unknown liouville key `{other}`"))),
        }
    }
    let missing = |k: &str| parse_err(format!("liouville spec missing `{k}`"));
    let (pk, pv) = param.ok_or_else(|| missing("tau/theta"))?;
    let rule = match (rule.as_deref(), pk.as_str()) {
        (Some("poly"), "tau") => GrowthRule::Polynomial { tau: pv },
        (Some("exp"), "theta") => GrowthRule::Exponential { theta: pv },
        _ => return Err(parse_err("rule=poly needs tau, rule=exp needs theta")),
    };
    Ok(RealSpec::Liouville(LiouvilleSpec {
        base: base.ok_or_else(|| missing("base"))?,
        rule,
        first,
        depth: depth.ok_or_else(|| missing("depth"))?,
    }))
}

impl Serialize for RealSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RealSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

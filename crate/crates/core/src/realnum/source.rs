//! Fixed-point enclosures `lo·2^-p ≤ α ≤ hi·2^-p` for each variant.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::spec::{decimal_to_ratio, LiouvilleSchedule, RealSpec, EXPONENT_CAP};
use crate::error::Result;

/// An enclosure at a requested number of fractional bits.
#[derive(Debug, Clone)]
pub(crate) struct Fixed {
    pub lo: BigInt,
    pub hi: BigInt,
    /// The variant cannot supply a tighter enclosure however many bits are
    /// requested.
    pub saturated: bool,
}

#[derive(Debug, Clone)]
pub(crate) enum Source {
    Exact(BigRational),
    Surd {
        a: BigInt,
        /// `b²·d`
        b2d: BigUint,
        negative: bool,
        c: BigInt,
    },
    Decimal {
        lo: BigRational,
        hi: BigRational,
    },
    Liouville {
        base: BigUint,
        log2_base: f64,
        schedule: LiouvilleSchedule,
    },
}

fn floor_shifted(v: &BigRational, p: u32) -> BigInt {
    (v.numer() << p as usize).div_floor(v.denom())
}

fn ceil_shifted(v: &BigRational, p: u32) -> BigInt {
    -((-v.numer() << p as usize).div_floor(v.denom()))
}

impl Source {
    pub fn from_spec(spec: &RealSpec) -> Result<Source> {
        spec.validate()?;
        if let Some(v) = spec.exact_value() {
            return Ok(Source::Exact(v));
        }
        Ok(match spec {
            RealSpec::QuadraticSurd { a, b, d, c } => Source::Surd {
                a: a.clone(),
                b2d: (b * b * d).to_biguint().expect("b²d > 0"),
                negative: b.sign() == Sign::Minus,
                c: c.clone(),
            },
            RealSpec::Decimal { digits, precision } => {
                let lit = decimal_to_ratio(digits).expect("validated");
                let eps = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(*precision));
                Source::Decimal {
                    lo: &lit - &eps,
                    hi: &lit + &eps,
                }
            }
            RealSpec::Liouville(l) => Source::Liouville {
                base: BigUint::from(l.base),
                log2_base: (l.base as f64).log2(),
                schedule: l.schedule()?,
            },
            RealSpec::Rational { .. } | RealSpec::FiniteCf { .. } => unreachable!(),
        })
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Source::Exact(v) => Some(v),
            _ => None,
        }
    }

    pub fn enclose(&self, p: u32) -> Fixed {
        match self {
            Source::Exact(v) => Fixed {
                lo: floor_shifted(v, p),
                hi: ceil_shifted(v, p),
                saturated: false,
            },
            Source::Surd { a, b2d, negative, c } => {
                // √(b²d·4^p) is irrational, so it lies strictly inside (r, r+1).
                let r = BigInt::from((b2d << (2 * p as usize)).sqrt());
                let x = a << p as usize;
                let (nlo, nhi) = if *negative {
                    (&x - &r - 1, &x - &r)
                } else {
                    (&x + &r, &x + &r + 1)
                };
                Fixed {
                    lo: nlo.div_floor(c),
                    hi: -((-nhi).div_floor(c)),
                    saturated: false,
                }
            }
            Source::Decimal { lo, hi } => {
                let l = floor_shifted(lo, p);
                let h = ceil_shifted(hi, p);
                let saturated = (&h - &l) > BigInt::from(4);
                Fixed { lo: l, hi: h, saturated }
            }
            Source::Liouville {
                base,
                log2_base,
                schedule,
            } => liouville_enclose(base, *log2_base, schedule, p),
        }
    }
}

fn liouville_enclose(base: &BigUint, log2_base: f64, s: &LiouvilleSchedule, p: u32) -> Fixed {
    let one_p = BigUint::one() << p as usize;
    let mut lo = BigUint::zero();
    let mut hi = BigUint::zero();
    // Terms far below 2^-p are folded into the tail bound.
    let cutoff = p as f64 + 2.0;
    let mut tail_exp = s.tail;
    for &c in &s.terms {
        if c as f64 * log2_base > cutoff {
            tail_exp = c;
            break;
        }
        let pow = base.pow(c as u32);
        let (q, r) = one_p.div_rem(&pow);
        hi += if r.is_zero() { q.clone() } else { &q + 1u32 };
        lo += q;
    }
    // Σ_{j≥J} b^-c_j ≤ b^-c_J · b/(b-1) ≤ 2·b^-c_J
    let tail_ulps = if tail_exp >= EXPONENT_CAP || tail_exp as f64 * log2_base > p as f64 + 2.0 {
        BigUint::one()
    } else {
        let pow = base.pow(tail_exp as u32);
        let num: BigUint = &one_p << 1usize;
        let (q, r) = num.div_rem(&pow);
        if r.is_zero() {
            q
        } else {
            q + 1u32
        }
    };
    let saturated = tail_exp == s.tail && tail_exp < EXPONENT_CAP && tail_ulps > BigUint::from(2u32);
    hi += tail_ulps;
    Fixed {
        lo: lo.into(),
        hi: hi.into(),
        saturated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn to_f64(v: &BigInt, p: u32) -> f64 {
        v.to_f64().unwrap() / 2f64.powi(p as i32)
    }

    #[test]
    fn sqrt2_enclosure_squares_around_two() {
        let src = Source::from_spec(&RealSpec::sqrt(2)).unwrap();
        let f = src.enclose(64);
        let two = BigInt::from(2) << 128usize;
        assert!(&f.lo * &f.lo < two);
        assert!(&f.hi * &f.hi > two);
        assert!(&f.hi - &f.lo <= BigInt::from(1));
    }

    #[test]
    fn negative_surd() {
        // (1 - √5)/2 = -0.618...
        let src = Source::from_spec(&RealSpec::surd(1, -1, 5, 2)).unwrap();
        let f = src.enclose(40);
        let v = (1.0 - 5f64.sqrt()) / 2.0;
        assert!(to_f64(&f.lo, 40) <= v && v <= to_f64(&f.hi, 40));
    }

    #[test]
    fn liouville_partial_sum_and_tail() {
        let spec: RealSpec = "liouville:base=2,rule=poly,tau=2,c1=2,depth=3".parse().unwrap();
        let src = Source::from_spec(&spec).unwrap();
        let f = src.enclose(20);
        // 2^-2 + 2^-4 + 2^-16, tail ≤ 2·2^-256 rounds to one ulp.
        let partial = (1u64 << 18) + (1 << 16) + (1 << 4);
        assert_eq!(f.lo, BigInt::from(partial));
        assert_eq!(f.hi, BigInt::from(partial + 1));
        assert!(!f.saturated);
    }

    #[test]
    fn liouville_depth_saturates() {
        let spec: RealSpec = "liouville:base=2,rule=poly,tau=2,c1=2,depth=2".parse().unwrap();
        let src = Source::from_spec(&spec).unwrap();
        // terms 2, 4; tail exponent 16 limits precision to about 15 bits.
        assert!(!src.enclose(10).saturated);
        assert!(src.enclose(64).saturated);
    }
}

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, FloorSite, Result};
use crate::realnum::{LinearForm, Real, RealSpec};

/// A polynomial `c_0 + c_1 t + … + c_r t^r` with real coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polynomial {
    /// Coefficients in increasing degree.
    pub coeffs: Vec<RealSpec>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<RealSpec>) -> Self {
        Polynomial { coeffs }
    }

    /// Degree of the highest stored coefficient; `None` when empty.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
}

/// One coordinate `α_j t^{m_j} + g_j(t)` of a problem, prepared for
/// evaluation.
#[derive(Debug, Clone)]
struct Coordinate {
    alpha: Real,
    m: u32,
    lower: Vec<Real>,
}

/// The data `(α_j, m_j, g_j)` of one counting problem.
///
/// The counted quantity is
/// `#{n ≤ x : gcd(n, ⌊α_1 n^{m_1}⌋, ⌊α_2 n^{m_2} + g_2(n)⌋, …) = 1}`
/// with `1 = m_1 < m_2 < … < m_k`. Only `j ≥ 2` may carry a lower-order
/// polynomial `g_j` of degree below `m_j`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    coords: Vec<Coordinate>,
    max_bits: u32,
}

fn check_exponents(ms: &[u32]) -> Result<()> {
    if ms.first() != Some(&1) {
        return Err(Error::InvalidSpec("exponents must start with m_1 = 1".into()));
    }
    if ms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpec("exponents must be strictly increasing".into()));
    }
    Ok(())
}

impl ProblemSpec {
    /// A problem with irrational coefficients and no lower-order terms.
    pub fn new(alphas: Vec<RealSpec>, ms: Vec<u32>) -> Result<Self> {
        if let Some(a) = alphas.iter().find(|a| a.is_rational()) {
            return Err(Error::InvalidSpec(format!("coefficient {a} is rational")));
        }
        Self::allowing_rational(alphas, ms)
    }

    /// Like [`ProblemSpec::new`] but accepting rational coefficients, for
    /// exercising formulas against closed forms.
    pub fn allowing_rational(alphas: Vec<RealSpec>, ms: Vec<u32>) -> Result<Self> {
        if alphas.is_empty() || alphas.len() != ms.len() {
            return Err(Error::InvalidSpec(format!(
                "{} coefficients for {} exponents",
                alphas.len(),
                ms.len()
            )));
        }
        check_exponents(&ms)?;
        let coords = alphas
            .into_iter()
            .zip(ms)
            .map(|(a, m)| {
                Ok(Coordinate {
                    alpha: Real::new(a)?,
                    m,
                    lower: Vec::new(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(ProblemSpec {
            coords,
            max_bits: crate::realnum::DEFAULT_MAX_BITS,
        })
    }

    /// `k = 1`, `m = (1)`.
    pub fn linear(alpha: RealSpec) -> Result<Self> {
        Self::new(vec![alpha], vec![1])
    }

    /// Sets `g_j` for the 1-based index `j ≥ 2`.
    pub fn with_lower_term(mut self, j: usize, g: Polynomial) -> Result<Self> {
        if j < 2 || j > self.k() {
            return Err(Error::InvalidSpec(format!(
                "lower-order terms apply to 2 ≤ j ≤ {}, got {j}",
                self.k()
            )));
        }
        let c = &mut self.coords[j - 1];
        if g.degree().is_some_and(|deg| deg >= c.m as usize) {
            return Err(Error::InvalidSpec(format!(
                "g_{j} must have degree below {}",
                c.m
            )));
        }
        c.lower = g
            .coeffs
            .into_iter()
            .map(|s| Real::new(s).map(|r| r.with_max_bits(self.max_bits)))
            .collect::<Result<_>>()?;
        Ok(self)
    }

    pub fn with_max_bits(mut self, bits: u32) -> Self {
        self.max_bits = bits;
        for c in &mut self.coords {
            c.alpha = c.alpha.clone().with_max_bits(bits);
            for r in &mut c.lower {
                *r = r.clone().with_max_bits(bits);
            }
        }
        self
    }

    pub fn k(&self) -> usize {
        self.coords.len()
    }

    pub fn ms(&self) -> Vec<u32> {
        self.coords.iter().map(|c| c.m).collect()
    }

    pub fn max_m(&self) -> u32 {
        self.coords.last().map(|c| c.m).unwrap_or(1)
    }

    pub fn alpha(&self, j: usize) -> &Real {
        &self.coords[j].alpha
    }

    pub fn alphas(&self) -> Vec<RealSpec> {
        self.coords.iter().map(|c| c.alpha.spec().clone()).collect()
    }

    pub fn lower_term(&self, j: usize) -> Option<Polynomial> {
        let c = &self.coords[j];
        (!c.lower.is_empty()).then(|| Polynomial::new(c.lower.iter().map(|r| r.spec().clone()).collect()))
    }

    pub fn has_lower_terms(&self) -> bool {
        self.coords.iter().any(|c| !c.lower.is_empty())
    }

    /// The largest scale `x^{m_k}` a count up to `x` evaluates at.
    pub fn check_scale(&self, x: u64) -> Result<()> {
        pow_u128(x, self.max_m()).map(|_| ())
    }

    fn form(&self, j: usize, t: u64, alpha_scale: BigRational, divide: u64) -> LinearForm<'_> {
        let c = &self.coords[j];
        let mut form = LinearForm::new(self.max_bits);
        form.push(&c.alpha, alpha_scale);
        let mut power = BigInt::from(1u8);
        for r in &c.lower {
            form.push(r, BigRational::new(power.clone(), BigInt::from(divide)));
            power *= t;
        }
        form
    }

    /// `⌊α_j t^{m_j} + g_j(t)⌋` for the 0-based coordinate `j`.
    pub fn floor_at(&self, j: usize, t: u64) -> Result<i128> {
        let site = FloorSite { j: j + 1, n: t };
        let c = &self.coords[j];
        let scale = pow_u128(t, c.m)?;
        if c.lower.is_empty() {
            return c.alpha.floor_value(scale).map_err(|e| e.at(site));
        }
        let (v, _) = self
            .form(j, t, BigRational::from_integer(scale.into()), 1)
            .floor()
            .map_err(|e| e.at(site))?;
        i128::try_from(v).map_err(|_| Error::ResourceLimit(format!("floor at {site} exceeds i128")))
    }

    /// `{h·(α_j d^{m_j-1} n^{m_j} + g_j(dn)/d)}` as a 64-bit fixed-point
    /// fraction, within `2^-60`. With `h = 1` this is coordinate `j` of
    /// `ν_{d,n}`.
    pub fn phase_u64(&self, j: usize, d: u64, n: u64, h: i64) -> Result<u64> {
        let site = FloorSite { j: j + 1, n: d * n };
        let c = &self.coords[j];
        let scale = pow_u128(d, c.m - 1)?
            .checked_mul(pow_u128(n, c.m)?)
            .ok_or_else(|| overflow(d * n, c.m))?;
        if h == 0 {
            return Ok(0);
        }
        if c.lower.is_empty() {
            let s = scale
                .checked_mul(h.unsigned_abs() as u128)
                .ok_or_else(|| overflow(d * n, c.m))?;
            let f = c.alpha.frac_u64(s).map_err(|e| e.at(site))?;
            return Ok(if h < 0 { f.wrapping_neg() } else { f });
        }
        let hb = BigInt::from(h);
        let mut form = LinearForm::new(self.max_bits);
        form.push(&c.alpha, BigRational::from_integer(BigInt::from(scale) * &hb));
        let mut power = hb;
        for r in &c.lower {
            form.push(r, BigRational::new(power.clone(), BigInt::from(d)));
            power *= d * n;
        }
        form.frac_u64().map_err(|e| e.at(site))
    }

    /// Whether `{α_j d^{m_j-1} n^{m_j} + g_j(dn)/d} < 1/d`.
    pub fn frac_test(&self, j: usize, d: u64, n: u64) -> Result<bool> {
        let site = FloorSite { j: j + 1, n: d * n };
        let c = &self.coords[j];
        let scale = pow_u128(d, c.m - 1)?
            .checked_mul(pow_u128(n, c.m)?)
            .ok_or_else(|| overflow(d * n, c.m))?;
        if c.lower.is_empty() {
            return c.alpha.frac_below(scale, 1, d).map_err(|e| e.at(site));
        }
        self.form(j, d * n, BigRational::from_integer(scale.into()), d)
            .frac_below(&BigRational::new(1.into(), d.into()))
            .map_err(|e| e.at(site))
    }
}

fn overflow(t: u64, m: u32) -> Error {
    Error::ResourceLimit(format!("scale {t}^{m} exceeds 128 bits"))
}

pub(crate) fn pow_u128(t: u64, m: u32) -> Result<u128> {
    (t as u128).checked_pow(m).ok_or_else(|| overflow(t, m))
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}·n^{}", c.alpha.spec(), c.m)?;
            for (deg, r) in c.lower.iter().enumerate() {
                write!(f, " + {}·n^{deg}", r.spec())?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct ProblemRecord {
    alphas: Vec<RealSpec>,
    ms: Vec<u32>,
    lower_terms: Vec<Option<Polynomial>>,
}

impl Serialize for ProblemSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProblemRecord {
            alphas: self.alphas(),
            ms: self.ms(),
            lower_terms: (0..self.k()).map(|j| self.lower_term(j)).collect(),
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents_are_validated() {
        let s2 = RealSpec::sqrt(2);
        assert!(ProblemSpec::new(vec![s2.clone()], vec![2]).is_err());
        assert!(ProblemSpec::new(vec![s2.clone(), s2.clone()], vec![1, 1]).is_err());
        assert!(ProblemSpec::new(vec![s2.clone()], vec![1, 2]).is_err());
        assert!(ProblemSpec::new(vec![RealSpec::rational(1, 2)], vec![1]).is_err());
        assert!(ProblemSpec::allowing_rational(vec![RealSpec::rational(1, 2)], vec![1]).is_ok());
    }

    #[test]
    fn lower_terms_are_restricted() {
        let p = ProblemSpec::new(vec![RealSpec::sqrt(2), RealSpec::sqrt(3)], vec![1, 2]).unwrap();
        let g = Polynomial::new(vec![RealSpec::rational(1, 3)]);
        assert!(p.clone().with_lower_term(1, g.clone()).is_err());
        let quad = Polynomial::new(vec![RealSpec::rational(0, 1); 3]);
        assert!(p.clone().with_lower_term(2, quad).is_err());
        assert!(p.with_lower_term(2, g).is_ok());
    }

    #[test]
    fn floor_with_lower_term() {
        // √3·t² + t/2 at t = 3: 15.588… + 1.5 = 17.088…
        let p = ProblemSpec::new(vec![RealSpec::sqrt(2), RealSpec::sqrt(3)], vec![1, 2])
            .unwrap()
            .with_lower_term(2, Polynomial::new(vec![RealSpec::rational(0, 1), RealSpec::rational(1, 2)]))
            .unwrap();
        assert_eq!(p.floor_at(1, 3).unwrap(), 17);
        assert_eq!(p.floor_at(0, 3).unwrap(), 4);
    }
}

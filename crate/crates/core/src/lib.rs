//! Coprimality of `n` with floors of polynomial Beatty-like sequences.
//!
//! The library counts
//!
//! ```text
//! N(x) = #{ n ≤ x : gcd(n, ⌊α₁n^{m₁}⌋, …, ⌊α_k n^{m_k}⌋) = 1 }
//! ```
//!
//! by direct gcd evaluation and, independently, through Möbius inversion
//! over the divisibility conditions `d | ⌊α_j (dn)^{m_j}⌋`. Every floor is
//! certified by an interval enclosure, so the two routes agree exactly.
//!
//! Modules:
//!
//! * [`realnum`]: exact real descriptions and certified floors.
//! * [`dioph`]: continued fractions, approximation windows, type estimates.
//! * [`counting`]: the counting problem, the Möbius sieve, ζ, exponents and
//!   density experiments.
//! * [`equidist`]: the `ν_{d,n}` point sets, discrepancy, Weyl sums and
//!   explicit exponential-sum bounds.
//!
//! ```
//! use coprime_floors::counting::{direct_count, mobius_count, ProblemSpec};
//! use coprime_floors::realnum::RealSpec;
//!
//! let problem = ProblemSpec::linear(RealSpec::sqrt(2)).unwrap();
//! let direct = direct_count(&problem, 1000).unwrap();
//! let mobius = mobius_count(&problem, 1000, None).unwrap();
//! assert_eq!(direct.count, mobius.count);
//! ```

pub mod counting;
pub mod dioph;
pub mod equidist;
mod error;
pub mod realnum;
mod util;

pub use error::{Error, FloorSite, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/certified-floors.md")]
    mod certified_floors {}
    #[doc = include_str!("../../../book/src/continued-fractions.md")]
    mod continued_fractions {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/discrepancy.md")]
    mod discrepancy {}
    #[doc = include_str!("../../../book/src/exponents.md")]
    mod exponents {}
}

//! Exact descriptions of real numbers and certified evaluation of
//! `⌊α·s⌋` and `{α·s}` for integer scales `s`.

mod interval;
mod real;
mod source;
mod spec;

pub use interval::{rational_to_decimal, Dyadic, Interval};
pub use real::{CertifiedFloor, LinearForm, Real, DEFAULT_MAX_BITS, FRAC_ACCURACY};
pub use spec::{DecimalParam, GrowthRule, LiouvilleSchedule, LiouvilleSpec, RealSpec, EXPONENT_CAP};

use crate::error::Result;

/// An enclosure of `spec` of relative width at most `2^(1-bits)`.
pub fn eval_enclosure(spec: &RealSpec, bits: u32) -> Result<Interval> {
    Real::new(spec.clone())?.enclosure(bits)
}

/// `⌊spec·scale⌋` with its certificate.
///
/// For repeated evaluations prepare a [`Real`] once instead.
pub fn floor_scaled(spec: &RealSpec, scale: u128) -> Result<CertifiedFloor> {
    Real::new(spec.clone())?.floor_scaled(scale)
}

/// Whether `{spec·scale} < num/den`, strictly.
pub fn frac_below(spec: &RealSpec, scale: u128, num: u64, den: u64) -> Result<bool> {
    Real::new(spec.clone())?.frac_below(scale, num, den)
}

//! The counting function `N(x)`, computed directly and by Möbius
//! inversion, together with `ζ`, the theoretical error exponents and
//! density experiments.

mod count;
mod density;
mod exponents;
mod mobius;
mod problem;
mod zeta;

pub use count::{
    direct_count, direct_count_with, inner_count, inner_count_with, inner_hit, mobius_count,
    mobius_count_with, tail_count, tail_count_rescaled, CountMethod, CountOptions, CountResult,
    InnerMethod,
};
pub use density::{density_experiment, fit_line, DensityOptions, DensityRow, DensityRun, ErrorFit};
pub use exponents::{theoretical_gamma, theoretical_gamma_star, Exponent};
pub use mobius::{mobius_sieve, mobius_sieve_with_budget, MobiusBlocks, MobiusTable, DEFAULT_SIEVE_BUDGET};
pub use problem::{Polynomial, ProblemSpec};
pub(crate) use problem::pow_u128;
pub use zeta::{inverse_zeta, zeta_int};

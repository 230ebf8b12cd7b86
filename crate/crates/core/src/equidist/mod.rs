//! The points `ν_{d,n}`, their discrepancy, Weyl sums and the explicit
//! exponential-sum bounds, each evaluated as a measurable inequality.

mod bounds;
mod discrepancy;
mod points;
mod weyl;

pub use bounds::{
    linear_bound, linear_exact_check, monotone_check, monotone_sequence, quadratic_bound, reciprocal_sum,
    weyl_bound_report, weyl_delta, Approximant, LinearCheck, MonotoneVariant, QuadraticBound, ReciprocalSum,
    WeylBoundOptions, WeylBoundReport, DEFAULT_EPSILON,
};
pub use discrepancy::{
    default_koksma_constant, discrepancy_box_lower, discrepancy_box_lower_with_budget, discrepancy_exact_1d,
    et_koksma_upper, koksma_rhs, BoxLower, DiscrepancyReport, WeylTerm, DEFAULT_BOX_BUDGET,
    DEFAULT_FREQUENCY_BUDGET,
};
pub use points::{nu_sequence, PointSet, Provenance};
pub use weyl::{weyl_sum, WeylSum};

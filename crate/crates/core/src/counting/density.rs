use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use super::count::{direct_in_pool, pool};
use super::exponents::{theoretical_gamma, theoretical_gamma_star, Exponent};
use super::problem::ProblemSpec;
use super::zeta::inverse_zeta;
use crate::error::{Error, Result};
use crate::realnum::Interval;

/// Bits of `1/ζ(k+1)` carried by a density run.
const TARGET_BITS: u32 = 128;

#[derive(Debug, Clone, Default)]
pub struct DensityOptions {
    pub workers: usize,
    /// Type bound for reporting `γ`.
    pub tau: Option<BigRational>,
    /// Exponential-type bound for reporting `γ★`.
    pub tau_star: Option<BigRational>,
}

/// Least-squares line through `(ln x, ln |error|)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorFit {
    pub slope: f64,
    pub intercept: f64,
    /// `1 - slope`
    pub gamma_hat: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityRun {
    pub problem: ProblemSpec,
    pub grid: Vec<u64>,
    pub counts: Vec<u64>,
    /// Enclosure of `1/ζ(k+1)`.
    pub target: Interval,
    /// `|N(x) - x/ζ(k+1)|`
    pub errors: Vec<f64>,
    pub fit: ErrorFit,
    /// Grid points left out of the fit because their error was zero.
    pub dropped: Vec<u64>,
    pub theoretical_gamma: Option<Exponent>,
    pub theoretical_gamma_star: Option<Exponent>,
}

/// One row of the `x,count,density,target,abs_error` table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub x: u64,
    pub count: u64,
    pub density: f64,
    pub target: String,
    pub abs_error: f64,
}

impl DensityRun {
    pub fn rows(&self) -> Vec<DensityRow> {
        let target = format!("{}", self.target.lo.to_decimal(20, false));
        self.grid
            .iter()
            .zip(&self.counts)
            .zip(&self.errors)
            .map(|((&x, &count), &abs_error)| DensityRow {
                x,
                count,
                density: count as f64 / x as f64,
                target: target.clone(),
                abs_error,
            })
            .collect()
    }
}

/// Ordinary least squares of `ys` on `xs`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} usable points, need 2", xs.len())));
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all x values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok((slope, intercept, (rss / n).sqrt()))
}

/// Counts `N(x)` over `grid`, measures `|N(x) - x/ζ(k+1)|` and fits its
/// growth exponent.
pub fn density_experiment(problem: &ProblemSpec, grid: &[u64], opts: &DensityOptions) -> Result<DensityRun> {
    if grid.len() < 3 {
        return Err(Error::precondition("density grid needs at least 3 points"));
    }
    if grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition("density grid must be positive and strictly increasing"));
    }
    problem.check_scale(*grid.last().expect("nonempty"))?;
    let target = inverse_zeta(problem.k() as u32 + 1, TARGET_BITS)?;
    let counts: Vec<u64> = pool(opts.workers)?
        .install(|| {
            grid.par_iter()
                .map(|&x| direct_in_pool(problem, x, true))
                .collect::<Vec<Result<u64>>>()
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let t = (target.lo.to_rational() + target.hi.to_rational()) / BigRational::from_integer(2.into());
    let errors: Vec<f64> = grid
        .iter()
        .zip(&counts)
        .map(|(&x, &c)| {
            let e = BigRational::from_integer(BigInt::from(c)) - BigRational::from_integer(BigInt::from(x)) * &t;
            e.abs().to_f64().unwrap_or(f64::NAN)
        })
        .collect();

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut dropped = Vec::new();
    for (&x, &e) in grid.iter().zip(&errors) {
        if e > 0.0 {
            xs.push((x as f64).ln());
            ys.push(e.ln());
        } else {
            dropped.push(x);
        }
    }
    let (slope, intercept, residual) = fit_line(&xs, &ys)?;
    let ms = problem.ms();
    Ok(DensityRun {
        problem: problem.clone(),
        grid: grid.to_vec(),
        counts,
        target,
        errors,
        fit: ErrorFit {
            slope,
            intercept,
            gamma_hat: 1.0 - slope,
            residual,
            points: xs.len(),
        },
        dropped,
        theoretical_gamma: opts
            .tau
            .as_ref()
            .map(|tau| theoretical_gamma(&ms, tau).map(Exponent::Value))
            .transpose()?,
        theoretical_gamma_star: opts
            .tau_star
            .as_ref()
            .map(|ts| theoretical_gamma_star(&ms, ts))
            .transpose()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realnum::RealSpec;

    #[test]
    fn two_point_grid_is_rejected() {
        let p = ProblemSpec::linear(RealSpec::sqrt(2)).unwrap();
        assert!(matches!(
            density_experiment(&p, &[10, 100], &DensityOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn line_fit_recovers_slope() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 + 0.8 * x).collect();
        let (s, c, r) = fit_line(&xs, &ys).unwrap();
        assert!((s - 0.8).abs() < 1e-12 && (c - 0.5).abs() < 1e-12 && r < 1e-12);
    }

    #[test]
    fn small_run_reports_everything() {
        let p = ProblemSpec::linear(RealSpec::sqrt(2)).unwrap();
        let opts = DensityOptions {
            workers: 2,
            tau: Some(BigRational::from_integer(1.into())),
            tau_star: None,
        };
        let run = density_experiment(&p, &[100, 1000, 10_000], &opts).unwrap();
        assert_eq!(run.counts.len(), 3);
        assert_eq!(run.theoretical_gamma.as_ref().unwrap().to_f64(), Some(0.2));
        assert_eq!(run.rows()[0].x, 100);
    }
}

use std::time::{Duration, Instant};

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::mobius::MobiusBlocks;
use super::problem::ProblemSpec;
use crate::error::{Error, Result};

/// Integers handled per parallel task. Fixed so that chunk boundaries, and
/// with them the reported error site, never depend on the worker count.
const CHUNK: u64 = 4096;

/// Möbius values sieved per block on the decomposition route.
const MOBIUS_BLOCK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Direct,
    Mobius,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountResult {
    pub x: u64,
    pub count: u64,
    pub method: CountMethod,
    pub d_cutoff: Option<u64>,
    /// Bound on the omitted terms `|Σ_{d > cutoff} μ(d)·inner_count(d, x)|`.
    pub cutoff_bound: Option<u64>,
    /// Wall time; left out of serialized payloads so they stay reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

/// How the divisibility `d | ⌊α_j (dn)^{m_j} + g_j(dn)⌋` is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InnerMethod {
    /// `{α_j d^{m_j-1} n^{m_j} + g_j(dn)/d} < 1/d`
    #[default]
    Fraction,
    /// `⌊α_j (dn)^{m_j} + g_j(dn)⌋ mod d = 0`
    Floor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    pub workers: usize,
    /// Stop the gcd as soon as it reaches 1.
    pub early_exit: bool,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            workers: 1,
            early_exit: true,
        }
    }
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::ResourceLimit(format!("cannot start {workers} workers: {e}")))
}

/// Whether `gcd(n, ⌊α_1 n⌋, …) = 1`.
fn coprime(problem: &ProblemSpec, n: u64, early_exit: bool) -> Result<bool> {
    let mut g = n as i128;
    for j in 0..problem.k() {
        if early_exit && g == 1 {
            return Ok(true);
        }
        g = g.gcd(&problem.floor_at(j, n)?);
    }
    Ok(g == 1)
}

fn count_range(problem: &ProblemSpec, lo: u64, hi: u64, early_exit: bool) -> Result<u64> {
    let mut c = 0;
    for n in lo..=hi {
        c += coprime(problem, n, early_exit)? as u64;
    }
    Ok(c)
}

/// Counts `n ≤ x` in contiguous chunks on the current rayon pool, summing
/// in chunk order.
pub(crate) fn direct_in_pool(problem: &ProblemSpec, x: u64, early_exit: bool) -> Result<u64> {
    let chunks = x.div_ceil(CHUNK);
    let parts: Vec<Result<u64>> = (0..chunks)
        .into_par_iter()
        .map(|i| count_range(problem, i * CHUNK + 1, ((i + 1) * CHUNK).min(x), early_exit))
        .collect();
    parts.into_iter().sum()
}

/// `N(x)` by evaluating every gcd directly, using one worker.
pub fn direct_count(problem: &ProblemSpec, x: u64) -> Result<CountResult> {
    direct_count_with(problem, x, CountOptions::default())
}

/// `N(x)` by evaluating every gcd directly.
///
/// The result is identical for every worker count.
pub fn direct_count_with(problem: &ProblemSpec, x: u64, opts: CountOptions) -> Result<CountResult> {
    if x == 0 {
        return Err(Error::precondition("x must be at least 1"));
    }
    problem.check_scale(x)?;
    let start = Instant::now();
    let count = pool(opts.workers)?.install(|| direct_in_pool(problem, x, opts.early_exit))?;
    Ok(CountResult {
        x,
        count,
        method: CountMethod::Direct,
        d_cutoff: None,
        cutoff_bound: None,
        elapsed: start.elapsed(),
    })
}

/// Whether `ν_{d,n}` lies in `[0, 1/d)^k`.
pub fn inner_hit(problem: &ProblemSpec, d: u64, n: u64, method: InnerMethod) -> Result<bool> {
    for j in 0..problem.k() {
        let hit = match method {
            InnerMethod::Fraction => problem.frac_test(j, d, n)?,
            InnerMethod::Floor => problem.floor_at(j, d * n)?.rem_euclid(d as i128) == 0,
        };
        if !hit {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `#{n ≤ x/d : d | ⌊α_j (dn)^{m_j} + g_j(dn)⌋ for all j}`
pub fn inner_count(problem: &ProblemSpec, d: u64, x: u64) -> Result<u64> {
    inner_count_with(problem, d, x, InnerMethod::default())
}

pub fn inner_count_with(problem: &ProblemSpec, d: u64, x: u64, method: InnerMethod) -> Result<u64> {
    if d == 0 {
        return Err(Error::precondition("d must be at least 1"));
    }
    let mut c = 0;
    for n in 1..=x / d {
        c += inner_hit(problem, d, n, method)? as u64;
    }
    Ok(c)
}

/// `N(x) = Σ_{d ≤ D} μ(d)·inner_count(d, x)` over squarefree `d`, with
/// `D = x` unless a cutoff is given. Without a cutoff this equals
/// [`direct_count`] exactly.
pub fn mobius_count(problem: &ProblemSpec, x: u64, d_cutoff: Option<u64>) -> Result<CountResult> {
    mobius_count_with(problem, x, d_cutoff, 1, InnerMethod::default())
}

pub fn mobius_count_with(
    problem: &ProblemSpec,
    x: u64,
    d_cutoff: Option<u64>,
    workers: usize,
    method: InnerMethod,
) -> Result<CountResult> {
    if x == 0 {
        return Err(Error::precondition("x must be at least 1"));
    }
    if d_cutoff.is_some_and(|c| c == 0 || c > x) {
        return Err(Error::precondition("d_cutoff must lie in 1..=x"));
    }
    problem.check_scale(x)?;
    let limit = d_cutoff.unwrap_or(x);
    let start = Instant::now();
    let pool = pool(workers)?;
    let mut total: i64 = 0;
    for (lo, block) in MobiusBlocks::new(limit, MOBIUS_BLOCK) {
        let terms: Vec<Result<i64>> = pool.install(|| {
            block
                .par_iter()
                .enumerate()
                .filter(|(_, &mu)| mu != 0)
                .map(|(i, &mu)| {
                    let d = lo + i as u64;
                    Ok(mu as i64 * inner_count_with(problem, d, x, method)? as i64)
                })
                .collect()
        });
        for t in terms {
            total += t?;
        }
    }
    let count = u64::try_from(total).map_err(|_| {
        Error::Precondition(format!("truncated Möbius sum is negative ({total}); raise the cutoff"))
    })?;
    // Each omitted term has |μ(d)·inner_count| ≤ ⌊x/d⌋.
    let cutoff_bound = d_cutoff.map(|c| {
        MobiusBlocks::new(x, MOBIUS_BLOCK)
            .flat_map(|(lo, b)| b.into_iter().enumerate().map(move |(i, mu)| (lo + i as u64, mu)))
            .filter(|&(d, mu)| d > c && mu != 0)
            .map(|(d, _)| x / d)
            .sum()
    });
    Ok(CountResult {
        x,
        count,
        method: CountMethod::Mobius,
        d_cutoff,
        cutoff_bound,
        elapsed: start.elapsed(),
    })
}

/// `T(x, d) = #{n ≤ x : d | n and d | ⌊α_1 n⌋}`
pub fn tail_count(problem: &ProblemSpec, d: u64, x: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::precondition("d must be at least 1"));
    }
    let mut c = 0;
    for n in (d..=x).step_by(d as usize) {
        c += (problem.floor_at(0, n)?.rem_euclid(d as i128) == 0) as u64;
    }
    Ok(c)
}

/// `T(x, d)` in its rescaled form `#{n ≤ x/d : {α_1 n} < 1/d}`.
pub fn tail_count_rescaled(problem: &ProblemSpec, d: u64, x: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::precondition("d must be at least 1"));
    }
    let alpha = problem.alpha(0);
    let mut c = 0;
    for n in 1..=x / d {
        c += alpha.frac_below(n as u128, 1, d)? as u64;
    }
    Ok(c)
}

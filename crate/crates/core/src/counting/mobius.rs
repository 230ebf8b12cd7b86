use crate::error::{Error, Result};

/// Default memory budget for a full Möbius table, in bytes.
pub const DEFAULT_SIEVE_BUDGET: u64 = 1 << 30;

/// `μ(d)` for `1 ≤ d ≤ limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobiusTable {
    /// `values[d - 1] = μ(d)`
    values: Vec<i8>,
}

impl MobiusTable {
    pub fn limit(&self) -> u64 {
        self.values.len() as u64
    }

    /// `μ(d)`; panics outside `1..=limit`.
    pub fn mu(&self, d: u64) -> i8 {
        self.values[(d - 1) as usize]
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.values
    }

    /// `Σ_{d ≤ limit} μ(d)`
    pub fn mertens(&self) -> i64 {
        self.values.iter().map(|&m| m as i64).sum()
    }
}

/// Linear sieve for `μ` up to `limit` within [`DEFAULT_SIEVE_BUDGET`].
pub fn mobius_sieve(limit: u64) -> Result<MobiusTable> {
    mobius_sieve_with_budget(limit, DEFAULT_SIEVE_BUDGET)
}

/// Linear sieve; fails with `ResourceLimit` when the table would not fit
/// in `budget` bytes. Use [`MobiusBlocks`] beyond that.
pub fn mobius_sieve_with_budget(limit: u64, budget: u64) -> Result<MobiusTable> {
    if limit == 0 {
        return Err(Error::precondition("sieve limit must be at least 1"));
    }
    // One byte per value plus the prime list (about limit/ln(limit) u32s).
    let estimate = limit + 4 * limit / (limit as f64).ln().max(1.0) as u64;
    if estimate > budget {
        return Err(Error::ResourceLimit(format!(
            "Möbius table to {limit} needs about {estimate} bytes, budget {budget}"
        )));
    }
    let n = limit as usize;
    let mut mu = vec![0i8; n + 1];
    let mut composite = vec![false; n + 1];
    let mut primes: Vec<usize> = Vec::new();
    mu[1] = 1;
    for i in 2..=n {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > n {
                break;
            }
            composite[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu.remove(0);
    Ok(MobiusTable { values: mu })
}

/// Segmented Möbius sieve: yields `(start, μ(start..start+len))` blocks
/// covering `1..=limit` in order, using memory proportional to the block
/// length plus `√limit`.
#[derive(Debug, Clone)]
pub struct MobiusBlocks {
    primes: Vec<u64>,
    next: u64,
    limit: u64,
    block: u64,
}

impl MobiusBlocks {
    pub fn new(limit: u64, block: u64) -> Self {
        let root = (limit as f64).sqrt() as u64 + 2;
        let mut is_p = vec![true; root as usize + 1];
        let mut primes = Vec::new();
        for i in 2..=root as usize {
            if is_p[i] {
                primes.push(i as u64);
                for k in (i * i..=root as usize).step_by(i) {
                    is_p[k] = false;
                }
            }
        }
        MobiusBlocks {
            primes,
            next: 1,
            limit,
            block: block.max(1),
        }
    }
}

impl Iterator for MobiusBlocks {
    type Item = (u64, Vec<i8>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next > self.limit {
            return None;
        }
        let lo = self.next;
        let hi = (lo + self.block - 1).min(self.limit);
        let len = (hi - lo + 1) as usize;
        let mut mu = vec![1i8; len];
        // Product of the small primes found so far, per entry.
        let mut rest: Vec<u64> = (lo..=hi).collect();
        for &p in &self.primes {
            if p * p > hi {
                break;
            }
            let first = lo.div_ceil(p) * p;
            for v in (first..=hi).step_by(p as usize) {
                let i = (v - lo) as usize;
                mu[i] = -mu[i];
                rest[i] /= p;
            }
            let sq = p * p;
            let first = lo.div_ceil(sq) * sq;
            for v in (first..=hi).step_by(sq as usize) {
                mu[(v - lo) as usize] = 0;
            }
        }
        for (m, r) in mu.iter_mut().zip(&rest) {
            // A cofactor above 1 is a single prime larger than √hi.
            if *m != 0 && *r > 1 {
                *m = -*m;
            }
        }
        self.next = hi + 1;
        Some((lo, mu))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let t = mobius_sieve(6).unwrap();
        assert_eq!(t.as_slice(), &[1, -1, -1, 0, -1, 1]);
        assert_eq!(t.mu(4), 0);
    }

    #[test]
    fn segmented_matches_linear() {
        let t = mobius_sieve(20_000).unwrap();
        let seg: Vec<i8> = MobiusBlocks::new(20_000, 777).flat_map(|(_, b)| b).collect();
        assert_eq!(seg.as_slice(), t.as_slice());
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            mobius_sieve_with_budget(1_000_000, 1000),
            Err(Error::ResourceLimit(_))
        ));
    }
}

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use super::points::PointSet;
use crate::error::{Error, Result};

/// Default work budget (point visits) for [`discrepancy_box_lower`].
pub const DEFAULT_BOX_BUDGET: u64 = 100_000_000;

/// Default cap on the number of frequency vectors in [`koksma_rhs`].
pub const DEFAULT_FREQUENCY_BUDGET: u64 = 1_000_000;

/// Compensated (Neumaier) sum of complex terms.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ComplexSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl ComplexSum {
    pub fn add(&mut self, re: f64, im: f64) {
        neumaier(&mut self.re, &mut self.re_c, re);
        neumaier(&mut self.im, &mut self.im_c, im);
    }

    /// Adds `e(t) = exp(2πit)` for `t` given in turns.
    pub fn add_turns(&mut self, t: f64) {
        let (s, c) = (TAU * t).sin_cos();
        self.add(c, s);
    }

    pub fn value(&self) -> (f64, f64) {
        (self.re + self.re_c, self.im + self.im_c)
    }

    pub fn norm(&self) -> f64 {
        let (re, im) = self.value();
        re.hypot(im)
    }
}

/// Largest `|count/N - weight·length|` over half-open intervals of one
/// coordinate, given that coordinate's values in increasing order.
///
/// Over-full intervals are `[y_i, y_j⁺)`; under-full ones are `(y_i, y_j)`
/// with `0` and `1` allowed as closed ends.
fn interval_scan(ys: &[f64], n_total: f64, weight: f64) -> f64 {
    let mut best = 0.0f64;
    // [y_i, y_j⁺): (j - i + 1)/N - w(y_j - y_i)
    let mut min_left = f64::INFINITY;
    for (j, &y) in ys.iter().enumerate() {
        min_left = min_left.min(j as f64 / n_total - weight * y);
        best = best.max((j + 1) as f64 / n_total - weight * y - min_left);
    }
    // z_0 = 0, z_1..z_M = ys, z_{M+1} = 1: w(z_j - z_i) - (j - i - 1)/N
    let mut max_left = 0.0f64; // i = 0: 0/N - w·0
    for (idx, &z) in ys.iter().chain(std::iter::once(&1.0)).enumerate() {
        let j = idx + 1;
        best = best.max(weight * z - (j - 1) as f64 / n_total + max_left);
        max_left = max_left.max(j as f64 / n_total - weight * z);
    }
    best
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// Extreme discrepancy of a one-dimensional point set over half-open
/// subintervals of `[0, 1)`, exact in `O(N log N)`.
pub fn discrepancy_exact_1d(ps: &PointSet) -> Result<f64> {
    if ps.dim != 1 {
        return Err(Error::precondition("exact discrepancy needs dimension 1"));
    }
    if ps.is_empty() {
        return Err(Error::precondition("point set is empty"));
    }
    Ok(interval_scan(&sorted(ps.column(0)), ps.len() as f64, 1.0))
}

/// A lower bound on the extreme discrepancy from a search over boxes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxLower {
    pub value: f64,
    /// The corner grid exceeded the budget and was thinned.
    pub sampled: bool,
}

#[derive(Debug, Clone, Copy)]
enum Lo {
    Zero,
    Closed(f64),
    Open(f64),
}

#[derive(Debug, Clone, Copy)]
enum Hi {
    One,
    Before(f64),
    Through(f64),
}

#[derive(Debug, Clone, Copy)]
struct Side {
    lo: Lo,
    hi: Hi,
}

impl Side {
    fn contains(&self, y: f64) -> bool {
        let above = match self.lo {
            Lo::Zero => true,
            Lo::Closed(a) => y >= a,
            Lo::Open(a) => y > a,
        };
        let below = match self.hi {
            Hi::One => true,
            Hi::Before(b) => y < b,
            Hi::Through(b) => y <= b,
        };
        above && below
    }

    fn length(&self) -> f64 {
        let a = match self.lo {
            Lo::Zero => 0.0,
            Lo::Closed(a) | Lo::Open(a) => a,
        };
        let b = match self.hi {
            Hi::One => 1.0,
            Hi::Before(b) | Hi::Through(b) => b,
        };
        b - a
    }
}

/// All candidate sides built from a sorted list of distinct values.
fn sides(values: &[f64]) -> Vec<Side> {
    let mut los = vec![(0.0, Lo::Zero)];
    let mut his = Vec::new();
    for &c in values {
        los.push((c, Lo::Closed(c)));
        los.push((c, Lo::Open(c)));
        his.push((c, Hi::Before(c)));
        his.push((c, Hi::Through(c)));
    }
    his.push((1.0, Hi::One));
    let mut out = Vec::new();
    for &(a, lo) in &los {
        for &(b, hi) in &his {
            let ok = match (lo, hi) {
                (Lo::Open(_), Hi::Before(_)) => a < b,
                (_, Hi::Before(_)) => a < b,
                _ => a <= b,
            };
            if ok {
                out.push(Side { lo, hi });
            }
        }
    }
    out
}

fn distinct(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Every `stride`-th value.
fn thin(values: &[f64], stride: usize) -> Vec<f64> {
    values.iter().step_by(stride.max(1)).copied().collect()
}

/// A lower bound on the extreme discrepancy with the default budget.
pub fn discrepancy_box_lower(ps: &PointSet) -> Result<BoxLower> {
    discrepancy_box_lower_with_budget(ps, DEFAULT_BOX_BUDGET)
}

/// Maximizes `|A/N - volume|` over boxes whose sides end at point
/// coordinates, their one-sided limits, `0` or `1`. In dimension 1 this is
/// the exact discrepancy. When the full corner grid would exceed `budget`
/// point visits, the candidate coordinates are thinned evenly and the
/// result is marked as sampled.
pub fn discrepancy_box_lower_with_budget(ps: &PointSet, budget: u64) -> Result<BoxLower> {
    if ps.is_empty() {
        return Err(Error::precondition("point set is empty"));
    }
    let n = ps.len();
    let last = ps.dim - 1;
    // Points ordered by the last coordinate, so filtered subsets stay sorted.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| ps.points[a][last].total_cmp(&ps.points[b][last]));

    let full: Vec<Vec<f64>> = (0..last).map(|j| distinct(ps.column(j))).collect();
    let cost = |vals: &[Vec<f64>]| -> f64 {
        vals.iter()
            .map(|v| {
                let r = v.len() as f64;
                (2.0 * r + 1.0) * (2.0 * r + 1.0) / 2.0 + 1.0
            })
            .product::<f64>()
            * n as f64
    };
    let mut stride = 1usize;
    let mut values = full.clone();
    while cost(&values) > budget as f64 {
        stride *= 2;
        values = full.iter().map(|v| thin(v, stride)).collect();
        if values.iter().all(|v| v.len() <= 1) {
            break;
        }
    }
    let sampled = stride > 1;
    let side_lists: Vec<Vec<Side>> = values.iter().map(|v| sides(v)).collect();

    // Enumerate combinations of sides for the leading coordinates.
    let mut combos: Vec<Vec<Side>> = vec![Vec::new()];
    for list in &side_lists {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                list.iter().map(move |s| {
                    let mut c = c.clone();
                    c.push(*s);
                    c
                })
            })
            .collect();
    }
    let n_total = n as f64;
    let best = combos
        .par_iter()
        .map(|combo| {
            let weight: f64 = combo.iter().map(Side::length).product();
            let ys: Vec<f64> = order
                .iter()
                .map(|&i| &ps.points[i])
                .filter(|p| combo.iter().enumerate().all(|(j, s)| s.contains(p[j])))
                .map(|p| p[last])
                .collect();
            interval_scan(&ys, n_total, weight)
        })
        .reduce(|| 0.0, f64::max);
    Ok(BoxLower {
        value: best,
        sampled,
    })
}

/// One frequency vector's contribution to the Koksma–Szüsz bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylTerm {
    pub h: Vec<i64>,
    /// `|Σ_n e(⟨h, v_n⟩)|`
    pub magnitude: f64,
    /// `Π max(|h_j|, 1)`
    pub r_h: f64,
}

/// Every `h ∈ Z^dim` with `0 < ‖h‖_∞ ≤ big_h`.
fn frequencies(dim: usize, big_h: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-big_h..=big_h).map(move |x| {
                    let mut v = v.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&x| x != 0));
    out
}

/// `C^k (1/H + (1/N) Σ_{0<‖h‖≤H} |Σ_n e(⟨h, v_n⟩)| / r(h))` and its terms.
pub fn koksma_rhs(ps: &PointSet, big_h: u32, c: f64) -> Result<(f64, Vec<WeylTerm>)> {
    if big_h == 0 {
        return Err(Error::precondition("H must be at least 1"));
    }
    if ps.is_empty() {
        return Err(Error::precondition("point set is empty"));
    }
    let count = (2 * big_h as u64 + 1).checked_pow(ps.dim as u32).unwrap_or(u64::MAX);
    if count > DEFAULT_FREQUENCY_BUDGET {
        return Err(Error::ResourceLimit(format!(
            "{count} frequency vectors for H = {big_h} in dimension {}",
            ps.dim
        )));
    }
    let terms: Vec<WeylTerm> = frequencies(ps.dim, big_h as i64)
        .into_par_iter()
        .map(|h| {
            let mut s = ComplexSum::default();
            for p in &ps.points {
                let t: f64 = h.iter().zip(p).map(|(&hj, &x)| hj as f64 * x).sum();
                s.add_turns(t - t.floor());
            }
            let r_h = h.iter().map(|&x| (x.abs() as f64).max(1.0)).product();
            WeylTerm {
                h,
                magnitude: s.norm(),
                r_h,
            }
        })
        .collect();
    let sum: f64 = terms.iter().map(|t| t.magnitude / t.r_h).sum();
    let rhs = c.powi(ps.dim as i32) * (1.0 / big_h as f64 + sum / ps.len() as f64);
    Ok((rhs, terms))
}

/// The default Koksma–Szüsz constant: 3 in dimension 1, `3^k` otherwise.
pub fn default_koksma_constant(dim: usize) -> f64 {
    if dim == 1 {
        3.0
    } else {
        3f64.powi(dim as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    #[serde(rename = "N")]
    pub n: usize,
    /// Exact value, in dimension 1 only.
    pub exact: Option<f64>,
    pub box_lower: f64,
    pub sampled: bool,
    pub et_upper: f64,
    #[serde(rename = "H")]
    pub big_h: u32,
    #[serde(rename = "C")]
    pub c: f64,
    pub weyl_terms: Vec<WeylTerm>,
}

/// The discrepancy of `ps` bracketed between a box search and the
/// Koksma–Szüsz right-hand side with constant `c`.
pub fn et_koksma_upper(ps: &PointSet, big_h: u32, c: f64) -> Result<DiscrepancyReport> {
    let (et_upper, weyl_terms) = koksma_rhs(ps, big_h, c)?;
    let exact = (ps.dim == 1).then(|| discrepancy_exact_1d(ps)).transpose()?;
    let lower = discrepancy_box_lower(ps)?;
    Ok(DiscrepancyReport {
        n: ps.len(),
        exact,
        box_lower: lower.value,
        sampled: lower.sampled,
        et_upper,
        big_h,
        c,
        weyl_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(v: Vec<f64>) -> PointSet {
        PointSet::new(1, v.into_iter().map(|x| vec![x]).collect(), "test").unwrap()
    }

    #[test]
    fn single_point_at_zero() {
        assert!((discrepancy_exact_1d(&one_d(vec![0.0])).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn centered_lattice() {
        for n in [1usize, 2, 5, 17, 100] {
            let ps = one_d((1..=n).map(|i| (2 * i - 1) as f64 / (2 * n) as f64).collect());
            let d = discrepancy_exact_1d(&ps).unwrap();
            assert!((d - 1.0 / n as f64).abs() < 1e-12, "n={n}: {d}");
        }
    }

    #[test]
    fn single_point_in_the_middle_of_the_square() {
        let ps = PointSet::new(2, vec![vec![0.5, 0.5]], "test").unwrap();
        // [0, 0.5⁺)² gives 0.75; boxes shrinking onto the point give 1.
        let b = discrepancy_box_lower(&ps).unwrap();
        assert_eq!(b.value, 1.0);
        assert!(!b.sampled);
    }

    #[test]
    fn box_search_in_one_dimension_is_exact() {
        let ps = one_d(vec![0.1, 0.15, 0.7, 0.71, 0.9]);
        let exact = discrepancy_exact_1d(&ps).unwrap();
        assert_eq!(discrepancy_box_lower(&ps).unwrap().value, exact);
    }

    #[test]
    fn small_budget_thins_the_grid() {
        let pts: Vec<Vec<f64>> = (0..50).map(|i| vec![(i as f64 * 0.618) % 1.0, (i as f64 * 0.414) % 1.0]).collect();
        let ps = PointSet::new(2, pts, "test").unwrap();
        let full = discrepancy_box_lower(&ps).unwrap();
        let thin = discrepancy_box_lower_with_budget(&ps, 10_000).unwrap();
        assert!(thin.sampled && !full.sampled);
        assert!(thin.value <= full.value);
    }

    #[test]
    fn trivial_koksma_bound() {
        let ps = one_d(vec![0.3, 0.6]);
        let (rhs, terms) = koksma_rhs(&ps, 1, 3.0).unwrap();
        assert_eq!(terms.len(), 2);
        assert!(rhs >= 3.0);
    }
}

use serde::Serialize;

use crate::counting::ProblemSpec;
use crate::error::{Error, Result};

/// Where a point set came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// `ν_{d,1}, …, ν_{d,N}` of a counting problem.
    Nu { problem: String, d: u64, n: u64 },
    Synthetic(String),
}

/// `N` points in `[0, 1)^dim`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSet {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub provenance: Provenance,
    /// Every stored coordinate is within this distance of the true value.
    pub radius: f64,
}

/// Largest `f64` below 1.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// A 64-bit fixed-point fraction as an `f64` in `[0, 1)`.
pub(crate) fn unit_f64(f: u64) -> f64 {
    (f as f64 / 2f64.powi(64)).min(BELOW_ONE)
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Vec<f64>>, tag: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::precondition("dimension must be positive"));
        }
        for p in &points {
            if p.len() != dim || p.iter().any(|c| !(0.0..1.0).contains(c)) {
                return Err(Error::precondition(format!("point {p:?} is not in [0,1)^{dim}")));
            }
        }
        Ok(PointSet {
            dim,
            points,
            provenance: Provenance::Synthetic(tag.into()),
            radius: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Coordinate `j` of every point.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.points.iter().map(|p| p[j]).collect()
    }
}

/// `ν_{d,n} = ({α_j d^{m_j-1} n^{m_j} + g_j(dn)/d})_j` for `n = 1, …, N`.
///
/// `ν_{d,n}` lies in `[0, 1/d)^k` exactly when `d` divides every
/// `⌊α_j (dn)^{m_j} + g_j(dn)⌋`.
pub fn nu_sequence(problem: &ProblemSpec, d: u64, big_n: u64) -> Result<PointSet> {
    if d == 0 {
        return Err(Error::precondition("d must be at least 1"));
    }
    let points = (1..=big_n)
        .map(|n| {
            (0..problem.k())
                .map(|j| problem.phase_u64(j, d, n, 1).map(unit_f64))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(PointSet {
        dim: problem.k(),
        points,
        provenance: Provenance::Nu {
            problem: problem.to_string(),
            d,
            n: big_n,
        },
        // 2^-60 from the fraction plus half an f64 ulp below 1.
        radius: f64::EPSILON / 4.0 + 2f64.powi(-60),
    })
}

//! Exact quadratic-cost optimal transport on a finite space.

mod oracle;
mod simplex;

pub use oracle::{brute_force_w2, ORACLE_MAX_SUPPORT};

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;

/// Probability vectors must sum to one within this tolerance.
pub const MARGINAL_TOL: f64 = 1e-9;

/// A coupling between two weight vectors on the same space.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    n: usize,
    coupling: Vec<f64>,
    pub cost: f64,
    pub row_residual: Vec<f64>,
    pub col_residual: Vec<f64>,
}

impl TransportPlan {
    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.coupling[i * self.n + j]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Nonzero cells as `(i, j, mass)` in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        self.coupling
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(|(k, &m)| (k / self.n, k % self.n, m))
            .collect()
    }
}

#[derive(Serialize)]
struct Triplet {
    i: usize,
    j: usize,
    mass: f64,
}

impl Serialize for TransportPlan {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let cells = self.triplets();
        let mut seq = s.serialize_seq(Some(cells.len()))?;
        for (i, j, mass) in cells {
            seq.serialize_element(&Triplet { i, j, mass })?;
        }
        seq.end()
    }
}

pub(crate) fn check_probability(space: &MetricMeasureSpace, mu: &[f64], label: &str) -> Result<()> {
    if mu.len() != space.len() {
        return Err(Error::FieldLength {
            expected: space.len(),
            got: mu.len(),
        });
    }
    if let Some((i, w)) = mu.iter().enumerate().find(|(_, w)| !(**w >= 0.0)) {
        return Err(Error::Marginal(format!("{label} has negative weight {w} at {i}")));
    }
    let sum: f64 = mu.iter().sum();
    if (sum - 1.0).abs() > MARGINAL_TOL {
        return Err(Error::Marginal(format!("{label} sums to {sum}, not 1")));
    }
    Ok(())
}

/// `W₂(μ₀, μ₁)` and an optimal plan. Zero-weight points are dropped before
/// solving and come back as empty rows and columns.
pub fn wasserstein2(space: &MetricMeasureSpace, mu0: &[f64], mu1: &[f64]) -> Result<(f64, TransportPlan)> {
    check_probability(space, mu0, "mu0")?;
    check_probability(space, mu1, "mu1")?;
    let n = space.len();
    let rows: Vec<usize> = (0..n).filter(|&i| mu0[i] > 0.0).collect();
    let cols: Vec<usize> = (0..n).filter(|&j| mu1[j] > 0.0).collect();
    let supply: Vec<f64> = rows.iter().map(|&i| mu0[i]).collect();
    let demand: Vec<f64> = cols.iter().map(|&j| mu1[j]).collect();
    let mut cost = Vec::with_capacity(rows.len() * cols.len());
    for &i in &rows {
        for &j in &cols {
            let d = space.dist(i, j);
            cost.push(d * d);
        }
    }
    let cells = simplex::solve(&supply, &demand, &cost);

    let mut coupling = vec![0.0; n * n];
    for c in &cells {
        coupling[rows[c.i] * n + cols[c.j]] += c.flow;
    }
    let mut total = 0.0;
    let mut row_residual = mu0.iter().map(|w| -w).collect::<Vec<_>>();
    let mut col_residual = mu1.iter().map(|w| -w).collect::<Vec<_>>();
    for i in 0..n {
        for j in 0..n {
            let m = coupling[i * n + j];
            if m != 0.0 {
                let d = space.dist(i, j);
                total += m * d * d;
                row_residual[i] += m;
                col_residual[j] += m;
            }
        }
    }
    let plan = TransportPlan {
        n,
        coupling,
        cost: total,
        row_residual,
        col_residual,
    };
    Ok((total.max(0.0).sqrt(), plan))
}

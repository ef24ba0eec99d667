//! Exhaustive vertex enumeration for tiny transport problems.
//!
//! An optimum of the transport LP is attained at a vertex of the
//! transportation polytope, and every vertex is the unique flow supported on
//! some spanning tree of the bipartite support graph. For supports of at most
//! four points on each side there are at most `C(16, 7) = 11440` candidate
//! edge sets, so all of them are tried.

use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;

use super::check_probability;

pub const ORACLE_MAX_SUPPORT: usize = 4;

/// `W₂` by enumerating all basic feasible couplings. Independent of the
/// simplex solver; used to cross-check it.
pub fn brute_force_w2(space: &MetricMeasureSpace, mu0: &[f64], mu1: &[f64]) -> Result<f64> {
    check_probability(space, mu0, "mu0")?;
    check_probability(space, mu1, "mu1")?;
    let rows: Vec<usize> = (0..space.len()).filter(|&i| mu0[i] > 0.0).collect();
    let cols: Vec<usize> = (0..space.len()).filter(|&j| mu1[j] > 0.0).collect();
    if rows.len() > ORACLE_MAX_SUPPORT || cols.len() > ORACLE_MAX_SUPPORT {
        return Err(Error::InvalidArgument(format!(
            "oracle supports at most {ORACLE_MAX_SUPPORT} points per side, got {} and {}",
            rows.len(),
            cols.len()
        )));
    }
    let (m, n) = (rows.len(), cols.len());
    let edges = m * n;
    let need = m + n - 1;
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << edges) {
        if mask.count_ones() as usize != need {
            continue;
        }
        let cells: Vec<(usize, usize)> = (0..edges)
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| (k / n, k % n))
            .collect();
        if !spans(&cells, m, n) {
            continue;
        }
        let supply: Vec<f64> = rows.iter().map(|&i| mu0[i]).collect();
        let demand: Vec<f64> = cols.iter().map(|&j| mu1[j]).collect();
        let flows = tree_flows(&cells, supply, demand);
        if flows.iter().any(|&f| f < -1e-12) {
            continue;
        }
        let cost: f64 = cells
            .iter()
            .zip(&flows)
            .map(|(&(i, j), f)| f.max(0.0) * space.dist(rows[i], cols[j]).powi(2))
            .sum();
        best = best.min(cost);
    }
    Ok(best.max(0.0).sqrt())
}

fn spans(cells: &[(usize, usize)], m: usize, n: usize) -> bool {
    let mut parent: Vec<usize> = (0..m + n).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    for &(i, j) in cells {
        let (a, b) = (find(&mut parent, i), find(&mut parent, m + j));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

// Peel leaves: a leaf's only edge must carry the leaf's remaining mass.
fn tree_flows(cells: &[(usize, usize)], mut supply: Vec<f64>, mut demand: Vec<f64>) -> Vec<f64> {
    let m = supply.len();
    let mut degree = vec![0usize; m + demand.len()];
    for &(i, j) in cells {
        degree[i] += 1;
        degree[m + j] += 1;
    }
    let mut flows = vec![0.0; cells.len()];
    let mut done = vec![false; cells.len()];
    for _ in 0..cells.len() {
        let (k, leaf_is_row) = cells
            .iter()
            .enumerate()
            .filter(|(k, _)| !done[*k])
            .find_map(|(k, &(i, j))| {
                if degree[i] == 1 {
                    Some((k, true))
                } else if degree[m + j] == 1 {
                    Some((k, false))
                } else {
                    None
                }
            })
            .expect("a forest always has a leaf");
        let (i, j) = cells[k];
        let f = if leaf_is_row { supply[i] } else { demand[j] };
        flows[k] = f;
        supply[i] -= f;
        demand[j] -= f;
        degree[i] -= 1;
        degree[m + j] -= 1;
        done[k] = true;
    }
    flows
}

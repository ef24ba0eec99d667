//! Primal transportation simplex with Bland's anti-cycling rule.
//!
//! The basis is a spanning tree of the bipartite row/column graph with exactly
//! `m + n - 1` cells; degenerate (zero-flow) basic cells are kept explicitly.

use std::collections::VecDeque;

/// A basic cell and its flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cell {
    pub i: usize,
    pub j: usize,
    pub flow: f64,
}

struct Basis {
    m: usize,
    n: usize,
    cells: Vec<Cell>,
    // cell index (i * n + j) -> slot in `cells`
    slot: Vec<Option<usize>>,
}

impl Basis {
    fn new(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            cells: Vec::with_capacity(m + n - 1),
            slot: vec![None; m * n],
        }
    }

    fn push(&mut self, i: usize, j: usize, flow: f64) {
        self.slot[i * self.n + j] = Some(self.cells.len());
        self.cells.push(Cell { i, j, flow });
    }

    fn remove(&mut self, s: usize) {
        let c = self.cells.swap_remove(s);
        self.slot[c.i * self.n + c.j] = None;
        if s < self.cells.len() {
            let moved = self.cells[s];
            self.slot[moved.i * self.n + moved.j] = Some(s);
        }
    }

    /// Adjacency over nodes `0..m` (rows) and `m..m+n` (columns); each entry is
    /// `(neighbour, slot)`.
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.m + self.n];
        for (s, c) in self.cells.iter().enumerate() {
            adj[c.i].push((self.m + c.j, s));
            adj[self.m + c.j].push((c.i, s));
        }
        adj
    }
}

fn northwest_corner(supply: &[f64], demand: &[f64]) -> Basis {
    let (m, n) = (supply.len(), demand.len());
    let mut basis = Basis::new(m, n);
    let mut s = supply.to_vec();
    let mut d = demand.to_vec();
    let (mut i, mut j) = (0, 0);
    loop {
        let x = s[i].min(d[j]).max(0.0);
        basis.push(i, j, x);
        s[i] -= x;
        d[j] -= x;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if i == m - 1 {
            j += 1;
        } else if j == n - 1 || s[i] <= d[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    // The last cell absorbs rounding so that the marginals are matched.
    debug_assert_eq!(basis.cells.len(), m + n - 1);
    basis
}

/// Solves `min Σ c_ij x_ij` over couplings with the given marginals. `cost`
/// is row-major `m × n`. Both marginals must be positive and sum to the same
/// total (up to rounding).
pub(crate) fn solve(supply: &[f64], demand: &[f64], cost: &[f64]) -> Vec<Cell> {
    let (m, n) = (supply.len(), demand.len());
    assert!(m > 0 && n > 0 && cost.len() == m * n);
    let mut basis = northwest_corner(supply, demand);
    let scale = cost.iter().fold(0.0f64, |a, c| a.max(c.abs())).max(1e-300);
    let price_tol = 1e-12 * scale;
    let mut u = vec![0.0; m];
    let mut v = vec![0.0; n];
    let max_iter = 100 * (m * n + m + n);

    for _ in 0..max_iter {
        let adj = basis.adjacency();
        // Dual potentials along the tree, rooted at row 0.
        let mut seen = vec![false; m + n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        u[0] = 0.0;
        while let Some(a) = queue.pop_front() {
            for &(b, s) in &adj[a] {
                if seen[b] {
                    continue;
                }
                seen[b] = true;
                let c = basis.cells[s];
                let cij = cost[c.i * n + c.j];
                if b >= m {
                    v[b - m] = cij - u[a];
                } else {
                    u[b] = cij - v[a - m];
                }
                queue.push_back(b);
            }
        }

        // Bland: first improving cell in row-major order.
        let entering = (0..m * n).find(|&k| basis.slot[k].is_none() && cost[k] - u[k / n] - v[k % n] < -price_tol);
        let Some(k) = entering else {
            break;
        };
        let (ei, ej) = (k / n, k % n);

        // Tree path from column node ej back to row node ei.
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; m + n];
        let mut seen = vec![false; m + n];
        seen[ei] = true;
        let mut queue = VecDeque::from([ei]);
        let target = m + ej;
        while let Some(a) = queue.pop_front() {
            if a == target {
                break;
            }
            for &(b, s) in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    parent[b] = Some((a, s));
                    queue.push_back(b);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = target;
        while node != ei {
            let (prev, s) = parent[node].expect("basis is a spanning tree");
            path.push(s);
            node = prev;
        }
        // Alternate signs starting with "-" on the cell adjacent to column ej.
        let minus: Vec<usize> = path.iter().copied().step_by(2).collect();
        let plus: Vec<usize> = path.iter().copied().skip(1).step_by(2).collect();
        let theta = minus.iter().map(|&s| basis.cells[s].flow).fold(f64::INFINITY, f64::min);
        let leaving = minus
            .iter()
            .copied()
            .filter(|&s| basis.cells[s].flow <= theta)
            .min_by_key(|&s| basis.cells[s].i * n + basis.cells[s].j)
            .expect("cycle has a minus cell");
        for &s in &minus {
            basis.cells[s].flow = (basis.cells[s].flow - theta).max(0.0);
        }
        for &s in &plus {
            basis.cells[s].flow += theta;
        }
        basis.remove(leaving);
        basis.push(ei, ej, theta);
    }
    basis.cells
}

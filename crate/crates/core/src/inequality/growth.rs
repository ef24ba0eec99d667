//! Volume growth (Bishop–Gromov) and diameter (Bonnet–Myers) checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;

/// Constant in `diam ≤ C·sqrt(N/K)`.
pub const BONNET_MYERS_C: f64 = 7.7;

fn check_grid(r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty()
        || r_grid.iter().any(|r| !(*r > 0.0 && r.is_finite()))
        || r_grid.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidArgument(
            "radii must be positive, finite and strictly ascending".into(),
        ));
    }
    Ok(())
}

fn ball_measures(space: &MetricMeasureSpace, x0: usize, r_grid: &[f64]) -> Result<Vec<f64>> {
    space.check_index(x0)?;
    check_grid(r_grid)?;
    let m = r_grid
        .iter()
        .map(|&r| space.ball(x0, r).map(|b| space.subset_measure(&b)))
        .collect::<Result<Vec<_>>>()?;
    if m[0] <= 0.0 {
        return Err(Error::ZeroMeasureBall { radius: r_grid[0] });
    }
    Ok(m)
}

/// `max_{r₁<r₂} ln(ν(B_{r₂})/ν(B_{r₁})) / ln(r₂/r₁)` over the grid, floored at 0.
pub fn estimate_growth_exponent(space: &MetricMeasureSpace, x0: usize, r_grid: &[f64]) -> Result<f64> {
    let m = ball_measures(space, x0, r_grid)?;
    let mut best = 0.0f64;
    for i in 0..m.len() {
        for j in (i + 1)..m.len() {
            let e = (m[j] / m[i]).ln() / (r_grid[j] / r_grid[i]).ln();
            best = best.max(e);
        }
    }
    Ok(best)
}

/// Maximum of [`estimate_growth_exponent`] over several centers.
pub fn global_growth_exponent(space: &MetricMeasureSpace, centers: &[usize], r_grid: &[f64]) -> Result<f64> {
    centers.iter().try_fold(0.0f64, |acc, &c| {
        Ok(acc.max(estimate_growth_exponent(space, c, r_grid)?))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BishopGromovCheck {
    pub exponent: f64,
    pub holds: bool,
    /// `min (r₂/r₁)^N ν(B_{r₁}) - ν(B_{r₂})` over grid pairs.
    pub worst_slack: f64,
    pub worst_pair: Option<(f64, f64)>,
}

/// `ν(B_{r₂}(x₀)) ≤ (r₂/r₁)^N ν(B_{r₁}(x₀))` for every grid pair `r₁ < r₂`.
pub fn bishop_gromov_check(space: &MetricMeasureSpace, x0: usize, r_grid: &[f64], n: f64) -> Result<BishopGromovCheck> {
    let m = ball_measures(space, x0, r_grid)?;
    let mut worst = f64::INFINITY;
    let mut pair = None;
    for i in 0..m.len() {
        for j in (i + 1)..m.len() {
            let s = (r_grid[j] / r_grid[i]).powf(n) * m[i] - m[j];
            if s < worst {
                worst = s;
                pair = Some((r_grid[i], r_grid[j]));
            }
        }
    }
    Ok(BishopGromovCheck {
        exponent: n,
        holds: worst >= -1e-12,
        worst_slack: if pair.is_some() { worst } else { 0.0 },
        worst_pair: pair,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BonnetMyers {
    pub bound: f64,
    pub diameter: f64,
    pub holds: bool,
    pub slack: f64,
}

/// `diam(X) ≤ 7.7·sqrt(N/K)`.
pub fn bonnet_myers_check(space: &MetricMeasureSpace, k: f64, n: f64) -> Result<BonnetMyers> {
    let bound = bonnet_myers_bound(k, n)?;
    let diameter = space.diameter();
    Ok(BonnetMyers {
        bound,
        diameter,
        holds: diameter <= bound,
        slack: bound - diameter,
    })
}

pub fn bonnet_myers_bound(k: f64, n: f64) -> Result<f64> {
    if !(k > 0.0) || !(n >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need K > 0 and N >= 1 (got K={k}, N={n})"
        )));
    }
    Ok(BONNET_MYERS_C * (n / k).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{circle_lattice, grid_lattice, path_lattice};

    fn radii() -> Vec<f64> {
        vec![0.1, 0.2, 0.3, 0.4, 0.5]
    }

    // Ball counts on the lattice, independent of the space type.
    fn lattice_count_2d(n: i64, c: (i64, i64), r_units: i64) -> usize {
        let mut k = 0;
        for i in 0..n {
            for j in 0..n {
                let (di, dj) = (i - c.0, j - c.1);
                if di * di + dj * dj <= r_units * r_units {
                    k += 1;
                }
            }
        }
        k
    }

    #[test]
    fn path_center_is_one_dimensional() {
        let s = path_lattice(101, 1.0).unwrap();
        let e = estimate_growth_exponent(&s, 50, &radii()).unwrap();
        // Ball of radius r at the center holds 200r + 1 points.
        let counts: Vec<f64> = [21.0, 41.0, 61.0, 81.0, 101.0].to_vec();
        let mut expect = 0.0f64;
        for i in 0..5 {
            for j in (i + 1)..5 {
                expect = expect.max((counts[j] / counts[i]).ln() / (radii()[j] / radii()[i]).ln());
            }
        }
        assert!((e - expect).abs() < 1e-12);
        assert!((0.9..=1.2).contains(&e), "{e}");
    }

    #[test]
    fn grid_center_is_two_dimensional() {
        let s = grid_lattice(21, 2, 1.0).unwrap();
        let center = 10 * 21 + 10;
        let e = estimate_growth_exponent(&s, center, &radii()).unwrap();
        let counts: Vec<f64> = (1..=5).map(|k| lattice_count_2d(21, (10, 10), 2 * k) as f64).collect();
        let mut expect = 0.0f64;
        for i in 0..5 {
            for j in (i + 1)..5 {
                expect = expect.max((counts[j] / counts[i]).ln() / (radii()[j] / radii()[i]).ln());
            }
        }
        assert!((e - expect).abs() < 1e-12, "{e} {expect}");
        assert!((1.8..=2.2).contains(&e), "{e}");
    }

    #[test]
    fn single_point_is_zero() {
        let s = MetricMeasureSpace::from_flat("pt", vec!["0".into()], vec![0.0], vec![1.0], "test").unwrap();
        assert_eq!(estimate_growth_exponent(&s, 0, &radii()).unwrap(), 0.0);
    }

    #[test]
    fn zero_measure_first_ball() {
        let s = path_lattice(3, 1.0)
            .unwrap()
            .with_measure(vec![0.0, 0.5, 0.5], "test")
            .unwrap();
        assert!(matches!(
            estimate_growth_exponent(&s, 0, &[0.1, 1.0]),
            Err(Error::ZeroMeasureBall { .. })
        ));
    }

    #[test]
    fn bishop_gromov_at_estimated_exponent() {
        let s = grid_lattice(21, 2, 1.0).unwrap();
        let c = 10 * 21 + 10;
        let e = estimate_growth_exponent(&s, c, &radii()).unwrap();
        assert!(bishop_gromov_check(&s, c, &radii(), e).unwrap().holds);
        assert!(!bishop_gromov_check(&s, c, &radii(), e - 0.05).unwrap().holds);
    }

    #[test]
    fn bonnet_myers_examples() {
        assert_eq!(bonnet_myers_bound(1.0, 1.0).unwrap(), 7.7);
        let c = circle_lattice(6, 6.0).unwrap();
        let r = bonnet_myers_check(&c, 1.0, 1.0).unwrap();
        assert!(r.holds);
        assert!((r.slack - 4.7).abs() < 1e-12);
        let p = path_lattice(11, 10.0).unwrap();
        let r = bonnet_myers_check(&p, 4.0, 1.0).unwrap();
        assert_eq!(r.bound, 3.85);
        assert!(!r.holds);
        assert!(bonnet_myers_check(&p, 0.0, 1.0).is_err());
        assert!(bonnet_myers_check(&p, 1.0, 0.5).is_err());
    }
}

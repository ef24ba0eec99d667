//! ε-approximate t-intermediate points.
//!
//! On a finite space exact intermediate points rarely exist, so membership is
//! relaxed: `z ∈ Z_t^ε(x, y)` iff `|d(x,z) - t·d(x,y)| <= ε` and
//! `|d(z,y) - (1-t)·d(x,y)| <= ε`. The diagonal pair `x = y` always contains
//! `x` itself.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{MetricMeasureSpace, PointSubset, METRIC_ROUNDOFF};

/// Multiple of the mesh used as the default slack.
pub const DEFAULT_EPSILON_FACTOR: f64 = 0.51;

/// `0.51 × mesh`: on a lattice of spacing `h` every exact intermediate point
/// is within `h/2` of a lattice point.
pub fn default_epsilon(space: &MetricMeasureSpace) -> f64 {
    DEFAULT_EPSILON_FACTOR * space.mesh()
}

#[inline]
pub(crate) fn is_intermediate(dxz: f64, dzy: f64, dxy: f64, t: f64, epsilon: f64) -> bool {
    let slack = epsilon + METRIC_ROUNDOFF * dxy.max(1.0);
    (dxz - t * dxy).abs() <= slack && (dzy - (1.0 - t) * dxy).abs() <= slack
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IntermediateSource {
    Pair { x: usize, y: usize },
    Sets { a: PointSubset, b: PointSubset },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntermediateSet {
    pub t: f64,
    pub epsilon: f64,
    pub source: IntermediateSource,
    pub members: PointSubset,
}

fn check_params(t: f64, epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t must lie in [0,1], got {t}")));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {epsilon}")));
    }
    Ok(())
}

fn pair_members(space: &MetricMeasureSpace, x: usize, y: usize, t: f64, epsilon: f64) -> Vec<usize> {
    let dxy = space.dist(x, y);
    let (rx, ry) = (space.row(x), space.row(y));
    (0..space.len())
        .filter(|&z| z == x && x == y || is_intermediate(rx[z], ry[z], dxy, t, epsilon))
        .collect()
}

/// `Z_t^ε(x, y)`.
pub fn intermediate_points(
    space: &MetricMeasureSpace,
    x: usize,
    y: usize,
    t: f64,
    epsilon: f64,
) -> Result<IntermediateSet> {
    space.check_index(x)?;
    space.check_index(y)?;
    check_params(t, epsilon)?;
    Ok(IntermediateSet {
        t,
        epsilon,
        source: IntermediateSource::Pair { x, y },
        members: PointSubset::from_sorted(pair_members(space, x, y, t, epsilon)),
    })
}

/// `Z_t^ε(A, B)`, the union of `Z_t^ε(x, y)` over `A × B`.
pub fn intermediate_set(
    space: &MetricMeasureSpace,
    a: &PointSubset,
    b: &PointSubset,
    t: f64,
    epsilon: f64,
) -> Result<IntermediateSet> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySide);
    }
    check_params(t, epsilon)?;
    let n = space.len();
    for i in a.iter().chain(b.iter()) {
        space.check_index(i)?;
    }
    let mut hit = vec![false; n];
    let mut count = 0;
    'pairs: for x in a.iter() {
        let rx = space.row(x);
        for y in b.iter() {
            let ry = space.row(y);
            let dxy = rx[y];
            for z in 0..n {
                if !hit[z] && (z == x && x == y || is_intermediate(rx[z], ry[z], dxy, t, epsilon)) {
                    hit[z] = true;
                    count += 1;
                    if count == n {
                        break 'pairs;
                    }
                }
            }
        }
    }
    let members = (0..n).filter(|&z| hit[z]).collect();
    Ok(IntermediateSet {
        t,
        epsilon,
        source: IntermediateSource::Sets {
            a: a.clone(),
            b: b.clone(),
        },
        members: PointSubset::from_sorted(members),
    })
}

/// Fraction of unordered pairs `x ≠ y` whose ε-midpoint set is nonempty.
pub fn midpoint_coverage(space: &MetricMeasureSpace, epsilon: f64) -> Result<f64> {
    let n = space.len();
    if n < 2 {
        return Err(Error::InvalidArgument("coverage needs at least two points".into()));
    }
    check_params(0.5, epsilon)?;
    let covered: usize = (0..n)
        .into_par_iter()
        .map(|x| {
            ((x + 1)..n)
                .filter(|&y| {
                    let dxy = space.dist(x, y);
                    (0..n).any(|z| is_intermediate(space.dist(x, z), space.dist(z, y), dxy, 0.5, epsilon))
                })
                .count()
        })
        .sum();
    Ok(covered as f64 / (n * (n - 1) / 2) as f64)
}

/// For fixed `(t, ε)`, every generating pair of every target point, stored
/// compactly. Built once in `O(n³)`, then read-only; this is what the
/// inequality checkers evaluate against.
#[derive(Debug, Clone)]
pub struct PairIndex {
    pub t: f64,
    pub epsilon: f64,
    offsets: Vec<usize>,
    pairs: Vec<(u32, u32)>,
    sq_dist: Vec<f64>,
}

impl PairIndex {
    pub fn build(space: &MetricMeasureSpace, t: f64, epsilon: f64) -> Result<Self> {
        check_params(t, epsilon)?;
        let n = space.len();
        let per_target: Vec<Vec<(u32, u32)>> = (0..n)
            .into_par_iter()
            .map(|z| {
                let rz = space.row(z);
                let mut v = Vec::new();
                for x in 0..n {
                    let rx = space.row(x);
                    for y in 0..n {
                        if (z == x && x == y) || is_intermediate(rz[x], rz[y], rx[y], t, epsilon) {
                            v.push((x as u32, y as u32));
                        }
                    }
                }
                v
            })
            .collect();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut pairs = Vec::new();
        for v in per_target {
            pairs.extend(v);
            offsets.push(pairs.len());
        }
        let sq_dist = pairs
            .iter()
            .map(|&(x, y)| {
                let d = space.dist(x as usize, y as usize);
                d * d
            })
            .collect();
        Ok(Self {
            t,
            epsilon,
            offsets,
            pairs,
            sq_dist,
        })
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Generating pairs of `z` together with `d(x, y)²`.
    pub fn generators(&self, z: usize) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let r = self.offsets[z]..self.offsets[z + 1];
        self.pairs[r.clone()]
            .iter()
            .zip(&self.sq_dist[r])
            .map(|(&(x, y), &d2)| (x as usize, y as usize, d2))
    }
}

/// Bitmask of `Z_t^ε(x, y)` for every ordered pair, row-major in `(x, y)`.
/// Only for spaces of at most 64 points.
pub(crate) fn pair_masks(space: &MetricMeasureSpace, t: f64, epsilon: f64) -> Vec<u64> {
    let n = space.len();
    assert!(n <= 64);
    let mut masks = vec![0u64; n * n];
    for x in 0..n {
        for y in 0..n {
            let mut m = 0u64;
            for z in pair_members(space, x, y, t, epsilon) {
                m |= 1 << z;
            }
            masks[x * n + y] = m;
        }
    }
    masks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{circle_lattice, path_lattice, two_point};

    fn members(s: &IntermediateSet) -> Vec<usize> {
        s.members.as_slice().to_vec()
    }

    #[test]
    fn reference_pairs() {
        let p = path_lattice(5, 4.0).unwrap();
        assert_eq!(members(&intermediate_points(&p, 3, 3, 0.3, 0.0).unwrap()), vec![3]);
        assert_eq!(members(&intermediate_points(&p, 0, 4, 0.5, 0.0).unwrap()), vec![2]);
        let two = two_point(1.0).unwrap();
        assert!(intermediate_points(&two, 0, 1, 0.5, 0.1).unwrap().members.is_empty());
    }

    #[test]
    fn reference_sets() {
        let p = path_lattice(5, 4.0).unwrap();
        let a = PointSubset::new(5, [0]).unwrap();
        let b = PointSubset::new(5, [4]).unwrap();
        assert_eq!(members(&intermediate_set(&p, &a, &b, 0.25, 0.0).unwrap()), vec![1]);
        let full = p.full_subset();
        assert_eq!(intermediate_set(&p, &full, &full, 0.37, 0.0).unwrap().members, full);
        let two = two_point(1.0).unwrap();
        let (a, b) = (PointSubset::new(2, [0]).unwrap(), PointSubset::new(2, [1]).unwrap());
        assert!(intermediate_set(&two, &a, &b, 0.5, 0.1).unwrap().members.is_empty());
        assert!(matches!(
            intermediate_set(&two, &PointSubset::empty(), &b, 0.5, 0.1),
            Err(Error::EmptySide)
        ));
    }

    #[test]
    fn coverage_values() {
        let two = two_point(1.0).unwrap();
        assert_eq!(midpoint_coverage(&two, 0.4).unwrap(), 0.0);
        let p3 = path_lattice(3, 2.0).unwrap();
        assert!((midpoint_coverage(&p3, 0.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let c = circle_lattice(10, 10.0).unwrap();
        assert_eq!(midpoint_coverage(&c, c.diameter()).unwrap(), 1.0);
        let c = circle_lattice(8, 8.0).unwrap();
        assert!(midpoint_coverage(&c, 0.0).unwrap() >= (4.0 - 1.0) / 7.0);
    }

    #[test]
    fn endpoints() {
        let p = path_lattice(7, 1.0).unwrap();
        assert_eq!(members(&intermediate_points(&p, 1, 5, 0.0, 0.0).unwrap()), vec![1]);
        assert_eq!(members(&intermediate_points(&p, 1, 5, 1.0, 0.0).unwrap()), vec![5]);
    }

    #[test]
    fn pair_index_agrees_with_direct() {
        let c = circle_lattice(9, 3.0).unwrap();
        let eps = default_epsilon(&c);
        let idx = PairIndex::build(&c, 0.25, eps).unwrap();
        for x in 0..9 {
            for y in 0..9 {
                let direct = intermediate_points(&c, x, y, 0.25, eps).unwrap().members;
                for z in 0..9 {
                    let indexed = idx.generators(z).any(|(a, b, _)| a == x && b == y);
                    assert_eq!(indexed, direct.contains(z));
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn random_space() -> impl Strategy<Value = MetricMeasureSpace> {
            prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 2..9).prop_map(|pts| {
                let n = pts.len();
                let mut d = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        d[i * n + j] = ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt();
                    }
                }
                MetricMeasureSpace::uniform("pts", d, "random").unwrap()
            })
        }

        proptest! {
            #[test]
            fn symmetric_in_endpoints(s in random_space(), t in 0.0f64..=1.0, eps in 0.0f64..3.0,
                                      xs in 0usize..100, ys in 0usize..100) {
                let (x, y) = (xs % s.len(), ys % s.len());
                let fwd = intermediate_points(&s, x, y, t, eps).unwrap().members;
                let bwd = intermediate_points(&s, y, x, 1.0 - t, eps).unwrap().members;
                prop_assert_eq!(fwd, bwd);
            }

            #[test]
            fn monotone_in_epsilon(s in random_space(), t in 0.0f64..=1.0, eps in 0.0f64..3.0,
                                   extra in 0.0f64..3.0, xs in 0usize..100, ys in 0usize..100) {
                let (x, y) = (xs % s.len(), ys % s.len());
                let small = intermediate_points(&s, x, y, t, eps).unwrap().members;
                let big = intermediate_points(&s, x, y, t, eps + extra).unwrap().members;
                prop_assert!(small.is_subset_of(&big));
            }

            #[test]
            fn everything_at_diameter(s in random_space(), t in 0.0f64..=1.0,
                                      xs in 0usize..100, ys in 0usize..100) {
                let (x, y) = (xs % s.len(), ys % s.len());
                let all = intermediate_points(&s, x, y, t, s.diameter()).unwrap().members;
                prop_assert_eq!(all.len(), s.len());
            }
        }
    }
}

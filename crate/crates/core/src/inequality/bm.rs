//! Multiplicative Brunn–Minkowski on finite spaces.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::extremal::pl_extremal_w;
use super::report::{DefectReport, InequalityKind, Params, SearchInfo, TracePoint, Witness};
use super::search::random_subset;
use crate::error::{Error, Result};
use crate::geodesy::{intermediate_set, pair_masks};
use crate::space::{MetricMeasureSpace, PointSubset, ScalarField};

/// Exhaustive mode enumerates `(2ⁿ - 1)²` subset pairs per `t`.
pub const EXHAUSTIVE_LIMIT: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum BmMode {
    Exhaustive,
    Sampled { budget: usize, seed: u64 },
}

/// `ν(Z_t^ε(A, B)) - ν(A)^{1-t} ν(B)^t`.
pub fn bm_defect(space: &MetricMeasureSpace, a: &PointSubset, b: &PointSubset, t: f64, epsilon: f64) -> Result<f64> {
    let z = intermediate_set(space, a, b, t, epsilon)?;
    Ok(space.subset_measure(&z.members) - rhs(space.subset_measure(a), space.subset_measure(b), t))
}

fn rhs(na: f64, nb: f64, t: f64) -> f64 {
    na.powf(1.0 - t) * nb.powf(t)
}

#[derive(Debug, Clone, Copy)]
struct Found {
    defect: f64,
    scale: f64,
    a: u64,
    b: u64,
}

fn better(x: Found, y: Found) -> Found {
    // Lowest defect, then lowest (a, b) mask.
    match x.defect.total_cmp(&y.defect) {
        std::cmp::Ordering::Less => x,
        std::cmp::Ordering::Greater => y,
        std::cmp::Ordering::Equal => {
            if (x.a, x.b) <= (y.a, y.b) {
                x
            } else {
                y
            }
        }
    }
}

fn exhaustive(space: &MetricMeasureSpace, t: f64, epsilon: f64) -> Found {
    let n = space.len();
    let full = 1u64 << n;
    let masks = pair_masks(space, t, epsilon);
    let w = space.measure();
    let mut meas = vec![0.0f64; full as usize];
    for m in 1..full {
        let low = m.trailing_zeros() as usize;
        meas[m as usize] = meas[(m & (m - 1)) as usize] + w[low];
    }
    (1..full)
        .into_par_iter()
        .map(|a| {
            // row[y] = ⋃_{x ∈ A} Z(x, y)
            let row: Vec<u64> = (0..n)
                .map(|y| {
                    (0..n)
                        .filter(|x| a >> x & 1 == 1)
                        .fold(0, |acc, x| acc | masks[x * n + y])
                })
                .collect();
            let na = meas[a as usize];
            let mut z = vec![0u64; full as usize];
            let mut best: Option<Found> = None;
            for b in 1..full {
                let low = b.trailing_zeros() as usize;
                z[b as usize] = z[(b & (b - 1)) as usize] | row[low];
                let scale = rhs(na, meas[b as usize], t);
                let f = Found {
                    defect: meas[z[b as usize] as usize] - scale,
                    scale,
                    a,
                    b,
                };
                best = Some(match best {
                    Some(cur) => better(cur, f),
                    None => f,
                });
            }
            best.expect("nonempty")
        })
        .reduce_with(better)
        .expect("nonempty")
}

fn sampled(
    space: &MetricMeasureSpace,
    t: f64,
    epsilon: f64,
    budget: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Found, PointSubset, PointSubset)> {
    let n = space.len();
    let pairs: Vec<(PointSubset, PointSubset)> = (0..budget)
        .map(|_| (random_subset(rng, n), random_subset(rng, n)))
        .collect();
    let results = pairs
        .par_iter()
        .map(|(a, b)| {
            let z = intermediate_set(space, a, b, t, epsilon)?;
            let scale = rhs(space.subset_measure(a), space.subset_measure(b), t);
            Ok((space.subset_measure(&z.members) - scale, scale))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.0 < results[best].0 {
            best = i;
        }
    }
    let (defect, scale) = results[best];
    let (a, b) = pairs[best].clone();
    Ok((
        Found {
            defect,
            scale,
            a: 0,
            b: 0,
        },
        a,
        b,
    ))
}

/// Minimal BM defect over subset pairs and `t_grid`.
pub fn bm_check(space: &MetricMeasureSpace, t_grid: &[f64], mode: BmMode, epsilon: f64) -> Result<DefectReport> {
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
        return Err(Error::InvalidArgument(
            "t-grid must be a nonempty subset of (0,1)".into(),
        ));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be >= 0 (got {epsilon})")));
    }
    let n = space.len();
    let mut rng = match mode {
        BmMode::Exhaustive => {
            if n > EXHAUSTIVE_LIMIT {
                return Err(Error::TooLargeForExhaustive {
                    n,
                    limit: EXHAUSTIVE_LIMIT,
                });
            }
            None
        }
        BmMode::Sampled { budget, seed } => {
            if budget == 0 {
                return Err(Error::InvalidArgument("search budget must be >= 1".into()));
            }
            Some(ChaCha8Rng::seed_from_u64(seed))
        }
    };
    let mut best: Option<(Found, PointSubset, PointSubset, f64)> = None;
    let mut trace = Vec::new();
    let mut evaluations = 0usize;
    for &t in t_grid {
        let (found, a, b) = match (&mode, rng.as_mut()) {
            (BmMode::Sampled { budget, .. }, Some(rng)) => {
                evaluations += budget;
                sampled(space, t, epsilon, *budget, rng)?
            }
            _ => {
                let full = (1usize << n) - 1;
                evaluations += full * full;
                let f = exhaustive(space, t, epsilon);
                (f, subset_of_mask(f.a), subset_of_mask(f.b))
            }
        };
        trace.push(TracePoint {
            params: Params {
                t: Some(t),
                ..Params::default()
            },
            defect: found.defect,
            relative: super::report::relative(found.defect, found.scale),
        });
        if best.as_ref().is_none_or(|(b, ..)| found.defect < b.defect) {
            best = Some((found, a, b, t));
        }
    }
    let (found, a, b, t) = best.expect("nonempty t-grid");
    let (strategy, seed) = match mode {
        BmMode::Exhaustive => ("exhaustive".to_string(), 0),
        BmMode::Sampled { seed, .. } => ("sampled".to_string(), seed),
    };
    Ok(DefectReport {
        inequality: InequalityKind::Bm,
        params: Params {
            t: Some(t),
            ..Params::default()
        },
        defect: found.defect,
        scale: found.scale,
        witness: Witness::Subsets { a, b, t },
        search: SearchInfo {
            strategy,
            iterations: evaluations,
            seed,
        },
        seed,
        evaluations,
        epsilon,
        warnings: Vec::new(),
        trace,
    })
}

fn subset_of_mask(mask: u64) -> PointSubset {
    PointSubset::from_mask(mask)
}

/// `(u, ν({f ≥ u}))` for each threshold.
pub fn layer_cake(space: &MetricMeasureSpace, f: &ScalarField, levels: &[f64]) -> Result<Vec<(f64, f64)>> {
    f.check_len(space)?;
    f.check_nonneg()?;
    if levels.iter().any(|l| !(*l >= 0.0)) || levels.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument(
            "levels must be nonnegative and ascending".into(),
        ));
    }
    Ok(levels
        .iter()
        .map(|&u| {
            let m = f
                .values()
                .iter()
                .zip(space.measure())
                .filter(|(v, _)| **v >= u)
                .map(|(_, w)| w)
                .sum();
            (u, m)
        })
        .collect())
}

/// Checks `{w* ≥ a^{1-t} b^t} ⊇ Z_t^ε({u ≥ a}, {v ≥ b})` for `w*` the PL(0)
/// extremal function of `(u, v)`. Empty superlevel sets make it vacuous.
pub fn level_set_inclusion(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    v: &ScalarField,
    t: f64,
    epsilon: f64,
    a: f64,
    b: f64,
) -> Result<bool> {
    let w = pl_extremal_w(space, u, v, t, 0.0, epsilon)?;
    let sa = superlevel(u, a);
    let sb = superlevel(v, b);
    if sa.is_empty() || sb.is_empty() {
        return Ok(true);
    }
    let z = intermediate_set(space, &sa, &sb, t, epsilon)?;
    let level = a.powf(1.0 - t) * b.powf(t);
    let ok = z.members.iter().all(|i| w[i] >= level * (1.0 - 1e-12));
    Ok(ok)
}

pub fn superlevel(f: &ScalarField, level: f64) -> PointSubset {
    let members = (0..f.len()).filter(|&i| f[i] >= level).collect();
    PointSubset::from_sorted(members)
}

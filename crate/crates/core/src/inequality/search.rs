//! Adversarial search for PL(K) and BBL(0,N) violations.
//!
//! Candidates `(u, v)` come from fixed families; the third function is always
//! the extremal one, so every evaluation is exact for its pair. Candidates are
//! ranked by relative defect `∫w*/rhs - 1` (the inequality is homogeneous in
//! `u` and `v`), ties going to the earliest candidate. Batches are evaluated in
//! parallel and reduced in order, so results depend only on the seed.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::extremal::{evaluate_indexed, ln_field, Evaluation, Objective};
use super::report::{DefectReport, InequalityKind, Params, SearchInfo, TracePoint, Witness};
use crate::error::{Error, Result};
use crate::geodesy::{default_epsilon, PairIndex};
use crate::means::Exponent;
use crate::space::{MetricMeasureSpace, PointSubset, ScalarField};

/// Default interpolation parameters; `1/2` first so that it wins ties.
pub const DEFAULT_T_GRID: [f64; 3] = [0.5, 0.25, 0.75];
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL_K: f64 = 0.05;
/// Slopes of log-affine fields range over `[-16/D, 16/D]`.
pub const LOG_AFFINE_SLOPE_SCALE: f64 = 16.0;

const BATCH: usize = 2048;
const HILL_START_DELTA: f64 = 0.1;
const HILL_MIN_DELTA: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Every pair of distinct closed balls.
    IndicatorBalls,
    /// Random subsets, each point kept with probability 1/2.
    IndicatorRandom,
    /// `exp(a · d(·, x₀))`.
    LogAffine,
    /// Independent log-uniform values in `[e⁻², e²]`.
    RandomPositive,
    /// Coordinate-wise multiplicative refinement of the worst candidate found
    /// by the other families.
    HillClimb,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::IndicatorBalls => "indicator-balls",
            Family::IndicatorRandom => "indicator-random",
            Family::LogAffine => "log-affine",
            Family::RandomPositive => "random-positive",
            Family::HillClimb => "hill-climb",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "indicator-balls" => Family::IndicatorBalls,
            "indicator-random" => Family::IndicatorRandom,
            "log-affine" => Family::LogAffine,
            "random-positive" => Family::RandomPositive,
            "hill-climb" => Family::HillClimb,
            other => return Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchStrategy {
    pub families: Vec<Family>,
    /// Maximum number of defect evaluations.
    pub budget: usize,
    pub seed: u64,
    pub t_grid: Vec<f64>,
}

impl SearchStrategy {
    pub fn new(families: impl IntoIterator<Item = Family>, budget: usize) -> Self {
        Self {
            families: families.into_iter().collect(),
            budget,
            seed: DEFAULT_SEED,
            t_grid: DEFAULT_T_GRID.to_vec(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_t_grid(mut self, t_grid: Vec<f64>) -> Self {
        self.t_grid = t_grid;
        self
    }

    pub fn name(&self) -> String {
        self.families
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join("+")
    }

    fn check(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidArgument("search budget must be >= 1".into()));
        }
        if self.families.is_empty() {
            return Err(Error::InvalidArgument("search needs at least one family".into()));
        }
        if self.t_grid.is_empty() || self.t_grid.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return Err(Error::InvalidArgument(
                "t-grid must be a nonempty subset of (0,1)".into(),
            ));
        }
        Ok(())
    }
}

/// Log-fields of one candidate pair.
#[derive(Debug, Clone)]
struct Candidate {
    label: String,
    lu: Vec<f64>,
    lv: Vec<f64>,
}

/// Distinct closed balls, by center then radius.
pub fn distinct_balls(space: &MetricMeasureSpace) -> Vec<PointSubset> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for c in 0..space.len() {
        let mut radii: Vec<f64> = space.row(c).to_vec();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        for r in radii {
            let b = space.ball(c, r).expect("center in range");
            if seen.insert(b.clone()) {
                out.push(b);
            }
        }
    }
    out
}

fn ln_indicator(n: usize, s: &PointSubset) -> Vec<f64> {
    let mut v = vec![f64::NEG_INFINITY; n];
    for i in s.iter() {
        v[i] = 0.0;
    }
    v
}

pub(crate) fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> PointSubset {
    loop {
        let members: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        if !members.is_empty() {
            return PointSubset::from_sorted(members);
        }
    }
}

/// A parameter point of the sweep: `t` plus the objective at that point.
#[derive(Debug, Clone)]
struct Slot {
    t_index: usize,
    objective: Objective,
    params: Params,
}

/// Running minimum with lowest-index tie-breaking.
#[derive(Debug, Clone)]
struct Best {
    relative: f64,
    eval: Evaluation,
    slot: usize,
    candidate: Candidate,
}

struct Searcher<'a> {
    space: &'a MetricMeasureSpace,
    indices: Vec<PairIndex>,
    slots: Vec<Slot>,
    evaluations: usize,
    best: Option<Best>,
    per_slot: Vec<Option<(f64, Evaluation)>>,
}

impl<'a> Searcher<'a> {
    fn new(space: &'a MetricMeasureSpace, t_grid: &[f64], epsilon: f64, slots: Vec<Slot>) -> Result<Self> {
        let indices = t_grid
            .iter()
            .map(|&t| PairIndex::build(space, t, epsilon))
            .collect::<Result<Vec<_>>>()?;
        let per_slot = vec![None; slots.len()];
        Ok(Self {
            space,
            indices,
            slots,
            evaluations: 0,
            best: None,
            per_slot,
        })
    }

    fn eval(&self, slot: usize, lu: &[f64], lv: &[f64]) -> Evaluation {
        let s = &self.slots[slot];
        evaluate_indexed(self.space, &self.indices[s.t_index], &s.objective, lu, lv)
    }

    /// Evaluates candidates against every slot until `limit` evaluations have
    /// been spent. Returns how many were spent.
    fn run(&mut self, candidates: &[Candidate], limit: usize) -> usize {
        let jobs: Vec<(usize, usize)> = (0..candidates.len())
            .flat_map(|c| (0..self.slots.len()).map(move |s| (c, s)))
            .take(limit)
            .collect();
        let results: Vec<Evaluation> = jobs
            .par_iter()
            .map(|&(c, s)| self.eval(s, &candidates[c].lu, &candidates[c].lv))
            .collect();
        for (&(c, s), e) in jobs.iter().zip(&results) {
            self.offer(s, &candidates[c], *e);
        }
        self.evaluations += jobs.len();
        jobs.len()
    }

    fn offer(&mut self, slot: usize, cand: &Candidate, e: Evaluation) {
        let r = e.relative();
        match &mut self.per_slot[slot] {
            Some((best_r, best_e)) if r >= *best_r => {
                let _ = best_e;
            }
            entry => *entry = Some((r, e)),
        }
        if self.best.as_ref().is_none_or(|b| r < b.relative) {
            self.best = Some(Best {
                relative: r,
                eval: e,
                slot,
                candidate: cand.clone(),
            });
        }
    }

    fn hill_climb(&mut self, limit: usize) {
        let Some(start) = self.best.clone() else { return };
        let slot = start.slot;
        let mut cur = start.candidate.clone();
        cur.label = format!("{} + hill-climb", cur.label);
        let mut cur_r = start.relative;
        let mut delta = HILL_START_DELTA;
        let n = self.space.len();
        let mut spent = 0;
        while spent < limit && delta >= HILL_MIN_DELTA {
            let mut improved = false;
            for coord in 0..2 * n {
                for step in [(1.0 + delta).ln(), (1.0 - delta).ln()] {
                    if spent >= limit {
                        break;
                    }
                    let mut trial = cur.clone();
                    let field = if coord < n { &mut trial.lu } else { &mut trial.lv };
                    let i = coord % n;
                    if field[i] == f64::NEG_INFINITY {
                        continue;
                    }
                    field[i] += step;
                    let e = self.eval(slot, &trial.lu, &trial.lv);
                    spent += 1;
                    self.evaluations += 1;
                    let r = e.relative();
                    if r < cur_r {
                        cur = trial;
                        cur_r = r;
                        improved = true;
                        self.offer(slot, &cur, e);
                        break;
                    }
                }
            }
            if !improved {
                delta /= 2.0;
            }
        }
    }
}

fn family_candidates(
    space: &MetricMeasureSpace,
    family: Family,
    rng: &mut ChaCha8Rng,
    max_candidates: usize,
    mut sink: impl FnMut(&[Candidate]) -> bool,
) {
    let n = space.len();
    let mut batch = Vec::with_capacity(BATCH);
    let mut produced = 0usize;
    let mut push = |c: Candidate, batch: &mut Vec<Candidate>, produced: &mut usize| -> bool {
        batch.push(c);
        *produced += 1;
        if batch.len() == BATCH {
            let go = sink(batch);
            batch.clear();
            return go && *produced < max_candidates;
        }
        *produced < max_candidates
    };
    match family {
        Family::IndicatorBalls => {
            let balls = distinct_balls(space);
            let logs: Vec<Vec<f64>> = balls.iter().map(|b| ln_indicator(n, b)).collect();
            'outer: for (i, a) in logs.iter().enumerate() {
                for (j, b) in logs.iter().enumerate() {
                    let c = Candidate {
                        label: format!(
                            "indicator-balls: A={:?} B={:?}",
                            balls[i].as_slice(),
                            balls[j].as_slice()
                        ),
                        lu: a.clone(),
                        lv: b.clone(),
                    };
                    if !push(c, &mut batch, &mut produced) {
                        break 'outer;
                    }
                }
            }
        }
        Family::IndicatorRandom => loop {
            let (a, b) = (random_subset(rng, n), random_subset(rng, n));
            let c = Candidate {
                label: format!("indicator-random: A={:?} B={:?}", a.as_slice(), b.as_slice()),
                lu: ln_indicator(n, &a),
                lv: ln_indicator(n, &b),
            };
            if !push(c, &mut batch, &mut produced) {
                break;
            }
        },
        Family::LogAffine => {
            let diam = space.diameter();
            let slope = if diam > 0.0 { LOG_AFFINE_SLOPE_SCALE / diam } else { 1.0 };
            let field = |x0: usize, a: f64| -> Vec<f64> { space.row(x0).iter().map(|d| a * d).collect() };
            // Deterministic sweep anchored at the two ends of a diameter.
            let (p, q) = diameter_pair(space);
            let grid: Vec<f64> = (0..9).map(|k| slope * (k as f64 - 4.0) / 4.0).collect();
            let mut go = true;
            'sweep: for &x0 in &[p, q] {
                for &a in &grid {
                    for &b in &grid {
                        let c = Candidate {
                            label: format!("log-affine: x0={x0} a={a} b={b}"),
                            lu: field(x0, a),
                            lv: field(x0, b),
                        };
                        if !push(c, &mut batch, &mut produced) {
                            go = false;
                            break 'sweep;
                        }
                    }
                }
            }
            while go {
                let (xu, xv) = (rng.gen_range(0..n), rng.gen_range(0..n));
                let (a, b) = (rng.gen_range(-slope..=slope), rng.gen_range(-slope..=slope));
                let c = Candidate {
                    label: format!("log-affine: x0u={xu} x0v={xv} a={a} b={b}"),
                    lu: field(xu, a),
                    lv: field(xv, b),
                };
                go = push(c, &mut batch, &mut produced);
            }
        }
        Family::RandomPositive => loop {
            let lu: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..=2.0)).collect();
            let lv: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..=2.0)).collect();
            let c = Candidate {
                label: "random-positive".into(),
                lu,
                lv,
            };
            if !push(c, &mut batch, &mut produced) {
                break;
            }
        },
        Family::HillClimb => {}
    }
    if !batch.is_empty() {
        sink(&batch);
    }
}

fn diameter_pair(space: &MetricMeasureSpace) -> (usize, usize) {
    let n = space.len();
    let mut best = (0, 0, -1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if space.dist(i, j) > best.2 {
                best = (i, j, space.dist(i, j));
            }
        }
    }
    (best.0, best.1)
}

fn run_explicit(
    space: &MetricMeasureSpace,
    strategy: &SearchStrategy,
    epsilon: f64,
    slots: Vec<Slot>,
    kind: InequalityKind,
    base_params: Params,
    candidates: &[Candidate],
) -> Result<DefectReport> {
    if strategy.t_grid.is_empty() || strategy.t_grid.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
        return Err(Error::InvalidArgument(
            "t-grid must be a nonempty subset of (0,1)".into(),
        ));
    }
    let mut searcher = Searcher::new(space, &strategy.t_grid, epsilon, slots)?;
    for chunk in candidates.chunks(BATCH) {
        searcher.run(chunk, usize::MAX);
    }
    Ok(finish(searcher, strategy, epsilon, kind, base_params))
}

fn run_search(
    space: &MetricMeasureSpace,
    strategy: &SearchStrategy,
    epsilon: f64,
    slots: Vec<Slot>,
    kind: InequalityKind,
    base_params: Params,
) -> Result<DefectReport> {
    strategy.check()?;
    let mut searcher = Searcher::new(space, &strategy.t_grid, epsilon, slots)?;
    let mut rng = ChaCha8Rng::seed_from_u64(strategy.seed);

    let sampling: Vec<Family> = strategy
        .families
        .iter()
        .copied()
        .filter(|f| *f != Family::HillClimb)
        .collect();
    let climb = strategy.families.contains(&Family::HillClimb);
    let climb_share = if climb && !sampling.is_empty() {
        strategy.budget / 2
    } else if climb {
        strategy.budget
    } else {
        0
    };
    let sample_budget = strategy.budget - climb_share;
    let per_family = if sampling.is_empty() {
        0
    } else {
        (sample_budget / sampling.len()).max(1)
    };
    let slots_per_candidate = searcher.slots.len();

    for family in sampling {
        let mut remaining = per_family;
        let max_candidates = per_family.div_ceil(slots_per_candidate);
        family_candidates(space, family, &mut rng, max_candidates, |batch| {
            let spent = searcher.run(batch, remaining);
            remaining -= spent;
            remaining > 0
        });
    }
    if climb {
        if searcher.best.is_none() {
            // Nothing to refine yet: seed from a random positive pair.
            let n = space.len();
            let lu: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..=2.0)).collect();
            let lv: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..=2.0)).collect();
            searcher.run(
                &[Candidate {
                    label: "random-positive".into(),
                    lu,
                    lv,
                }],
                1,
            );
        }
        searcher.hill_climb(climb_share.saturating_sub(1).max(1));
    }
    Ok(finish(searcher, strategy, epsilon, kind, base_params))
}

fn finish(
    searcher: Searcher<'_>,
    strategy: &SearchStrategy,
    epsilon: f64,
    kind: InequalityKind,
    base_params: Params,
) -> DefectReport {
    let best = searcher.best.clone().expect("budget >= 1 yields an evaluation");
    let slot = &searcher.slots[best.slot];
    let t = strategy.t_grid[slot.t_index];
    let mut params = base_params.clone();
    params.t = Some(t);
    if slot.params.p.is_some() {
        params.p = slot.params.p;
    }
    let trace = searcher
        .per_slot
        .iter()
        .zip(&searcher.slots)
        .filter_map(|(entry, s)| {
            entry.map(|(r, e)| {
                let mut p = base_params.clone();
                p.t = Some(strategy.t_grid[s.t_index]);
                p.p = s.params.p;
                TracePoint {
                    params: p,
                    defect: e.defect(),
                    relative: r,
                }
            })
        })
        .collect();
    DefectReport {
        inequality: kind,
        params,
        defect: best.eval.defect(),
        scale: best.eval.scale(),
        witness: Witness::Fields {
            label: best.candidate.label.clone(),
            u: best.candidate.lu.iter().map(|l| l.exp()).collect(),
            v: best.candidate.lv.iter().map(|l| l.exp()).collect(),
            t,
            p: slot.params.p,
        },
        search: SearchInfo {
            strategy: strategy.name(),
            iterations: searcher.evaluations,
            seed: strategy.seed,
        },
        seed: strategy.seed,
        evaluations: searcher.evaluations,
        epsilon,
        warnings: Vec::new(),
        trace,
    }
}

/// Minimal PL(K) defect over the strategy's families and t-grid.
/// `epsilon = None` uses [`default_epsilon`].
pub fn pl_check(
    space: &MetricMeasureSpace,
    k: f64,
    strategy: &SearchStrategy,
    epsilon: Option<f64>,
) -> Result<DefectReport> {
    let epsilon = epsilon.unwrap_or_else(|| default_epsilon(space));
    let slots = (0..strategy.t_grid.len())
        .map(|t_index| Slot {
            t_index,
            objective: Objective::Pl { k },
            params: Params::default(),
        })
        .collect();
    let base = Params {
        k: Some(k),
        ..Params::default()
    };
    run_search(space, strategy, epsilon, slots, InequalityKind::Pl, base)
}

/// `{-1/N + 1/(4N), -1/(2N), 0, 1/2, 1, 2, +∞}`.
pub fn default_p_grid(n: f64) -> Vec<Exponent> {
    vec![
        Exponent::Finite(-1.0 / n + 1.0 / (4.0 * n)),
        Exponent::Finite(-1.0 / (2.0 * n)),
        Exponent::Finite(0.0),
        Exponent::Finite(0.5),
        Exponent::Finite(1.0),
        Exponent::Finite(2.0),
        Exponent::PlusInf,
    ]
}

/// Minimal BBL_p(0,N) defect over `p_grid` (default [`default_p_grid`]), the
/// t-grid and the strategy's families.
pub fn bbl_check(
    space: &MetricMeasureSpace,
    n: f64,
    strategy: &SearchStrategy,
    p_grid: Option<&[Exponent]>,
    epsilon: Option<f64>,
) -> Result<DefectReport> {
    let epsilon = epsilon.unwrap_or_else(|| default_epsilon(space));
    let grid = match p_grid {
        Some(g) => g.to_vec(),
        None => default_p_grid(n),
    };
    if grid.is_empty() {
        return Err(Error::InvalidArgument("p-grid must be nonempty".into()));
    }
    let mut slots = Vec::new();
    for t_index in 0..strategy.t_grid.len() {
        for &p in &grid {
            slots.push(Slot {
                t_index,
                objective: Objective::bbl(p, n)?,
                params: Params {
                    p: Some(p),
                    ..Params::default()
                },
            });
        }
    }
    let base = Params {
        n: Some(n),
        ..Params::default()
    };
    run_search(space, strategy, epsilon, slots, InequalityKind::Bbl, base)
}

/// Result of a K-bisection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KStarEstimate {
    pub k_star: f64,
    pub strategy: String,
    pub epsilon: f64,
    /// Every probed `(K, relative defect, held)` in probing order.
    pub probes: Vec<(f64, f64, bool)>,
}

/// Largest `K ∈ [k_lo, k_hi]` (to within `tol_k`) for which `pl_check` finds no
/// violation, by bisection on the monotone-in-K defect.
pub fn estimate_k_star(
    space: &MetricMeasureSpace,
    strategy: &SearchStrategy,
    k_lo: f64,
    k_hi: f64,
    tol_k: f64,
    epsilon: Option<f64>,
) -> Result<KStarEstimate> {
    if !(k_lo < k_hi) || !(tol_k > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need k_lo < k_hi and tol_k > 0 (got {k_lo}, {k_hi}, {tol_k})"
        )));
    }
    let epsilon = epsilon.unwrap_or_else(|| default_epsilon(space));
    let mut probes = Vec::new();
    let mut probe = |k: f64| -> Result<(bool, f64)> {
        let r = pl_check(space, k, strategy, Some(epsilon))?;
        probes.push((k, r.relative(), r.holds()));
        Ok((r.holds(), r.defect))
    };
    let (ok, defect) = probe(k_lo)?;
    if !ok {
        return Err(Error::FailsAtLowerBound { k_lo, defect });
    }
    let (mut lo, mut hi) = (k_lo, k_hi);
    if probe(k_hi)?.0 {
        lo = k_hi;
    } else {
        while hi - lo > tol_k {
            let mid = 0.5 * (lo + hi);
            if probe(mid)?.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    Ok(KStarEstimate {
        k_star: lo,
        strategy: strategy.name(),
        epsilon,
        probes,
    })
}

/// PL(K) defect minimized over an explicit list of `(u, v)` pairs and `t_grid`.
/// Every pair is evaluated at every `t`.
pub fn pl_check_fields(
    space: &MetricMeasureSpace,
    k: f64,
    t_grid: &[f64],
    epsilon: f64,
    label: &str,
    pairs: &[(ScalarField, ScalarField)],
) -> Result<DefectReport> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("no candidate pairs".into()));
    }
    let mut candidates = Vec::with_capacity(pairs.len());
    for (i, (u, v)) in pairs.iter().enumerate() {
        u.check_len(space)?;
        v.check_len(space)?;
        u.check_nonneg()?;
        v.check_nonneg()?;
        candidates.push(Candidate {
            label: format!("{label}[{i}]"),
            lu: ln_field(u.values()),
            lv: ln_field(v.values()),
        });
    }
    let strategy = SearchStrategy {
        families: Vec::new(),
        budget: candidates.len() * t_grid.len(),
        seed: 0,
        t_grid: t_grid.to_vec(),
    };
    let slots = (0..t_grid.len())
        .map(|t_index| Slot {
            t_index,
            objective: Objective::Pl { k },
            params: Params::default(),
        })
        .collect();
    let base = Params {
        k: Some(k),
        ..Params::default()
    };
    let mut report = run_explicit(space, &strategy, epsilon, slots, InequalityKind::Pl, base, &candidates)?;
    report.search.strategy = label.to_string();
    Ok(report)
}

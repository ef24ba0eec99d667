//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the criteria execute in
//! order and print their diagnostics. Criterion 12 reruns 1-11 and compares
//! the canonical JSON each of them produced.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use mmslab::functional::{logsob_defect, poincare_defect, talagrand_direct_defect, talagrand_dual_defect};
use mmslab::generators::{
    centered_coordinates, circle_lattice, default_half_width, gaussian_line, grid_lattice, path_lattice, two_point,
};
use mmslab::inequality::{
    bbl_check, bishop_gromov_check, bm_check, bonnet_myers_bound, bonnet_myers_check, distinct_balls,
    estimate_growth_exponent, estimate_k_star, level_set_inclusion, pl_check, pl_check_fields, superlevel, BmMode,
    DefectReport, Family, SearchStrategy, Witness, DEFAULT_TOL_K, DEFAULT_T_GRID,
};
use mmslab::means::{bbl_exponent, compose_exponents, Exponent};
use mmslab::product::{intermediate_compatibility, product_space, Combiner, ProductIndex, ProductSpec};
use mmslab::transport::brute_force_w2;
use mmslab::{wasserstein2, MetricMeasureSpace, ScalarField};

struct Outcome {
    pass: bool,
    detail: Vec<String>,
    /// Seed-determined content of the run; compared by criterion 12.
    canonical: Value,
}

impl Outcome {
    fn new() -> Self {
        Self {
            pass: true,
            detail: Vec::new(),
            canonical: json!({}),
        }
    }

    fn check(&mut self, ok: bool, msg: impl Into<String>) {
        let msg = msg.into();
        self.detail.push(format!("{} {msg}", if ok { "ok  " } else { "FAIL" }));
        self.pass &= ok;
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.detail.push(format!("info {}", msg.into()));
    }

    fn record(&mut self, key: &str, v: Value) {
        self.canonical.as_object_mut().unwrap().insert(key.to_string(), v);
    }

    fn within(&mut self, elapsed: Duration, limit: Duration) {
        self.check(elapsed < limit, format!("runtime {elapsed:.2?} < {limit:?}"));
    }
}

fn report_json(r: &DefectReport) -> Value {
    serde_json::to_value(r).unwrap()
}

fn all_families() -> Vec<Family> {
    vec![
        Family::IndicatorBalls,
        Family::IndicatorRandom,
        Family::LogAffine,
        Family::RandomPositive,
        Family::HillClimb,
    ]
}

/// `Σ_k a_k sin(ω_k x + φ_k)` with `Σ a_k ω_k = lip`.
fn lipschitz_field(rng: &mut ChaCha8Rng, xs: &[f64], lip: f64) -> Vec<f64> {
    let m = 4;
    let mut v = vec![0.0; xs.len()];
    for _ in 0..m {
        let w: f64 = rng.gen_range(0.1..2.0);
        let ph: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let amp = lip / (m as f64 * w);
        for (vi, x) in v.iter_mut().zip(xs) {
            *vi += amp * (w * x + ph).sin();
        }
    }
    v
}

fn line_k1() -> (MetricMeasureSpace, Vec<f64>) {
    let w = default_half_width(1.0);
    (gaussian_line(65, w, 1.0).unwrap(), centered_coordinates(65, w))
}

fn c1() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let two = two_point(1.0).unwrap();
    let s = SearchStrategy::new([Family::IndicatorBalls], 1000);
    let r = pl_check(&two, 0.0, &s, Some(0.1)).unwrap();
    let elapsed = start.elapsed();
    o.check(
        (r.defect + 0.5).abs() <= 1e-9,
        format!("two-point PL(0) defect {} = -0.5 ± 1e-9", r.defect),
    );
    o.check(
        r.evaluations <= 1000,
        format!("found within {} <= 1000 evaluations", r.evaluations),
    );
    let indicator_witness = matches!(
        &r.witness,
        Witness::Fields { u, v, .. } if u == &[1.0, 0.0] && v == &[0.0, 1.0]
    );
    o.check(indicator_witness, "witness is (1_a, 1_b)");
    o.within(elapsed, Duration::from_secs(1));
    o.record("report", report_json(&r));
    o
}

fn c2() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut paths = Vec::new();
    for n in [9usize, 17, 33] {
        let p = path_lattice(n, 1.0).unwrap();
        let balls = distinct_balls(&p).len();
        let exhaustive = SearchStrategy::new([Family::IndicatorBalls], balls * balls * DEFAULT_T_GRID.len());
        let pl = pl_check(&p, 0.0, &exhaustive, None).unwrap();
        let bbl = bbl_check(&p, 1.0, &exhaustive, Some(&[Exponent::Finite(1.0)]), None).unwrap();
        o.check(
            pl.defect >= -1e-6,
            format!(
                "path-{n}: exhaustive ball-pair PL(0) min defect {:.3e} (t={:?}) >= -1e-6",
                pl.defect, pl.params.t
            ),
        );
        o.check(
            bbl.defect >= -1e-6,
            format!(
                "path-{n}: exhaustive ball-pair BBL_1(0,1) min defect {:.3e} (t={:?}) >= -1e-6",
                bbl.defect, bbl.params.t
            ),
        );
        for tp in &pl.trace {
            o.note(format!(
                "path-{n}: PL(0) at t={:?}: {:.3e}",
                tp.params.t.unwrap(),
                tp.defect
            ));
        }
        paths.push(json!({"n": n, "pl": report_json(&pl), "bbl": report_json(&bbl)}));
    }
    let g = grid_lattice(9, 2, 1.0).unwrap();
    let r = pl_check(&g, 0.0, &SearchStrategy::new(all_families(), 10_000), None).unwrap();
    o.check(
        r.defect >= -1e-3,
        format!(
            "9x9 grid: sampled PL(0) min defect {:.3e} (t={:?}) >= -1e-3",
            r.defect, r.params.t
        ),
    );
    for tp in &r.trace {
        o.note(format!(
            "9x9 grid: PL(0) at t={:?}: {:.3e}",
            tp.params.t.unwrap(),
            tp.defect
        ));
    }
    o.within(start.elapsed(), Duration::from_secs(60));
    o.record("paths", Value::Array(paths));
    o.record("grid", report_json(&r));
    o
}

fn c3() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let s = SearchStrategy::new([Family::LogAffine, Family::HillClimb], 2000);
    let mut est = Vec::new();
    for k in [1.0, 2.0] {
        let line = gaussian_line(65, default_half_width(k), k).unwrap();
        let e = estimate_k_star(&line, &s, 0.0, 4.0, DEFAULT_TOL_K, None).unwrap();
        o.note(format!(
            "gaussian line K={k}: K* = {} ({} probes)",
            e.k_star,
            e.probes.len()
        ));
        est.push(e);
    }
    o.check(
        (0.6..=1.4).contains(&est[0].k_star),
        format!("K*(K=1) = {} in [0.6, 1.4]", est[0].k_star),
    );
    o.check(
        est[1].k_star > est[0].k_star,
        format!("K*(K=2) = {} > K*(K=1)", est[1].k_star),
    );
    o.within(start.elapsed(), Duration::from_secs(300));
    o.record("estimates", serde_json::to_value(&est).unwrap());
    o
}

fn c4() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let (line, xs) = line_k1();
    let r = line.mesh();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut defects = Vec::new();
    for _ in 0..100 {
        let psi = lipschitz_field(&mut rng, &xs, 1.0);
        let f = ScalarField::new(psi.iter().map(|p| p.exp()).collect());
        defects.push(logsob_defect(&line, &f, 1.0, r).unwrap());
    }
    let worst = defects.iter().copied().fold(f64::INFINITY, f64::min);
    o.check(
        worst >= -1e-3,
        format!("100 random Lipschitz fields: min LSI defect {worst:.3e} >= -1e-3"),
    );
    let mut exp_defects = Vec::new();
    for a in [0.25, 0.5, 1.0] {
        let f = ScalarField::new(xs.iter().map(|x| (a * x / 2.0).exp()).collect());
        let d = logsob_defect(&line, &f, 1.0, r).unwrap();
        o.check(d >= -1e-3, format!("f = exp({a}·x/2): LSI defect {d:.3e} >= -1e-3"));
        exp_defects.push(d);
    }
    o.within(start.elapsed(), Duration::from_secs(10));
    o.record("random", json!(defects));
    o.record("exponential", json!(exp_defects));
    o
}

fn c5() -> Outcome {
    let mut o = Outcome::new();
    let (line, xs) = line_k1();
    let r = line.mesh();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut defects = Vec::new();
    for _ in 0..100 {
        let h = lipschitz_field(&mut rng, &xs, 1.0);
        let mean = line.integrate(&h);
        let h = ScalarField::new(h.iter().map(|v| v - mean).collect());
        defects.push(poincare_defect(&line, &h, 1.0, r).unwrap().defect);
    }
    let worst = defects.iter().copied().fold(f64::INFINITY, f64::min);
    o.check(
        worst >= -1e-3,
        format!("100 random centered fields: min Poincaré defect {worst:.3e} >= -1e-3"),
    );

    // Same draws as criterion 4, h = log f: LSI(1 + a h) / (2 a² · Poincaré(h)) → 1.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = 1e-3;
    let mut ratios = Vec::new();
    for _ in 0..100 {
        let psi = lipschitz_field(&mut rng, &xs, 1.0);
        let h = psi;
        let lsi = logsob_defect(
            &line,
            &ScalarField::new(h.iter().map(|v| 1.0 + a * v).collect()),
            1.0,
            r,
        )
        .unwrap();
        let poinc = poincare_defect(&line, &ScalarField::new(h), 1.0, r).unwrap().defect;
        ratios.push(lsi / (2.0 * a * a * poinc));
    }
    let worst_ratio = ratios.iter().map(|q| (q - 1.0).abs()).fold(0.0, f64::max);
    o.check(
        worst_ratio <= 0.1,
        format!("linearization at a=1e-3: max |ratio - 1| = {worst_ratio:.3e} <= 0.1 over criterion 4's fields"),
    );
    o.record("poincare", json!(defects));
    o.record("ratios", json!(ratios));
    o
}

fn c6() -> Outcome {
    let mut o = Outcome::new();
    let (line, xs) = line_k1();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut direct = Vec::new();
    let mut dual = Vec::new();
    for _ in 0..50 {
        let psi = lipschitz_field(&mut rng, &xs, 2.0);
        let raw: Vec<f64> = psi.iter().map(|p| p.exp()).collect();
        let mass = line.integrate(&raw);
        let mu = ScalarField::new(raw.iter().map(|v| v / mass).collect());
        direct.push(talagrand_direct_defect(&line, &mu, 1.0).unwrap());
        let g = ScalarField::new(lipschitz_field(&mut rng, &xs, 3.0));
        dual.push(talagrand_dual_defect(&line, &g, 1.0).unwrap());
    }
    let wd = direct.iter().copied().fold(f64::INFINITY, f64::min);
    let wu = dual.iter().copied().fold(f64::INFINITY, f64::min);
    o.check(
        wd >= -1e-3,
        format!("50 random densities: min direct T2 defect {wd:.3e} >= -1e-3"),
    );
    o.check(
        wu >= -1e-6,
        format!("50 random g: min dual T2 defect {wu:.3e} >= -1e-6"),
    );

    // W₂ on ≤4-point supports inside the line, against the exhaustive oracle.
    let n = line.len();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mu0 = random_supported(&mut rng, n, 4);
        let mu1 = random_supported(&mut rng, n, 4);
        let (w, _) = wasserstein2(&line, &mu0, &mu1).unwrap();
        worst = worst.max((w - brute_force_w2(&line, &mu0, &mu1).unwrap()).abs());
    }
    o.check(
        worst <= 1e-6,
        format!("W2 vs brute force on 50 restrictions: max error {worst:.3e} <= 1e-6"),
    );
    o.record("direct", json!(direct));
    o.record("dual", json!(dual));
    o
}

/// A probability vector on `n` points supported on at most `k` of them.
fn random_supported(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<f64> {
    let size = rng.gen_range(1..=k.min(n));
    let idx = rand::seq::index::sample(rng, n, size);
    let mut mu = vec![0.0; n];
    for i in idx.iter() {
        mu[i] = rng.gen_range(0.05..1.0);
    }
    let s: f64 = mu.iter().sum();
    mu.iter().map(|v| v / s).collect()
}

fn c7() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let radii: Vec<f64> = (1..=5).map(|k| k as f64 / 10.0).collect();
    let path = path_lattice(101, 1.0).unwrap();
    let grid = grid_lattice(21, 2, 1.0).unwrap();
    // Interior centers: the lattice points within 0.05 of the middle.
    let path_centers: Vec<usize> = (45..=55).collect();
    let grid_centers: Vec<usize> = (9..=11).flat_map(|i| (9..=11).map(move |j| i * 21 + j)).collect();
    let mut out = Vec::new();
    for (name, space, centers, range, n_bg) in [
        ("path-101", &path, &path_centers, 0.9..=1.2, 1.2),
        ("grid-21x21", &grid, &grid_centers, 1.8..=2.2, 2.2),
    ] {
        let per: Vec<f64> = centers
            .iter()
            .map(|&c| estimate_growth_exponent(space, c, &radii).unwrap())
            .collect();
        let n_star = per.iter().copied().fold(0.0, f64::max);
        o.check(
            range.contains(&n_star),
            format!("{name}: N* = {n_star:.4} in [{}, {}]", range.start(), range.end()),
        );
        let bg_ok = centers
            .iter()
            .all(|&c| bishop_gromov_check(space, c, &radii, n_bg).unwrap().holds);
        o.check(
            bg_ok,
            format!("{name}: Bishop–Gromov holds at N = {n_bg} for every radius pair and center"),
        );
        out.push(json!({"space": name, "per_center": per}));
    }
    o.within(start.elapsed(), Duration::from_secs(30));
    o.record("growth", Value::Array(out));
    o
}

fn c8() -> Outcome {
    let mut o = Outcome::new();
    let path = path_lattice(9, 1.0).unwrap();
    let prod = product_space(&path, &path, ProductSpec::new(Combiner::Euclidean)).unwrap();
    let grid = grid_lattice(9, 2, 1.0).unwrap();
    let bit_exact = prod
        .distances()
        .iter()
        .zip(grid.distances())
        .all(|(a, b)| a.to_bits() == b.to_bits())
        && prod
            .measure()
            .iter()
            .zip(grid.measure())
            .all(|(a, b)| a.to_bits() == b.to_bits())
        && prod.points() == grid.points();
    o.check(
        bit_exact,
        "path-9 x path-9 (euclidean) equals grid_lattice(9, 2) bit for bit",
    );

    // Factor slack ε, product slack ε·sqrt(2). Two settings where the factor
    // passes: all of the t-grid at ε = 0.76h, and t = 1/2 at the default ε.
    let pairs = separable_pairs(&path, 3000, 8);
    let mut reports = Vec::new();
    for (t_grid, factor_eps) in [(DEFAULT_T_GRID.to_vec(), 0.76), (vec![0.5], 0.51)] {
        let eps = factor_eps * path.mesh();
        let product_eps = eps * Combiner::Euclidean.slack_factor();
        let strategy = SearchStrategy::new(all_families(), 10_000).with_t_grid(t_grid.clone());
        let factor = pl_check(&path, 0.0, &strategy, Some(eps)).unwrap();
        o.check(
            factor.defect >= -1e-6,
            format!(
                "t-grid {t_grid:?}, ε = {factor_eps}h: factor PL(0) defect {:.3e} >= -1e-6",
                factor.defect
            ),
        );
        for &t in &t_grid {
            let c = intermediate_compatibility(&path, &path, Combiner::Euclidean, t, eps).unwrap();
            o.check(
                c.is_compatible(),
                format!("  compatibility at t={t}: {} factor triples", c.checked),
            );
        }
        let r = pl_check_fields(&prod, 0.0, &t_grid, product_eps, "separable", &pairs).unwrap();
        o.check(
            r.defect >= -3e-6,
            format!(
                "  product PL(0) on {} separable pairs: min defect {:.3e} >= -3e-6",
                pairs.len(),
                r.defect
            ),
        );
        reports.push(json!({"factor": report_json(&factor), "product": report_json(&r)}));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let (n1, n2) = (rng.gen_range(1.0..5.0), rng.gen_range(1.0..5.0));
        let p = rng.gen_range(-1.0 / (n1 + n2)..3.0);
        let two = compose_exponents(Exponent::Finite(p), n1, n2).unwrap();
        let one = bbl_exponent(Exponent::Finite(p), n1 + n2).unwrap();
        let err = match (two, one) {
            (Exponent::Finite(a), Exponent::Finite(b)) => (a - b).abs(),
            (a, b) if a == b => 0.0,
            _ => f64::INFINITY,
        };
        worst = worst.max(err);
    }
    o.check(
        worst <= 1e-12,
        format!("exponent composition on 1e4 random (p, N1, N2): max error {worst:.3e}"),
    );
    let third = compose_exponents(Exponent::Finite(1.0), 1.0, 1.0).unwrap();
    o.check(
        matches!(third, Exponent::Finite(v) if (v - 1.0 / 3.0).abs() <= 1e-15),
        format!("compose(p=1, N1=N2=1) = {third}"),
    );
    o.record("tensorized", Value::Array(reports));
    o
}

/// `u = u₁ ⊗ u₂`, `v = v₁ ⊗ v₂` with factor fields drawn from ball indicators
/// and log-affine fields.
fn separable_pairs(factor: &MetricMeasureSpace, count: usize, seed: u64) -> Vec<(ScalarField, ScalarField)> {
    let n = factor.len();
    let ix = ProductIndex::new(n, n);
    let mut pool: Vec<Vec<f64>> = distinct_balls(factor)
        .iter()
        .map(|b| b.indicator(n).into_values())
        .collect();
    for x0 in [0, n - 1] {
        for a in [-4.0, -2.0, -1.0, 1.0, 2.0, 4.0] {
            pool.push(factor.row(x0).iter().map(|d| (a * d).exp()).collect());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            // Half the time v_i = u_i, where the factor instance is tight.
            let mut factor = || {
                let u = pool[rng.gen_range(0..pool.len())].clone();
                let v = if rng.gen_bool(0.5) {
                    u.clone()
                } else {
                    pool[rng.gen_range(0..pool.len())].clone()
                };
                (u, v)
            };
            let ((u1, v1), (u2, v2)) = (factor(), factor());
            (
                ScalarField::new(ix.tensor(&u1, &u2)),
                ScalarField::new(ix.tensor(&v1, &v2)),
            )
        })
        .collect()
}

fn c9() -> Outcome {
    let mut o = Outcome::new();
    o.check(
        bonnet_myers_bound(1.0, 1.0).unwrap() == 7.7,
        "bound(K=1, N=1) = 7.7 exactly",
    );
    let circle = circle_lattice(64, 6.0).unwrap();
    let s = SearchStrategy::new([Family::LogAffine, Family::HillClimb], 2000);
    let k = estimate_k_star(&circle, &s, 0.0, 16.0, DEFAULT_TOL_K, None).unwrap();
    let radii: Vec<f64> = (1..=5).map(|j| 0.3 * j as f64).collect();
    let centers: Vec<usize> = (0..circle.len()).collect();
    let n_star = centers
        .iter()
        .map(|&c| estimate_growth_exponent(&circle, c, &radii).unwrap())
        .fold(0.0, f64::max);
    o.note(format!(
        "circle-64 (C=6): K* = {}, N* = {n_star:.4}, diameter {}",
        k.k_star,
        circle.diameter()
    ));
    if k.k_star > 0.0 {
        let bm = bonnet_myers_check(&circle, k.k_star, n_star.max(1.0)).unwrap();
        o.check(
            bm.holds,
            format!("diam {} <= 7.7·sqrt(N*/K*) = {:.4}", bm.diameter, bm.bound),
        );
        o.record("bonnet_myers", serde_json::to_value(bm).unwrap());
    } else {
        o.note("K* = 0: the bound is vacuous");
    }
    o.record("k_star", serde_json::to_value(&k).unwrap());
    o.record("n_star", json!(n_star));
    o
}

fn c10() -> Outcome {
    let mut o = Outcome::new();
    let mut corpus: Vec<(String, MetricMeasureSpace, f64)> = Vec::new();
    for n in 3..=12 {
        let p = path_lattice(n, 1.0).unwrap();
        let c = circle_lattice(n, 1.0).unwrap();
        for f in [0.51, 0.76, 1.01] {
            corpus.push((format!("path-{n} ε={f}h"), p.clone(), f * p.mesh()));
            corpus.push((format!("circle-{n} ε={f}h"), c.clone(), f * c.mesh()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for k in 0..12 {
        let n = rng.gen_range(4..=8);
        let mut xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        xs.sort_by(f64::total_cmp);
        let dist: Vec<f64> = xs.iter().flat_map(|a| xs.iter().map(move |b| (a - b).abs())).collect();
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
        let s: f64 = raw.iter().sum();
        let space = MetricMeasureSpace::from_flat(
            format!("random-line-{k}"),
            (0..n).map(|i| i.to_string()).collect(),
            dist,
            raw.iter().map(|w| w / s).collect(),
            "acceptance",
        )
        .unwrap();
        let eps = rng.gen_range(0.5..2.0) * space.mesh();
        corpus.push((format!("random-line-{k} (n={n})"), space, eps));
    }
    let strategy = SearchStrategy::new(all_families(), 10_000);
    let mut passing = 0;
    let mut records = Vec::new();
    let mut worst_pl = f64::INFINITY;
    for (name, space, eps) in &corpus {
        let bm = bm_check(space, &DEFAULT_T_GRID, BmMode::Exhaustive, *eps).unwrap();
        if !bm.holds() {
            records.push(json!({"space": name, "bm": bm.defect}));
            continue;
        }
        passing += 1;
        let pl = pl_check(space, 0.0, &strategy, Some(*eps)).unwrap();
        worst_pl = worst_pl.min(pl.defect);
        if pl.defect < -1e-3 {
            o.check(false, format!("{name}: BM holds but PL(0) defect {:.3e}", pl.defect));
        }
        records.push(json!({"space": name, "bm": bm.defect, "pl": pl.defect}));
    }
    o.check(
        passing > 0 && worst_pl >= -1e-3,
        format!(
            "{passing} of {} spaces pass exhaustive BM; worst PL(0) defect among them {worst_pl:.3e} >= -1e-3",
            corpus.len()
        ),
    );

    let two = two_point(1.0).unwrap();
    let bm = bm_check(&two, &[0.5], BmMode::Exhaustive, 0.1).unwrap();
    let pl = pl_check(&two, 0.0, &SearchStrategy::new(all_families(), 10_000), Some(0.1)).unwrap();
    o.check(
        !bm.holds() && !pl.holds(),
        format!("two-point: BM {:.3} and PL(0) {:.3} both fail", bm.defect, pl.defect),
    );
    let (Witness::Subsets { a, b, t }, Witness::Fields { u, v, t: tp, .. }) = (&bm.witness, &pl.witness) else {
        panic!("unexpected witness kinds");
    };
    let (u, v) = (ScalarField::new(u.clone()), ScalarField::new(v.clone()));
    let (la, lb) = (max_value(&u), max_value(&v));
    let (sa, sb) = (superlevel(&u, la), superlevel(&v, lb));
    o.check(
        &sa == a && &sb == b && t == tp,
        format!(
            "PL witness top level sets {:?}, {:?} reproduce the BM witness {:?}, {:?}",
            sa.as_slice(),
            sb.as_slice(),
            a.as_slice(),
            b.as_slice()
        ),
    );
    let incl = level_set_inclusion(&two, &u, &v, *tp, 0.1, la, lb).unwrap();
    o.check(
        incl,
        "level-set inclusion {w* >= a^(1-t) b^t} ⊇ Z_t({u >= a}, {v >= b}) holds",
    );
    o.record("corpus", Value::Array(records));
    o.record("two_point", json!({"bm": report_json(&bm), "pl": report_json(&pl)}));
    o
}

fn max_value(f: &ScalarField) -> f64 {
    f.values().iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn c11() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut values = Vec::new();
    for k in 0..200 {
        let space = random_plane_space(&mut rng, k);
        let n = space.len();
        let mu0 = random_supported(&mut rng, n, 4);
        let mu1 = random_supported(&mut rng, n, 4);
        let (w, _) = wasserstein2(&space, &mu0, &mu1).unwrap();
        let b = brute_force_w2(&space, &mu0, &mu1).unwrap();
        worst = worst.max((w - b).abs());
        values.push(w);
    }
    o.check(
        worst <= 1e-6,
        format!("200 random instances: max |W2 - brute force| = {worst:.3e} <= 1e-6"),
    );

    let mut axiom_err = 0.0f64;
    for k in 0..100 {
        let space = random_plane_space(&mut rng, 1000 + k);
        let n = space.len();
        let m: Vec<Vec<f64>> = (0..3).map(|_| random_supported(&mut rng, n, n)).collect();
        let w = |a: &[f64], b: &[f64]| wasserstein2(&space, a, b).unwrap().0;
        let (ab, bc, ac, ba, aa) = (
            w(&m[0], &m[1]),
            w(&m[1], &m[2]),
            w(&m[0], &m[2]),
            w(&m[1], &m[0]),
            w(&m[0], &m[0]),
        );
        axiom_err = axiom_err
            .max(aa)
            .max((ab - ba).abs())
            .max(ac - ab - bc)
            .max(-ab.min(bc).min(ac));
    }
    o.check(
        axiom_err <= 1e-7,
        format!("W2 metric axioms on 100 random triples: max violation {axiom_err:.3e} <= 1e-7"),
    );
    o.record("w2", json!(values));
    o
}

fn random_plane_space(rng: &mut ChaCha8Rng, k: usize) -> MetricMeasureSpace {
    let n = rng.gen_range(2..=8);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0)))
        .collect();
    let dist = pts
        .iter()
        .flat_map(|a| {
            pts.iter()
                .map(move |b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt())
        })
        .collect();
    MetricMeasureSpace::uniform(format!("plane-{k}"), dist, "acceptance").unwrap()
}

type Criterion = (&'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 11] = [
    ("1  two-point refutation", c1),
    ("2  euclidean baseline", c2),
    ("3  curvature estimator", c3),
    ("4  log-Sobolev", c4),
    ("5  Poincaré", c5),
    ("6  Talagrand", c6),
    ("7  Bishop–Gromov", c7),
    ("8  tensorization", c8),
    ("9  Bonnet–Myers", c9),
    ("10 BM ⇒ PL(0)", c10),
    ("11 W2 oracle", c11),
];

fn main() {
    let mut failures = 0;
    let mut canonical = Vec::new();
    for (name, run) in CRITERIA {
        let start = Instant::now();
        let out = run();
        println!(
            "{} criterion {name} ({:.2?})",
            if out.pass { "PASS" } else { "FAIL" },
            start.elapsed()
        );
        for line in &out.detail {
            println!("       {line}");
        }
        failures += usize::from(!out.pass);
        canonical.push(serde_json::to_string(&out.canonical).unwrap());
    }

    let start = Instant::now();
    let mut differing = Vec::new();
    for ((name, run), first) in CRITERIA.iter().zip(&canonical) {
        if serde_json::to_string(&run().canonical).unwrap() != *first {
            differing.push(*name);
        }
    }
    let ok = differing.is_empty();
    println!(
        "{} criterion 12 determinism ({:.2?})",
        if ok { "PASS" } else { "FAIL" },
        start.elapsed()
    );
    let bytes: usize = canonical.iter().map(String::len).sum();
    println!(
        "       {} rerun of 1-11: {bytes} canonical bytes, differing: {differing:?}",
        if ok { "ok  " } else { "FAIL" }
    );
    failures += usize::from(!ok);

    println!("{} of 12 criteria failed", failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

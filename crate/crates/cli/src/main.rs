mod args;
mod inputs;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::Parser;
use mmslab::inequality::{
    bishop_gromov_check, bm_check, bonnet_myers_check, estimate_growth_exponent, estimate_k_star, BmMode, TracePoint,
};
use mmslab::{
    functional, generators, geodesy, inequality, io, product, DefectReport, Error, MetricMeasureSpace, SearchStrategy,
};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use args::{BmModeArg, Cli, Command, Format, Generator, Search, TalagrandForm};

const PROVENANCE_WARNING: &str = " [warning: ";
const CSV_HEADER: &str = "inequality,t,K,N,p,radius,defect,relative";

/// What a subcommand produced, before it is wrapped into a report.
struct Outcome {
    result: Value,
    holds: bool,
    rows: Vec<String>,
    digest: Option<String>,
    warnings: Vec<String>,
}

impl Outcome {
    fn new(result: impl Serialize, holds: bool) -> Result<Self> {
        Ok(Self {
            result: serde_json::to_value(result)?,
            holds,
            rows: Vec::new(),
            digest: None,
            warnings: Vec::new(),
        })
    }

    /// Records the space digest and any warning carried in its provenance.
    fn bind(&mut self, space: &MetricMeasureSpace) {
        self.digest = Some(digest(space));
        if let Some((_, w)) = space.provenance().split_once(PROVENANCE_WARNING) {
            self.warnings.push(w.trim_end_matches(']').to_string());
        }
    }
}

/// A space document rather than a report (generate, product).
struct SpaceOut(MetricMeasureSpace);

enum Produced {
    Report(Outcome),
    Space(SpaceOut),
}

fn digest(space: &MetricMeasureSpace) -> String {
    hex::encode(Sha256::digest(io::to_json(space).as_bytes()))
}

fn load(path: &Path) -> Result<MetricMeasureSpace> {
    io::load(path).with_context(|| format!("loading space {}", path.display()))
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn trace_rows(kind: &str, trace: &[TracePoint]) -> Vec<String> {
    trace
        .iter()
        .map(|tp| {
            let p = tp.params.p.map(|p| p.to_string()).unwrap_or_default();
            format!(
                "{kind},{},{},{},{p},{},{},{}",
                opt(tp.params.t),
                opt(tp.params.k),
                opt(tp.params.n),
                opt(tp.params.radius),
                tp.defect,
                tp.relative
            )
        })
        .collect()
}

fn row(kind: &str, k: Option<f64>, n: Option<f64>, radius: Option<f64>, defect: f64, relative: f64) -> String {
    format!("{kind},,{},{},,{},{defect},{relative}", opt(k), opt(n), opt(radius))
}

fn strategy(search: &Search) -> Result<SearchStrategy> {
    Ok(SearchStrategy::new(inputs::families(&search.families)?, search.budget)
        .with_seed(search.seed)
        .with_t_grid(search.t_grid.clone()))
}

fn holds_with(report: &DefectReport, tol: f64) -> bool {
    report.defect >= -tol * report.scale.abs()
}

fn search_outcome(report: DefectReport, tol: f64, space: &MetricMeasureSpace) -> Result<Outcome> {
    let kind = serde_json::to_value(report.inequality)?
        .as_str()
        .unwrap_or_default()
        .to_string();
    let holds = holds_with(&report, tol);
    let rows = trace_rows(&kind, &report.trace);
    let mut out = Outcome::new(&report, holds)?;
    out.rows = rows;
    out.bind(space);
    Ok(out)
}

fn isolated_warning(space: &MetricMeasureSpace, radius: f64) -> Option<String> {
    let iso = functional::isolated_points(space, radius);
    (!iso.is_empty()).then(|| {
        format!(
            "{} point(s) have no neighbour within radius {radius}; their slope is taken as 0: {iso:?}",
            iso.len()
        )
    })
}

fn run(cmd: &Command) -> Result<Produced> {
    let out = match cmd {
        Command::Generate {
            kind,
            n,
            length,
            dim,
            circumference,
            half_width,
            k,
            d,
            ..
        } => {
            let space = match kind {
                Generator::Path => generators::path_lattice(*n, *length)?,
                Generator::Grid => generators::grid_lattice(*n, *dim, *length)?,
                Generator::Circle => generators::circle_lattice(*n, *circumference)?,
                Generator::Gaussian => {
                    let w = half_width.unwrap_or_else(|| generators::default_half_width(*k));
                    generators::gaussian_line(*n, w, *k)?
                }
                Generator::TwoPoint => generators::two_point(*d)?,
            };
            return Ok(Produced::Space(SpaceOut(space)));
        }
        Command::Validate { space, .. } => {
            let text =
                fs::read_to_string(&space.space).with_context(|| format!("reading {}", space.space.display()))?;
            match io::from_json(&text) {
                Ok(s) => {
                    let mut o = Outcome::new(json!({ "valid": true, "points": s.len(), "mesh": s.mesh() }), true)?;
                    o.bind(&s);
                    o
                }
                Err(Error::Validation(report)) => Outcome::new(
                    json!({ "valid": false, "violations": report.violations, "message": report.to_string() }),
                    false,
                )?,
                Err(e) => return Err(e.into()),
            }
        }
        Command::Coverage { space, epsilon, .. } => {
            let s = load(&space.space)?;
            let eps = epsilon.unwrap_or_else(|| geodesy::default_epsilon(&s));
            let coverage = geodesy::midpoint_coverage(&s, eps)?;
            let mut o = Outcome::new(json!({ "coverage": coverage, "epsilon": eps }), true)?;
            o.bind(&s);
            o
        }
        Command::CheckBm {
            space, mode, search, ..
        } => {
            let s = load(&space.space)?;
            let eps = search.epsilon.unwrap_or_else(|| geodesy::default_epsilon(&s));
            let mode = match mode {
                BmModeArg::Exhaustive => BmMode::Exhaustive,
                BmModeArg::Sampled => BmMode::Sampled {
                    budget: search.budget,
                    seed: search.seed,
                },
            };
            search_outcome(bm_check(&s, &search.t_grid, mode, eps)?, search.tol, &s)?
        }
        Command::CheckPl { space, k, search, .. } => {
            let s = load(&space.space)?;
            let r = inequality::pl_check(&s, *k, &strategy(search)?, search.epsilon)?;
            search_outcome(r, search.tol, &s)?
        }
        Command::CheckBbl {
            space,
            n,
            p_grid,
            search,
            ..
        } => {
            let s = load(&space.space)?;
            let grid = p_grid
                .as_ref()
                .map(|g| g.iter().map(|p| inputs::exponent(p)).collect::<Result<Vec<_>>>())
                .transpose()?;
            let r = inequality::bbl_check(&s, *n, &strategy(search)?, grid.as_deref(), search.epsilon)?;
            search_outcome(r, search.tol, &s)?
        }
        Command::EstimateK {
            space,
            k_lo,
            k_hi,
            tol_k,
            search,
            ..
        } => {
            let s = load(&space.space)?;
            let mut o = match estimate_k_star(&s, &strategy(search)?, *k_lo, *k_hi, *tol_k, search.epsilon) {
                Ok(est) => {
                    let rows = est
                        .probes
                        .iter()
                        .map(|&(k, rel, _)| row("PL", Some(k), None, None, rel, rel))
                        .collect();
                    let mut o = Outcome::new(&est, true)?;
                    o.rows = rows;
                    o
                }
                Err(Error::FailsAtLowerBound { k_lo, defect }) => Outcome::new(
                    json!({ "k_star": null, "fails_at_lower_bound": { "K": k_lo, "defect": defect } }),
                    false,
                )?,
                Err(e) => return Err(e.into()),
            };
            o.bind(&s);
            o
        }
        Command::GrowthExponent {
            space,
            centers,
            radii,
            check_n,
            ..
        } => {
            let s = load(&space.space)?;
            let centers = inputs::centers(&s, centers)?;
            let mut per_center = Vec::with_capacity(centers.len());
            let mut exponent = 0.0f64;
            let mut holds = true;
            for &c in &centers {
                let e = estimate_growth_exponent(&s, c, radii)?;
                exponent = exponent.max(e);
                let bg = check_n.map(|n| bishop_gromov_check(&s, c, radii, n)).transpose()?;
                if let Some(bg) = &bg {
                    holds &= bg.holds;
                }
                per_center.push(json!({ "center": c, "exponent": e, "bishop_gromov": bg }));
            }
            let mut o = Outcome::new(json!({ "exponent": exponent, "centers": per_center }), holds)?;
            o.rows = vec![row("BG", None, Some(exponent), None, 0.0, 0.0)];
            o.bind(&s);
            o
        }
        Command::Logsob {
            space,
            field,
            k,
            radius,
            tol,
            ..
        } => {
            let s = load(&space.space)?;
            let f = inputs::field(&s, field)?;
            let r = radius.unwrap_or(s.mesh());
            let defect = functional::logsob_defect(&s, &f, *k, r)?;
            let mut o = Outcome::new(
                json!({ "inequality": "LSI", "K": k, "radius": r, "defect": defect }),
                defect >= -tol,
            )?;
            o.rows = vec![row("LSI", Some(*k), None, Some(r), defect, defect)];
            o.warnings.extend(isolated_warning(&s, r));
            o.bind(&s);
            o
        }
        Command::Poincare {
            space,
            field,
            k,
            radius,
            tol,
            ..
        } => {
            let s = load(&space.space)?;
            let h = inputs::field(&s, field)?;
            let r = radius.unwrap_or(s.mesh());
            let p = functional::poincare_defect(&s, &h, *k, r)?;
            let mut o = Outcome::new(
                json!({ "inequality": "POINCARE", "K": k, "radius": r, "defect": p.defect, "recentered_by": p.recentered_by }),
                p.defect >= -tol,
            )?;
            o.rows = vec![row("POINCARE", Some(*k), None, Some(r), p.defect, p.defect)];
            o.warnings.extend(isolated_warning(&s, r));
            if let Some(m) = p.recentered_by {
                o.warnings
                    .push(format!("field was not centered; subtracted its mean {m}"));
            }
            o.bind(&s);
            o
        }
        Command::Talagrand {
            space,
            form,
            field,
            mu,
            k,
            tol,
            ..
        } => {
            let s = load(&space.space)?;
            let (kind, defect) = match form {
                TalagrandForm::Dual => {
                    let Some(g) = field else {
                        bail!("--form dual needs --field")
                    };
                    (
                        "T2-DUAL",
                        functional::talagrand_dual_defect(&s, &inputs::field(&s, g)?, *k)?,
                    )
                }
                TalagrandForm::Direct => {
                    let Some(mu) = mu else {
                        bail!("--form direct needs --mu")
                    };
                    let w = inputs::measure(&s, mu)?;
                    let mut density = Vec::with_capacity(w.len());
                    for (i, (&m, &nu)) in w.iter().zip(s.measure()).enumerate() {
                        if nu > 0.0 {
                            density.push(m / nu);
                        } else if m > 0.0 {
                            bail!("mu charges point {i}, which has reference weight 0");
                        } else {
                            density.push(0.0);
                        }
                    }
                    (
                        "T2-DIRECT",
                        functional::talagrand_direct_defect(&s, &mmslab::ScalarField::new(density), *k)?,
                    )
                }
            };
            let mut o = Outcome::new(json!({ "inequality": kind, "K": k, "defect": defect }), defect >= -tol)?;
            o.rows = vec![row(kind, Some(*k), None, None, defect, defect)];
            o.bind(&s);
            o
        }
        Command::BonnetMyers { space, k, n, .. } => {
            let s = load(&space.space)?;
            let bm = bonnet_myers_check(&s, *k, *n)?;
            let mut o = Outcome::new(bm, bm.holds)?;
            o.rows = vec![row(
                "BONNET-MYERS",
                Some(*k),
                Some(*n),
                None,
                bm.slack,
                bm.slack / bm.bound,
            )];
            o.bind(&s);
            o
        }
        Command::Product {
            space,
            other,
            combiner,
            size_guard,
            ..
        } => {
            let s1 = load(&space.space)?;
            let s2 = load(other)?;
            let combiner = inputs::combiner(combiner)?;
            let spec = mmslab::ProductSpec {
                combiner,
                size_guard: *size_guard,
            };
            let prod = product::product_space(&s1, &s2, spec)?;
            let eps = geodesy::default_epsilon(&s1).max(geodesy::default_epsilon(&s2));
            let compat = product::intermediate_compatibility(&s1, &s2, combiner, 0.5, eps)?;
            let prod = match compat.warning() {
                Some(w) => {
                    eprintln!("warning: {w}");
                    let provenance = format!("{}{PROVENANCE_WARNING}{w}]", prod.provenance());
                    prod.with_measure(prod.measure().to_vec(), provenance)?
                }
                None => {
                    eprintln!(
                    "combiner {combiner} is intermediate-point compatible at t=0.5 (factor epsilon {eps}, product epsilon {})",
                        compat.product_epsilon
                    );
                    prod
                }
            };
            return Ok(Produced::Space(SpaceOut(prod)));
        }
        Command::W2 { space, mu0, mu1, .. } => {
            let s = load(&space.space)?;
            let m0 = inputs::measure(&s, mu0)?;
            let m1 = inputs::measure(&s, mu1)?;
            let (w2, plan) = mmslab::wasserstein2(&s, &m0, &m1)?;
            let mut o = Outcome::new(json!({ "w2": w2, "plan": plan }), true)?;
            o.rows = vec![row("W2", None, None, None, w2, w2)];
            o.bind(&s);
            o
        }
    };
    Ok(Produced::Report(out))
}

/// Report with resolved config; `sidecar` holds everything excluded from the
/// canonical form.
fn assemble(cmd: &Command, out: &Outcome) -> Result<Value> {
    let mut report = Map::new();
    if let Value::Object(fields) = &out.result {
        for (k, v) in fields {
            report.insert(k.clone(), v.clone());
        }
    } else {
        report.insert("result".into(), out.result.clone());
    }
    let mut warnings: Vec<Value> = report
        .remove("warnings")
        .and_then(|w| w.as_array().cloned())
        .unwrap_or_default();
    warnings.extend(out.warnings.iter().map(|w| Value::String(w.clone())));
    if !warnings.is_empty() {
        report.insert("warnings".into(), Value::Array(warnings));
    }
    report.insert("config".into(), serde_json::to_value(cmd)?);
    report.insert(
        "space_digest".into(),
        out.digest.clone().map_or(Value::Null, Value::String),
    );
    report.insert("holds".into(), Value::Bool(out.holds));
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    report.insert("sidecar".into(), json!({ "timestamp": secs }));
    Ok(Value::Object(report))
}

fn emit(dest: Option<&Path>, text: &str) -> Result<()> {
    match dest {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.write_all(b"\n")?;
            Ok(())
        }
    }
}

fn execute(cmd: &Command) -> Result<bool> {
    let output = cmd.output();
    match run(cmd)? {
        Produced::Space(SpaceOut(space)) => {
            emit(output.out.as_deref(), &io::to_json(&space))?;
            Ok(true)
        }
        Produced::Report(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            let report = assemble(cmd, &out)?;
            let text = serde_json::to_string_pretty(&report)?;
            match output.format {
                Format::Json => emit(output.out.as_deref(), &text)?,
                Format::CsvSummary => {
                    if let Some(p) = &output.out {
                        emit(Some(p), &text)?;
                    }
                    let mut csv = String::from(CSV_HEADER);
                    for r in &out.rows {
                        csv.push('\n');
                        csv.push_str(r);
                    }
                    emit(None, &csv)?;
                }
            }
            Ok(out.holds)
        }
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("MMSLAB_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("MMSLAB_THREADS={v:?} is not a thread count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = init_threads().and_then(|_| execute(&cli.command));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn provenance_warning_reaches_the_report() {
        let s = generators::path_lattice(3, 1.0).unwrap();
        let tagged = s
            .with_measure(
                s.measure().to_vec(),
                format!("p{PROVENANCE_WARNING}combiner x is not compatible]"),
            )
            .unwrap();
        let mut o = Outcome::new(json!({}), true).unwrap();
        o.bind(&tagged);
        assert_eq!(o.warnings, vec!["combiner x is not compatible".to_string()]);
        let mut o = Outcome::new(json!({}), true).unwrap();
        o.bind(&s);
        assert!(o.warnings.is_empty());
        assert_eq!(o.digest.unwrap().len(), 64);
    }
}

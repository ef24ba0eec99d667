//! Command-line encodings of fields, measures, exponents and combiners.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use mmslab::{Combiner, Exponent, Family, MetricMeasureSpace, ScalarField};

fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not a JSON array of numbers", path.display()))
}

fn index(space: &MetricMeasureSpace, s: &str) -> Result<usize> {
    let i: usize = s.parse().with_context(|| format!("bad point index {s:?}"))?;
    space.check_index(i)?;
    Ok(i)
}

fn number(s: &str) -> Result<f64> {
    s.parse().with_context(|| format!("bad number {s:?}"))
}

/// `file:<path>`, `const:<c>`, `dist:<i>[:<scale>]`, `exp-dist:<i>:<a>`.
pub fn field(space: &MetricMeasureSpace, spec: &str) -> Result<ScalarField> {
    let n = space.len();
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.as_slice() {
        ["file", rest @ ..] if !rest.is_empty() => read_vector(Path::new(&rest.join(":")))?,
        ["const", c] => vec![number(c)?; n],
        ["dist", i] => space.row(index(space, i)?).to_vec(),
        ["dist", i, s] => {
            let s = number(s)?;
            space.row(index(space, i)?).iter().map(|d| s * d).collect()
        }
        ["exp-dist", i, a] => {
            let a = number(a)?;
            space.row(index(space, i)?).iter().map(|d| (a * d).exp()).collect()
        }
        _ => bail!(
            "unrecognized field {spec:?}; expected file:<path>, const:<c>, dist:<i>[:<scale>] or exp-dist:<i>:<a>"
        ),
    };
    if values.len() != n {
        bail!(
            "field {spec:?} has {} values but the space has {n} points",
            values.len()
        );
    }
    Ok(ScalarField::new(values))
}

/// `dirac:<i>`, `uniform`, `nu`, `file:<path>`; the result sums to one.
pub fn measure(space: &MetricMeasureSpace, spec: &str) -> Result<Vec<f64>> {
    let n = space.len();
    let w = match spec.split_once(':') {
        Some(("dirac", i)) => {
            let mut w = vec![0.0; n];
            w[index(space, i)?] = 1.0;
            w
        }
        Some(("file", p)) => read_vector(Path::new(p))?,
        None if spec == "uniform" => vec![1.0 / n as f64; n],
        None if spec == "nu" => space.measure().to_vec(),
        _ => bail!("unrecognized measure {spec:?}; expected dirac:<i>, uniform, nu or file:<path>"),
    };
    if w.len() != n {
        bail!("measure {spec:?} has {} weights but the space has {n} points", w.len());
    }
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        bail!("measure {spec:?} has a negative or non-finite weight");
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        bail!("measure {spec:?} sums to {sum}, not 1");
    }
    Ok(w)
}

pub fn families(names: &[String]) -> Result<Vec<Family>> {
    names.iter().map(|s| Ok(s.trim().parse::<Family>()?)).collect()
}

pub fn exponent(s: &str) -> Result<Exponent> {
    Ok(match s.trim() {
        "inf" | "+inf" => Exponent::PlusInf,
        "-inf" => Exponent::MinusInf,
        other => Exponent::Finite(number(other)?),
    })
}

/// `euclidean`, `max` or `ell-<q>`.
pub fn combiner(s: &str) -> Result<Combiner> {
    Ok(match s {
        "euclidean" => Combiner::Euclidean,
        "max" => Combiner::Max,
        _ => match s.strip_prefix("ell-") {
            Some(q) => Combiner::EllQ(number(q)?),
            None => bail!("unrecognized combiner {s:?}; expected euclidean, max or ell-<q>"),
        },
    })
}

/// Comma-separated indices, or `all`.
pub fn centers(space: &MetricMeasureSpace, s: &str) -> Result<Vec<usize>> {
    if s == "all" {
        return Ok((0..space.len()).collect());
    }
    s.split(',').map(|c| index(space, c.trim())).collect()
}

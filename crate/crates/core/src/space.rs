//! Finite metric-measure spaces: a point set, a dense distance matrix and a
//! probability measure.
//!
//! Every subset of a finite space is measurable, so the outer measure used by
//! Brunn–Minkowski type statements coincides with the measure itself and
//! [`MetricMeasureSpace::subset_measure`] serves both roles.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weights must sum to one within this tolerance to be accepted as-is.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Weight sums off by at most this much are silently renormalized.
pub const WEIGHT_RENORMALIZE_TOL: f64 = 1e-9;
/// Relative slack for floating-point roundoff in metric comparisons.
pub const METRIC_ROUNDOFF: f64 = 1e-12;

const MAX_REPORTED: usize = 64;

/// A single violated axiom, with the indices that witness it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "kebab-case")]
pub enum Violation {
    Shape { expected: usize, got: usize, what: String },
    NonFinite { i: usize, j: usize },
    NegativeDistance { i: usize, j: usize, value: f64 },
    Diagonal { i: usize, value: f64 },
    Symmetry { i: usize, j: usize },
    Triangle { i: usize, j: usize, k: usize },
    NegativeWeight { i: usize, value: f64 },
    WeightSum { sum: f64 },
    Mesh,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape { expected, got, what } => {
                write!(f, "{what}: expected {expected} entries, got {got}")
            }
            Violation::NonFinite { i, j } => write!(f, "non-finite distance at ({i},{j})"),
            Violation::NegativeDistance { i, j, value } => {
                write!(f, "negative distance {value} at ({i},{j})")
            }
            Violation::Diagonal { i, value } => write!(f, "nonzero diagonal {value} at ({i},{i})"),
            Violation::Symmetry { i, j } => write!(f, "symmetry violated at ({i},{j})"),
            Violation::Triangle { i, j, k } => {
                write!(f, "triangle inequality violated at ({i},{j},{k})")
            }
            Violation::NegativeWeight { i, value } => write!(f, "negative weight {value} at {i}"),
            Violation::WeightSum { sum } => write!(f, "weights sum to {sum}, not 1"),
            Violation::Mesh => write!(f, "all pairwise distances are zero"),
        }
    }
}

/// Outcome of [`validate`]: empty iff every invariant holds.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks the metric-measure axioms on a row-major `n × n` distance matrix and
/// a weight vector. At most 64 violations are listed.
pub fn validate(dist: &[f64], measure: &[f64]) -> ValidationReport {
    let n = measure.len();
    let mut out = Vec::new();
    if dist.len() != n * n {
        out.push(Violation::Shape {
            expected: n * n,
            got: dist.len(),
            what: "distance matrix".into(),
        });
        return ValidationReport { violations: out };
    }
    let d = |i: usize, j: usize| dist[i * n + j];

    for i in 0..n {
        for j in 0..n {
            let v = d(i, j);
            if !v.is_finite() {
                out.push(Violation::NonFinite { i, j });
            } else if v < 0.0 {
                out.push(Violation::NegativeDistance { i, j, value: v });
            }
        }
        if d(i, i) != 0.0 && d(i, i).is_finite() {
            out.push(Violation::Diagonal { i, value: d(i, i) });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if d(i, j) != d(j, i) {
                out.push(Violation::Symmetry { i, j });
            }
        }
    }
    // The triangle scan is cubic; only run it on an otherwise sane matrix.
    if out.is_empty() {
        let triangles: Vec<Violation> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut local = Vec::new();
                'outer: for j in 0..n {
                    let dij = d(i, j);
                    for k in 0..n {
                        let bound = dij + d(j, k);
                        if d(i, k) > bound + METRIC_ROUNDOFF * bound.max(1.0) {
                            local.push(Violation::Triangle { i, j, k });
                            if local.len() >= MAX_REPORTED {
                                break 'outer;
                            }
                        }
                    }
                }
                local
            })
            .collect();
        out.extend(triangles);
    }

    let mut sum = 0.0;
    for (i, &w) in measure.iter().enumerate() {
        if !(w >= 0.0) || !w.is_finite() {
            out.push(Violation::NegativeWeight { i, value: w });
        }
        sum += w;
    }
    if !((sum - 1.0).abs() <= WEIGHT_SUM_TOL) {
        out.push(Violation::WeightSum { sum });
    }
    if n >= 2 && dist.iter().all(|&v| v == 0.0) {
        out.push(Violation::Mesh);
    }
    out.truncate(MAX_REPORTED);
    ValidationReport { violations: out }
}

/// A finite metric-measure space. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMeasureSpace {
    name: String,
    points: Vec<String>,
    dist: Vec<f64>,
    measure: Vec<f64>,
    mesh: f64,
    provenance: String,
}

impl MetricMeasureSpace {
    /// Builds a space from a row-major distance matrix, renormalizing weights
    /// that sum to one within `1e-9` and rejecting anything that fails
    /// [`validate`].
    pub fn from_flat(
        name: impl Into<String>,
        points: Vec<String>,
        dist: Vec<f64>,
        mut measure: Vec<f64>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let n = measure.len();
        if points.len() != n {
            return Err(Error::Validation(ValidationReport {
                violations: vec![Violation::Shape {
                    expected: n,
                    got: points.len(),
                    what: "points".into(),
                }],
            }));
        }
        let sum: f64 = measure.iter().sum();
        let off = (sum - 1.0).abs();
        if off > WEIGHT_SUM_TOL && off <= WEIGHT_RENORMALIZE_TOL && measure.iter().all(|w| *w >= 0.0) {
            for w in &mut measure {
                *w /= sum;
            }
        }
        let report = validate(&dist, &measure);
        if !report.is_empty() {
            return Err(Error::Validation(report));
        }
        let mesh = dist.iter().copied().filter(|&v| v > 0.0).fold(f64::INFINITY, f64::min);
        let mesh = if mesh.is_finite() { mesh } else { 0.0 };
        Ok(Self {
            name: name.into(),
            points,
            dist,
            measure,
            mesh,
            provenance: provenance.into(),
        })
    }

    /// Same as [`from_flat`](Self::from_flat) with the matrix given by rows.
    pub fn from_rows(
        name: impl Into<String>,
        points: Vec<String>,
        rows: &[Vec<f64>],
        measure: Vec<f64>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let n = measure.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Validation(ValidationReport {
                    violations: vec![Violation::Shape {
                        expected: n,
                        got: row.len(),
                        what: format!("row {i}"),
                    }],
                }));
            }
        }
        if rows.len() != n {
            return Err(Error::Validation(ValidationReport {
                violations: vec![Violation::Shape {
                    expected: n,
                    got: rows.len(),
                    what: "rows".into(),
                }],
            }));
        }
        let flat = rows.iter().flatten().copied().collect();
        Self::from_flat(name, points, flat, measure, provenance)
    }

    /// Uniform measure on the given matrix, with points labelled `0..n`.
    pub fn uniform(name: impl Into<String>, dist: Vec<f64>, provenance: impl Into<String>) -> Result<Self> {
        let n = (dist.len() as f64).sqrt().round() as usize;
        let points = (0..n).map(|i| i.to_string()).collect();
        Self::from_flat(name, points, dist, vec![1.0 / n as f64; n], provenance)
    }

    /// Same metric, new weights (validated and normalized as in construction).
    pub fn with_measure(&self, measure: Vec<f64>, provenance: impl Into<String>) -> Result<Self> {
        Self::from_flat(
            self.name.clone(),
            self.points.clone(),
            self.dist.clone(),
            measure,
            provenance,
        )
    }

    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    /// Row-major distance matrix.
    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    /// Minimum positive pairwise distance (0 for a single point).
    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    /// Re-runs the axiom checks; always empty for a constructed space.
    pub fn validate(&self) -> ValidationReport {
        validate(&self.dist, &self.measure)
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, len: self.len() })
        }
    }

    /// Closed ball `{z : d(center, z) <= radius}`.
    pub fn ball(&self, center: usize, radius: f64) -> Result<PointSubset> {
        self.check_index(center)?;
        if !(radius >= 0.0) {
            return Err(Error::InvalidArgument(format!("radius must be >= 0, got {radius}")));
        }
        let slack = METRIC_ROUNDOFF * radius.max(1.0);
        let members = self
            .row(center)
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= radius + slack)
            .map(|(z, _)| z)
            .collect();
        Ok(PointSubset { members })
    }

    pub fn subset_measure(&self, subset: &PointSubset) -> f64 {
        subset.iter().map(|i| self.measure[i]).sum()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// `∫ f dν`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.measure).map(|(f, w)| f * w).sum()
    }

    pub fn full_subset(&self) -> PointSubset {
        PointSubset {
            members: (0..self.len()).collect(),
        }
    }
}

/// A set of point indices, kept sorted and deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointSubset {
    members: Vec<usize>,
}

impl PointSubset {
    pub fn new(space_len: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = indices.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&i| i >= space_len) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: space_len,
            });
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self { members })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub(crate) fn from_sorted(members: Vec<usize>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Self { members }
    }

    /// Subset of `0..64` given by the set bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        Self {
            members: (0..64).filter(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn is_subset_of(&self, other: &PointSubset) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    pub fn indicator(&self, space_len: usize) -> ScalarField {
        let mut values = vec![0.0; space_len];
        for i in self.iter() {
            values[i] = 1.0;
        }
        ScalarField { values, nonneg: true }
    }
}

/// One real value per point of a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    values: Vec<f64>,
    nonneg: bool,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        let nonneg = values.iter().all(|&v| v >= 0.0);
        Self { values, nonneg }
    }

    /// Fails unless every value is `>= 0`.
    pub fn nonneg(values: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NegativeField { index, value });
        }
        Ok(Self { values, nonneg: true })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::new(vec![c; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_nonneg(&self) -> bool {
        self.nonneg
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }

    pub(crate) fn check_len(&self, space: &MetricMeasureSpace) -> Result<()> {
        if self.values.len() == space.len() {
            Ok(())
        } else {
            Err(Error::FieldLength {
                expected: space.len(),
                got: self.values.len(),
            })
        }
    }

    pub(crate) fn check_nonneg(&self) -> Result<()> {
        match self.values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            Some((index, &value)) => Err(Error::NegativeField { index, value }),
            None => Ok(()),
        }
    }
}

impl std::ops::Index<usize> for ScalarField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

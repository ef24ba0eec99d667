//! Two-factor product spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::DEFAULT_SIZE_GUARD;
use crate::geodesy::is_intermediate;
use crate::space::MetricMeasureSpace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Combiner {
    /// `sqrt(d₁² + d₂²)`.
    Euclidean,
    /// `(d₁^q + d₂^q)^{1/q}`, `q ≥ 1`.
    EllQ(f64),
    /// `max(d₁, d₂)`.
    Max,
}

impl Combiner {
    pub fn combine(&self, d1: f64, d2: f64) -> f64 {
        match *self {
            Combiner::Euclidean => (d1 * d1 + d2 * d2).sqrt(),
            Combiner::EllQ(q) if q.is_infinite() => d1.max(d2),
            Combiner::EllQ(q) => (d1.powf(q) + d2.powf(q)).powf(1.0 / q),
            Combiner::Max => d1.max(d2),
        }
    }

    /// Norm of the slack vector `(ε, ε)`.
    pub fn slack_factor(&self) -> f64 {
        self.combine(1.0, 1.0)
    }

    fn check(&self) -> Result<()> {
        match *self {
            Combiner::EllQ(q) if !(q >= 1.0) => {
                Err(Error::InvalidArgument(format!("ell-q combiner needs q >= 1, got {q}")))
            }
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for Combiner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Combiner::Euclidean => write!(f, "euclidean"),
            Combiner::EllQ(q) => write!(f, "ell-{q}"),
            Combiner::Max => write!(f, "max"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductSpec {
    pub combiner: Combiner,
    pub size_guard: usize,
}

impl Default for ProductSpec {
    fn default() -> Self {
        Self {
            combiner: Combiner::Euclidean,
            size_guard: DEFAULT_SIZE_GUARD,
        }
    }
}

impl ProductSpec {
    pub fn new(combiner: Combiner) -> Self {
        Self {
            combiner,
            ..Self::default()
        }
    }
}

/// `(X₁ × X₂, d, ν₁ ⊗ ν₂)`; point `(i₁, i₂)` has index `i₁·n₂ + i₂`.
pub fn product_space(
    s1: &MetricMeasureSpace,
    s2: &MetricMeasureSpace,
    spec: ProductSpec,
) -> Result<MetricMeasureSpace> {
    spec.combiner.check()?;
    let (n1, n2) = (s1.len(), s2.len());
    let size = n1.saturating_mul(n2);
    if size > spec.size_guard {
        return Err(Error::SizeGuard {
            size,
            limit: spec.size_guard,
        });
    }
    let mut dist = vec![0.0; size * size];
    for i in 0..size {
        let (i1, i2) = (i / n2, i % n2);
        for j in 0..size {
            let (j1, j2) = (j / n2, j % n2);
            dist[i * size + j] = spec.combiner.combine(s1.dist(i1, j1), s2.dist(i2, j2));
        }
    }
    let mut points = Vec::with_capacity(size);
    let mut measure = Vec::with_capacity(size);
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            points.push(format!("({},{})", s1.points()[i1], s2.points()[i2]));
            measure.push(s1.measure()[i1] * s2.measure()[i2]);
        }
    }
    // from_flat re-runs the full validation, triangle inequality included.
    MetricMeasureSpace::from_flat(
        format!("{}x{}", s1.name(), s2.name()),
        points,
        dist,
        measure,
        format!(
            "product({}; {}; combiner={})",
            s1.provenance(),
            s2.provenance(),
            spec.combiner
        ),
    )
}

/// Index layout of a two-factor product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductIndex {
    pub n1: usize,
    pub n2: usize,
}

impl ProductIndex {
    pub fn new(n1: usize, n2: usize) -> Self {
        Self { n1, n2 }
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `index ↦ (i₁, i₂)`.
    pub fn factor_projection(&self, index: usize) -> Result<(usize, usize)> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange { index, len: self.len() });
        }
        Ok((index / self.n2, index % self.n2))
    }

    /// `(i₁, i₂) ↦ index`.
    pub fn product_index(&self, i1: usize, i2: usize) -> Result<usize> {
        if i1 >= self.n1 {
            return Err(Error::IndexOutOfRange {
                index: i1,
                len: self.n1,
            });
        }
        if i2 >= self.n2 {
            return Err(Error::IndexOutOfRange {
                index: i2,
                len: self.n2,
            });
        }
        Ok(i1 * self.n2 + i2)
    }

    /// Marginals of a measure on the product.
    pub fn marginals(&self, measure: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut m1 = vec![0.0; self.n1];
        let mut m2 = vec![0.0; self.n2];
        for (k, w) in measure.iter().enumerate() {
            m1[k / self.n2] += w;
            m2[k % self.n2] += w;
        }
        (m1, m2)
    }

    /// `f(i₁, i₂) = f₁(i₁) · f₂(i₂)`.
    pub fn tensor(&self, f1: &[f64], f2: &[f64]) -> Vec<f64> {
        f1.iter().flat_map(|a| f2.iter().map(move |b| a * b)).collect()
    }
}

/// Outcome of [`intermediate_compatibility`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Compatibility {
    pub combiner: Combiner,
    pub t: f64,
    pub factor_epsilon: f64,
    pub product_epsilon: f64,
    pub checked: usize,
    /// First few `((x₁,x₂), (y₁,y₂), (z₁,z₂))` that break compatibility.
    pub failures: Vec<[(usize, usize); 3]>,
    pub failure_count: usize,
}

impl Compatibility {
    pub fn is_compatible(&self) -> bool {
        self.failure_count == 0
    }

    pub fn warning(&self) -> Option<String> {
        (!self.is_compatible()).then(|| {
            format!(
                "combiner {} is not intermediate-point compatible at t={} ({} of {} factor triples fail)",
                self.combiner, self.t, self.failure_count, self.checked
            )
        })
    }
}

/// Tests whether `z₁ ∈ Z_t^ε(x₁, y₁)` and `z₂ ∈ Z_t^ε(x₂, y₂)` imply
/// `(z₁, z₂) ∈ Z_t^{ε'}((x₁, x₂), (y₁, y₂))` with `ε' = ε·‖(1, 1)‖`.
pub fn intermediate_compatibility(
    s1: &MetricMeasureSpace,
    s2: &MetricMeasureSpace,
    combiner: Combiner,
    t: f64,
    epsilon: f64,
) -> Result<Compatibility> {
    combiner.check()?;
    let triples = |s: &MetricMeasureSpace| {
        let n = s.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if is_intermediate(s.dist(x, z), s.dist(z, y), s.dist(x, y), t, epsilon) {
                        out.push((x, y, z));
                    }
                }
            }
        }
        out
    };
    let (t1, t2) = (triples(s1), triples(s2));
    let product_epsilon = epsilon * combiner.slack_factor();
    let mut failures = Vec::new();
    let mut failure_count = 0;
    for &(x1, y1, z1) in &t1 {
        for &(x2, y2, z2) in &t2 {
            let dxy = combiner.combine(s1.dist(x1, y1), s2.dist(x2, y2));
            let dxz = combiner.combine(s1.dist(x1, z1), s2.dist(x2, z2));
            let dzy = combiner.combine(s1.dist(z1, y1), s2.dist(z2, y2));
            if !is_intermediate(dxz, dzy, dxy, t, product_epsilon) {
                failure_count += 1;
                if failures.len() < 8 {
                    failures.push([(x1, x2), (y1, y2), (z1, z2)]);
                }
            }
        }
    }
    Ok(Compatibility {
        combiner,
        t,
        factor_epsilon: epsilon,
        product_epsilon,
        checked: t1.len() * t2.len(),
        failures,
        failure_count,
    })
}

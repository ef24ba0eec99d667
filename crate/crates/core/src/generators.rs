//! Canonical small spaces with known analytic behaviour.

use crate::error::{Error, Result};
use crate::space::{MetricMeasureSpace, ScalarField};

/// Default cap on the number of points a generator or product may produce.
pub const DEFAULT_SIZE_GUARD: usize = 4096;

fn uniform_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// `n` equally spaced points on `[0, length]`, uniform weights.
pub fn path_lattice(n: usize, length: f64) -> Result<MetricMeasureSpace> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("path lattice needs n >= 2, got {n}")));
    }
    if !(length > 0.0) {
        return Err(Error::InvalidArgument(format!("length must be positive, got {length}")));
    }
    let h = length / (n - 1) as f64;
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            dist[i * n + j] = i.abs_diff(j) as f64 * h;
        }
    }
    let points = (0..n).map(|i| i.to_string()).collect();
    MetricMeasureSpace::from_flat(
        format!("path-{n}"),
        points,
        dist,
        uniform_weights(n),
        format!("path_lattice(n={n}, length={length})"),
    )
}

/// The two-point space with the given separation; identical to `path_lattice(2, d)`.
pub fn two_point(d: f64) -> Result<MetricMeasureSpace> {
    let s = path_lattice(2, d)?;
    MetricMeasureSpace::from_flat(
        "two-point",
        vec!["a".into(), "b".into()],
        s.distances().to_vec(),
        s.measure().to_vec(),
        format!("two_point(d={d})"),
    )
}

/// Cubic grid `{0, h, ..., L}^dim` with Euclidean distances and uniform weights.
///
/// Points are ordered row-major (first axis slowest) and labelled `(i,j,..)`,
/// which makes `grid_lattice(n, 2, L)` coincide bit-for-bit with the Euclidean
/// product of two `path_lattice(n, L)`.
pub fn grid_lattice(n: usize, dim: usize, length: f64) -> Result<MetricMeasureSpace> {
    grid_lattice_guarded(n, dim, length, DEFAULT_SIZE_GUARD)
}

pub fn grid_lattice_guarded(n: usize, dim: usize, length: f64, guard: usize) -> Result<MetricMeasureSpace> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dim must be 1, 2 or 3, got {dim}")));
    }
    if dim == 1 {
        return path_lattice(n, length);
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("grid needs n >= 2 per axis, got {n}")));
    }
    if !(length > 0.0) {
        return Err(Error::InvalidArgument(format!("length must be positive, got {length}")));
    }
    let size = n.checked_pow(dim as u32).unwrap_or(usize::MAX);
    if size > guard {
        return Err(Error::SizeGuard { size, limit: guard });
    }
    let h = length / (n - 1) as f64;
    let coords: Vec<Vec<usize>> = (0..size)
        .map(|mut k| {
            let mut c = vec![0; dim];
            for a in (0..dim).rev() {
                c[a] = k % n;
                k /= n;
            }
            c
        })
        .collect();
    let mut dist = vec![0.0; size * size];
    for i in 0..size {
        for j in 0..size {
            dist[i * size + j] = combine_l2(&coords[i], &coords[j], h);
        }
    }
    let points = coords
        .iter()
        .map(|c| format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    // Product of per-axis weights, as a product measure would produce.
    let w = (0..dim).fold(1.0, |acc, _| acc * (1.0 / n as f64));
    MetricMeasureSpace::from_flat(
        format!("grid-{n}^{dim}"),
        points,
        dist,
        vec![w; size],
        format!("grid_lattice(n={n}, dim={dim}, length={length})"),
    )
}

// Nested so that a 3-D grid equals ((path x path) x path) exactly.
fn combine_l2(a: &[usize], b: &[usize], h: f64) -> f64 {
    let mut acc = a[0].abs_diff(b[0]) as f64 * h;
    for k in 1..a.len() {
        let dk = a[k].abs_diff(b[k]) as f64 * h;
        acc = (acc * acc + dk * dk).sqrt();
    }
    acc
}

/// `n` equally spaced points on a circle of the given circumference with the
/// arc-length metric and uniform weights.
pub fn circle_lattice(n: usize, circumference: f64) -> Result<MetricMeasureSpace> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("circle needs n >= 3, got {n}")));
    }
    if !(circumference > 0.0) {
        return Err(Error::InvalidArgument("circumference must be positive".into()));
    }
    let h = circumference / n as f64;
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let gap = i.abs_diff(j);
            dist[i * n + j] = gap.min(n - gap) as f64 * h;
        }
    }
    let points = (0..n).map(|i| i.to_string()).collect();
    MetricMeasureSpace::from_flat(
        format!("circle-{n}"),
        points,
        dist,
        uniform_weights(n),
        format!("circle_lattice(n={n}, circumference={circumference})"),
    )
}

/// Positions of the `n` lattice points of `[-half_width, half_width]`, exactly
/// antisymmetric about 0.
pub fn centered_coordinates(n: usize, half_width: f64) -> Vec<f64> {
    let step = half_width / (n - 1) as f64;
    (0..n).map(|i| (2 * i as i64 - (n as i64 - 1)) as f64 * step).collect()
}

/// Default truncation of the Gaussian line, `4 / sqrt(K)`.
pub fn default_half_width(curvature: f64) -> f64 {
    4.0 / curvature.sqrt()
}

/// Flat line `[-W, W]` with weights `∝ exp(-K x² / 2)`: the model space with
/// curvature-dimension bound `K`.
pub fn gaussian_line(n: usize, half_width: f64, curvature: f64) -> Result<MetricMeasureSpace> {
    if !(curvature > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "curvature must be positive, got {curvature}"
        )));
    }
    let base = path_lattice(n, 2.0 * half_width)?;
    let xs = centered_coordinates(n, half_width);
    let raw: Vec<f64> = xs.iter().map(|x| (-curvature * x * x / 2.0).exp()).collect();
    let total: f64 = raw.iter().sum();
    let weights = raw.iter().map(|w| w / total).collect();
    let points = xs.iter().map(|x| format!("{x}")).collect();
    MetricMeasureSpace::from_flat(
        format!("gaussian-line-{n}"),
        points,
        base.distances().to_vec(),
        weights,
        format!("gaussian_line(n={n}, half_width={half_width}, curvature={curvature})"),
    )
}

/// New weights `∝ old · exp(-V)`, renormalized; the metric is unchanged.
pub fn reweight(space: &MetricMeasureSpace, potential: &ScalarField) -> Result<MetricMeasureSpace> {
    potential.check_len(space)?;
    if potential.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("potential must be finite".into()));
    }
    // Shift by the minimum so exp never underflows everywhere at once.
    let vmin = potential.values().iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = space
        .measure()
        .iter()
        .zip(potential.values())
        .map(|(w, v)| w * (-(v - vmin)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidArgument("reweighting left no mass".into()));
    }
    space.with_measure(
        raw.iter().map(|w| w / total).collect(),
        format!("{}; reweighted", space.provenance()),
    )
}

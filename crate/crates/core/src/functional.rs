//! Gradient norms, entropy, and the functional inequalities: logarithmic
//! Sobolev, Poincaré and the two forms of Talagrand's transport inequality.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{MetricMeasureSpace, ScalarField};
use crate::transport::wasserstein2;

/// Densities must integrate to one within this tolerance.
pub const DENSITY_TOL: f64 = 1e-9;
/// Fields with `|∫h dν|` above this are recentered before a Poincaré check.
pub const CENTERING_TOL: f64 = 1e-9;

/// Local slopes `|∇_r g|(x) = max_{0 < d(x,z) <= r} |g(x) - g(z)| / d(x,z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientField {
    pub values: Vec<f64>,
    /// `f64::INFINITY` for the global slope.
    pub radius: f64,
}

impl GradientField {
    pub fn squared_integral(&self, space: &MetricMeasureSpace) -> f64 {
        space.integrate(&self.values.iter().map(|g| g * g).collect::<Vec<_>>())
    }
}

/// Points with no other point within `radius`; their slope is reported as 0.
pub fn isolated_points(space: &MetricMeasureSpace, radius: f64) -> Vec<usize> {
    (0..space.len())
        .filter(|&x| {
            !space
                .row(x)
                .iter()
                .enumerate()
                .any(|(z, &d)| z != x && d > 0.0 && d <= radius)
        })
        .collect()
}

pub fn gradient_norm(space: &MetricMeasureSpace, g: &ScalarField, radius: f64) -> Result<GradientField> {
    g.check_len(space)?;
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gradient radius must be > 0, got {radius}"
        )));
    }
    let gv = g.values();
    let values = (0..space.len())
        .into_par_iter()
        .map(|x| {
            space
                .row(x)
                .iter()
                .enumerate()
                .filter(|&(z, &d)| z != x && d > 0.0 && d <= radius)
                .map(|(z, &d)| (gv[x] - gv[z]).abs() / d)
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(GradientField { values, radius })
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `H_ν(f) = ∫ f log f dν - (∫ f dν) log(∫ f dν)` with `0 log 0 = 0`.
pub fn entropy(space: &MetricMeasureSpace, f: &ScalarField) -> Result<f64> {
    f.check_len(space)?;
    f.check_nonneg()?;
    let mass = space.integrate(f.values());
    if !(mass > 0.0) {
        return Err(Error::ZeroMass);
    }
    let first: f64 = f.values().iter().zip(space.measure()).map(|(&v, w)| w * xlogx(v)).sum();
    Ok(first - xlogx(mass))
}

/// `(2/K) ∫ |∇_r f|² dν - H_ν(f²)`; nonnegative iff the log-Sobolev
/// inequality holds for this `f`.
pub fn logsob_defect(space: &MetricMeasureSpace, f: &ScalarField, k: f64, radius: f64) -> Result<f64> {
    check_curvature(k)?;
    f.check_nonneg()?;
    let grad = gradient_norm(space, f, radius)?;
    let sq = f.map(|v| v * v);
    let h = entropy(space, &sq)?;
    Ok(2.0 / k * grad.squared_integral(space) - h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareOutcome {
    pub defect: f64,
    /// Mean subtracted from the input when it was not centered.
    pub recentered_by: Option<f64>,
}

/// `(1/K) ∫ |∇_r h|² dν - ∫ h² dν` for a centered `h`; an uncentered input is
/// centered first and the shift reported.
pub fn poincare_defect(space: &MetricMeasureSpace, h: &ScalarField, k: f64, radius: f64) -> Result<PoincareOutcome> {
    check_curvature(k)?;
    h.check_len(space)?;
    let mean = space.integrate(h.values());
    let (field, recentered_by) = if mean.abs() > CENTERING_TOL {
        (h.map(|v| v - mean), Some(mean))
    } else {
        (h.clone(), None)
    };
    let grad = gradient_norm(space, &field, radius)?;
    let l2 = space.integrate(&field.values().iter().map(|v| v * v).collect::<Vec<_>>());
    Ok(PoincareOutcome {
        defect: grad.squared_integral(space) / k - l2,
        recentered_by,
    })
}

/// Hopf–Lax transform `Q₁g(x) = min_y g(y) + d(x,y)² / 2`.
pub fn inf_convolution_q1(space: &MetricMeasureSpace, g: &ScalarField) -> Result<ScalarField> {
    g.check_len(space)?;
    let gv = g.values();
    let values = (0..space.len())
        .into_par_iter()
        .map(|x| {
            space
                .row(x)
                .iter()
                .zip(gv)
                .map(|(&d, &gy)| gy + d * d / 2.0)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(ScalarField::new(values))
}

/// `K ∫ g dν - log ∫ exp(K Q₁g) dν`: the dual (variational) Talagrand defect.
pub fn talagrand_dual_defect(space: &MetricMeasureSpace, g: &ScalarField, k: f64) -> Result<f64> {
    check_curvature(k)?;
    let q = inf_convolution_q1(space, g)?;
    let exps: Vec<f64> = q.values().iter().map(|v| k * v).collect();
    let shift = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = exps
        .iter()
        .zip(space.measure())
        .map(|(e, w)| w * (e - shift).exp())
        .sum();
    Ok(k * space.integrate(g.values()) - (shift + s.ln()))
}

/// `(2/K) H_ν(μ) - W₂(μν, ν)²` for a density `μ` with respect to `ν`.
pub fn talagrand_direct_defect(space: &MetricMeasureSpace, mu: &ScalarField, k: f64) -> Result<f64> {
    check_curvature(k)?;
    mu.check_len(space)?;
    mu.check_nonneg()?;
    let mass = space.integrate(mu.values());
    if (mass - 1.0).abs() > DENSITY_TOL {
        return Err(Error::Marginal(format!("density integrates to {mass}, not 1")));
    }
    let h = entropy(space, mu)?;
    let moved: Vec<f64> = mu.values().iter().zip(space.measure()).map(|(d, w)| d * w).collect();
    let total: f64 = moved.iter().sum();
    let moved: Vec<f64> = moved.iter().map(|m| m / total).collect();
    let (w2, _) = wasserstein2(space, &moved, space.measure())?;
    Ok(2.0 / k * h - w2 * w2)
}

fn check_curvature(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("K must be positive, got {k}")))
    }
}

//! Pointwise-minimal admissible third functions for PL(K) and BBL_p(0,N).
//!
//! Both definitions are monotone in the third function, so for given `(u, v)`
//! the quantifier over `w` is resolved exactly by
//! `w*(z) = sup { term(x, y) : z ∈ Z_t^ε(x, y) }`.
//! Everything here works on natural logarithms of the fields so that steep
//! log-affine test functions neither overflow nor underflow.

use crate::error::{Error, Result};
use crate::geodesy::{is_intermediate, PairIndex};
use crate::means::{bbl_exponent, log_p_mean, Exponent};
use crate::space::{MetricMeasureSpace, ScalarField};

/// The pairwise lower bound imposed on the third function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Objective {
    /// `u(x)^{1-t} v(y)^t exp(-K t(1-t)/2 d²)`, concluded by the geometric mean.
    Pl { k: f64 },
    /// `M_t^p(f(x), g(y))`, concluded by `M_t^{p/(1+Np)}`.
    Bbl { p: Exponent, conclusion: Exponent },
}

impl Objective {
    pub(crate) fn bbl(p: Exponent, n: f64) -> Result<Self> {
        Ok(Objective::Bbl {
            p,
            conclusion: bbl_exponent(p, n)?,
        })
    }

    #[inline]
    fn ln_term(&self, lu: f64, lv: f64, t: f64, d2: f64) -> f64 {
        match *self {
            Objective::Pl { k } => scaled(1.0 - t, lu) + scaled(t, lv) - k * t * (1.0 - t) / 2.0 * d2,
            Objective::Bbl { p, .. } => log_p_mean(lu, lv, t, p),
        }
    }

    fn ln_rhs(&self, ln_int_u: f64, ln_int_v: f64, t: f64) -> f64 {
        match *self {
            Objective::Pl { .. } => scaled(1.0 - t, ln_int_u) + scaled(t, ln_int_v),
            Objective::Bbl { conclusion, .. } => log_p_mean(ln_int_u, ln_int_v, t, conclusion),
        }
    }
}

// c · ln x with the convention x^0 = 1 (also for x = 0).
#[inline]
fn scaled(c: f64, ln_x: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * ln_x
    }
}

pub(crate) fn ln_field(values: &[f64]) -> Vec<f64> {
    values.iter().map(|v| v.ln()).collect()
}

/// `ln ∫ e^{l} dν` with a max shift.
pub(crate) fn ln_integral(space: &MetricMeasureSpace, ln_values: &[f64]) -> f64 {
    let m = ln_values
        .iter()
        .zip(space.measure())
        .filter(|(_, &w)| w > 0.0)
        .map(|(l, _)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let s: f64 = ln_values
        .iter()
        .zip(space.measure())
        .filter(|(_, &w)| w > 0.0)
        .map(|(l, w)| w * (l - m).exp())
        .sum();
    m + s.ln()
}

/// One evaluated instance: `ln ∫ w* dν` against the log of the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Evaluation {
    pub ln_lhs: f64,
    pub ln_rhs: f64,
}

impl Evaluation {
    /// `∫w* / rhs - 1`; scale-free, used to rank candidates.
    pub fn relative(&self) -> f64 {
        if self.ln_rhs == f64::NEG_INFINITY {
            0.0
        } else {
            (self.ln_lhs - self.ln_rhs).exp_m1()
        }
    }

    pub fn defect(&self) -> f64 {
        self.ln_lhs.exp() - self.ln_rhs.exp()
    }

    pub fn scale(&self) -> f64 {
        self.ln_rhs.exp()
    }
}

/// `ln w*` through a prebuilt pair index.
pub(crate) fn ln_extremal_indexed(index: &PairIndex, obj: &Objective, lu: &[f64], lv: &[f64]) -> Vec<f64> {
    let t = index.t;
    (0..index.len())
        .map(|z| {
            index
                .generators(z)
                .map(|(x, y, d2)| obj.ln_term(lu[x], lv[y], t, d2))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

pub(crate) fn evaluate_indexed(
    space: &MetricMeasureSpace,
    index: &PairIndex,
    obj: &Objective,
    lu: &[f64],
    lv: &[f64],
) -> Evaluation {
    let lw = ln_extremal_indexed(index, obj, lu, lv);
    Evaluation {
        ln_lhs: ln_integral(space, &lw),
        ln_rhs: obj.ln_rhs(ln_integral(space, lu), ln_integral(space, lv), index.t),
    }
}

// Direct O(n³) route, independent of `PairIndex`.
fn ln_extremal_direct(
    space: &MetricMeasureSpace,
    obj: &Objective,
    lu: &[f64],
    lv: &[f64],
    t: f64,
    epsilon: f64,
) -> Vec<f64> {
    let n = space.len();
    let mut out = vec![f64::NEG_INFINITY; n];
    for x in 0..n {
        for y in 0..n {
            let dxy = space.dist(x, y);
            let term = obj.ln_term(lu[x], lv[y], t, dxy * dxy);
            if term == f64::NEG_INFINITY {
                continue;
            }
            for (z, slot) in out.iter_mut().enumerate() {
                let member = (z == x && x == y) || is_intermediate(space.dist(x, z), space.dist(z, y), dxy, t, epsilon);
                if member && term > *slot {
                    *slot = term;
                }
            }
        }
    }
    out
}

fn check_inputs(space: &MetricMeasureSpace, u: &ScalarField, v: &ScalarField, t: f64, epsilon: f64) -> Result<()> {
    u.check_len(space)?;
    v.check_len(space)?;
    u.check_nonneg()?;
    v.check_nonneg()?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t must lie in [0,1], got {t}")));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {epsilon}")));
    }
    Ok(())
}

/// Smallest `w` with `u(x)^{1-t} v(y)^t exp(-K t(1-t) d(x,y)²/2) <= w(z)` for
/// every `z ∈ Z_t^ε(x, y)`.
pub fn pl_extremal_w(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    v: &ScalarField,
    t: f64,
    k: f64,
    epsilon: f64,
) -> Result<ScalarField> {
    check_inputs(space, u, v, t, epsilon)?;
    let lw = ln_extremal_direct(
        space,
        &Objective::Pl { k },
        &ln_field(u.values()),
        &ln_field(v.values()),
        t,
        epsilon,
    );
    Ok(ScalarField::new(lw.iter().map(|l| l.exp()).collect()))
}

/// `∫ w* dν - (∫ u dν)^{1-t} (∫ v dν)^t`.
pub fn pl_defect(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    v: &ScalarField,
    t: f64,
    k: f64,
    epsilon: f64,
) -> Result<f64> {
    let w = pl_extremal_w(space, u, v, t, k, epsilon)?;
    let iu = space.integrate(u.values());
    let iv = space.integrate(v.values());
    Ok(space.integrate(w.values()) - iu.powf(1.0 - t) * iv.powf(t))
}

/// Smallest `h` with `M_t^p(f(x), g(y)) <= h(z)` for every `z ∈ Z_t^ε(x, y)`.
pub fn bbl_extremal_h(
    space: &MetricMeasureSpace,
    f: &ScalarField,
    g: &ScalarField,
    t: f64,
    p: Exponent,
    epsilon: f64,
) -> Result<ScalarField> {
    check_inputs(space, f, g, t, epsilon)?;
    // The conclusion exponent is irrelevant for h*.
    let obj = Objective::Bbl { p, conclusion: p };
    let lh = ln_extremal_direct(space, &obj, &ln_field(f.values()), &ln_field(g.values()), t, epsilon);
    Ok(ScalarField::new(lh.iter().map(|l| l.exp()).collect()))
}

/// `∫ h* dν - M_t^{p/(1+Np)}(∫ f dν, ∫ g dν)`.
#[allow(clippy::too_many_arguments)]
pub fn bbl_defect(
    space: &MetricMeasureSpace,
    f: &ScalarField,
    g: &ScalarField,
    t: f64,
    p: Exponent,
    n: f64,
    epsilon: f64,
) -> Result<f64> {
    let conclusion = bbl_exponent(p, n)?;
    let h = bbl_extremal_h(space, f, g, t, p, epsilon)?;
    let rhs = crate::means::p_mean(space.integrate(f.values()), space.integrate(g.values()), t, conclusion);
    Ok(space.integrate(h.values()) - rhs)
}

//! Power means `M_t^p(a, b)` and the exponent algebra of Borell–Brascamp–Lieb
//! inequalities.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this magnitude the geometric-mean branch replaces the power formula.
pub const P_ZERO_GUARD: f64 = 1e-8;
/// Arguments above this are handled in the log domain.
pub const OVERFLOW_GUARD: f64 = 1e150;
/// Tolerance for recognizing `p = -1/N`.
pub const CRITICAL_TOL: f64 = 1e-12;

/// A real exponent, or one of the two limiting means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exponent {
    MinusInf,
    Finite(f64),
    PlusInf,
}

impl Exponent {
    pub fn finite(self) -> Option<f64> {
        match self {
            Exponent::Finite(p) => Some(p),
            _ => None,
        }
    }

    /// Real-line ordering with the infinities at the ends.
    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::MinusInf => f64::NEG_INFINITY,
            Exponent::Finite(p) => p,
            Exponent::PlusInf => f64::INFINITY,
        }
    }
}

impl From<f64> for Exponent {
    fn from(p: f64) -> Self {
        if p == f64::INFINITY {
            Exponent::PlusInf
        } else if p == f64::NEG_INFINITY {
            Exponent::MinusInf
        } else {
            Exponent::Finite(p)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::MinusInf => write!(f, "-inf"),
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::PlusInf => write!(f, "+inf"),
        }
    }
}

/// `M_t^p(a, b) = ((1-t) a^p + t b^p)^{1/p}`, with the geometric mean at
/// `p = 0`, min/max at `∓∞`, and `0` whenever `a·b = 0`.
pub fn p_mean(a: f64, b: f64, t: f64, p: Exponent) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0, "p_mean of negative arguments");
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    if a == b {
        return a;
    }
    match p {
        Exponent::MinusInf => a.min(b),
        Exponent::PlusInf => a.max(b),
        Exponent::Finite(p) if p.abs() < P_ZERO_GUARD => geometric(a, b, t),
        Exponent::Finite(p) => {
            if t == 0.0 {
                return a;
            }
            if t == 1.0 {
                return b;
            }
            if a > OVERFLOW_GUARD || b > OVERFLOW_GUARD || (p.abs() * a.max(b).ln().abs()) > 600.0 {
                log_power_mean(a, b, t, p)
            } else {
                ((1.0 - t) * a.powf(p) + t * b.powf(p)).powf(1.0 / p)
            }
        }
    }
}

fn geometric(a: f64, b: f64, t: f64) -> f64 {
    ((1.0 - t) * a.ln() + t * b.ln()).exp()
}

// log M = (1/p) · logsumexp(ln(1-t) + p ln a, ln t + p ln b)
fn log_power_mean(a: f64, b: f64, t: f64, p: f64) -> f64 {
    let x = (1.0 - t).ln() + p * a.ln();
    let y = t.ln() + p * b.ln();
    let m = x.max(y);
    let lse = m + ((x - m).exp() + (y - m).exp()).ln();
    (lse / p).exp()
}

/// `ln M_t^p(a, b)` from `ln a` and `ln b`; `-∞` when either argument is 0.
pub fn log_p_mean(ln_a: f64, ln_b: f64, t: f64, p: Exponent) -> f64 {
    if ln_a == f64::NEG_INFINITY || ln_b == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if ln_a == ln_b {
        return ln_a;
    }
    match p {
        Exponent::MinusInf => ln_a.min(ln_b),
        Exponent::PlusInf => ln_a.max(ln_b),
        Exponent::Finite(p) if p.abs() < P_ZERO_GUARD => (1.0 - t) * ln_a + t * ln_b,
        Exponent::Finite(p) => {
            if t == 0.0 {
                return ln_a;
            }
            if t == 1.0 {
                return ln_b;
            }
            let x = (1.0 - t).ln() + p * ln_a;
            let y = t.ln() + p * ln_b;
            let m = x.max(y);
            (m + ((x - m).exp() + (y - m).exp()).ln()) / p
        }
    }
}

/// Conclusion exponent `p / (1 + N p)` of `BBL_p(0, N)`.
pub fn bbl_exponent(p: Exponent, n: f64) -> Result<Exponent> {
    if !(n >= 1.0) {
        return Err(Error::InvalidArgument(format!("N must be >= 1, got {n}")));
    }
    let critical = -1.0 / n;
    match p {
        Exponent::MinusInf => Err(Error::ExponentDomain {
            p: f64::NEG_INFINITY,
            bound: critical,
        }),
        Exponent::PlusInf => Ok(Exponent::Finite(1.0 / n)),
        Exponent::Finite(p) => {
            if (p - critical).abs() <= CRITICAL_TOL {
                Ok(Exponent::MinusInf)
            } else if p < critical {
                Err(Error::ExponentDomain { p, bound: critical })
            } else if p == 0.0 {
                Ok(Exponent::Finite(0.0))
            } else {
                Ok(Exponent::Finite(p / (1.0 + n * p)))
            }
        }
    }
}

/// Composes the exponent map through two factors, `N1` then `N2`; equals
/// `bbl_exponent(p, N1 + N2)`.
pub fn compose_exponents(p: Exponent, n1: f64, n2: f64) -> Result<Exponent> {
    let total = n1 + n2;
    if let Exponent::Finite(pf) = p {
        if pf < -1.0 / total - CRITICAL_TOL {
            return Err(Error::ExponentDomain {
                p: pf,
                bound: -1.0 / total,
            });
        }
    }
    let first = bbl_exponent(p, n1)?;
    match first {
        Exponent::MinusInf => Ok(Exponent::MinusInf),
        other => bbl_exponent(other, n2),
    }
}

use serde::{Deserialize, Serialize};

use crate::means::Exponent;
use crate::space::PointSubset;

/// Relative tolerance: an instance "holds" when `defect >= -1e-6 · scale`,
/// `scale` being the right-hand side of the inequality.
pub const DEFECT_TOL_REL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InequalityKind {
    #[serde(rename = "BM")]
    Bm,
    #[serde(rename = "PL")]
    Pl,
    #[serde(rename = "BBL")]
    Bbl,
    #[serde(rename = "LSI")]
    Lsi,
    #[serde(rename = "POINCARE")]
    Poincare,
    #[serde(rename = "T2-DUAL")]
    T2Dual,
    #[serde(rename = "T2-DIRECT")]
    T2Direct,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

/// The inputs that realize a reported defect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    None,
    Subsets {
        a: PointSubset,
        b: PointSubset,
        t: f64,
    },
    Fields {
        label: String,
        u: Vec<f64>,
        v: Vec<f64>,
        t: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        p: Option<Exponent>,
    },
    Field {
        label: String,
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchInfo {
    pub strategy: String,
    pub iterations: usize,
    pub seed: u64,
}

/// Minimal defect at one parameter point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub params: Params,
    pub defect: f64,
    pub relative: f64,
}

/// Signed slack of an inequality instance together with how it was found.
/// A nonnegative defect means the inequality held on the instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub inequality: InequalityKind,
    pub params: Params,
    pub defect: f64,
    /// Right-hand side of the witnessing instance.
    pub scale: f64,
    pub witness: Witness,
    pub search: SearchInfo,
    pub seed: u64,
    pub evaluations: usize,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TracePoint>,
}

impl DefectReport {
    pub fn holds(&self) -> bool {
        holds(self.defect, self.scale)
    }

    /// `defect / scale`, or 0 when the right-hand side vanishes.
    pub fn relative(&self) -> f64 {
        relative(self.defect, self.scale)
    }
}

pub fn holds(defect: f64, scale: f64) -> bool {
    defect >= -DEFECT_TOL_REL * scale.abs()
}

pub(crate) fn relative(defect: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        defect / scale
    } else {
        0.0
    }
}

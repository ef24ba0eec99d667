//! Finite metric-measure spaces and numerical checks of synthetic
//! curvature-dimension inequalities: Brunn–Minkowski, Prékopa–Leindler,
//! Borell–Brascamp–Lieb, log-Sobolev, Poincaré and Talagrand.
//!
//! Universally quantified inequalities are checked through their *defect*
//! (left side minus right side, after substituting the pointwise-minimal
//! admissible witness). A nonnegative defect means the instance holds.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod functional;
pub mod generators;
pub mod geodesy;
pub mod inequality;
pub mod io;
pub mod means;
pub mod product;
pub mod space;
pub mod transport;

pub use error::{Error, Result};
pub use geodesy::{default_epsilon, IntermediateSet};
pub use inequality::{DefectReport, Family, InequalityKind, SearchStrategy, Witness};
pub use means::Exponent;
pub use product::{Combiner, ProductSpec};
pub use space::{MetricMeasureSpace, PointSubset, ScalarField, ValidationReport};
pub use transport::{wasserstein2, TransportPlan};

//! Isoperimetric deficit inequalities for tangential and cyclic polygons.
//!
//! A polygon is described by its circle radius `R` and the half-central angles
//! `theta_1..theta_n` (each in `(0, pi/2)`, summing to `pi`). Perimeter, area
//! and the deficit `L^2 - 4 n tan(pi/n) A` follow in closed form; the
//! inequality catalog, Schur certifier and extremal search all work from them.

pub mod analytic;
pub mod catalog;
pub mod error;
pub mod polygon;
pub mod real;
pub mod schur;
pub mod search;
pub mod simplex;
pub mod slack;

pub use analytic::{builtin_families, jensen_slack, thm21_slack, thm22_slack, thm51_slack};
pub use analytic::{AnalyticSlack, Convexity, FamilyKind, FunctionFamily, OdeCase};
pub use catalog::{list_entries, Catalog, CatalogEntry, Evaluation, ParamDomain, SlackRecord};
pub use error::{Error, Result};
pub use polygon::{
    dn, make_angle_vector, measure, measure_with, regular_angles, AngleVector, GeometricSummary,
    PolygonKind, PolygonModel,
};
pub use real::{HighFloat, Precision, Real};
pub use schur::{
    apply_doubly_stochastic, certify, extremum_at_center, schur_condition_value,
    DoublyStochasticMatrix, SchurClass, SchurVerdict, SymmetricFunction,
};
pub use simplex::{sample_simplex, SimplexSampler};
pub use slack::Direction;

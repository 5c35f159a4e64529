//! Extremal search over the angle simplex: optimizer, lattice oracle and falsifier.

mod extremal;
pub mod nelder_mead;

pub use extremal::{
    bounded_compositions, falsify, grid_scan, minimize_slack, Counterexample, FalsifyOutcome,
    GridScanResult, SearchProblem, SearchResult, CERTIFY_REL_TOL, DEFAULT_STARTS, GRID_POINT_CAP,
    MAX_STARTS,
};

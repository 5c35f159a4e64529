//! Sign conventions and tolerances shared by every inequality evaluator.
//!
//! A slack is always oriented so that `slack >= 0` means the inequality holds
//! as stated.

use serde::{Deserialize, Serialize};

/// Relative tolerance for "holds with equality" and "violated".
pub const EQUALITY_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// `lhs >= rhs`
    #[serde(rename = "GE")]
    Ge,
    /// `lhs <= rhs`
    #[serde(rename = "LE")]
    Le,
}

impl Direction {
    pub fn slack(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Direction::Ge => lhs - rhs,
            Direction::Le => rhs - lhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Direction::Ge => ">=",
            Direction::Le => "<=",
        }
    }
}

/// `max(1, |lhs|, |rhs|)`.
pub fn side_scale(lhs: f64, rhs: f64) -> f64 {
    1f64.max(lhs.abs()).max(rhs.abs())
}

pub fn is_equality(slack: f64, scale: f64) -> bool {
    slack.abs() <= EQUALITY_REL_TOL * scale
}

pub fn is_violation(slack: f64, scale: f64) -> bool {
    slack < -EQUALITY_REL_TOL * scale
}

//! Scalar function families and the analytic inequalities built on them.
//!
//! * [`jensen_slack`]: `sum f(theta_i) - n f(sigma)`.
//! * [`thm21_slack`]: for positive strictly convex `f`, with `P = sum f(theta_i)`
//!   and `s = f(sigma)`:
//!   `P^(2a) - (n s)^a P^a >= s^a (P^a - (n s)^a)`.
//! * [`thm22_slack`]: same hypotheses, integer `k >= 2`:
//!   `P^(2a) - (n s)^a P^a <= P^(ka) - (n s)^(ka)`.
//! * [`thm51_slack`]: for `f` with `f'^2 - f f'' = mu` constant and two angle
//!   vectors with equal sums, compares `2 sum f(theta_i) f'(psi_i)` with
//!   `sum f(theta_i) f'(theta_i) + sum f(psi_i) f'(psi_i)`; the direction is
//!   fixed by the signs of `f'` and `f''` (see [`OdeCase`]).
//!
//! All three are sharp: equality holds exactly at `theta = (sigma, ..., sigma)`
//! (respectively `theta = psi`).

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygon::{AngleVector, SUM_REL_TOL};
use crate::slack::{is_equality, side_scale, Direction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convexity {
    StrictlyConvex,
    StrictlyConcave,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FamilyKind {
    Tan,
    Sec,
    Csc,
    Square,
    Sin,
    Cos,
    Sinh,
    /// `theta -> cosh(shift - theta)`.
    ShiftedCosh { shift: f64 },
}

/// A scalar function on `(0, bound)` with closed-form first and second derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionFamily {
    kind: FamilyKind,
    bound: f64,
}

/// Default interval end for the hyperbolic families.
pub const DEFAULT_HYPERBOLIC_BOUND: f64 = 1.0;

impl FunctionFamily {
    pub fn tan() -> Self {
        Self::on(FamilyKind::Tan, FRAC_PI_2)
    }
    pub fn sec() -> Self {
        Self::on(FamilyKind::Sec, FRAC_PI_2)
    }
    pub fn csc() -> Self {
        Self::on(FamilyKind::Csc, FRAC_PI_2)
    }
    /// `x^2` on `(0, 1)`.
    pub fn square() -> Self {
        Self::on(FamilyKind::Square, 1.0)
    }
    pub fn sin() -> Self {
        Self::on(FamilyKind::Sin, FRAC_PI_2)
    }
    pub fn cos() -> Self {
        Self::on(FamilyKind::Cos, FRAC_PI_2)
    }

    pub fn sinh(bound: f64) -> Result<Self> {
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::InvalidArgument(format!("interval end {bound}")));
        }
        Ok(Self::on(FamilyKind::Sinh, bound))
    }

    /// `cosh(shift - theta)` on `(0, bound)`; needs `shift >= bound` so that
    /// `f'` keeps one sign.
    pub fn shifted_cosh(bound: f64, shift: f64) -> Result<Self> {
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::InvalidArgument(format!("interval end {bound}")));
        }
        if !(shift >= bound && shift.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "shift {shift} must be at least the interval end {bound}"
            )));
        }
        Ok(Self::on(FamilyKind::ShiftedCosh { shift }, bound))
    }

    fn on(kind: FamilyKind, bound: f64) -> Self {
        FunctionFamily { kind, bound }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FamilyKind::Tan => "tan",
            FamilyKind::Sec => "sec",
            FamilyKind::Csc => "csc",
            FamilyKind::Square => "square",
            FamilyKind::Sin => "sin",
            FamilyKind::Cos => "cos",
            FamilyKind::Sinh => "sinh",
            FamilyKind::ShiftedCosh { .. } => "shifted_cosh",
        }
    }

    /// Right end `l` of the open domain `(0, l)`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn contains(&self, x: f64) -> bool {
        x > 0.0 && x < self.bound
    }

    pub fn f(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::Tan => x.tan(),
            FamilyKind::Sec => 1.0 / x.cos(),
            FamilyKind::Csc => 1.0 / x.sin(),
            FamilyKind::Square => x * x,
            FamilyKind::Sin => x.sin(),
            FamilyKind::Cos => x.cos(),
            FamilyKind::Sinh => x.sinh(),
            FamilyKind::ShiftedCosh { shift } => (shift - x).cosh(),
        }
    }

    pub fn f_prime(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::Tan => {
                let c = x.cos();
                1.0 / (c * c)
            }
            FamilyKind::Sec => {
                let c = x.cos();
                x.sin() / (c * c)
            }
            FamilyKind::Csc => {
                let s = x.sin();
                -x.cos() / (s * s)
            }
            FamilyKind::Square => 2.0 * x,
            FamilyKind::Sin => x.cos(),
            FamilyKind::Cos => -x.sin(),
            FamilyKind::Sinh => x.cosh(),
            FamilyKind::ShiftedCosh { shift } => -(shift - x).sinh(),
        }
    }

    pub fn f_double_prime(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::Tan => {
                let c = x.cos();
                2.0 * x.tan() / (c * c)
            }
            FamilyKind::Sec => {
                let (s, c) = x.sin_cos();
                (1.0 + s * s) / (c * c * c)
            }
            FamilyKind::Csc => {
                let (s, c) = x.sin_cos();
                (1.0 + c * c) / (s * s * s)
            }
            FamilyKind::Square => 2.0,
            FamilyKind::Sin => -x.sin(),
            FamilyKind::Cos => -x.cos(),
            FamilyKind::Sinh => x.sinh(),
            FamilyKind::ShiftedCosh { shift } => (shift - x).cosh(),
        }
    }

    pub fn convexity(&self) -> Convexity {
        match self.kind {
            FamilyKind::Sin | FamilyKind::Cos => Convexity::StrictlyConcave,
            _ => Convexity::StrictlyConvex,
        }
    }

    /// Every built-in family is positive on its domain.
    pub fn positive(&self) -> bool {
        true
    }

    /// The constant `mu = f'^2 - f f''`, when it is one.
    pub fn mu(&self) -> Option<f64> {
        match self.kind {
            FamilyKind::Sin | FamilyKind::Cos | FamilyKind::Sinh => Some(1.0),
            FamilyKind::ShiftedCosh { .. } => Some(-1.0),
            _ => None,
        }
    }

    /// Which sign pattern of `(f'', f')` the family has, for families with `mu`.
    pub fn ode_case(&self) -> Option<OdeCase> {
        self.mu()?;
        let mid = 0.5 * self.bound;
        OdeCase::from_signs(self.f_double_prime(mid), self.f_prime(mid))
    }

    fn check_domain(&self, theta: &AngleVector) -> Result<()> {
        match theta.values().iter().position(|&x| !self.contains(x)) {
            Some(index) => Err(Error::OutOfDomain {
                index,
                value: theta.values()[index],
                bound: self.bound,
            }),
            None => Ok(()),
        }
    }

    fn require_convex_positive(&self) -> Result<()> {
        if self.convexity() != Convexity::StrictlyConvex || !self.positive() {
            return Err(Error::WrongConvexityClass {
                family: self.name(),
                required: "positive and strictly convex",
            });
        }
        Ok(())
    }
}

impl fmt::Display for FunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on (0, {})", self.name(), self.bound)
    }
}

/// tan, sec, csc, x^2 (convex, positive) and sin, cos, sinh, shifted cosh
/// (the four sign patterns of the constant-`mu` ODE).
pub fn builtin_families() -> Vec<FunctionFamily> {
    vec![
        FunctionFamily::tan(),
        FunctionFamily::sec(),
        FunctionFamily::csc(),
        FunctionFamily::square(),
        FunctionFamily::sin(),
        FunctionFamily::cos(),
        FunctionFamily::sinh(DEFAULT_HYPERBOLIC_BOUND).expect("valid bound"),
        FunctionFamily::shifted_cosh(DEFAULT_HYPERBOLIC_BOUND, DEFAULT_HYPERBOLIC_BOUND)
            .expect("valid shift"),
    ]
}

/// The four sign patterns of `(f'', f')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OdeCase {
    /// `f'' < 0, f' > 0`
    I1,
    /// `f'' < 0, f' < 0`
    I2,
    /// `f'' > 0, f' > 0`
    II1,
    /// `f'' > 0, f' < 0`
    II2,
}

impl OdeCase {
    pub fn from_signs(f_double_prime: f64, f_prime: f64) -> Option<Self> {
        match (f_double_prime, f_prime) {
            (a, b) if a < 0.0 && b > 0.0 => Some(OdeCase::I1),
            (a, b) if a < 0.0 && b < 0.0 => Some(OdeCase::I2),
            (a, b) if a > 0.0 && b > 0.0 => Some(OdeCase::II1),
            (a, b) if a > 0.0 && b < 0.0 => Some(OdeCase::II2),
            _ => None,
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            OdeCase::I1 | OdeCase::II2 => Direction::Ge,
            OdeCase::I2 | OdeCase::II1 => Direction::Le,
        }
    }
}

/// One evaluation of an analytic inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSlack {
    pub lhs: f64,
    pub rhs: f64,
    /// Non-negative iff the inequality holds.
    pub slack: f64,
    /// Magnitude the tolerance is relative to: `max(1, |lhs|, |rhs|)` and the
    /// size of the largest term cancelled inside either side.
    pub scale: f64,
    pub alpha: Option<u32>,
    pub k: Option<u32>,
    pub equality: bool,
}

impl AnalyticSlack {
    fn new(direction: Direction, lhs: f64, rhs: f64, terms: f64, alpha: Option<u32>, k: Option<u32>) -> Self {
        let slack = direction.slack(lhs, rhs);
        let scale = side_scale(lhs, rhs).max(terms.abs());
        AnalyticSlack {
            lhs,
            rhs,
            slack,
            scale,
            alpha,
            k,
            equality: is_equality(slack, scale),
        }
    }
}

/// `sum f(theta_i) - n f(sigma)`.
///
/// Non-negative for convex families and non-positive for concave ones.
pub fn jensen_slack(fam: &FunctionFamily, theta: &AngleVector) -> Result<f64> {
    fam.check_domain(theta)?;
    let n = theta.len() as f64;
    let sum: f64 = theta.values().iter().map(|&x| fam.f(x)).sum();
    Ok(sum - n * fam.f(theta.sigma()))
}

/// `(P, s)` with `P = sum f(theta_i)` and `s = f(sigma)`.
fn power_sums(fam: &FunctionFamily, theta: &AngleVector) -> (f64, f64) {
    let p = theta.values().iter().map(|&x| fam.f(x)).sum();
    (p, fam.f(theta.sigma()))
}

/// `P^(2a) - (n s)^a P^a >= s^a (P^a - (n s)^a)`.
pub fn thm21_slack(fam: &FunctionFamily, theta: &AngleVector, alpha: u32) -> Result<AnalyticSlack> {
    fam.require_convex_positive()?;
    if alpha == 0 {
        return Err(Error::BadAlpha(alpha));
    }
    fam.check_domain(theta)?;
    let n = theta.len() as f64;
    let (p, s) = power_sums(fam, theta);
    let pa = p.powi(alpha as i32);
    let nsa = (n * s).powi(alpha as i32);
    let lhs = pa * pa - nsa * pa;
    let rhs = s.powi(alpha as i32) * (pa - nsa);
    Ok(AnalyticSlack::new(Direction::Ge, lhs, rhs, pa * pa, Some(alpha), None))
}

/// `P^(2a) - (n s)^a P^a <= P^(ka) - (n s)^(ka)`.
pub fn thm22_slack(
    fam: &FunctionFamily,
    theta: &AngleVector,
    alpha: u32,
    k: u32,
) -> Result<AnalyticSlack> {
    fam.require_convex_positive()?;
    if alpha == 0 {
        return Err(Error::BadAlpha(alpha));
    }
    if k < 2 {
        return Err(Error::BadK(k));
    }
    fam.check_domain(theta)?;
    let n = theta.len() as f64;
    let (p, s) = power_sums(fam, theta);
    let pa = p.powi(alpha as i32);
    let nsa = (n * s).powi(alpha as i32);
    let lhs = pa * pa - nsa * pa;
    let pka = pa.powi(k as i32);
    let rhs = pka - nsa.powi(k as i32);
    Ok(AnalyticSlack::new(
        Direction::Le,
        lhs,
        rhs,
        (pa * pa).max(pka),
        Some(alpha),
        Some(k),
    ))
}

/// `2 sum f(theta_i) f'(psi_i)` against `sum f(theta_i) f'(theta_i) + sum f(psi_i) f'(psi_i)`.
///
/// The record has `lhs` the former, `rhs` the latter, and the direction of the
/// family's [`OdeCase`].
pub fn thm51_slack(fam: &FunctionFamily, theta: &AngleVector, psi: &AngleVector) -> Result<AnalyticSlack> {
    fam.mu().ok_or(Error::MissingMu(fam.name()))?;
    let case = fam
        .ode_case()
        .ok_or(Error::MissingMu(fam.name()))?;
    if theta.len() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: theta.len(),
            actual: psi.len(),
        });
    }
    let (a, b) = (theta.total(), psi.total());
    if (a - b).abs() > SUM_REL_TOL * a.abs().max(b.abs()) {
        return Err(Error::TotalsDiffer(a, b));
    }
    fam.check_domain(theta)?;
    fam.check_domain(psi)?;

    let mut cross = 0.0;
    let mut own_theta = 0.0;
    let mut own_psi = 0.0;
    for (&t, &p) in theta.values().iter().zip(psi.values()) {
        let ft = fam.f(t);
        cross += ft * fam.f_prime(p);
        own_theta += ft * fam.f_prime(t);
        own_psi += fam.f(p) * fam.f_prime(p);
    }
    let lhs = 2.0 * cross;
    let rhs = own_theta + own_psi;
    let terms = own_theta.abs().max(own_psi.abs());
    Ok(AnalyticSlack::new(case.direction(), lhs, rhs, terms, None, None))
}

//! Scalar abstraction shared by the standard (`f64`) and high-precision
//! evaluation paths.
//!
//! Slacks near the regular polygon are quadratically small, so a negative
//! double-precision slack of size 1e-14 says nothing by itself. The geometric
//! formulas are written once against [`Real`] and can be re-run on [`HighFloat`]
//! to adjudicate such cases.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode};
use serde::{Deserialize, Serialize};

/// Evaluation precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Precision {
    /// IEEE-754 binary64.
    Standard,
    /// Arbitrary precision with the given number of significant decimal digits.
    High { digits: u32 },
}

impl Precision {
    pub const MIN_HIGH_DIGITS: u32 = 30;
    pub const DEFAULT_HIGH_DIGITS: u32 = 40;

    pub fn high() -> Self {
        Precision::High {
            digits: Self::DEFAULT_HIGH_DIGITS,
        }
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::Standard
    }
}

/// The arithmetic the closed-form polygon formulas need.
pub trait Real:
    Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Precision carried alongside values; `()` for `f64`.
    type Context: Copy;

    /// True when rounding is far below binary64, so exact constraints such as
    /// `sum(theta) == pi` are worth re-imposing at this precision.
    const ARBITRARY_PRECISION: bool = false;

    fn from_f64(x: f64, ctx: Self::Context) -> Self;
    fn pi(ctx: Self::Context) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn tan(&self) -> Self;
    fn powi(&self, n: u32) -> Self;
    fn to_f64(&self) -> f64;

    fn from_usize(n: usize, ctx: Self::Context) -> Self {
        Self::from_f64(n as f64, ctx)
    }
}

impl Real for f64 {
    type Context = ();

    fn from_f64(x: f64, _: ()) -> Self {
        x
    }
    fn pi(_: ()) -> Self {
        std::f64::consts::PI
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn tan(&self) -> Self {
        f64::tan(*self)
    }
    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Binary precision (in bits) used for a requested number of decimal digits,
/// with one guard word.
pub fn bits_for_digits(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64
}

/// Arbitrary-precision float used for high-precision re-evaluation.
#[derive(Clone)]
pub struct HighFloat {
    value: BigFloat,
    bits: usize,
}

impl HighFloat {
    pub fn bits(&self) -> usize {
        self.bits
    }

    fn wrap(value: BigFloat, bits: usize) -> Self {
        HighFloat { value, bits }
    }

    fn binary(&self, rhs: &Self, op: impl Fn(&BigFloat, &BigFloat, usize) -> BigFloat) -> Self {
        let bits = self.bits.max(rhs.bits);
        Self::wrap(op(&self.value, &rhs.value, bits), bits)
    }
}

impl fmt::Debug for HighFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for HighFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for HighFloat {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.binary(&rhs, |a, b, p| a.add(b, p, RM))
    }
}

impl Sub for HighFloat {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.binary(&rhs, |a, b, p| a.sub(b, p, RM))
    }
}

impl Mul for HighFloat {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.binary(&rhs, |a, b, p| a.mul(b, p, RM))
    }
}

impl Div for HighFloat {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.binary(&rhs, |a, b, p| a.div(b, p, RM))
    }
}

impl Neg for HighFloat {
    type Output = Self;
    fn neg(self) -> Self {
        Self::wrap(self.value.neg(), self.bits)
    }
}

impl Real for HighFloat {
    /// Precision in bits.
    type Context = usize;

    const ARBITRARY_PRECISION: bool = true;

    fn from_f64(x: f64, bits: usize) -> Self {
        Self::wrap(BigFloat::from_f64(x, bits), bits)
    }

    fn pi(bits: usize) -> Self {
        Self::wrap(with_consts(|cc| cc.pi(bits, RM)), bits)
    }

    fn sin(&self) -> Self {
        Self::wrap(with_consts(|cc| self.value.sin(self.bits, RM, cc)), self.bits)
    }

    fn cos(&self) -> Self {
        Self::wrap(with_consts(|cc| self.value.cos(self.bits, RM, cc)), self.bits)
    }

    fn tan(&self) -> Self {
        Self::wrap(with_consts(|cc| self.value.tan(self.bits, RM, cc)), self.bits)
    }

    fn powi(&self, n: u32) -> Self {
        Self::wrap(self.value.powi(n as usize, self.bits, RM), self.bits)
    }

    fn to_f64(&self) -> f64 {
        // BigFloat only exposes decimal formatting publicly; the decimal string
        // carries far more digits than binary64 needs, so parsing it rounds
        // correctly up to a final half-ulp.
        self.value.to_string().parse().unwrap_or(f64::NAN)
    }
}

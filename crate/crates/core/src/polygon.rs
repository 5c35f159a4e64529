//! Angle vectors and the closed-form perimeter/area of polygons tied to a circle.
//!
//! Both polygon kinds are described by n half central angles summing to pi:
//!
//! * a **tangential** polygon (circumscribed about a circle of radius R) by the
//!   half angles subtended at its vertices, so each side is `2R tan(theta_i)`;
//! * a **cyclic** polygon (inscribed in a circle of radius R) by the half angles
//!   subtended by its sides, so each side is `2R sin(theta_i)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::real::Real;

/// Upper bound of the open interval every geometric angle lives in.
pub const GEOMETRIC_BOUND: f64 = FRAC_PI_2;

/// Relative tolerance on `sum(values) == total`.
pub const SUM_REL_TOL: f64 = 1e-12;

/// Default clearance kept between sampled angles and the ends of `(0, pi/2)`.
pub const DEFAULT_MARGIN: f64 = 1e-6;

/// A point of `D_n`: n angles in `(0, bound)` with a fixed sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleVector {
    values: Vec<f64>,
    total: f64,
    bound: f64,
}

impl AngleVector {
    /// Validates `values` against the open interval `(0, bound)` and the sum.
    pub fn new(values: Vec<f64>, total: f64, bound: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::InvalidArgument(format!("domain bound {bound}")));
        }
        let actual: f64 = values.iter().sum();
        if !((actual - total).abs() <= SUM_REL_TOL * total.abs()) {
            return Err(Error::SumMismatch {
                expected: total,
                actual,
            });
        }
        if let Some(index) = values.iter().position(|&v| !(v > 0.0 && v < bound)) {
            return Err(Error::OutOfDomain {
                index,
                value: values[index],
                bound,
            });
        }
        Ok(AngleVector {
            values,
            total,
            bound,
        })
    }

    /// The barycenter `(sigma, ..., sigma)` with `sigma = total / n`.
    pub fn regular(n: usize, total: f64, bound: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let sigma = total / n as f64;
        if !(sigma > 0.0 && sigma < bound) {
            return Err(Error::DomainViolation {
                sigma,
                lower: 0.0,
                upper: bound,
            });
        }
        Ok(AngleVector {
            values: vec![sigma; n],
            total,
            bound,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn sigma(&self) -> f64 {
        self.total / self.values.len() as f64
    }

    /// `max_i |theta_i - sigma|`.
    pub fn distance_to_regular(&self) -> f64 {
        let sigma = self.sigma();
        self.values
            .iter()
            .map(|v| (v - sigma).abs())
            .fold(0.0, f64::max)
    }

    /// Smallest distance from any coordinate to either end of `(0, bound)`.
    pub fn clearance(&self) -> f64 {
        self.values
            .iter()
            .map(|&v| v.min(self.bound - v))
            .fold(f64::INFINITY, f64::min)
    }

    /// Returns the same point with its coordinates reordered.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: order.len(),
            });
        }
        let values = order.iter().map(|&i| self.values[i]).collect();
        AngleVector::new(values, self.total, self.bound)
    }

    /// Stable 64-bit digest of the exact coordinate bits.
    pub fn fingerprint(&self) -> u64 {
        let mut hasher = Sha256::new();
        for v in &self.values {
            hasher.update(v.to_bits().to_le_bytes());
        }
        let digest = hasher.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
    }
}

/// Validates a geometric angle vector (domain `(0, pi/2)`).
pub fn make_angle_vector(values: &[f64], total: f64) -> Result<AngleVector> {
    AngleVector::new(values.to_vec(), total, GEOMETRIC_BOUND)
}

/// `(total/n, ..., total/n)` on the geometric domain `(0, pi/2)`.
pub fn regular_angles(n: usize, total: f64) -> Result<AngleVector> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
    }
    AngleVector::regular(n, total, GEOMETRIC_BOUND)
}

/// The polygon isoperimetric constant `n tan(pi/n)`.
pub fn dn(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidN(n));
    }
    Ok(dn_unchecked(n, ()))
}

pub(crate) fn dn_unchecked<T: Real>(n: usize, ctx: T::Context) -> T {
    let nn = T::from_usize(n, ctx);
    let t = (T::pi(ctx) / nn.clone()).tan();
    nn * t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolygonKind {
    /// Circumscribed about the circle.
    Tangential,
    /// Inscribed in the circle.
    Cyclic,
}

impl PolygonKind {
    pub const ALL: [PolygonKind; 2] = [PolygonKind::Tangential, PolygonKind::Cyclic];

    pub fn name(self) -> &'static str {
        match self {
            PolygonKind::Tangential => "tangential",
            PolygonKind::Cyclic => "cyclic",
        }
    }
}

impl fmt::Display for PolygonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PolygonKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tangential" | "circumscribed" => Ok(PolygonKind::Tangential),
            "cyclic" | "inscribed" => Ok(PolygonKind::Cyclic),
            other => Err(Error::InvalidArgument(format!("unknown polygon kind `{other}`"))),
        }
    }
}

/// A tangential or cyclic n-gon given by its circle radius and half angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonModel {
    kind: PolygonKind,
    radius: f64,
    angles: AngleVector,
}

impl PolygonModel {
    pub fn new(kind: PolygonKind, radius: f64, angles: AngleVector) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidRadius(radius));
        }
        if angles.len() < 3 {
            return Err(Error::InvalidN(angles.len()));
        }
        if (angles.total() - PI).abs() > SUM_REL_TOL * PI || angles.bound() > GEOMETRIC_BOUND {
            return Err(Error::TotalNotPi(angles.total()));
        }
        Ok(PolygonModel {
            kind,
            radius,
            angles,
        })
    }

    /// The regular n-gon of the given kind about/in a circle of radius `radius`.
    pub fn regular(kind: PolygonKind, n: usize, radius: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidN(n));
        }
        PolygonModel::new(kind, radius, regular_angles(n, PI)?)
    }

    pub fn kind(&self) -> PolygonKind {
        self.kind
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn angles(&self) -> &AngleVector {
        &self.angles
    }

    pub fn n(&self) -> usize {
        self.angles.len()
    }

    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        PolygonModel::new(self.kind, radius, self.angles.clone())
    }

    /// Side lengths `a_i`.
    pub fn sides(&self) -> Vec<f64> {
        let side = |t: f64| match self.kind {
            PolygonKind::Tangential => 2.0 * self.radius * t.tan(),
            PolygonKind::Cyclic => 2.0 * self.radius * t.sin(),
        };
        self.angles.values().iter().map(|&t| side(t)).collect()
    }
}

/// Perimeter, area and deficit of one polygon next to its regular counterpart
/// in the same circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricSummary<T = f64> {
    pub kind: PolygonKind,
    pub n: usize,
    pub radius: T,
    pub perimeter: T,
    pub area: T,
    pub regular_perimeter: T,
    pub regular_area: T,
    pub dn: T,
    /// `L^2 - 4 d_n A`.
    pub deficit: T,
}

impl<T: Real> GeometricSummary<T> {
    /// Builds the summary from the kind-specific trigonometric sums.
    ///
    /// Tangential polygons use only `first = sum(tan theta_i)`; cyclic polygons
    /// use `first = sum(sin theta_i)` and `second = sum(sin theta_i cos theta_i)`.
    pub fn from_sums(
        kind: PolygonKind,
        n: usize,
        radius: T,
        first: T,
        second: T,
        ctx: T::Context,
    ) -> Self {
        let two = T::from_f64(2.0, ctx);
        let nn = T::from_usize(n, ctx);
        let r2 = radius.clone() * radius.clone();
        let base = T::pi(ctx) / nn.clone();
        let dn = nn.clone() * base.tan();
        let (perimeter, area, regular_perimeter, regular_area) = match kind {
            PolygonKind::Tangential => {
                let t = base.tan();
                (
                    two.clone() * radius.clone() * first.clone(),
                    r2.clone() * first,
                    two * nn.clone() * radius.clone() * t.clone(),
                    nn * r2 * t,
                )
            }
            PolygonKind::Cyclic => {
                let (s, c) = (base.sin(), base.cos());
                (
                    two.clone() * radius.clone() * first,
                    r2.clone() * second,
                    two * nn.clone() * radius.clone() * s.clone(),
                    nn * r2 * s * c,
                )
            }
        };
        let deficit = perimeter.clone() * perimeter.clone()
            - T::from_f64(4.0, ctx) * dn.clone() * area.clone();
        GeometricSummary {
            kind,
            n,
            radius,
            perimeter,
            area,
            regular_perimeter,
            regular_area,
            dn,
            deficit,
        }
    }

    /// Same polygon family and circle, new trigonometric sums.
    ///
    /// Reuses the regular-polygon constants, which makes repeated evaluation
    /// over a lattice or an optimizer path cheap.
    pub fn with_sums(&self, first: T, second: T, ctx: T::Context) -> Self {
        let two = T::from_f64(2.0, ctx);
        let r2 = self.radius.clone() * self.radius.clone();
        let perimeter = two * self.radius.clone() * first.clone();
        let area = match self.kind {
            PolygonKind::Tangential => r2 * first,
            PolygonKind::Cyclic => r2 * second,
        };
        let deficit = perimeter.clone() * perimeter.clone()
            - T::from_f64(4.0, ctx) * self.dn.clone() * area.clone();
        GeometricSummary {
            perimeter,
            area,
            deficit,
            ..self.clone()
        }
    }

    pub fn to_f64(&self) -> GeometricSummary<f64> {
        GeometricSummary {
            kind: self.kind,
            n: self.n,
            radius: self.radius.to_f64(),
            perimeter: self.perimeter.to_f64(),
            area: self.area.to_f64(),
            regular_perimeter: self.regular_perimeter.to_f64(),
            regular_area: self.regular_area.to_f64(),
            dn: self.dn.to_f64(),
            deficit: self.deficit.to_f64(),
        }
    }
}

/// Perimeter, area and deficit in double precision.
pub fn measure(p: &PolygonModel) -> GeometricSummary {
    measure_with::<f64>(p, ())
}

/// Evaluates [`measure`] in the scalar type `T`.
///
/// For arbitrary-precision scalars the last angle is recomputed as
/// `pi - sum(others)` so the sum constraint holds at the working precision
/// rather than only to binary64 rounding.
pub fn measure_with<T: Real>(p: &PolygonModel, ctx: T::Context) -> GeometricSummary<T> {
    let values = p.angles().values();
    let mut angles: Vec<T> = values.iter().map(|&v| T::from_f64(v, ctx)).collect();
    if T::ARBITRARY_PRECISION {
        let head = angles[..angles.len() - 1]
            .iter()
            .cloned()
            .fold(T::from_f64(0.0, ctx), |acc, v| acc + v);
        let last = angles.len() - 1;
        angles[last] = T::pi(ctx) - head;
    }
    let zero = T::from_f64(0.0, ctx);
    let (first, second) = match p.kind() {
        PolygonKind::Tangential => (
            angles.iter().fold(zero.clone(), |acc, t| acc + t.tan()),
            zero,
        ),
        PolygonKind::Cyclic => angles.iter().fold((zero.clone(), zero), |(s, sc), t| {
            let sin = t.sin();
            (s + sin.clone(), sc + sin * t.cos())
        }),
    };
    GeometricSummary::from_sums(
        p.kind(),
        p.n(),
        T::from_f64(p.radius(), ctx),
        first,
        second,
        ctx,
    )
}

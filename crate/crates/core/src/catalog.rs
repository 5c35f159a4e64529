//! Registry of the polygon inequalities and their slack evaluators.
//!
//! Notation: `L`, `A` are the perimeter and area of the polygon, `L*`, `A*`
//! those of the regular n-gon in the same circle of radius `R`,
//! `d = n tan(pi/n)` and `t = tan(pi/n)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polygon::{measure_with, GeometricSummary, PolygonKind, PolygonModel};
use crate::real::{bits_for_digits, HighFloat, Precision, Real};
use crate::slack::{is_equality, is_violation, side_scale, Direction};

const TANGENTIAL: &[PolygonKind] = &[PolygonKind::Tangential];
const CYCLIC: &[PolygonKind] = &[PolygonKind::Cyclic];
const BOTH: &[PolygonKind] = &[PolygonKind::Tangential, PolygonKind::Cyclic];

/// Legal `(alpha, k)` for an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamDomain {
    /// No parameters; evaluated with `alpha = 1` and no `k`.
    None,
    /// Integer `alpha >= 1`, no `k`.
    Alpha,
    /// Integers `alpha >= 1`, `k >= 2`.
    AlphaK,
    /// `alpha = 1` and `k` in `{2, 3}`.
    UnitAlphaSmallK,
}

impl ParamDomain {
    pub fn uses_alpha(self) -> bool {
        matches!(self, ParamDomain::Alpha | ParamDomain::AlphaK)
    }

    pub fn uses_k(self) -> bool {
        matches!(self, ParamDomain::AlphaK | ParamDomain::UnitAlphaSmallK)
    }

    pub fn contains(self, alpha: u32, k: Option<u32>) -> bool {
        match (self, k) {
            (ParamDomain::None, None) => alpha == 1,
            (ParamDomain::Alpha, None) => alpha >= 1,
            (ParamDomain::AlphaK, Some(k)) => alpha >= 1 && k >= 2,
            (ParamDomain::UnitAlphaSmallK, Some(k)) => alpha == 1 && (k == 2 || k == 3),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Form {
    Basic,
    Zhang,
    PerimeterGap,
    PerimeterGapScaled,
    AreaGap,
    AreaGapScaled,
    ReversePerimeter,
    ReversePerimeterScaled,
    ReverseArea,
    ReverseAreaScaled,
    CyclicQuadratic,
    CyclicAreaGap,
    FlippedBasic,
}

/// One inequality of the catalog.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub id: &'static str,
    /// The inequality in plain text.
    pub formula: &'static str,
    pub description: &'static str,
    pub kinds: &'static [PolygonKind],
    pub params: ParamDomain,
    pub direction: Direction,
    /// Deliberately false entry used to validate the falsifier.
    pub planted: bool,
    #[serde(skip)]
    form: Form,
}

impl CatalogEntry {
    pub fn applies_to(&self, kind: PolygonKind) -> bool {
        self.kinds.contains(&kind)
    }

    /// Power of `R` by which the slack scales, or `None` when the two sides
    /// scale differently.
    pub fn homogeneity_degree(&self, alpha: u32, k: Option<u32>) -> Option<i32> {
        let a = alpha as i32;
        match self.form {
            Form::Basic | Form::Zhang | Form::CyclicQuadratic | Form::CyclicAreaGap | Form::FlippedBasic => {
                Some(2)
            }
            Form::PerimeterGap | Form::AreaGap | Form::ReverseArea => Some(2 * a),
            Form::ReversePerimeter => (k == Some(2)).then_some(2 * a),
            Form::PerimeterGapScaled
            | Form::AreaGapScaled
            | Form::ReversePerimeterScaled
            | Form::ReverseAreaScaled => Some(0),
        }
    }

    fn check(&self, kind: PolygonKind, alpha: u32, k: Option<u32>) -> Result<()> {
        if !self.applies_to(kind) {
            let required = self.kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join("|");
            return Err(Error::KindMismatch {
                id: self.id.to_string(),
                required,
                actual: kind.name().to_string(),
            });
        }
        if !self.params.contains(alpha, k) {
            return Err(Error::ParamOutOfDomain {
                id: self.id.to_string(),
                alpha,
                k,
            });
        }
        Ok(())
    }

    /// Both sides from a precomputed summary. Parameters are not validated.
    pub fn evaluate_summary<T: Real>(
        &self,
        g: &GeometricSummary<T>,
        alpha: u32,
        k: Option<u32>,
        ctx: T::Context,
    ) -> Sides {
        let s = sides(self.form, g, alpha, k.unwrap_or(2), ctx);
        let lhs = s.lhs.to_f64();
        let rhs = s.rhs.to_f64();
        let diff = match self.direction {
            Direction::Ge => s.lhs - s.rhs,
            Direction::Le => s.rhs - s.lhs,
        };
        Sides {
            lhs,
            rhs,
            slack: diff.to_f64(),
            scale: side_scale(lhs, rhs).max(s.terms),
        }
    }
}

/// Evaluated sides of one inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sides {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// `max(1, |lhs|, |rhs|)` widened to the largest term cancelled within a
    /// side, so tolerances reflect the roundoff actually incurred.
    pub scale: f64,
}

struct RawSides<T> {
    lhs: T,
    rhs: T,
    terms: f64,
}

fn sides<T: Real>(form: Form, g: &GeometricSummary<T>, alpha: u32, k: u32, ctx: T::Context) -> RawSides<T> {
    let c = |x: f64| T::from_f64(x, ctx);
    let n = T::from_usize(g.n, ctx);
    let (l, a, ls, as_, d, r) = (
        g.perimeter.clone(),
        g.area.clone(),
        g.regular_perimeter.clone(),
        g.regular_area.clone(),
        g.dn.clone(),
        g.radius.clone(),
    );
    let t = d.clone() / n;
    let r2 = r.clone() * r.clone();
    let deficit = g.deficit.clone();
    let big = |x: &T| x.to_f64().abs();

    // L^(2a) - 4^a (d A)^a
    let perimeter_lhs = || {
        let u = l.powi(2 * alpha);
        let v = (c(4.0) * d.clone() * a.clone()).powi(alpha);
        let m = big(&u).max(big(&v));
        (u - v, m)
    };
    // (A/R^2)^(2a) - d^a (L/2R)^a
    let x = a.clone() / r2.clone();
    let y = l.clone() / (c(2.0) * r.clone());
    let scaled_lhs = || {
        let u = x.powi(2 * alpha);
        let v = d.powi(alpha) * y.powi(alpha);
        let m = big(&u).max(big(&v));
        (u - v, m)
    };
    let ys = ls.clone() / (c(2.0) * r.clone());
    let xs = as_.clone() / r2.clone();

    let pair = |lhs: (T, f64), rhs: T, rhs_terms: f64| RawSides {
        lhs: lhs.0,
        rhs,
        terms: lhs.1.max(rhs_terms),
    };

    match form {
        Form::Basic => RawSides {
            lhs: deficit,
            rhs: c(0.0),
            terms: big(&(l.clone() * l.clone())),
        },
        Form::FlippedBasic => RawSides {
            lhs: deficit,
            rhs: c(0.0),
            terms: big(&(l.clone() * l.clone())),
        },
        Form::Zhang => {
            let gap = ls - l.clone();
            RawSides {
                lhs: deficit,
                rhs: gap.clone() * gap,
                terms: big(&(l.clone() * l)),
            }
        }
        Form::PerimeterGap => {
            let coeff = c(2.0).powi(alpha) * r.powi(alpha) * t.powi(alpha);
            let la = l.powi(alpha);
            let m = big(&(coeff.clone() * la.clone()));
            pair(perimeter_lhs(), coeff * (la - ls.powi(alpha)), m)
        }
        Form::PerimeterGapScaled => {
            let ta = t.powi(alpha);
            let ya = y.powi(alpha);
            let m = big(&(ta.clone() * ya.clone()));
            pair(scaled_lhs(), ta * (ya - ys.powi(alpha)), m)
        }
        Form::AreaGap => {
            let coeff = c(4.0).powi(alpha) * t.powi(alpha);
            let aa = a.powi(alpha);
            let m = big(&(coeff.clone() * aa.clone()));
            pair(perimeter_lhs(), coeff * (aa - as_.powi(alpha)), m)
        }
        Form::AreaGapScaled => {
            let ta = t.powi(alpha);
            let xa = x.powi(alpha);
            let m = big(&(ta.clone() * xa.clone()));
            pair(scaled_lhs(), ta * (xa - xs.powi(alpha)), m)
        }
        Form::ReversePerimeter => {
            let u = l.powi(k * alpha);
            let m = big(&u);
            pair(perimeter_lhs(), u - ls.powi(k * alpha), m)
        }
        Form::ReversePerimeterScaled => {
            let u = y.powi(k * alpha);
            let m = big(&u);
            pair(scaled_lhs(), u - ys.powi(k * alpha), m)
        }
        Form::ReverseArea => {
            // 4^a R^(-2(k-1)a) (A^(ka) - A*^(ka)), written in terms of A/R^2
            // so small radii do not amplify roundoff.
            let coeff = c(4.0).powi(alpha) * r2.powi(alpha);
            let u = coeff.clone() * x.powi(k * alpha);
            let m = big(&u);
            pair(perimeter_lhs(), u - coeff * xs.powi(k * alpha), m)
        }
        Form::ReverseAreaScaled => {
            let u = x.powi(k * alpha);
            let m = big(&u);
            pair(scaled_lhs(), u - xs.powi(k * alpha), m)
        }
        Form::CyclicQuadratic => {
            let sigma = T::pi(ctx) / T::from_usize(g.n, ctx);
            let h = r * sigma.cos();
            let lhs = a + d * h.clone() * h.clone();
            let rhs = l * h;
            let terms = big(&lhs).max(big(&rhs));
            RawSides { lhs, rhs, terms }
        }
        Form::CyclicAreaGap => {
            let gap = as_ - a;
            RawSides {
                lhs: deficit,
                rhs: gap.clone() * gap / r2,
                terms: big(&(l.clone() * l)),
            }
        }
    }
}

macro_rules! entry {
    ($id:literal, $form:ident, $kinds:ident, $params:ident, $dir:ident, $formula:literal, $desc:literal) => {
        CatalogEntry {
            id: $id,
            formula: $formula,
            description: $desc,
            kinds: $kinds,
            params: ParamDomain::$params,
            direction: Direction::$dir,
            planted: false,
            form: Form::$form,
        }
    };
}

fn standard_entries() -> Vec<CatalogEntry> {
    vec![
        entry!("BASIC", Basic, BOTH, None, Ge,
            "L^2 - 4 d A >= 0",
            "Discrete isoperimetric inequality; the deficit vanishes only for the regular polygon."),
        entry!("ZHANG97", Zhang, CYCLIC, None, Ge,
            "L^2 - 4 d A >= (L* - L)^2",
            "Bonnesen-style lower bound by the squared perimeter gap."),
        entry!("T31A", PerimeterGap, TANGENTIAL, Alpha, Ge,
            "L^(2a) - 4^a (d A)^a >= 2^a R^a t^a (L^a - L*^a)",
            "Power lower bound by the perimeter gap."),
        entry!("T31B", PerimeterGapScaled, TANGENTIAL, Alpha, Ge,
            "(A/R^2)^(2a) - d^a (L/2R)^a >= t^a ((L/2R)^a - (L*/2R)^a)",
            "Dimensionless form of T31A."),
        entry!("C35", PerimeterGap, TANGENTIAL, None, Ge,
            "L^2 - 4 d A >= 2 R t (L - L*)",
            "T31A with a = 1."),
        entry!("C36", PerimeterGapScaled, TANGENTIAL, None, Ge,
            "(A/R^2)^2 - d L/2R >= t (L/2R - L*/2R)",
            "T31B with a = 1."),
        entry!("T32A", AreaGap, TANGENTIAL, Alpha, Ge,
            "L^(2a) - 4^a (d A)^a >= 4^a t^a (A^a - A*^a)",
            "Power lower bound by the area gap."),
        entry!("T32B", AreaGapScaled, TANGENTIAL, Alpha, Ge,
            "(A/R^2)^(2a) - d^a (L/2R)^a >= t^a ((A/R^2)^a - (A*/R^2)^a)",
            "Dimensionless form of T32A."),
        entry!("CQX", AreaGap, TANGENTIAL, None, Ge,
            "L^2 - 4 d A >= 4 t (A - A*)",
            "T32A with a = 1."),
        entry!("CQC", AreaGapScaled, TANGENTIAL, None, Ge,
            "(A/R^2)^2 - d L/2R >= t (A/R^2 - A*/R^2)",
            "T32B with a = 1."),
        entry!("T41A", ReversePerimeter, TANGENTIAL, AlphaK, Le,
            "L^(2a) - (4 d A)^a <= L^(ka) - L*^(ka)",
            "Reverse (upper) bound by a perimeter power gap."),
        entry!("T41B", ReversePerimeterScaled, TANGENTIAL, AlphaK, Le,
            "(A/R^2)^(2a) - d^a (L/2R)^a <= (L/2R)^(ka) - (L*/2R)^(ka)",
            "Dimensionless form of T41A."),
        entry!("C4A", ReversePerimeter, TANGENTIAL, UnitAlphaSmallK, Le,
            "L^2 - 4 d A <= L^k - L*^k, k in {2, 3}",
            "T41A with a = 1."),
        entry!("C4B", ReversePerimeterScaled, TANGENTIAL, UnitAlphaSmallK, Le,
            "(A/R^2)^2 - d L/2R <= (L/2R)^k - (L*/2R)^k, k in {2, 3}",
            "T41B with a = 1."),
        entry!("T42A", ReverseArea, TANGENTIAL, AlphaK, Le,
            "L^(2a) - 4^a (d A)^a <= 4^a R^(-2(k-1)a) (A^(ka) - A*^(ka))",
            "Reverse (upper) bound by an area power gap."),
        entry!("T42B", ReverseAreaScaled, TANGENTIAL, AlphaK, Le,
            "(A/R^2)^(2a) - d^a (L/2R)^a <= (A/R^2)^(ka) - (A*/R^2)^(ka)",
            "Dimensionless form of T42A."),
        entry!("C42A", ReverseArea, TANGENTIAL, UnitAlphaSmallK, Le,
            "L^2 - 4 d A <= 4 R^(-2(k-1)) (A^k - A*^k), k in {2, 3}",
            "T42A with a = 1."),
        entry!("C42B", ReverseAreaScaled, TANGENTIAL, UnitAlphaSmallK, Le,
            "(A/R^2)^2 - d L/2R <= (A/R^2)^k - (A*/R^2)^k, k in {2, 3}",
            "T42B with a = 1."),
        entry!("T52", CyclicQuadratic, CYCLIC, None, Le,
            "A + d (R cos(pi/n))^2 <= L R cos(pi/n)",
            "Quadratic inequality in R cos(pi/n) for inscribed polygons."),
        entry!("T53", CyclicAreaGap, CYCLIC, None, Ge,
            "L^2 - 4 d A >= (A* - A)^2 / R^2",
            "Bonnesen-style lower bound by the squared area gap."),
    ]
}

fn planted_entry() -> CatalogEntry {
    CatalogEntry {
        id: "PLANTED_FLIP",
        formula: "L^2 - 4 d A <= 0",
        description: "BASIC with its direction reversed; false for every non-regular polygon.",
        kinds: BOTH,
        params: ParamDomain::None,
        direction: Direction::Le,
        planted: true,
        form: Form::FlippedBasic,
    }
}

/// One evaluation of a catalog entry on a polygon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlackRecord {
    pub entry_id: String,
    pub kind: PolygonKind,
    pub n: usize,
    pub radius: f64,
    pub alpha: u32,
    pub k: Option<u32>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub scale: f64,
    pub equality: bool,
    /// Digest of the exact angle coordinates.
    pub fingerprint: u64,
}

impl SlackRecord {
    pub fn violated(&self) -> bool {
        is_violation(self.slack, self.scale)
    }

    /// `max(1, |lhs|, |rhs|)`.
    pub fn side_scale(&self) -> f64 {
        side_scale(self.lhs, self.rhs)
    }
}

/// An `(entry, alpha, k)` combination that [`Catalog::evaluate_all`] left out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skip {
    pub entry_id: String,
    pub alpha: Option<u32>,
    pub k: Option<u32>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Evaluation {
    pub records: Vec<SlackRecord>,
    pub skipped: Vec<Skip>,
}

/// An immutable set of entries keyed by id.
#[derive(Debug, Clone)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Default for Catalog {
    fn default() -> Self {
        Self::standard()
    }
}

impl Catalog {
    pub fn standard() -> Self {
        Catalog {
            entries: standard_entries(),
        }
    }

    /// The standard entries plus a false one (`PLANTED_FLIP`).
    pub fn with_planted_fault() -> Self {
        let mut c = Self::standard();
        c.entries.push(planted_entry());
        c
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, id: &str) -> Result<&CatalogEntry> {
        self.entries
            .iter()
            .find(|e| e.id == id)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    pub fn for_kind(&self, kind: PolygonKind) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().filter(move |e| e.applies_to(kind))
    }

    pub fn evaluate(&self, id: &str, polygon: &PolygonModel, alpha: u32, k: Option<u32>) -> Result<SlackRecord> {
        self.evaluate_with(id, polygon, alpha, k, Precision::Standard)
    }

    pub fn evaluate_with(
        &self,
        id: &str,
        polygon: &PolygonModel,
        alpha: u32,
        k: Option<u32>,
        precision: Precision,
    ) -> Result<SlackRecord> {
        let entry = self.get(id)?;
        entry.check(polygon.kind(), alpha, k)?;
        Ok(record(entry, polygon, alpha, k, precision))
    }

    /// Every kind-compatible entry over the parameter grid, ordered by entry
    /// id, then alpha, then k. Parameter-free entries are evaluated once.
    pub fn evaluate_all(&self, polygon: &PolygonModel, alphas: &[u32], ks: &[u32]) -> Evaluation {
        self.evaluate_all_with(polygon, alphas, ks, Precision::Standard)
    }

    pub fn evaluate_all_with(
        &self,
        polygon: &PolygonModel,
        alphas: &[u32],
        ks: &[u32],
        precision: Precision,
    ) -> Evaluation {
        let mut out = Evaluation::default();
        let mut alphas = alphas.to_vec();
        alphas.sort_unstable();
        alphas.dedup();
        let mut ks = ks.to_vec();
        ks.sort_unstable();
        ks.dedup();

        let mut sorted: Vec<&CatalogEntry> = self.entries.iter().collect();
        sorted.sort_by_key(|e| e.id);
        for entry in sorted {
            if !entry.applies_to(polygon.kind()) {
                out.skipped.push(Skip {
                    entry_id: entry.id.to_string(),
                    alpha: None,
                    k: None,
                    reason: format!("applies to {} polygons only", kinds_label(entry.kinds)),
                });
                continue;
            }
            for (alpha, k) in param_grid(entry.params, &alphas, &ks) {
                if entry.params.contains(alpha, k) {
                    out.records.push(record(entry, polygon, alpha, k, precision));
                } else {
                    out.skipped.push(Skip {
                        entry_id: entry.id.to_string(),
                        alpha: Some(alpha),
                        k,
                        reason: "parameters outside the entry's domain".to_string(),
                    });
                }
            }
        }
        out
    }
}

fn kinds_label(kinds: &[PolygonKind]) -> String {
    kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join("/")
}

fn param_grid(params: ParamDomain, alphas: &[u32], ks: &[u32]) -> Vec<(u32, Option<u32>)> {
    let alphas: Vec<u32> = if params.uses_alpha() { alphas.to_vec() } else { vec![1] };
    if params.uses_k() {
        alphas
            .iter()
            .flat_map(|&a| ks.iter().map(move |&k| (a, Some(k))))
            .collect()
    } else {
        alphas.into_iter().map(|a| (a, None)).collect()
    }
}

fn record(entry: &CatalogEntry, polygon: &PolygonModel, alpha: u32, k: Option<u32>, precision: Precision) -> SlackRecord {
    let s = match precision {
        Precision::Standard => entry.evaluate_summary(&measure_with::<f64>(polygon, ()), alpha, k, ()),
        Precision::High { digits } => {
            let bits = bits_for_digits(digits.max(Precision::MIN_HIGH_DIGITS));
            entry.evaluate_summary(&measure_with::<HighFloat>(polygon, bits), alpha, k, bits)
        }
    };
    SlackRecord {
        entry_id: entry.id.to_string(),
        kind: polygon.kind(),
        n: polygon.n(),
        radius: polygon.radius(),
        alpha,
        k,
        lhs: s.lhs,
        rhs: s.rhs,
        slack: s.slack,
        scale: s.scale,
        equality: is_equality(s.slack, s.scale),
        fingerprint: polygon.angles().fingerprint(),
    }
}

/// The standard entries.
pub fn list_entries() -> Vec<CatalogEntry> {
    standard_entries()
}

/// [`Catalog::evaluate`] on the standard catalog.
pub fn evaluate(id: &str, polygon: &PolygonModel, alpha: u32, k: Option<u32>) -> Result<SlackRecord> {
    Catalog::standard().evaluate(id, polygon, alpha, k)
}

/// Entry counts per polygon kind.
pub fn counts_by_kind(catalog: &Catalog) -> BTreeMap<String, usize> {
    PolygonKind::ALL
        .iter()
        .map(|&k| (k.name().to_string(), catalog.for_kind(k).count()))
        .collect()
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<8} {:<22} {}", self.id, kinds_label(self.kinds), self.formula)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::make_angle_vector;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn triangle(kind: PolygonKind) -> PolygonModel {
        let a = make_angle_vector(&[0.4 * PI, 0.3 * PI, 0.3 * PI], PI).unwrap();
        PolygonModel::new(kind, 1.0, a).unwrap()
    }

    #[test]
    fn listing() {
        let c = Catalog::standard();
        assert_eq!(c.entries().len(), 20);
        let mut ids: Vec<_> = c.entries().iter().map(|e| e.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 20);
        assert_eq!(c.for_kind(PolygonKind::Cyclic).count(), 4);
        assert_eq!(c.for_kind(PolygonKind::Tangential).count(), 17);
        assert_eq!(c.get("T31A").unwrap().homogeneity_degree(2, None), Some(4));
        assert_eq!(c.get("T41A").unwrap().homogeneity_degree(1, Some(3)), None);
        assert!(matches!(c.get("NOPE"), Err(Error::UnknownId(_))));
    }

    #[test]
    fn regular_square_is_sharp() {
        let sq = PolygonModel::regular(PolygonKind::Tangential, 4, 1.0).unwrap();
        let r = evaluate("T31A", &sq, 1, None).unwrap();
        assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12 && r.equality);
        let sq = PolygonModel::regular(PolygonKind::Cyclic, 4, 1.0).unwrap();
        assert!(evaluate("T52", &sq, 1, None).unwrap().equality);
    }

    #[test]
    fn reference_triangle_values() {
        // mpmath, 40 digits
        let t = triangle(PolygonKind::Tangential);
        let r = evaluate("C35", &t, 1, None).unwrap();
        assert_relative_eq!(r.lhs, 14.79289343891640880, max_relative = 1e-12);
        assert_relative_eq!(r.rhs, 4.394524359025732692, max_relative = 1e-12);

        let c = triangle(PolygonKind::Cyclic);
        let r = evaluate("T53", &c, 1, None).unwrap();
        assert_relative_eq!(r.lhs, 0.5251220818769954263, max_relative = 1e-12);
        assert_relative_eq!(r.rhs, 0.002925615943866155260, max_relative = 1e-10);
        assert_relative_eq!(r.slack, 0.5221964659331292710, max_relative = 1e-12);
        let r = evaluate("T52", &c, 1, None).unwrap();
        assert_relative_eq!(r.lhs - r.rhs, -0.02510325692700031347, max_relative = 1e-10);
        assert_relative_eq!(r.slack, 0.02510325692700031347, max_relative = 1e-10);
        let r = evaluate("ZHANG97", &c, 1, None).unwrap();
        assert_relative_eq!(r.rhs, 0.003360684680756558, max_relative = 1e-10);
    }

    #[test]
    fn errors() {
        let t = triangle(PolygonKind::Tangential);
        assert!(matches!(evaluate("T53", &t, 1, None), Err(Error::KindMismatch { .. })));
        assert!(matches!(evaluate("C4A", &t, 1, Some(4)), Err(Error::ParamOutOfDomain { .. })));
        assert!(matches!(evaluate("T41A", &t, 1, None), Err(Error::ParamOutOfDomain { .. })));
        assert!(matches!(evaluate("T31A", &t, 0, None), Err(Error::ParamOutOfDomain { .. })));
        assert!(matches!(evaluate("X", &t, 1, None), Err(Error::UnknownId(_))));
    }

    #[test]
    fn evaluate_all_counts_and_order() {
        let c = Catalog::standard();
        let t = triangle(PolygonKind::Tangential);
        let e = c.evaluate_all(&t, &[1], &[2, 3]);
        assert_eq!(e.records.len(), 25);
        assert!(e.records.iter().all(|r| r.kind == PolygonKind::Tangential));
        assert_eq!(e.skipped.len(), 3);
        let keys: Vec<_> = e.records.iter().map(|r| (r.entry_id.clone(), r.alpha, r.k)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);

        assert_eq!(c.evaluate_all(&t, &[1, 2, 3], &[2, 3]).records.len(), 49);

        let cyc = triangle(PolygonKind::Cyclic);
        let ids: Vec<_> = c.evaluate_all(&cyc, &[1, 2], &[2]).records.into_iter().map(|r| r.entry_id).collect();
        assert_eq!(ids, ["BASIC", "T52", "T53", "ZHANG97"]);
    }

    #[test]
    fn high_precision_agrees() {
        let c = Catalog::standard();
        let t = triangle(PolygonKind::Tangential);
        for r in c.evaluate_all(&t, &[1, 2], &[2, 3]).records {
            let h = c.evaluate_with(&r.entry_id, &t, r.alpha, r.k, Precision::high()).unwrap();
            assert!((h.slack - r.slack).abs() <= 1e-12 * r.scale, "{r:?} vs {h:?}");
        }
    }

    #[test]
    fn planted_entry_is_false() {
        let c = Catalog::with_planted_fault();
        let r = c.evaluate("PLANTED_FLIP", &triangle(PolygonKind::Cyclic), 1, None).unwrap();
        assert!(r.violated());
    }
}

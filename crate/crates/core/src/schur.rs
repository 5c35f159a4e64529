//! Sampling-based Schur-convexity certification.
//!
//! A symmetric differentiable `F` on the simplex `{x : sum x = m, 0 < x_i < l}`
//! is Schur-convex iff `(x_1 - x_2)(dF/dx_1 - dF/dx_2) >= 0` everywhere, and
//! Schur-concave iff the reverse holds. [`certify`] checks the sign of this
//! quantity at seeded random points. A verdict is evidence at the sampled
//! points, not a proof.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{Convexity, FunctionFamily};
use crate::error::{Error, Result};
use crate::polygon::AngleVector;
use crate::simplex::SimplexSampler;

/// Central finite-difference step (radians).
pub const FD_STEP: f64 = 1e-6;

/// Relative noise floor applied to each Schur condition value.
pub const NOISE_REL: f64 = 1e-9;

/// Distance kept between sampled points and the domain ends in [`certify`].
pub const CERTIFY_MARGIN: f64 = 10.0 * FD_STEP;

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type PartialFn = Arc<dyn Fn(&[f64], usize) -> f64 + Send + Sync>;

/// A permutation-symmetric function on `(0, bound)^arity`.
#[derive(Clone)]
pub struct SymmetricFunction {
    name: String,
    arity: usize,
    bound: f64,
    eval: EvalFn,
    partial: Option<PartialFn>,
}

impl fmt::Debug for SymmetricFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymmetricFunction")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .field("bound", &self.bound)
            .field("analytic_partial", &self.partial.is_some())
            .finish()
    }
}

impl SymmetricFunction {
    /// Wraps a closure; partials come from central differences unless
    /// [`with_partial`](Self::with_partial) supplies them.
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        bound: f64,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SymmetricFunction {
            name: name.into(),
            arity,
            bound,
            eval: Arc::new(eval),
            partial: None,
        }
    }

    pub fn with_partial(mut self, partial: impl Fn(&[f64], usize) -> f64 + Send + Sync + 'static) -> Self {
        self.partial = Some(Arc::new(partial));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn has_analytic_partial(&self) -> bool {
        self.partial.is_some()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// `dF/dx_i`, analytic when available.
    pub fn partial(&self, x: &[f64], i: usize) -> f64 {
        match &self.partial {
            Some(p) => p(x, i),
            None => self.partial_fd(x, i),
        }
    }

    /// `dF/dx_i` by central differences with step [`FD_STEP`].
    pub fn partial_fd(&self, x: &[f64], i: usize) -> f64 {
        let mut y = x.to_vec();
        y[i] = x[i] + FD_STEP;
        let up = self.evaluate(&y);
        y[i] = x[i] - FD_STEP;
        let down = self.evaluate(&y);
        (up - down) / (2.0 * FD_STEP)
    }

    /// The sum `x_1 + ... + x_n`; its Schur condition vanishes identically.
    pub fn linear(arity: usize, bound: f64) -> Self {
        SymmetricFunction::new("linear", arity, bound, |x| x.iter().sum()).with_partial(|_, _| 1.0)
    }

    /// `-sum x_i^2`, strictly Schur-concave.
    pub fn neg_sum_squares(arity: usize, bound: f64) -> Self {
        SymmetricFunction::new("neg_sum_squares", arity, bound, |x| {
            -x.iter().map(|v| v * v).sum::<f64>()
        })
        .with_partial(|x, i| -2.0 * x[i])
    }

    /// `P^(2a) - (n s)^a P^a - s^a (P^a - (n s)^a)` with `P = sum f(x_i)` and
    /// `s = f(total / n)` held fixed. Zero at the barycenter.
    pub fn thm21(fam: FunctionFamily, arity: usize, total: f64, alpha: u32) -> Result<Self> {
        check_master_args(&fam, arity, total, alpha)?;
        let s = fam.f(total / arity as f64);
        let a = alpha as i32;
        let sa = s.powi(a);
        let nsa = (arity as f64 * s).powi(a);
        let eval = move |x: &[f64]| {
            let pa = x.iter().map(|&v| fam.f(v)).sum::<f64>().powi(a);
            pa * pa - nsa * pa - sa * (pa - nsa)
        };
        let coeff = (arity as f64).powi(a) + 1.0;
        let partial = move |x: &[f64], i: usize| {
            let p: f64 = x.iter().map(|&v| fam.f(v)).sum();
            let af = alpha as f64;
            fam.f_prime(x[i]) * (2.0 * af * p.powi(2 * a - 1) - af * coeff * sa * p.powi(a - 1))
        };
        Ok(SymmetricFunction::new(format!("thm21[{},a={alpha}]", fam.name()), arity, fam.bound(), eval)
            .with_partial(partial))
    }

    /// `P^(2a) - (n s)^a P^a - P^(ka) + (n s)^(ka)`. Zero at the barycenter.
    pub fn thm22(fam: FunctionFamily, arity: usize, total: f64, alpha: u32, k: u32) -> Result<Self> {
        check_master_args(&fam, arity, total, alpha)?;
        if k < 2 {
            return Err(Error::BadK(k));
        }
        let s = fam.f(total / arity as f64);
        let a = alpha as i32;
        let ka = (k * alpha) as i32;
        let nsa = (arity as f64 * s).powi(a);
        let nska = (arity as f64 * s).powi(ka);
        let eval = move |x: &[f64]| {
            let p: f64 = x.iter().map(|&v| fam.f(v)).sum();
            let pa = p.powi(a);
            pa * pa - nsa * pa - p.powi(ka) + nska
        };
        let partial = move |x: &[f64], i: usize| {
            let p: f64 = x.iter().map(|&v| fam.f(v)).sum();
            let bracket = thm22_bracket(BracketReading::PowerOfProduct, p, arity, s, alpha, k);
            fam.f_prime(x[i]) * bracket
        };
        Ok(SymmetricFunction::new(
            format!("thm22[{},a={alpha},k={k}]", fam.name()),
            arity,
            fam.bound(),
            eval,
        )
        .with_partial(partial))
    }
}

fn check_master_args(fam: &FunctionFamily, arity: usize, total: f64, alpha: u32) -> Result<()> {
    if fam.convexity() != Convexity::StrictlyConvex || !fam.positive() {
        return Err(Error::WrongConvexityClass {
            family: fam.name(),
            required: "positive and strictly convex",
        });
    }
    if alpha == 0 {
        return Err(Error::BadAlpha(alpha));
    }
    if arity < 2 {
        return Err(Error::InvalidArgument(format!("arity {arity} < 2")));
    }
    let sigma = total / arity as f64;
    if !fam.contains(sigma) {
        return Err(Error::DomainViolation {
            sigma,
            lower: 0.0,
            upper: fam.bound(),
        });
    }
    Ok(())
}

/// Two readings of the middle coefficient of the `thm22` partial derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BracketReading {
    /// `a (n s)^a P^(a-1)`: what differentiating `F` gives.
    PowerOfProduct,
    /// `a n s^a P^(a-1)`: the coefficient written with `n` outside the power.
    LiteralCoefficient,
}

/// The common factor of `dF/dx_i = f'(x_i) * bracket` for the `thm22` function:
/// `2a P^(2a-1) - c P^(a-1) - k a P^(ka-1)` with `c` per `reading`.
pub fn thm22_bracket(reading: BracketReading, p: f64, n: usize, s: f64, alpha: u32, k: u32) -> f64 {
    let a = alpha as i32;
    let af = alpha as f64;
    let middle = match reading {
        BracketReading::PowerOfProduct => (n as f64 * s).powi(a),
        BracketReading::LiteralCoefficient => n as f64 * s.powi(a),
    };
    2.0 * af * p.powi(2 * a - 1) - af * middle * p.powi(a - 1) - k as f64 * af * p.powi((k * alpha) as i32 - 1)
}

/// An `n x n` matrix with nonnegative entries whose rows and columns each sum to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublyStochasticMatrix {
    n: usize,
    entries: Vec<f64>,
}

/// Row/column sum tolerance.
pub const STOCHASTIC_TOL: f64 = 1e-12;

impl DoublyStochasticMatrix {
    /// Validates a row-major list of rows.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        if let Some(v) = entries.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::NotDoublyStochastic(format!("entry {v} is not a nonnegative real")));
        }
        for i in 0..n {
            let row: f64 = entries[i * n..(i + 1) * n].iter().sum();
            let col: f64 = (0..n).map(|r| entries[r * n + i]).sum();
            if (row - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::NotDoublyStochastic(format!("row {i} sums to {row}")));
            }
            if (col - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::NotDoublyStochastic(format!("column {i} sums to {col}")));
            }
        }
        Ok(DoublyStochasticMatrix { n, entries })
    }

    /// Every entry `1/n`.
    pub fn uniform(n: usize) -> Self {
        DoublyStochasticMatrix {
            n,
            entries: vec![1.0 / n as f64; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        DoublyStochasticMatrix { n, entries }
    }

    /// Row `i` has its 1 in column `order[i]`, so `(P x)_i = x[order[i]]`.
    pub fn permutation(order: &[usize]) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &j in order {
            if j >= n || seen[j] {
                return Err(Error::NotDoublyStochastic(format!("{order:?} is not a permutation")));
            }
            seen[j] = true;
        }
        let mut entries = vec![0.0; n * n];
        for (i, &j) in order.iter().enumerate() {
            entries[i * n + j] = 1.0;
        }
        Ok(DoublyStochasticMatrix { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }
}

/// `P x`.
pub fn apply_doubly_stochastic(p: &DoublyStochasticMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != p.n {
        return Err(Error::DimensionMismatch {
            expected: p.n,
            actual: x.len(),
        });
    }
    Ok((0..p.n)
        .map(|i| {
            let row = &p.entries[i * p.n..(i + 1) * p.n];
            row.iter().zip(x).map(|(a, b)| a * b).sum()
        })
        .collect())
}

/// `(x_1 - x_2)(dF/dx_1 - dF/dx_2)` at `x`.
pub fn schur_condition_value(f: &SymmetricFunction, x: &[f64]) -> Result<f64> {
    schur_condition_pair(f, x, 0, 1)
}

/// The Schur condition on an arbitrary coordinate pair `(i, j)`.
pub fn schur_condition_pair(f: &SymmetricFunction, x: &[f64], i: usize, j: usize) -> Result<f64> {
    Ok(condition_parts(f, x, i, j)?.0)
}

/// Condition value and its noise floor.
fn condition_parts(f: &SymmetricFunction, x: &[f64], i: usize, j: usize) -> Result<(f64, f64)> {
    if x.len() != f.arity {
        return Err(Error::DimensionMismatch {
            expected: f.arity,
            actual: x.len(),
        });
    }
    let clearance = x
        .iter()
        .map(|&v| v.min(f.bound - v))
        .fold(f64::INFINITY, f64::min);
    if !(clearance >= FD_STEP) {
        return Err(Error::TooCloseToBoundary {
            clearance,
            step: FD_STEP,
        });
    }
    let (di, dj) = (f.partial(x, i), f.partial(x, j));
    let spread = (x[i] - x[j]).abs();
    let mut floor = NOISE_REL * spread * di.abs().max(dj.abs());
    if !f.has_analytic_partial() {
        // Central differences carry roundoff of order eps |F| / h.
        floor += spread * 8.0 * f64::EPSILON * f.evaluate(x).abs().max(1.0) / FD_STEP;
    }
    Ok(((x[i] - x[j]) * (di - dj), floor))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchurClass {
    SchurConvex,
    SchurConcave,
    Neither,
    /// Every value lies within the noise floor.
    Indeterminate,
}

impl fmt::Display for SchurClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SchurClass::SchurConvex => "SchurConvex",
            SchurClass::SchurConcave => "SchurConcave",
            SchurClass::Neither => "Neither",
            SchurClass::Indeterminate => "Indeterminate",
        };
        f.write_str(s)
    }
}

/// Outcome of [`certify`], supported at `samples_checked` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurVerdict {
    pub classification: SchurClass,
    pub samples_checked: usize,
    /// The sampled value most opposed to the classification (the smallest
    /// value for convex and mixed verdicts, the largest for concave ones, the
    /// largest in magnitude when indeterminate).
    pub worst_value: f64,
    pub witness: Option<Vec<f64>>,
    /// For `Neither`: a point of the opposite sign to `witness`.
    pub opposite_witness: Option<Vec<f64>>,
    /// Values above `+floor`.
    pub positive_count: usize,
    /// Values below `-floor`.
    pub negative_count: usize,
}

/// Samples `samples` points of `{sum x = total}` and classifies `f` by the sign
/// of its Schur condition.
pub fn certify(f: &SymmetricFunction, total: f64, samples: usize, seed: u64) -> Result<SchurVerdict> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let mut sampler = SimplexSampler::new(f.arity, total, f.bound, CERTIFY_MARGIN, seed)?;
    let points = sampler.take(samples)?;
    let values = points
        .par_iter()
        .map(|p| condition_parts(f, p.values(), 0, 1))
        .collect::<Result<Vec<_>>>()?;

    let mut positive_count = 0;
    let mut negative_count = 0;
    let (mut min_i, mut max_i, mut abs_i) = (0, 0, 0);
    let mut first_pos = None;
    let mut first_neg = None;
    for (idx, &(v, floor)) in values.iter().enumerate() {
        if v > floor {
            positive_count += 1;
            first_pos.get_or_insert(idx);
        } else if v < -floor {
            negative_count += 1;
            first_neg.get_or_insert(idx);
        }
        if v < values[min_i].0 {
            min_i = idx;
        }
        if v > values[max_i].0 {
            max_i = idx;
        }
        if v.abs() > values[abs_i].0.abs() {
            abs_i = idx;
        }
    }
    let point = |i: usize| Some(points[i].values().to_vec());
    let (classification, worst, witness, opposite) = match (positive_count > 0, negative_count > 0) {
        (true, true) => (
            SchurClass::Neither,
            min_i,
            point(first_neg.expect("negative seen")),
            point(first_pos.expect("positive seen")),
        ),
        (true, false) => (SchurClass::SchurConvex, min_i, point(min_i), None),
        (false, true) => (SchurClass::SchurConcave, max_i, point(max_i), None),
        (false, false) => (SchurClass::Indeterminate, abs_i, point(abs_i), None),
    };
    Ok(SchurVerdict {
        classification,
        samples_checked: samples,
        worst_value: values[worst].0,
        witness,
        opposite_witness: opposite,
        positive_count,
        negative_count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtremumMode {
    Max,
    Min,
}

/// Outcome of [`extremum_at_center`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremumReport {
    pub mode: ExtremumMode,
    pub center_value: f64,
    pub samples_checked: usize,
    /// Smallest of `F(x) - F(center)` (Min) or `F(center) - F(x)` (Max).
    pub worst_margin: f64,
    pub worst_point: Vec<f64>,
    /// A sampled point that beats the center beyond tolerance, if any.
    pub violation: Option<Vec<f64>>,
    /// Whether the center is the extremum over the sample.
    pub holds: bool,
}

/// Checks that the barycenter maximizes (or minimizes) `f` over sampled points.
///
/// Sampling cannot establish uniqueness; a passing report means no distinct
/// maximizer was found.
pub fn extremum_at_center(
    f: &SymmetricFunction,
    total: f64,
    mode: ExtremumMode,
    samples: usize,
    seed: u64,
) -> Result<ExtremumReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let center = AngleVector::regular(f.arity, total, f.bound)?;
    let fc = f.evaluate(center.values());
    let mut sampler = SimplexSampler::new(f.arity, total, f.bound, CERTIFY_MARGIN, seed)?;
    let points = sampler.take(samples)?;
    let margins: Vec<(f64, f64)> = points
        .par_iter()
        .map(|p| {
            let fx = f.evaluate(p.values());
            let m = match mode {
                ExtremumMode::Min => fx - fc,
                ExtremumMode::Max => fc - fx,
            };
            (m, 1f64.max(fx.abs()).max(fc.abs()))
        })
        .collect();
    let mut worst = 0;
    let mut violation = None;
    for (i, &(m, scale)) in margins.iter().enumerate() {
        if m < margins[worst].0 {
            worst = i;
        }
        if violation.is_none() && m < -crate::slack::EQUALITY_REL_TOL * scale {
            violation = Some(points[i].values().to_vec());
        }
    }
    Ok(ExtremumReport {
        mode,
        center_value: fc,
        samples_checked: samples,
        worst_margin: margins[worst].0,
        worst_point: points[worst].values().to_vec(),
        holds: violation.is_none(),
        violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn x0() -> Vec<f64> {
        vec![0.4 * PI, 0.3 * PI, 0.3 * PI]
    }

    #[test]
    fn doubly_stochastic_examples() {
        let avg = apply_doubly_stochastic(&DoublyStochasticMatrix::uniform(3), &x0()).unwrap();
        for v in avg {
            assert!((v - PI / 3.0).abs() < 1e-13);
        }
        let id = apply_doubly_stochastic(&DoublyStochasticMatrix::identity(3), &x0()).unwrap();
        assert_eq!(id, x0());
        let p = DoublyStochasticMatrix::permutation(&[2, 0, 1]).unwrap();
        assert_eq!(apply_doubly_stochastic(&p, &[1.0, 2.0, 3.0]).unwrap(), vec![3.0, 1.0, 2.0]);
        assert!(matches!(
            apply_doubly_stochastic(&p, &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(DoublyStochasticMatrix::new(vec![vec![0.5, 0.5], vec![0.6, 0.4]]).is_err());
        assert!(DoublyStochasticMatrix::new(vec![vec![0.3, 0.7], vec![0.7, 0.3]]).is_ok());
    }

    #[test]
    fn condition_signs_at_reference_point() {
        let f21 = SymmetricFunction::thm21(FunctionFamily::tan(), 3, PI, 1).unwrap();
        let f22 = SymmetricFunction::thm22(FunctionFamily::tan(), 3, PI, 1, 3).unwrap();
        // Finite differences are the oracle here.
        let fd = |f: &SymmetricFunction, x: &[f64]| (x[0] - x[1]) * (f.partial_fd(x, 0) - f.partial_fd(x, 1));
        assert!(fd(&f21, &x0()) > 0.0);
        assert!(fd(&f22, &x0()) < 0.0);
        assert!(schur_condition_value(&f21, &x0()).unwrap() > 0.0);
        assert!(schur_condition_value(&f22, &x0()).unwrap() < 0.0);
        let tie = [0.3 * PI, 0.3 * PI, 0.4 * PI];
        assert_eq!(schur_condition_value(&f21, &tie).unwrap(), 0.0);
    }

    #[test]
    fn boundary_is_rejected() {
        let f = SymmetricFunction::linear(3, PI / 2.0);
        assert!(matches!(
            schur_condition_value(&f, &[1e-7, 1.5, PI - 1.5 - 1e-7]),
            Err(Error::TooCloseToBoundary { .. })
        ));
    }

    #[test]
    fn certify_examples() {
        let f21 = SymmetricFunction::thm21(FunctionFamily::tan(), 3, PI, 1).unwrap();
        let v = certify(&f21, PI, 10_000, 1).unwrap();
        assert_eq!(v.classification, SchurClass::SchurConvex);
        assert_eq!(v.negative_count, 0);

        let f22 = SymmetricFunction::thm22(FunctionFamily::tan(), 3, PI, 1, 3).unwrap();
        let v = certify(&f22, PI, 10_000, 1).unwrap();
        assert_eq!(v.classification, SchurClass::SchurConcave);
        assert_eq!(v.positive_count, 0);

        let lin = SymmetricFunction::linear(3, PI / 2.0);
        assert_eq!(certify(&lin, PI, 500, 1).unwrap().classification, SchurClass::Indeterminate);
        assert!(certify(&lin, PI, 0, 1).is_err());
    }

    #[test]
    fn mixed_function_is_neither() {
        // Condition is 3 (x1 - x2)^2 (x1 + x2 - 2pi/3), which takes both signs.
        let f = SymmetricFunction::new("cubic", 3, PI / 2.0, |x| {
            x.iter().map(|v| (v - PI / 3.0).powi(3)).sum()
        });
        let v = certify(&f, PI, 2000, 3).unwrap();
        assert_eq!(v.classification, SchurClass::Neither);
        assert!(v.witness.is_some() && v.opposite_witness.is_some());
    }

    #[test]
    fn extremum_examples() {
        let f21 = SymmetricFunction::thm21(FunctionFamily::tan(), 3, PI, 1).unwrap();
        let r = extremum_at_center(&f21, PI, ExtremumMode::Min, 5000, 2).unwrap();
        assert!(r.holds && r.center_value.abs() < 1e-12 && r.worst_margin >= 0.0);

        let f22 = SymmetricFunction::thm22(FunctionFamily::tan(), 3, PI, 1, 3).unwrap();
        assert!(extremum_at_center(&f22, PI, ExtremumMode::Max, 5000, 2).unwrap().holds);

        let nss = SymmetricFunction::neg_sum_squares(3, PI / 2.0);
        assert!(extremum_at_center(&nss, PI, ExtremumMode::Max, 5000, 2).unwrap().holds);
        assert!(!extremum_at_center(&nss, PI, ExtremumMode::Min, 5000, 2).unwrap().holds);
    }
}

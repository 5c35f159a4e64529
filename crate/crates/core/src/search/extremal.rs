use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, CatalogEntry};
use crate::error::{Error, Result};
use crate::polygon::{
    measure_with, AngleVector, GeometricSummary, PolygonKind, PolygonModel, DEFAULT_MARGIN,
    GEOMETRIC_BOUND,
};
use crate::real::Precision;
use crate::search::nelder_mead::{nelder_mead, NelderMeadConfig};
use crate::simplex::SimplexSampler;

/// Default number of random starts.
pub const DEFAULT_STARTS: usize = 20;
/// Start count is doubled on non-convergence up to this many.
pub const MAX_STARTS: usize = 160;
/// Lattice points a [`grid_scan`] may visit.
pub const GRID_POINT_CAP: u128 = 10_000_000;
/// Relative slack below which a high-precision re-evaluation counts as a
/// counterexample.
pub const CERTIFY_REL_TOL: f64 = 1e-8;

/// One catalog entry at fixed `(kind, n, R, alpha, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchProblem {
    pub entry_id: String,
    pub kind: PolygonKind,
    pub n: usize,
    pub radius: f64,
    pub alpha: u32,
    pub k: Option<u32>,
    pub margin: f64,
}

impl SearchProblem {
    /// Validates the entry and parameters; the kind defaults to the entry's
    /// first supported kind.
    pub fn new(catalog: &Catalog, id: &str, n: usize, radius: f64, alpha: u32, k: Option<u32>) -> Result<Self> {
        let entry = catalog.get(id)?;
        let problem = SearchProblem {
            entry_id: id.to_string(),
            kind: entry.kinds[0],
            n,
            radius,
            alpha,
            k,
            margin: DEFAULT_MARGIN,
        };
        problem.objective(catalog)?;
        Ok(problem)
    }

    pub fn with_kind(mut self, kind: PolygonKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    fn objective<'a>(&self, catalog: &'a Catalog) -> Result<Objective<'a>> {
        let entry = catalog.get(&self.entry_id)?;
        // Validates kind, n, radius and parameters in one go.
        let regular = PolygonModel::regular(self.kind, self.n, self.radius)?;
        catalog.evaluate(&self.entry_id, &regular, self.alpha, self.k)?;
        let upper = GEOMETRIC_BOUND - self.margin;
        if !(self.margin > 0.0 && PI / (self.n as f64) < upper) {
            return Err(Error::InfeasibleMargin {
                margin: self.margin,
                sigma: PI / self.n as f64,
                upper,
            });
        }
        Ok(Objective {
            entry,
            kind: self.kind,
            n: self.n,
            alpha: self.alpha,
            k: self.k,
            margin: self.margin,
            template: measure_with::<f64>(&regular, ()),
        })
    }
}

/// Slack as a function of the angles, sharing the regular-polygon constants.
struct Objective<'a> {
    entry: &'a CatalogEntry,
    kind: PolygonKind,
    n: usize,
    alpha: u32,
    k: Option<u32>,
    margin: f64,
    template: GeometricSummary,
}

impl Objective<'_> {
    /// `(slack, scale)` from the kind's trigonometric sums.
    fn from_sums(&self, first: f64, second: f64) -> (f64, f64) {
        let g = self.template.with_sums(first, second, ());
        let s = self.entry.evaluate_summary(&g, self.alpha, self.k, ());
        (s.slack, s.scale)
    }

    fn at(&self, theta: &[f64]) -> (f64, f64) {
        let (first, second) = match self.kind {
            PolygonKind::Tangential => (theta.iter().map(|t| t.tan()).sum(), 0.0),
            PolygonKind::Cyclic => theta.iter().fold((0.0, 0.0), |(s, sc), t| {
                let (sin, cos) = t.sin_cos();
                (s + sin, sc + sin * cos)
            }),
        };
        self.from_sums(first, second)
    }

    /// `theta = margin + (pi - n margin) softmax(z, 0)`, so the sum is always
    /// `pi` and every angle exceeds the margin.
    fn angles(&self, z: &[f64]) -> Vec<f64> {
        let zmax = z.iter().copied().fold(0.0, f64::max);
        let w: Vec<f64> = z.iter().chain(std::iter::once(&0.0)).map(|v| (v - zmax).exp()).collect();
        let total: f64 = w.iter().sum();
        let span = PI - self.n as f64 * self.margin;
        w.iter().map(|v| self.margin + span * v / total).collect()
    }

    fn logits(&self, theta: &[f64]) -> Vec<f64> {
        let last = (theta[self.n - 1] - self.margin).ln();
        theta[..self.n - 1].iter().map(|t| (t - self.margin).ln() - last).collect()
    }

    fn feasible(&self, theta: &[f64]) -> bool {
        theta.iter().all(|&t| t < GEOMETRIC_BOUND - self.margin)
    }

    fn angle_vector(&self, theta: Vec<f64>) -> AngleVector {
        // Renormalize the last coordinate so the stored sum is pi to rounding.
        let mut theta = theta;
        let head: f64 = theta[..self.n - 1].iter().sum();
        theta[self.n - 1] = PI - head;
        AngleVector::new(theta, PI, GEOMETRIC_BOUND).expect("optimizer iterates stay in the domain")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    Slack,
    RelativeSlack,
}

struct Run {
    theta: Vec<f64>,
    value: f64,
    start_value: f64,
    evals: usize,
    iterations: usize,
    converged: bool,
}

fn run_start(obj: &Objective, start: &AngleVector, target: Target, cfg: &NelderMeadConfig) -> Run {
    let value = |theta: &[f64]| -> f64 {
        if !obj.feasible(theta) {
            return f64::INFINITY;
        }
        let (slack, scale) = obj.at(theta);
        match target {
            Target::Slack => slack,
            Target::RelativeSlack => slack / scale,
        }
    };
    let z0 = obj.logits(start.values());
    let start_value = value(&obj.angles(&z0));
    let out = nelder_mead(|z| value(&obj.angles(z)), &z0, cfg);
    Run {
        theta: obj.angles(&out.x),
        value: out.fx,
        start_value,
        evals: out.evals,
        iterations: out.iterations,
        converged: out.converged,
    }
}

/// Best point found by [`minimize_slack`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub entry_id: String,
    pub kind: PolygonKind,
    pub n: usize,
    pub radius: f64,
    pub alpha: u32,
    pub k: Option<u32>,
    pub best_angles: AngleVector,
    pub best_slack: f64,
    pub best_scale: f64,
    /// Optimizer iterations summed over starts.
    pub iterations: usize,
    pub evaluations: usize,
    pub starts: usize,
    /// Whether the start that produced the best point met the diameter criterion.
    pub converged: bool,
    /// `max_i |theta_i - pi/n|` at the best point.
    pub distance_to_regular: f64,
    /// Slack at each starting point, in start order.
    pub start_slacks: Vec<f64>,
}

/// Minimizes the slack of `problem` over the angle simplex from `starts`
/// seeded random points (doubling up to [`MAX_STARTS`] if none converges).
pub fn minimize_slack(catalog: &Catalog, problem: &SearchProblem, starts: usize, seed: u64) -> Result<SearchResult> {
    if starts == 0 {
        return Err(Error::InvalidArgument("starts must be >= 1".into()));
    }
    let obj = problem.objective(catalog)?;
    let cfg = NelderMeadConfig::default();
    let mut sampler = SimplexSampler::geometric(problem.n, PI, problem.margin, seed)?;
    let mut runs: Vec<Run> = Vec::new();
    let mut target_starts = starts;
    loop {
        let fresh = sampler.take(target_starts - runs.len())?;
        let mut batch: Vec<Run> = fresh
            .par_iter()
            .map(|s| run_start(&obj, s, Target::Slack, &cfg))
            .collect();
        runs.append(&mut batch);
        if runs.iter().any(|r| r.converged) || target_starts >= MAX_STARTS.max(starts) {
            break;
        }
        target_starts = (target_starts * 2).min(MAX_STARTS.max(starts));
    }

    // Ordered reduction: the earliest start wins ties.
    let best = runs
        .iter()
        .enumerate()
        .fold(0, |b, (i, r)| if r.value < runs[b].value { i } else { b });
    let best_run = &runs[best];
    let angles = obj.angle_vector(best_run.theta.clone());
    let (best_slack, best_scale) = obj.at(angles.values());
    Ok(SearchResult {
        entry_id: problem.entry_id.clone(),
        kind: problem.kind,
        n: problem.n,
        radius: problem.radius,
        alpha: problem.alpha,
        k: problem.k,
        distance_to_regular: angles.distance_to_regular(),
        best_angles: angles,
        best_slack,
        best_scale,
        iterations: runs.iter().map(|r| r.iterations).sum(),
        evaluations: runs.iter().map(|r| r.evals).sum(),
        starts: runs.len(),
        converged: best_run.converged,
        start_slacks: runs.iter().map(|r| r.start_value).collect(),
    })
}

/// Exhaustive lattice minimum of one entry's slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridScanResult {
    pub entry_id: String,
    pub kind: PolygonKind,
    pub n: usize,
    pub radius: f64,
    pub alpha: u32,
    pub k: Option<u32>,
    pub resolution: usize,
    /// Lattice spacing in radians.
    pub step: f64,
    /// Number of lattice points inside the domain (all were evaluated).
    pub points: u64,
    pub grid_min_slack: f64,
    pub grid_min_scale: f64,
    pub grid_argmin: AngleVector,
    /// Largest `|slack(neighbor) - slack(argmin)| / step` over lattice
    /// neighbours of the argmin.
    pub lipschitz: f64,
}

/// Binomial coefficient as u128, zero when `k > n` or `n < 0`.
fn binom(n: i64, k: i64) -> u128 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of `j in {0..=cap}^n` with `sum j = total`.
pub fn bounded_compositions(n: usize, total: usize, cap: usize) -> u128 {
    let (n, total, cap) = (n as i64, total as i64, cap as i64);
    let mut count: i128 = 0;
    for i in 0..=n {
        let rest = total - i * (cap + 1);
        if rest < 0 {
            break;
        }
        let term = (binom(n, i) * binom(rest + n - 1, n - 1)) as i128;
        count += if i % 2 == 0 { term } else { -term };
    }
    count.max(0) as u128
}

/// Evaluates the slack at every point `theta_i = margin + j_i step`,
/// `sum j_i = resolution`, `step = (pi - n margin) / resolution`, inside the
/// domain.
pub fn grid_scan(catalog: &Catalog, problem: &SearchProblem, resolution: usize) -> Result<GridScanResult> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be >= 1".into()));
    }
    let obj = problem.objective(catalog)?;
    let n = problem.n;
    let m = problem.margin;
    let step = (PI - n as f64 * m) / resolution as f64;
    let limit = GEOMETRIC_BOUND - 2.0 * m;
    let mut cap = (limit / step).floor() as usize;
    while cap as f64 * step >= limit {
        cap -= 1;
    }
    let cap = cap.min(resolution);
    let points = bounded_compositions(n, resolution, cap);
    if points > GRID_POINT_CAP {
        return Err(Error::BudgetExceeded {
            points,
            cap: GRID_POINT_CAP,
        });
    }

    let theta_of = |j: usize| m + j as f64 * step;
    let first: Vec<f64> = (0..=cap)
        .map(|j| match obj.kind {
            PolygonKind::Tangential => theta_of(j).tan(),
            PolygonKind::Cyclic => theta_of(j).sin(),
        })
        .collect();
    let second: Vec<f64> = (0..=cap)
        .map(|j| match obj.kind {
            PolygonKind::Tangential => 0.0,
            PolygonKind::Cyclic => {
                let (s, c) = theta_of(j).sin_cos();
                s * c
            }
        })
        .collect();
    let slack_at = |js: &[usize]| -> (f64, f64) {
        let a: f64 = js.iter().map(|&j| first[j]).sum();
        let b: f64 = js.iter().map(|&j| second[j]).sum();
        obj.from_sums(a, b)
    };

    // Shard on the first coordinate; merge in shard order.
    let shards: Vec<Option<(f64, f64, Vec<usize>)>> = (0..=cap)
        .into_par_iter()
        .map(|j0| {
            let mut best: Option<(f64, f64, Vec<usize>)> = None;
            let mut js = vec![0usize; n];
            js[0] = j0;
            enumerate(&mut js, 1, resolution - j0.min(resolution), cap, &mut |js| {
                let (s, scale) = slack_at(js);
                if best.as_ref().map_or(true, |b| s < b.0) {
                    best = Some((s, scale, js.to_vec()));
                }
            });
            best
        })
        .collect();
    let (min_slack, min_scale, argmin) = shards
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .ok_or_else(|| Error::InvalidArgument("lattice has no interior point".into()))?;

    let mut lipschitz: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            if a == b || argmin[a] == cap || argmin[b] == 0 {
                continue;
            }
            let mut nb = argmin.clone();
            nb[a] += 1;
            nb[b] -= 1;
            lipschitz = lipschitz.max((slack_at(&nb).0 - min_slack).abs() / step);
        }
    }

    let theta: Vec<f64> = argmin.iter().map(|&j| theta_of(j)).collect();
    Ok(GridScanResult {
        entry_id: problem.entry_id.clone(),
        kind: problem.kind,
        n,
        radius: problem.radius,
        alpha: problem.alpha,
        k: problem.k,
        resolution,
        step,
        points: points as u64,
        grid_min_slack: min_slack,
        grid_min_scale: min_scale,
        grid_argmin: obj.angle_vector(theta),
        lipschitz,
    })
}

/// Visits every completion of `js[pos..]` with entries in `0..=cap` summing to `remaining`.
fn enumerate(js: &mut [usize], pos: usize, remaining: usize, cap: usize, visit: &mut impl FnMut(&[usize])) {
    let left = js.len() - pos;
    if left == 0 {
        if remaining == 0 {
            visit(js);
        }
        return;
    }
    if remaining > left * cap {
        return;
    }
    if left == 1 {
        js[pos] = remaining;
        visit(js);
        return;
    }
    let lo = remaining.saturating_sub((left - 1) * cap);
    for j in lo..=remaining.min(cap) {
        js[pos] = j;
        enumerate(js, pos + 1, remaining - j, cap, visit);
    }
}

/// A point where an entry fails, confirmed in high precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub entry_id: String,
    pub kind: PolygonKind,
    pub n: usize,
    pub radius: f64,
    pub alpha: u32,
    pub k: Option<u32>,
    pub angles: AngleVector,
    /// Double-precision slack.
    pub slack: f64,
    /// Slack re-evaluated at [`Precision::high`].
    pub certified_slack: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifyOutcome {
    pub counterexample: Option<Counterexample>,
    pub evaluations: usize,
    pub starts: usize,
    /// Smallest relative slack `slack / scale` seen at the end of any start.
    pub best_relative_slack: f64,
}

/// Minimizes the relative slack from successive random starts until
/// `budget_evals` objective evaluations are spent or a counterexample
/// survives high-precision re-evaluation.
pub fn falsify(catalog: &Catalog, problem: &SearchProblem, budget_evals: usize, seed: u64) -> Result<FalsifyOutcome> {
    let obj = problem.objective(catalog)?;
    let mut sampler = SimplexSampler::geometric(problem.n, PI, problem.margin, seed)?;
    let per_start = (budget_evals / DEFAULT_STARTS).clamp(200, 20_000);
    let mut spent = 0;
    let mut starts = 0;
    let mut best_relative = f64::INFINITY;
    while spent < budget_evals {
        let cfg = NelderMeadConfig {
            max_evals: per_start.min(budget_evals - spent),
            ..Default::default()
        };
        let start = sampler.sample()?;
        let run = run_start(&obj, &start, Target::RelativeSlack, &cfg);
        spent += run.evals;
        starts += 1;
        best_relative = best_relative.min(run.value);
        if run.value < -CERTIFY_REL_TOL {
            if let Some(c) = certify_point(catalog, problem, &obj, run.theta)? {
                return Ok(FalsifyOutcome {
                    counterexample: Some(c),
                    evaluations: spent,
                    starts,
                    best_relative_slack: best_relative,
                });
            }
        }
    }
    Ok(FalsifyOutcome {
        counterexample: None,
        evaluations: spent,
        starts,
        best_relative_slack: best_relative,
    })
}

fn certify_point(catalog: &Catalog, problem: &SearchProblem, obj: &Objective, theta: Vec<f64>) -> Result<Option<Counterexample>> {
    let angles = obj.angle_vector(theta);
    let polygon = PolygonModel::new(problem.kind, problem.radius, angles.clone())?;
    let low = catalog.evaluate(&problem.entry_id, &polygon, problem.alpha, problem.k)?;
    let high = catalog.evaluate_with(&problem.entry_id, &polygon, problem.alpha, problem.k, Precision::high())?;
    if high.slack < -CERTIFY_REL_TOL * high.scale {
        Ok(Some(Counterexample {
            entry_id: problem.entry_id.clone(),
            kind: problem.kind,
            n: problem.n,
            radius: problem.radius,
            alpha: problem.alpha,
            k: problem.k,
            angles,
            slack: low.slack,
            certified_slack: high.slack,
            scale: high.scale,
        }))
    } else {
        Ok(None)
    }
}

//! The subcommands. Each builds a [`ReportDocument`]; exit codes are decided by
//! the caller from its status.

use std::f64::consts::PI;

use bonnesen_core::catalog::CatalogEntry;
use bonnesen_core::search::{falsify, grid_scan, minimize_slack, SearchProblem};
use bonnesen_core::{
    certify, Catalog, FunctionFamily, PolygonKind, PolygonModel, SchurClass, SimplexSampler, SlackRecord,
    SymmetricFunction,
};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::report::{
    CertifyRow, EntryAggregate, FalsifyRow, GridCheck, ReportDocument, SearchRow, SkippedCombination,
};

/// Samples per parallel work unit in `verify`. Fixed so the merge order, and
/// hence every tie-break, does not depend on the thread count.
const CHUNK: usize = 256;

/// A search minimum this close to zero (relative to its scale) counts as an
/// equality.
pub const SEARCH_REL_TOL: f64 = 1e-8;

/// A search minimum must lie this close (max-norm) to the regular point.
pub const REGULAR_DISTANCE_TOL: f64 = 1e-3;

#[derive(Debug)]
pub enum CommandError {
    /// Bad input that slipped past config validation (exit 2).
    Usage(String),
}

impl From<bonnesen_core::Error> for CommandError {
    fn from(e: bonnesen_core::Error) -> Self {
        CommandError::Usage(e.to_string())
    }
}

fn catalog_for(config: &RunConfig) -> Catalog {
    if config.plant_fault {
        Catalog::with_planted_fault()
    } else {
        Catalog::standard()
    }
}

/// SplitMix64 finalizer: decorrelates per-group seeds derived from one seed.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix(seed), |acc, &p| mix(acc ^ p))
}

fn kind_tag(kind: PolygonKind) -> u64 {
    match kind {
        PolygonKind::Tangential => 1,
        PolygonKind::Cyclic => 2,
    }
}

/// `(alpha, k)` combinations of the configured grid that an entry accepts;
/// parameter-free entries run once with `alpha = 1`.
pub fn param_combinations(entry: &CatalogEntry, alphas: &[u32], ks: &[u32]) -> Vec<(u32, Option<u32>)> {
    let alphas: Vec<u32> = if entry.params.uses_alpha() { alphas.to_vec() } else { vec![1] };
    let mut out = Vec::new();
    for a in alphas {
        if entry.params.uses_k() {
            out.extend(ks.iter().map(|&k| (a, Some(k))));
        } else {
            out.push((a, None));
        }
    }
    out.retain(|&(a, k)| entry.params.contains(a, k));
    out
}

#[derive(Debug, Clone)]
struct Agg {
    samples: u64,
    min_slack: f64,
    worst_rel: f64,
    worst: Option<(SlackRecord, Vec<f64>)>,
    violations: u64,
    equality_hits: u64,
    negative_lhs: u64,
    min_rhs: f64,
}

impl Agg {
    fn empty() -> Self {
        Agg {
            samples: 0,
            min_slack: f64::INFINITY,
            worst_rel: f64::INFINITY,
            worst: None,
            violations: 0,
            equality_hits: 0,
            negative_lhs: 0,
            min_rhs: f64::INFINITY,
        }
    }

    fn push(&mut self, r: &SlackRecord, angles: &[f64], tolerance: f64) {
        self.samples += 1;
        self.min_slack = self.min_slack.min(r.slack);
        let rel = r.slack / r.scale;
        if rel < self.worst_rel {
            self.worst_rel = rel;
            self.worst = Some((r.clone(), angles.to_vec()));
        }
        if r.slack < -tolerance * r.scale {
            self.violations += 1;
        }
        if r.equality {
            self.equality_hits += 1;
        }
        if r.lhs < 0.0 {
            self.negative_lhs += 1;
        }
        self.min_rhs = self.min_rhs.min(r.rhs);
    }

    /// Merges a later chunk; earlier chunks win ties.
    fn merge(mut self, other: Agg) -> Agg {
        self.samples += other.samples;
        self.min_slack = self.min_slack.min(other.min_slack);
        if other.worst_rel < self.worst_rel {
            self.worst_rel = other.worst_rel;
            self.worst = other.worst;
        }
        self.violations += other.violations;
        self.equality_hits += other.equality_hits;
        self.negative_lhs += other.negative_lhs;
        self.min_rhs = self.min_rhs.min(other.min_rhs);
        self
    }
}

pub fn verify(config: &RunConfig) -> Result<ReportDocument, CommandError> {
    let catalog = catalog_for(config);
    let mut doc = ReportDocument::new(config);
    for &kind in &config.kinds {
        for &n in &config.n {
            let seed = derive_seed(config.seed, &[kind_tag(kind), n as u64]);
            let mut sampler = SimplexSampler::geometric(n as usize, PI, config.margin, seed)?;
            let polygons = sampler
                .take(config.samples)?
                .into_iter()
                .map(|a| PolygonModel::new(kind, config.radius, a))
                .collect::<Result<Vec<_>, _>>()?;

            let template = catalog.evaluate_all_with(&polygons[0], &config.alpha, &config.k, config.precision);
            for s in template.skipped {
                doc.skipped.push(SkippedCombination {
                    entry_id: s.entry_id,
                    kind,
                    alpha: s.alpha,
                    k: s.k,
                    reason: s.reason,
                });
            }
            let width = template.records.len();
            let partials: Vec<Vec<Agg>> = polygons
                .par_chunks(CHUNK)
                .map(|chunk| {
                    let mut aggs = vec![Agg::empty(); width];
                    for p in chunk {
                        let records = catalog.evaluate_all_with(p, &config.alpha, &config.k, config.precision).records;
                        for (agg, r) in aggs.iter_mut().zip(&records) {
                            agg.push(r, p.angles().values(), config.tolerance);
                        }
                    }
                    aggs
                })
                .collect();
            let merged = partials
                .into_iter()
                .reduce(|a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect())
                .unwrap_or_default();

            for agg in merged {
                let (w, angles) = agg.worst.expect("at least one sample");
                doc.summary.records += agg.samples;
                doc.summary.violations += agg.violations;
                doc.summary.equality_hits += agg.equality_hits;
                doc.entries.push(EntryAggregate {
                    entry_id: w.entry_id.clone(),
                    kind,
                    n: n as usize,
                    radius: config.radius,
                    alpha: w.alpha,
                    k: w.k,
                    samples: agg.samples,
                    min_slack: agg.min_slack,
                    worst_relative_slack: agg.worst_rel,
                    worst_slack: w.slack,
                    worst_lhs: w.lhs,
                    worst_rhs: w.rhs,
                    worst_scale: w.scale,
                    worst_equality: w.equality,
                    argmin_fingerprint: format!("{:016x}", w.fingerprint),
                    argmin_angles: angles,
                    violations: agg.violations,
                    equality_hits: agg.equality_hits,
                    negative_lhs: agg.negative_lhs,
                    min_rhs: agg.min_rhs,
                });
            }
        }
    }
    doc.skipped.sort_by(|a, b| (&a.entry_id, a.kind, a.alpha, a.k).cmp(&(&b.entry_id, b.kind, b.alpha, b.k)));
    doc.skipped.dedup();

    for a in &doc.entries {
        if a.violations > 0 {
            doc.notes.push(format!(
                "{} ({}, n={}, alpha={}, k={}) violated on {} of {} samples; worst relative slack {:e}",
                a.entry_id,
                a.kind,
                a.n,
                a.alpha,
                a.k.map(|k| k.to_string()).unwrap_or_else(|| "-".into()),
                a.violations,
                a.samples,
                a.worst_relative_slack
            ));
        }
    }
    for id in ["T31B", "T32B"] {
        let negative: u64 = doc.entries.iter().filter(|a| a.entry_id == id).map(|a| a.negative_lhs).sum();
        if negative > 0 {
            doc.notes.push(format!("{id}: left-hand side negative on {negative} samples"));
        }
    }
    let le_negative_rhs: Vec<&str> = doc
        .entries
        .iter()
        .filter(|a| a.min_rhs < -config.tolerance * a.worst_scale)
        .filter(|a| catalog.get(&a.entry_id).map(|e| e.direction == bonnesen_core::Direction::Le).unwrap_or(false))
        .map(|a| a.entry_id.as_str())
        .collect();
    if !le_negative_rhs.is_empty() {
        doc.notes.push(format!("upper bounds with a negative right-hand side: {}", le_negative_rhs.join(", ")));
    }
    Ok(doc.finish())
}

fn certify_row(
    f: &SymmetricFunction,
    family: &str,
    n: usize,
    alpha: Option<u32>,
    k: Option<u32>,
    expected: Option<SchurClass>,
    samples: usize,
    seed: u64,
) -> Result<CertifyRow, CommandError> {
    let v = certify(f, PI, samples, seed)?;
    Ok(CertifyRow {
        function: f.name().to_string(),
        family: family.to_string(),
        n,
        alpha,
        k,
        expected,
        matches: expected.map_or(true, |e| e == v.classification),
        classification: v.classification,
        samples: v.samples_checked,
        positive_count: v.positive_count,
        negative_count: v.negative_count,
        worst_value: v.worst_value,
        witness: v.witness,
    })
}

pub fn certify_cmd(config: &RunConfig) -> Result<ReportDocument, CommandError> {
    let mut doc = ReportDocument::new(config);
    for &n in &config.n {
        let n = n as usize;
        for &alpha in &config.alpha {
            for (fi, fam) in [FunctionFamily::tan(), FunctionFamily::sec()].into_iter().enumerate() {
                let f = SymmetricFunction::thm21(fam.clone(), n, PI, alpha)?;
                let seed = derive_seed(config.seed, &[21, n as u64, alpha as u64, fi as u64]);
                let row = certify_row(&f, fam.name(), n, Some(alpha), None, Some(SchurClass::SchurConvex), config.samples, seed)?;
                doc.verdicts.push(row);
            }
            for &k in &config.k {
                for (fi, fam) in [FunctionFamily::tan(), FunctionFamily::csc()].into_iter().enumerate() {
                    let f = SymmetricFunction::thm22(fam.clone(), n, PI, alpha, k)?;
                    let seed = derive_seed(config.seed, &[22, n as u64, alpha as u64, k as u64, fi as u64]);
                    let row = certify_row(&f, fam.name(), n, Some(alpha), Some(k), Some(SchurClass::SchurConcave), config.samples, seed)?;
                    doc.verdicts.push(row);
                }
            }
        }
        // The linear function has a vanishing Schur condition everywhere.
        let probe = SymmetricFunction::linear(n, PI / 2.0);
        let row = certify_row(&probe, "linear", n, None, None, None, config.samples, derive_seed(config.seed, &[1, n as u64]))?;
        if row.classification != SchurClass::Indeterminate {
            doc.notes.push(format!("linear probe at n={n} classified {}", row.classification));
        }
        doc.verdicts.push(row);
    }
    doc.summary.records = doc.verdicts.len() as u64;
    doc.summary.anomalies = doc.verdicts.iter().filter(|r| !r.matches).count() as u64;
    Ok(doc.finish())
}

pub fn search(config: &RunConfig) -> Result<ReportDocument, CommandError> {
    let catalog = catalog_for(config);
    let mut doc = ReportDocument::new(config);
    let mut entries: Vec<&CatalogEntry> = catalog.entries().iter().collect();
    entries.sort_by_key(|e| e.id);
    for entry in entries {
        for &kind in config.kinds.iter().filter(|k| entry.applies_to(**k)) {
            for &n in &config.n {
                for (alpha, k) in param_combinations(entry, &config.alpha, &config.k) {
                    let problem = SearchProblem::new(&catalog, entry.id, n as usize, config.radius, alpha, k)?
                        .with_kind(kind)
                        .with_margin(config.margin);
                    let tag = [kind_tag(kind), n as u64, alpha as u64, k.unwrap_or(0) as u64];
                    let row = search_one(&catalog, &problem, config, derive_seed(config.seed, &tag))?;
                    if let Some(why) = &row.anomaly {
                        doc.notes.push(format!(
                            "{} ({kind}, n={n}, alpha={alpha}, k={}): {why}",
                            entry.id,
                            k.map(|k| k.to_string()).unwrap_or_else(|| "-".into())
                        ));
                    }
                    doc.searches.push(row);
                }
            }
        }
    }
    doc.summary.records = doc.searches.len() as u64;
    doc.summary.anomalies = doc.searches.iter().filter(|r| r.anomaly.is_some()).count() as u64;
    doc.summary.equality_hits = doc
        .searches
        .iter()
        .filter(|r| r.best_slack.abs() <= SEARCH_REL_TOL * r.best_scale)
        .count() as u64;
    if doc.summary.anomalies == 0 {
        doc.notes.push("no non-regular equality configuration found within tolerance".to_string());
    }
    Ok(doc.finish())
}

fn search_one(catalog: &Catalog, problem: &SearchProblem, config: &RunConfig, seed: u64) -> Result<SearchRow, CommandError> {
    let r = minimize_slack(catalog, problem, config.starts, seed)?;
    let f = falsify(catalog, problem, config.budget, mix(seed))?;
    let polygon = PolygonModel::new(problem.kind, problem.radius, r.best_angles.clone())?;
    let at_best = catalog.evaluate(&problem.entry_id, &polygon, problem.alpha, problem.k)?;

    let grid = match config.grid {
        Some(res) if problem.n <= 4 => {
            let g = grid_scan(catalog, problem, res)?;
            Some(GridCheck {
                resolution: g.resolution,
                step: g.step,
                points: g.points,
                grid_min_slack: g.grid_min_slack,
                grid_min_scale: g.grid_min_scale,
                argmin_distance: g.grid_argmin.distance_to_regular(),
                lipschitz: g.lipschitz,
                agrees: (r.best_slack - g.grid_min_slack).abs() <= 2.0 * g.lipschitz * g.step,
            })
        }
        _ => None,
    };

    let anomaly = if let Some(c) = &f.counterexample {
        Some(format!("certified counterexample, slack {:e} at scale {:e}", c.certified_slack, c.scale))
    } else if r.best_slack < -SEARCH_REL_TOL * r.best_scale {
        Some(format!("negative minimum {:e} not confirmed in high precision", r.best_slack))
    } else if r.best_slack > SEARCH_REL_TOL * r.best_scale {
        Some(format!("minimum {:e} does not reach equality", r.best_slack))
    } else if r.distance_to_regular >= REGULAR_DISTANCE_TOL {
        Some(format!("equality {:e} away from the regular polygon", r.distance_to_regular))
    } else if grid.as_ref().is_some_and(|g| !g.agrees) {
        Some("optimizer and lattice minimum disagree".to_string())
    } else {
        None
    };

    Ok(SearchRow {
        entry_id: r.entry_id,
        kind: r.kind,
        n: r.n,
        radius: r.radius,
        alpha: r.alpha,
        k: r.k,
        best_slack: r.best_slack,
        best_scale: r.best_scale,
        best_lhs: at_best.lhs,
        best_rhs: at_best.rhs,
        best_angles: r.best_angles.values().to_vec(),
        distance_to_regular: r.distance_to_regular,
        converged: r.converged,
        starts: r.starts,
        evaluations: r.evaluations,
        falsify: FalsifyRow {
            evaluations: f.evaluations,
            starts: f.starts,
            best_relative_slack: f.best_relative_slack,
            counterexample: f.counterexample,
        },
        grid,
        anomaly,
    })
}

pub fn catalog_cmd(config: &RunConfig) -> Result<ReportDocument, CommandError> {
    let catalog = catalog_for(config);
    let mut doc = ReportDocument::new(config);
    let mut entries: Vec<&CatalogEntry> = catalog
        .entries()
        .iter()
        .filter(|e| config.kinds.iter().any(|k| e.applies_to(*k)))
        .collect();
    entries.sort_by_key(|e| e.id);
    for e in entries {
        doc.catalog.push(serde_json::to_value(e).map_err(|e| CommandError::Usage(e.to_string()))?);
    }
    doc.summary.records = doc.catalog.len() as u64;
    Ok(doc.finish())
}

//! Derivative-free minimization by the Nelder-Mead simplex method.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadConfig {
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    pub max_evals: usize,
    /// Converged once every vertex is within this max-norm distance of the best.
    pub diameter_tol: f64,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        NelderMeadConfig {
            initial_step: 0.25,
            max_evals: 20_000,
            diameter_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOutcome {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` from `x0`. `f` may return `+inf` outside its domain; `x0`
/// must be inside it.
pub fn nelder_mead(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], cfg: &NelderMeadConfig) -> NelderMeadOutcome {
    let dim = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let f0 = eval(x0, &mut evals);
    if dim == 0 {
        return NelderMeadOutcome {
            x: x0.to_vec(),
            fx: f0,
            evals,
            iterations: 0,
            converged: true,
        };
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
    for i in 0..dim {
        // Step away from x0, flipping and shrinking until the vertex is finite.
        let mut step = cfg.initial_step;
        let mut vertex = (x0.to_vec(), f64::INFINITY);
        for attempt in 0..60 {
            let mut x = x0.to_vec();
            x[i] += if attempt % 2 == 0 { step } else { -step };
            let fx = eval(&x, &mut evals);
            vertex = (x, fx);
            if fx.is_finite() {
                break;
            }
            if attempt % 2 == 1 {
                step *= 0.5;
            }
        }
        simplex.push(vertex);
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < cfg.diameter_tol {
            converged = true;
            break;
        }
        if evals >= cfg.max_evals {
            break;
        }
        iterations += 1;

        let worst = dim;
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..worst] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / dim as f64;
            }
        }
        let toward = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[worst].0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = toward(REFLECT);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = toward(REFLECT * EXPAND);
            let fe = eval(&xe, &mut evals);
            simplex[worst] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[worst - 1].1 {
            simplex[worst] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[worst].1 {
            let xc = toward(REFLECT * CONTRACT);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = toward(-CONTRACT);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < simplex[worst].1.min(fr) {
            simplex[worst] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = best
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| b + SHRINK * (v - b))
                .collect();
            let fx = eval(&x, &mut evals);
            *vertex = (x, fx);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    NelderMeadOutcome {
        x,
        fx,
        evals,
        iterations,
        converged,
    }
}

use std::f64::consts::PI;

use bonnesen_core::analytic::DEFAULT_HYPERBOLIC_BOUND;
use bonnesen_core::slack::EQUALITY_REL_TOL;
use bonnesen_core::*;

const SAMPLES: usize = 10_000;

/// Roundoff floor for strictness checks.
const ROUNDOFF_REL: f64 = 64.0 * f64::EPSILON;

/// Strictness is checked only where double precision can resolve it. Near the
/// ends of `(0, pi/2)` both sides reach 1e34 while the slack can be a 1e-15
/// fraction of them.
fn resolvable(theta: &AngleVector) -> bool {
    theta.distance_to_regular() > 1e-3 && theta.clearance() > 1e-2
}

/// Total used when sampling a family's domain: pi for the trigonometric
/// families, half the interval per coordinate otherwise.
fn total_for(fam: &FunctionFamily, n: usize) -> f64 {
    if fam.bound() == PI / 2.0 {
        PI
    } else {
        0.5 * fam.bound() * n as f64
    }
}

fn samples(fam: &FunctionFamily, n: usize, count: usize, seed: u64) -> Vec<AngleVector> {
    let total = total_for(fam, n);
    SimplexSampler::new(n, total, fam.bound(), 1e-6 * fam.bound(), seed)
        .unwrap()
        .take(count)
        .unwrap()
}

fn grid(fam: &FunctionFamily) -> impl Iterator<Item = f64> + '_ {
    (1..=1000).map(move |i| fam.bound() * i as f64 / 1001.0)
}

#[test]
fn ode_residual_vanishes() {
    for fam in builtin_families() {
        let Some(mu) = fam.mu() else { continue };
        for x in grid(&fam) {
            let r = fam.f_prime(x).powi(2) - fam.f(x) * fam.f_double_prime(x) - mu;
            assert!(r.abs() <= 1e-10, "{fam} at {x}: residual {r}");
        }
    }
}

#[test]
fn convexity_matches_second_derivative() {
    for fam in builtin_families() {
        for x in grid(&fam) {
            let fpp = fam.f_double_prime(x);
            match fam.convexity() {
                Convexity::StrictlyConvex => assert!(fpp > 0.0, "{fam} at {x}"),
                Convexity::StrictlyConcave => assert!(fpp < 0.0, "{fam} at {x}"),
            }
            assert!(fam.f(x) > 0.0);
        }
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let h = 1e-6;
    for fam in builtin_families() {
        for x in grid(&fam).step_by(37).filter(|x| x.min(fam.bound() - x) > 0.05) {
            let fd1 = (fam.f(x + h) - fam.f(x - h)) / (2.0 * h);
            let fd2 = (fam.f_prime(x + h) - fam.f_prime(x - h)) / (2.0 * h);
            assert!((fd1 - fam.f_prime(x)).abs() <= 1e-6 * fam.f_prime(x).abs().max(1.0), "{fam} f' at {x}");
            assert!((fd2 - fam.f_double_prime(x)).abs() <= 1e-6 * fam.f_double_prime(x).abs().max(1.0), "{fam} f'' at {x}");
        }
    }
}

#[test]
fn ode_cases_cover_all_four_patterns() {
    let cases: Vec<_> = builtin_families().iter().filter_map(|f| f.ode_case()).collect();
    assert_eq!(cases, [OdeCase::I1, OdeCase::I2, OdeCase::II1, OdeCase::II2]);
    for fam in builtin_families() {
        let Some(case) = fam.ode_case() else { continue };
        for x in grid(&fam) {
            assert_eq!(OdeCase::from_signs(fam.f_double_prime(x), fam.f_prime(x)), Some(case), "{fam} at {x}");
        }
    }
}

#[test]
fn jensen_is_strict_off_the_center() {
    for fam in builtin_families() {
        for n in [3, 5, 8] {
            for theta in samples(&fam, n, 1000, 3) {
                let j = jensen_slack(&fam, &theta).unwrap();
                if theta.distance_to_regular() > 1e-3 {
                    match fam.convexity() {
                        Convexity::StrictlyConvex => assert!(j > 0.0, "{fam} {theta:?}"),
                        Convexity::StrictlyConcave => assert!(j < 0.0, "{fam} {theta:?}"),
                    }
                }
            }
        }
    }
}

fn master_families() -> Vec<FunctionFamily> {
    vec![FunctionFamily::tan(), FunctionFamily::sec(), FunctionFamily::csc(), FunctionFamily::square()]
}

#[test]
fn thm21_holds_and_is_strict() {
    for fam in master_families() {
        for n in 3..=8 {
            for (i, theta) in samples(&fam, n, SAMPLES, 11 + n as u64).iter().enumerate() {
                for alpha in 1..=3 {
                    let r = thm21_slack(&fam, theta, alpha).unwrap();
                    assert!(
                        r.slack >= -EQUALITY_REL_TOL * 1f64.max(r.lhs.abs()),
                        "{fam} n={n} sample {i} alpha={alpha}: {r:?}"
                    );
                    if resolvable(theta) {
                        assert!(r.slack > ROUNDOFF_REL * r.scale, "{fam} n={n} sample {i}: {r:?}");
                    }
                }
            }
        }
    }
}

/// The reverse inequality needs `sum f >= 1`, which tan, sec and csc satisfy
/// on any pi-simplex.
#[test]
fn thm22_holds_and_is_strict_for_trigonometric_families() {
    for fam in [FunctionFamily::tan(), FunctionFamily::sec(), FunctionFamily::csc()] {
        for n in 3..=8 {
            for (i, theta) in samples(&fam, n, SAMPLES, 29 + n as u64).iter().enumerate() {
                for alpha in 1..=3 {
                    for k in 2..=3 {
                        let r = thm22_slack(&fam, theta, alpha, k).unwrap();
                        assert!(
                            r.slack >= -EQUALITY_REL_TOL * 1f64.max(r.rhs.abs()),
                            "{fam} n={n} sample {i} alpha={alpha} k={k}: {r:?}"
                        );
                        if resolvable(theta) {
                            assert!(r.slack > ROUNDOFF_REL * r.scale, "{fam} n={n} sample {i}: {r:?}");
                        }
                    }
                }
            }
        }
    }
}

/// With `f = x^2` and total 1, `P = sum x_i^2 < 1`. For `k = 2` the slack is
/// `(n s)^a (P^a - (n s)^a) >= 0`, but for `k = 3` the reverse inequality fails.
#[test]
fn thm22_fails_for_square_on_unit_total() {
    let fam = FunctionFamily::square();
    let theta = AngleVector::new(vec![0.5, 0.3, 0.2], 1.0, 1.0).unwrap();
    assert!(thm22_slack(&fam, &theta, 2, 2).unwrap().slack > 0.0);
    let r = thm22_slack(&fam, &theta, 2, 3).unwrap();
    assert!(r.slack < -1e-3, "{r:?}");
    // The forward master inequality still holds there.
    assert!(thm21_slack(&fam, &theta, 1).unwrap().slack > 0.0);
}

#[test]
fn regular_point_is_an_equality_case() {
    for fam in master_families() {
        for n in 3..=8 {
            let omega = AngleVector::regular(n, total_for(&fam, n), fam.bound()).unwrap();
            for alpha in 1..=3 {
                assert!(thm21_slack(&fam, &omega, alpha).unwrap().equality);
                for k in 2..=3 {
                    assert!(thm22_slack(&fam, &omega, alpha, k).unwrap().equality);
                }
            }
        }
    }
}

fn mu_families() -> Vec<FunctionFamily> {
    builtin_families().into_iter().filter(|f| f.mu().is_some()).collect()
}

#[test]
fn thm51_four_cases() {
    for fam in mu_families() {
        for n in [3, 4, 6, 8] {
            let thetas = samples(&fam, n, SAMPLES / 4, 101 + n as u64);
            let psis = samples(&fam, n, SAMPLES / 4, 202 + n as u64);
            for (theta, psi) in thetas.iter().zip(&psis) {
                let r = thm51_slack(&fam, theta, psi).unwrap();
                assert!(r.slack >= -EQUALITY_REL_TOL * r.scale, "{fam}: {r:?}");
                let gap = theta
                    .values()
                    .iter()
                    .zip(psi.values())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert_eq!(r.equality, gap < 1e-7, "{fam} gap {gap}: {r:?}");
                assert!(thm51_slack(&fam, theta, theta).unwrap().equality);
            }
        }
    }
}

#[test]
fn thm51_equality_is_local() {
    // A perturbation of size 1e-8 that keeps the total stays inside the
    // tolerance band.
    for fam in mu_families() {
        let theta = samples(&fam, 4, 1, 5).remove(0);
        let mut v = theta.values().to_vec();
        v[0] += 1e-8;
        v[1] -= 1e-8;
        let psi = AngleVector::new(v, theta.total(), theta.bound()).unwrap();
        assert!(thm51_slack(&fam, &theta, &psi).unwrap().equality, "{fam}");
    }
}

#[test]
fn thm51_reduces_to_the_cyclic_quadratic() {
    let sin = FunctionFamily::sin();
    for n in 3..=12 {
        let omega = regular_angles(n, PI).unwrap();
        let sigma = PI / n as f64;
        let d = dn(n).unwrap();
        let sampler = SimplexSampler::geometric(n, PI, 1e-6, 77 + n as u64);
        for theta in sampler.unwrap().take(1000).unwrap() {
            let g = measure(&PolygonModel::new(PolygonKind::Cyclic, 1.0, theta.clone()).unwrap());
            let value = g.area - g.perimeter * sigma.cos() + d * sigma.cos().powi(2);
            let r = thm51_slack(&sin, &theta, &omega).unwrap();
            assert!((r.slack + value).abs() <= 1e-12, "n={n}: {} vs {}", r.slack, -value);
        }
    }
}

#[test]
fn family_constructors_validate() {
    assert!(FunctionFamily::sinh(0.0).is_err());
    assert!(FunctionFamily::shifted_cosh(2.0, 1.0).is_err());
    let wide = FunctionFamily::shifted_cosh(2.0, 3.0).unwrap();
    assert_eq!(wide.ode_case(), Some(OdeCase::II2));
    assert_eq!(DEFAULT_HYPERBOLIC_BOUND, 1.0);
}

#[test]
fn thm51_rejects_mismatched_totals() {
    let sin = FunctionFamily::sin();
    let a = regular_angles(3, PI).unwrap();
    let b = regular_angles(3, 3.0).unwrap();
    assert!(matches!(thm51_slack(&sin, &a, &b), Err(Error::TotalsDiffer(..))));
}

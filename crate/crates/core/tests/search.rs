use bonnesen_core::search::*;
use bonnesen_core::*;

fn problem(c: &Catalog, id: &str, n: usize, alpha: u32, k: Option<u32>) -> SearchProblem {
    SearchProblem::new(c, id, n, 1.0, alpha, k).unwrap()
}

#[test]
fn optimizer_finds_the_regular_polygon() {
    let c = Catalog::standard();
    let cases = [("BASIC", 3, 1, None), ("T53", 4, 1, None), ("T41A", 3, 1, Some(2)), ("T52", 5, 1, None)];
    for (id, n, alpha, k) in cases {
        let p = problem(&c, id, n, alpha, k).with_kind(c.get(id).unwrap().kinds[0]);
        let r = minimize_slack(&c, &p, DEFAULT_STARTS, 3).unwrap();
        assert!(r.converged, "{r:?}");
        assert!(r.best_slack.abs() <= 1e-10 * r.best_scale, "{r:?}");
        assert!(r.distance_to_regular < 1e-4, "{r:?}");
        assert!(r.start_slacks.iter().all(|&s| r.best_slack <= s));
        assert_eq!(r.start_slacks.len(), r.starts);
    }
}

#[test]
fn optimizer_agrees_with_the_grid_oracle() {
    let c = Catalog::standard();
    for (id, k) in [("BASIC", None), ("T31A", None), ("T42B", Some(3)), ("ZHANG97", None)] {
        for n in [3, 4] {
            let alpha = if c.get(id).unwrap().params.uses_alpha() { 2 } else { 1 };
            let p = problem(&c, id, n, alpha, k);
            let g = grid_scan(&c, &p, 400).unwrap();
            let r = minimize_slack(&c, &p, DEFAULT_STARTS, 5).unwrap();
            assert!(g.grid_min_slack >= -1e-10 * g.grid_min_scale, "{g:?}");
            assert!(g.grid_argmin.distance_to_regular() <= g.step * (1.0 + 1e-9), "{g:?}");
            let tol = 2.0 * g.lipschitz * g.step;
            assert!((r.best_slack - g.grid_min_slack).abs() <= tol, "{id} n={n}: {} vs {} (tol {tol})", r.best_slack, g.grid_min_slack);
        }
    }
}

#[test]
fn grid_scan_enumerates_every_lattice_point() {
    let c = Catalog::standard();
    for (n, res) in [(3usize, 40usize), (3, 400), (4, 60)] {
        let p = problem(&c, "BASIC", n, 1, None);
        let g = grid_scan(&c, &p, res).unwrap();
        // Brute-force count of admissible lattice points. For n = 4 and an
        // even resolution, j = res / 2 lands exactly on the excluded bound.
        let limit = (std::f64::consts::FRAC_PI_2 - 2.0 * p.margin) * (1.0 - 1e-12);
        let inside = |j: usize| (j as f64) * g.step < limit;
        let mut count = 0u64;
        let mut js = vec![0usize; n];
        loop {
            let used: usize = js[..n - 1].iter().sum();
            if used <= res {
                js[n - 1] = res - used;
                if js.iter().all(|&j| inside(j)) {
                    count += 1;
                }
            }
            let mut i = 0;
            while i < n - 1 {
                js[i] += 1;
                if js[i] <= res {
                    break;
                }
                js[i] = 0;
                i += 1;
            }
            if i == n - 1 {
                break;
            }
        }
        assert_eq!(g.points, count, "n={n} res={res}");
    }
    assert!(matches!(grid_scan(&c, &problem(&c, "BASIC", 6, 1, None), 400), Err(Error::BudgetExceeded { .. })));
}

#[test]
fn genuine_entries_survive_the_falsifier() {
    let c = Catalog::standard();
    let basic = falsify(&c, &problem(&c, "BASIC", 5, 1, None), 100_000, 7).unwrap();
    assert!(basic.counterexample.is_none(), "{basic:?}");
    assert!(basic.evaluations >= 100_000);
    let t31 = falsify(&c, &problem(&c, "T31A", 3, 2, None), 100_000, 7).unwrap();
    assert!(t31.counterexample.is_none(), "{t31:?}");
}

#[test]
fn planted_fault_is_found() {
    let c = Catalog::with_planted_fault();
    for kind in PolygonKind::ALL {
        let p = problem(&c, "PLANTED_FLIP", 3, 1, None).with_kind(kind);
        let out = falsify(&c, &p, 10_000, 1).unwrap();
        let cx = out.counterexample.expect("planted fault must be found");
        assert!(out.evaluations <= 10_000);
        assert!(cx.certified_slack < -CERTIFY_REL_TOL * cx.scale);
        assert!(cx.angles.distance_to_regular() > 0.0);
    }
}

#[test]
fn falsifier_reaches_the_small_radius_failure() {
    let c = Catalog::standard();
    let p = SearchProblem::new(&c, "T41A", 3, 0.01, 1, Some(3)).unwrap();
    let out = falsify(&c, &p, 10_000, 2).unwrap();
    assert!(out.counterexample.is_some(), "{out:?}");
}

#[test]
fn converged_near_equality_runs_end_at_the_regular_point() {
    let c = Catalog::standard();
    for entry in c.entries() {
        for kind in entry.kinds {
            for n in [3, 5] {
                let k = entry.params.uses_k().then_some(2);
                let p = problem(&c, entry.id, n, 1, k).with_kind(*kind);
                let r = minimize_slack(&c, &p, 8, 11).unwrap();
                if r.converged && r.best_slack < 1e-8 * r.best_scale {
                    assert!(r.distance_to_regular < 1e-3, "{r:?}");
                }
            }
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let c = Catalog::with_planted_fault();
    let search = problem(&c, "T32A", 4, 2, None);
    let planted = problem(&c, "PLANTED_FLIP", 4, 1, None);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                (
                    minimize_slack(&c, &search, DEFAULT_STARTS, 42).unwrap(),
                    grid_scan(&c, &search, 120).unwrap(),
                    falsify(&c, &planted, 5_000, 42).unwrap(),
                )
            })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn invalid_problems_are_rejected() {
    let c = Catalog::standard();
    assert!(matches!(SearchProblem::new(&c, "NOPE", 3, 1.0, 1, None), Err(Error::UnknownId(_))));
    assert!(matches!(SearchProblem::new(&c, "T41A", 3, 1.0, 1, None), Err(Error::ParamOutOfDomain { .. })));
    assert!(minimize_slack(&c, &problem(&c, "BASIC", 3, 1, None), 0, 1).is_err());
}

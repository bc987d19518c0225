mod common;

use common::{random_point, rel_diff, rng, solve_near, start_near};
use deflation::deflate::{
    deflate_once, expand, symbolic_deflation, DeflatedSystem, DeflationRng, DeflationStage,
    LoopStatus,
};
use deflation::fixtures::{singular_fixtures, synthetic_bench};
use deflation::linalg::{norm2, numerical_rank, svd, CMatrix, C64};
use deflation::newton::{refine, Evaluator, NewtonOptions};
use deflation::oracle::{multiplicity, DEFAULT_DUAL_TOL, DEFAULT_MAX_ORDER};

/// Deflated systems as the loop builds them, one per fixture.
fn deflated_fixtures() -> Vec<(String, DeflatedSystem, Vec<C64>)> {
    singular_fixtures()
        .iter()
        .map(|fx| {
            let out = solve_near(fx, 1e-3, 1);
            (fx.name.to_string(), out.system, out.point)
        })
        .collect()
}

fn random_stack(base: deflation::PolySystem, ranks: &[usize], seed: u64) -> DeflatedSystem {
    let mut rng = DeflationRng::new(seed);
    let mut sys = DeflatedSystem::new(base);
    for &r in ranks {
        let st = DeflationStage::random(&mut rng, r, sys.nvars(), sys.neqs());
        sys = sys.with_stage(st).unwrap();
    }
    sys
}

#[test]
fn shape_recurrences() {
    for (name, sys, _) in deflated_fixtures() {
        for k in 1..=sys.depth() {
            let st = &sys.stages()[k - 1];
            assert_eq!(sys.neqs_at(k), 2 * sys.neqs_at(k - 1) + 1, "{name}");
            assert_eq!(sys.nvars_at(k), sys.nvars_at(k - 1) + st.rank + 1, "{name}");
        }
    }
}

#[test]
fn structured_matches_naive_expansion() {
    let mut cases = deflated_fixtures();
    cases.push(("synthetic".into(), random_stack(synthetic_bench(8, 4), &[7], 3), vec![]));
    cases.push(("two stages".into(), random_stack(synthetic_bench(3, 5), &[2, 1], 4), vec![]));
    let mut r = rng(5);
    for (name, sys, _) in cases {
        let naive = expand(&sys).unwrap();
        assert_eq!((naive.nvars(), naive.neqs()), (sys.nvars(), sys.neqs()));
        for _ in 0..20 {
            let z = random_point(&mut r, sys.nvars(), 1.0);
            let (f, a) = sys.values_and_jacobian(&z).unwrap();
            let fv = naive.evaluate(&z).unwrap();
            let av = naive.jacobian().evaluate(&z).unwrap();
            assert!(rel_diff(&f, &fv) <= 1e-10, "{name}: values");
            assert!(rel_diff(a.as_slice(), av.as_slice()) <= 1e-10, "{name}: jacobian");
            assert_eq!(sys.evaluate_deflated(&z).unwrap(), f, "{name}: shared path");
        }
    }
}

#[test]
fn jacobian_matches_central_differences() {
    let mut r = rng(6);
    let step = 1e-6;
    for (name, sys, _) in deflated_fixtures() {
        for _ in 0..10 {
            let z = random_point(&mut r, sys.nvars(), 1.0);
            let a = sys.jacobian_deflated(&z).unwrap();
            for j in 0..sys.nvars() {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[j] += step;
                zm[j] -= step;
                let fp = sys.evaluate_deflated(&zp).unwrap();
                let fm = sys.evaluate_deflated(&zm).unwrap();
                let fd: Vec<C64> = fp.iter().zip(&fm).map(|(p, m)| (p - m) / (2.0 * step)).collect();
                let col = a.column(j);
                assert!(
                    norm2(&fd.iter().zip(&col).map(|(p, q)| p - q).collect::<Vec<_>>())
                        <= 1e-5 * norm2(&col).max(1.0),
                    "{name}: column {j}"
                );
            }
        }
    }
}

#[test]
fn leading_block_is_previous_jacobian() {
    let mut r = rng(7);
    for (name, sys, _) in deflated_fixtures() {
        for k in 1..=sys.depth() {
            let top = sys.truncated(k);
            let prev = sys.truncated(k - 1);
            let z = random_point(&mut r, top.nvars(), 1.0);
            let a = top.jacobian_deflated(&z).unwrap();
            let b = prev.jacobian_deflated(&z[..prev.nvars()]).unwrap();
            assert_eq!(a.block(0, 0, prev.neqs(), prev.nvars()), b, "{name}: stage {k}");
        }
    }
}

#[test]
fn converged_points_solve_the_deflated_system() {
    for (name, sys, z) in deflated_fixtures() {
        let f = sys.evaluate_deflated(&z).unwrap();
        assert!(norm2(&f) <= 1e-10, "{name}");
    }
}

#[test]
fn multipliers_are_consistent_near_the_root() {
    for fx in singular_fixtures() {
        let sys = DeflatedSystem::new(fx.system.clone());
        // the loop's base point; refinement alone stops far out on flat roots
        let x0 = solve_near(&fx, 1e-3, 8).base_point().to_vec();
        for seed in 0..20 {
            let d = deflate_once(&sys, &x0, 1e-8, &mut DeflationRng::new(seed)).unwrap();
            let a = sys.jacobian_at(&x0).unwrap();
            let st = &d.system.stages()[0];
            let abl = a.matmul(&st.b).unwrap().mul_vec(&d.multipliers).unwrap();
            assert!(norm2(&abl) <= 1e-8 * (1.0 + a.frobenius_norm()), "{}", fx.name);
            let hl: C64 = st.h.iter().zip(&d.multipliers).map(|(h, l)| h * l).sum();
            assert!((hl - 1.0).norm() <= 1e-10, "{}", fx.name);
        }
    }
}

#[test]
fn stacked_matrix_has_full_column_rank_for_almost_all_seeds() {
    let opts = NewtonOptions::default();
    for fx in singular_fixtures() {
        let sys = DeflatedSystem::new(fx.system.clone());
        let x0 = refine(&sys, &start_near(&fx, 1e-3, 9), &opts).unwrap().point;
        let a = sys.jacobian_at(&x0).unwrap();
        let r = numerical_rank(&svd(&a).unwrap(), 1e-8).rank;
        let mut good = 0;
        for seed in 0..100 {
            let st = DeflationStage::random(&mut DeflationRng::new(seed), r, sys.nvars(), sys.neqs());
            let ab = a.matmul(&st.b).unwrap();
            let mut stacked = CMatrix::zeros(sys.neqs() + 1, r + 1);
            for i in 0..sys.neqs() {
                for l in 0..=r {
                    stacked[(i, l)] = ab[(i, l)];
                }
            }
            for l in 0..=r {
                stacked[(sys.neqs(), l)] = st.h[l];
            }
            if numerical_rank(&svd(&stacked).unwrap(), 1e-8).rank == r + 1 {
                good += 1;
            }
        }
        assert!(good >= 99, "{}: {good}/100", fx.name);
    }
}

#[test]
fn deflation_count_is_below_multiplicity() {
    for fx in singular_fixtures() {
        for seed in 0..5 {
            let out = solve_near(&fx, 1e-3, seed);
            assert_eq!(out.status, LoopStatus::ConvergedRegular, "{}", fx.name);
            assert!(out.deflations() < fx.multiplicity, "{}", fx.name);
            assert_eq!(out.coranks.len(), out.deflations() + 1);
            assert_eq!(*out.coranks.last().unwrap(), 0);
        }
    }
}

#[test]
fn every_stage_lowers_the_multiplicity() {
    for (name, sys, z) in deflated_fixtures() {
        let mut prev = usize::MAX;
        for k in 0..=sys.depth() {
            let stage = expand(&sys.truncated(k)).unwrap();
            let m = multiplicity(&stage, &z[..stage.nvars()], DEFAULT_MAX_ORDER, DEFAULT_DUAL_TOL)
                .unwrap()
                .value()
                .unwrap();
            assert!(m < prev, "{name}: stage {k} multiplicity {m} after {prev}");
            prev = m;
        }
        assert_eq!(prev, 1, "{name}");
    }
}

#[test]
fn symbolic_deflation_lowers_the_multiplicity() {
    for fx in singular_fixtures() {
        let before = multiplicity(&fx.system, &fx.root, DEFAULT_MAX_ORDER, DEFAULT_DUAL_TOL)
            .unwrap()
            .value()
            .unwrap();
        let g = symbolic_deflation(&fx.system, &fx.root, 1e-8).unwrap();
        let after = multiplicity(&g, &fx.root, DEFAULT_MAX_ORDER, DEFAULT_DUAL_TOL)
            .unwrap()
            .value()
            .unwrap();
        assert!(after < before, "{}: {before} -> {after}", fx.name);
        if fx.name == "x1_x2_fourth" {
            assert_eq!(after, 3);
        }
    }
}

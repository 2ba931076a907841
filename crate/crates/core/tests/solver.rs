use lcltrees_core::fixtures;
use lcltrees_core::oracle::{brute_force_solve, naive_is_valid, OracleBudget};
use lcltrees_core::path::find_ell_full_set;
use lcltrees_core::solver::{round_report, solve_log, FullSubset, solve_log_with};
use lcltrees_core::tree::{gen_tree, TreeGenSpec, TreeModel};
use lcltrees_core::{LclProblem, VertexConfig};

fn full_set(p: &LclProblem) -> (Vec<VertexConfig>, usize) {
    let found = find_ell_full_set(p, 1 << 20).found.expect("problem has an ell-full set");
    (found.subset, found.ell)
}

#[test]
fn fixture_solutions_are_valid_and_deterministic() {
    for p in [fixtures::three_coloring(), fixtures::perfect_matching()] {
        let (subset, ell) = full_set(&p);
        let full = FullSubset::new(&p, &subset, ell).unwrap();
        for n in [10, 100, 1000, 10_000] {
            for seed in 0..50 {
                let delta = p.delta();
                let t = gen_tree(&TreeGenSpec::uniform(n, delta, seed)).unwrap();
                let a = solve_log_with(&p, &full, &t).unwrap();
                assert!(naive_is_valid(&p, &t, &a.labeling), "n={n} seed={seed}");
                for v in 0..n {
                    assert!(subset.contains(&a.labeling.config(v)));
                }
                let b = solve_log_with(&p, &full, &t).unwrap();
                assert_eq!(a.labeling, b.labeling);
            }
        }
    }
}

#[test]
fn structured_trees() {
    for p in [fixtures::three_coloring(), fixtures::perfect_matching()] {
        let (subset, ell) = full_set(&p);
        for model in [TreeModel::Path, TreeModel::Star, TreeModel::Caterpillar, TreeModel::Balanced] {
            for n in [1, 2, 3, 4, 7, 31, 500] {
                let Ok(t) = gen_tree(&TreeGenSpec { n, delta: 3, seed: 1, model }) else {
                    continue;
                };
                let sol = solve_log(&p, &subset, ell, &t).unwrap();
                assert!(naive_is_valid(&p, &t, &sol.labeling), "{model:?} n={n}");
            }
        }
    }
}

#[test]
fn random_problems_with_full_sets() {
    let mut solved = 0;
    for seed in 0..200 {
        let p = fixtures::random_problem(seed, 3, 3, 5, 4);
        let Some(found) = find_ell_full_set(&p, 1 << 12).found else {
            continue;
        };
        for tseed in 0..5 {
            let t = gen_tree(&TreeGenSpec::uniform(300, 3, tseed)).unwrap();
            let sol = solve_log(&p, &found.subset, found.ell, &t).unwrap();
            assert!(naive_is_valid(&p, &t, &sol.labeling), "problem {seed}");
        }
        solved += 1;
    }
    assert!(solved >= 5, "only {solved} random problems had full sets");
}

#[test]
fn full_problems_always_have_oracle_solutions() {
    for seed in 0..60 {
        let p = match seed {
            0 => fixtures::three_coloring(),
            1 => fixtures::perfect_matching(),
            _ => fixtures::random_problem(seed, 3, 3, 4, 3),
        };
        if find_ell_full_set(&p, 1 << 12).found.is_none() {
            continue;
        }
        for n in 1..=12 {
            let t = gen_tree(&TreeGenSpec::uniform(n, 3, seed)).unwrap();
            assert!(brute_force_solve(&p, &t, OracleBudget::default()).is_found(), "problem {seed} n={n}");
        }
    }
}

#[test]
fn round_counts_stay_logarithmic() {
    let p = fixtures::three_coloring();
    for exp in [8, 11, 14] {
        let t = gen_tree(&TreeGenSpec::uniform(1 << exp, 3, 3)).unwrap();
        let sol = solve_log(&p, p.vertex_configs(), 3, &t).unwrap();
        let r = round_report(&t, &sol.decomposition);
        assert_eq!(r.n, 1 << exp);
        assert!(r.ratio < 10.0, "{r:?}");
    }
}

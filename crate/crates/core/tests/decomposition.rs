use lcltrees_core::rake_compress::{check_invariants, layered_decomposition, post_process, decompose};
use lcltrees_core::tree::{gen_tree, TreeGenSpec, TreeModel};

/// Raw compress threshold 4, so ℓ′ = 3.
const ELL_PRIME: usize = 3;

fn sample(i: u64) -> (usize, usize, u64) {
    let delta = if i % 2 == 0 { 3 } else { 4 };
    let exp = 4 + (i % 11) as u32;
    (1usize << exp, delta, 1000 + i)
}

#[test]
fn invariants_on_random_trees() {
    for i in 0..200 {
        let (n, delta, seed) = sample(i);
        let t = gen_tree(&TreeGenSpec::uniform(n, delta, seed)).unwrap();
        let d = layered_decomposition(&t, ELL_PRIME);
        check_invariants(&t, &d).unwrap_or_else(|e| panic!("n={n} delta={delta} seed={seed}: {e}"));
        let bound = 4.0 * (n as f64).log2() + 4.0;
        assert!((d.depth() as f64) <= bound, "n={n}: depth {} > {bound}", d.depth());
    }
}

#[test]
fn invariants_on_structured_trees() {
    for model in [TreeModel::Path, TreeModel::Caterpillar, TreeModel::Balanced] {
        for delta in [3, 4] {
            for n in [1, 2, 3, 5, 8, 13, 100, 1000] {
                let t = gen_tree(&TreeGenSpec { n, delta, seed: 0, model }).unwrap();
                for ell_prime in 1..=4 {
                    let d = layered_decomposition(&t, ell_prime);
                    check_invariants(&t, &d)
                        .unwrap_or_else(|e| panic!("{model:?} n={n} delta={delta} l'={ell_prime}: {e}"));
                }
            }
        }
    }
}

#[test]
fn raw_decomposition_with_wider_rake() {
    for seed in 0..20 {
        let t = gen_tree(&TreeGenSpec::uniform(500, 3, seed)).unwrap();
        let raw = decompose(&t, 1, ELL_PRIME + 1);
        let d = post_process(&t, &raw, ELL_PRIME).unwrap();
        check_invariants(&t, &d).unwrap();
        assert!(d.depth() >= raw.depth());
    }
}

/// `L(n)` of the doubling family: the largest depth over a fixed batch of
/// seeded trees of size `n`.
fn family_depth(n: usize, delta: usize) -> usize {
    (0..20)
        .map(|seed| {
            let t = gen_tree(&TreeGenSpec::uniform(n, delta, seed)).unwrap();
            layered_decomposition(&t, ELL_PRIME).depth()
        })
        .max()
        .unwrap()
}

#[test]
fn depth_grows_logarithmically_on_doubling_family() {
    for delta in [3, 4] {
        let mut prev = None;
        for exp in 7..=14 {
            let n = 1usize << exp;
            let l = family_depth(n, delta);
            assert!((l as f64) <= 4.0 * exp as f64 + 4.0);
            if let Some(p) = prev {
                assert!(l <= p + 3, "L({n}) = {l} vs L({}) = {p}", n / 2);
            }
            prev = Some(l);
        }
    }
}

use std::collections::BTreeSet;

use itertools::Itertools;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lcltrees_core::equivalence::{h_table, PoledTree};
use lcltrees_core::fixtures;
use lcltrees_core::oracle::{
    brute_force_connects, brute_force_h_table, brute_force_solve, count_labelings_exhaustive,
    naive_is_valid, OracleBudget, Outcome,
};
use lcltrees_core::path::{build_state_graph, connects, extend_path};
use lcltrees_core::tree::{gen_tree, Port, PortTree, TreeGenSpec, TreeModel};
use lcltrees_core::{is_valid_labeling, HalfEdgeLabeling, Label, LclProblem, VertexConfig};

fn problems() -> Vec<(String, LclProblem)> {
    vec![
        ("3-coloring".into(), fixtures::three_coloring()),
        ("2-coloring".into(), fixtures::two_coloring()),
        ("matching".into(), fixtures::perfect_matching()),
        ("random 11".into(), fixtures::random_problem(11, 3, 3, 5, 3)),
        ("random 12".into(), fixtures::random_problem(12, 3, 3, 4, 4)),
    ]
}

fn path_tree(k: usize) -> PortTree {
    gen_tree(&TreeGenSpec {
        n: k,
        delta: 3,
        seed: 0,
        model: TreeModel::Path,
    })
    .unwrap()
}

/// Places `config` at `v` with `fixed` on the given ports.
fn place(l: &mut HalfEdgeLabeling, v: usize, config: &VertexConfig, fixed: &[(usize, Label)]) {
    let mut rest: Vec<Label> = config.labels().to_vec();
    for &(_, x) in fixed {
        let i = rest.iter().position(|&y| y == x).unwrap();
        rest.remove(i);
    }
    let mut rest = rest.into_iter();
    for p in 0..l.delta() {
        let x = fixed
            .iter()
            .find(|&&(q, _)| q == p)
            .map(|&(_, x)| x)
            .unwrap_or_else(|| rest.next().unwrap());
        l.set(v, p, x);
    }
}

#[test]
fn connects_matches_brute_force_on_full_grid() {
    let budget = OracleBudget::default();
    let mut checked = 0u64;
    for (name, p) in problems() {
        for size in 0..=p.vertex_configs().len() {
            for subset in p.vertex_configs().iter().cloned().combinations(size) {
                let graph = build_state_graph(&p, &subset).unwrap();
                for c1 in &subset {
                    for c2 in &subset {
                        for a1 in c1.distinct() {
                            for a2 in c2.distinct() {
                                for k in 2..=9 {
                                    let fast = connects(&p, &graph, (a1, c1), (a2, c2), k).unwrap();
                                    let slow = brute_force_connects(&p, &subset, (a1, c1), (a2, c2), k, budget);
                                    assert_eq!(
                                        Some(fast),
                                        slow.decided(),
                                        "{name} subset {subset:?} {a1:?}/{c1:?} -> {a2:?}/{c2:?} k={k}"
                                    );
                                    checked += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn extend_path_witnesses_are_valid_labelings() {
    for (_, p) in problems() {
        let subset = p.vertex_configs().to_vec();
        for c1 in &subset {
            for c2 in &subset {
                for a1 in c1.distinct() {
                    for a2 in c2.distinct() {
                        for k in 2..=9 {
                            let Some(inner) = extend_path(&p, &subset, (a1, c1), (a2, c2), k).unwrap() else {
                                continue;
                            };
                            assert_eq!(inner.len(), k - 2);
                            let t = path_tree(k);
                            let mut l = HalfEdgeLabeling::new(k, 3, Label(0));
                            let toward = |v: usize, u: usize| t.port_to(v, u).unwrap();
                            place(&mut l, 0, c1, &[(toward(0, 1), a1)]);
                            place(&mut l, k - 1, c2, &[(toward(k - 1, k - 2), a2)]);
                            for (j, iv) in inner.iter().enumerate() {
                                let v = j + 1;
                                assert!(subset.contains(&iv.config));
                                place(
                                    &mut l,
                                    v,
                                    &iv.config,
                                    &[(toward(v, v - 1), iv.in_label), (toward(v, v + 1), iv.out_label)],
                                );
                            }
                            assert!(naive_is_valid(&p, &t, &l));
                        }
                    }
                }
            }
        }
    }
}

fn random_poled(rng: &mut ChaCha8Rng, p: &LclProblem, max_n: usize) -> (PortTree, Vec<usize>, Vec<(usize, usize, Label)>) {
    let n = rng.gen_range(1..=max_n);
    let t = gen_tree(&TreeGenSpec::uniform(n, 3, rng.gen())).unwrap();
    let open: Vec<usize> = (0..n).filter(|&v| t.residual(v) > 0).collect();
    let k = rng.gen_range(1..=2.min(open.len()));
    let mut poles = Vec::new();
    while poles.len() < k {
        let v = open[rng.gen_range(0..open.len())];
        if !poles.contains(&v) {
            poles.push(v);
        }
    }
    let mut partial = Vec::new();
    if rng.gen_bool(0.4) {
        let v = rng.gen_range(0..n);
        let port = rng.gen_range(0..3);
        partial.push((v, port, Label(rng.gen_range(0..p.num_labels()) as u8)));
    }
    (t, poles, partial)
}

#[test]
fn h_table_matches_exhaustive_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, p) in problems() {
        for trial in 0..40 {
            let (t, poles, partial) = random_poled(&mut rng, &p, 10);
            let poled = PoledTree::with_partial(t.clone(), poles.clone(), partial.clone()).unwrap();
            let fast: BTreeSet<Vec<Vec<Label>>> = h_table(&p, &poled).yes_multisets().into_iter().collect();
            let slow = match brute_force_h_table(&p, &t, &poles, &partial, OracleBudget::default()) {
                Outcome::Found(s) => s,
                Outcome::Absent => BTreeSet::new(),
                Outcome::Unknown => panic!("budget"),
            };
            assert_eq!(fast, slow, "{name} trial {trial}");
        }
    }
}

/// All trees on at most four vertices up to port numbering, plus a few
/// port permutations of each.
fn tiny_trees() -> Vec<PortTree> {
    let mut out = Vec::new();
    for n in 1..=4 {
        for model in [TreeModel::Path, TreeModel::Star] {
            out.push(gen_tree(&TreeGenSpec { n, delta: 3, seed: 0, model }).unwrap());
        }
        for seed in 0..4 {
            out.push(gen_tree(&TreeGenSpec::uniform(n, 3, seed)).unwrap());
        }
    }
    out
}

#[test]
fn solver_oracle_is_complete_on_tiny_trees() {
    let mut all = problems();
    for seed in 0..30 {
        all.push((format!("random {seed}"), fixtures::random_problem(100 + seed, 3, 3, 3, 2)));
    }
    let mut absent = 0;
    for (name, p) in &all {
        for t in tiny_trees() {
            let count = count_labelings_exhaustive(p, &t);
            match brute_force_solve(p, &t, OracleBudget::default()) {
                Outcome::Found(l) => {
                    assert!(count > 0, "{name}");
                    assert!(is_valid_labeling(p, &t, &l).unwrap().is_valid());
                }
                Outcome::Absent => {
                    assert_eq!(count, 0, "{name} n={}", t.len());
                    absent += 1;
                }
                Outcome::Unknown => panic!("budget on a tiny tree"),
            }
        }
    }
    assert!(absent > 0, "the grid should contain unsolvable instances");
}

fn naive_violations(p: &LclProblem, t: &PortTree, l: &HalfEdgeLabeling) -> (usize, usize) {
    let mut vertices = 0;
    let mut edges = 0;
    for v in 0..t.len() {
        let mut labels = l.ports(v).to_vec();
        labels.sort();
        if !p.vertex_configs().iter().any(|c| c.labels() == labels.as_slice()) {
            vertices += 1;
        }
        for port in 0..t.delta() {
            if let Port::Edge { to, port: back } = t.port(v, port) {
                if v < to {
                    let (a, b) = (l.get(v, port), l.get(to, back));
                    let ok = p.edge_configs().iter().any(|e| e.labels() == (a, b) || e.labels() == (b, a));
                    if !ok {
                        edges += 1;
                    }
                }
            }
        }
    }
    (vertices, edges)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn validator_matches_double_loop(seed in 0u64..10_000, n in 1usize..30, flips in 0usize..4) {
        let p = match seed % 4 {
            0 => fixtures::three_coloring(),
            1 => fixtures::perfect_matching(),
            2 => fixtures::two_coloring(),
            _ => fixtures::random_problem(seed, 3, 3, 4, 3),
        };
        let t = gen_tree(&TreeGenSpec::uniform(n, 3, seed)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut l = match brute_force_solve(&p, &t, OracleBudget::default()) {
            Outcome::Found(l) => l,
            _ => HalfEdgeLabeling::new(n, 3, Label(0)),
        };
        for _ in 0..flips {
            let v = rng.gen_range(0..n);
            let port = rng.gen_range(0..3);
            l.set(v, port, Label(rng.gen_range(0..p.num_labels()) as u8));
        }
        let report = is_valid_labeling(&p, &t, &l).unwrap();
        let (bad_v, bad_e) = naive_violations(&p, &t, &l);
        prop_assert_eq!(report.vertex_violations.len(), bad_v);
        prop_assert_eq!(report.edge_violations.len(), bad_e);
        prop_assert_eq!(report.is_valid(), naive_is_valid(&p, &t, &l));
    }
}

use lcltrees_core::fixtures;
use lcltrees_core::oracle::naive_is_valid;
use lcltrees_core::toast::{auto_centers, build_nested_toast, solve_toast, Toast};
use lcltrees_core::tree::{gen_tree, PortTree, TreeGenSpec, TreeModel};
use lcltrees_core::LclProblem;

fn cases() -> Vec<(LclProblem, usize)> {
    vec![(fixtures::three_coloring(), 3), (fixtures::perfect_matching(), 4)]
}

fn tree(i: u64) -> PortTree {
    let n = 60 + (i as usize * 37) % 141;
    let model = match i % 3 {
        0 => TreeModel::UniformAttachmentCapped,
        1 => TreeModel::Path,
        _ => TreeModel::Caterpillar,
    };
    gen_tree(&TreeGenSpec { n, delta: 3, seed: i, model }).unwrap()
}

fn constructed() -> Vec<(usize, PortTree, Toast)> {
    let mut out = Vec::new();
    for i in 0..20u64 {
        let case = (i % 2) as usize;
        let ell = cases()[case].1;
        let q = 2 * ell + 2;
        let t = tree(i);
        let centers = auto_centers(&t, 4 * q);
        let levels = 1 + (i % 3) as usize;
        let toast = build_nested_toast(&t, q, &centers, levels).unwrap();
        out.push((case, t, toast));
    }
    out
}

#[test]
fn twenty_toasts_solve() {
    let mut nontrivial = 0;
    for (i, (case, t, toast)) in constructed().into_iter().enumerate() {
        let (p, ell) = &cases()[case];
        assert!(t.len() <= 200);
        toast.validate(&t).unwrap();
        if toast.pieces.len() > 1 {
            nontrivial += 1;
        }
        let l = solve_toast(p, p.vertex_configs(), *ell, &t, &toast).unwrap();
        assert!(naive_is_valid(p, &t, &l), "toast {i}");
        for v in 0..t.len() {
            assert!(p.vertex_configs().contains(&l.config(v)));
        }
    }
    assert!(nontrivial >= 15);
}

#[test]
fn toast_solutions_are_deterministic() {
    for (case, t, toast) in constructed().into_iter().take(6) {
        let (p, ell) = &cases()[case];
        let a = solve_toast(p, p.vertex_configs(), *ell, &t, &toast).unwrap();
        let b = solve_toast(p, p.vertex_configs(), *ell, &t, &toast).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn larger_q_also_works() {
    let (p, ell) = &cases()[0];
    for q in [8, 9, 12, 20] {
        let t = gen_tree(&TreeGenSpec::uniform(200, 3, q as u64)).unwrap();
        let toast = build_nested_toast(&t, q, &auto_centers(&t, 4 * q), 2).unwrap();
        let l = solve_toast(p, p.vertex_configs(), *ell, &t, &toast).unwrap();
        assert!(naive_is_valid(p, &t, &l));
    }
}

//! Brute-force ground truth.
//!
//! Nothing here goes through the state graph, the decomposition or the
//! table DP. Configurations and edges are read straight off the problem and
//! every search is plain backtracking over port vectors with a node budget.

use std::collections::{BTreeSet, HashMap, HashSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::lcl::{HalfEdgeLabeling, Label, LclProblem, VertexConfig};
use crate::tree::{Port, PortTree};

/// Caps on exhaustive search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBudget {
    pub max_vertices: usize,
    /// Search nodes visited before giving up.
    pub max_labelings: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_vertices: 24,
            max_labelings: 20_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<T> {
    Found(T),
    Absent,
    /// The budget ran out before the search finished.
    Unknown,
}

impl<T> Outcome<T> {
    pub fn is_found(&self) -> bool {
        matches!(self, Outcome::Found(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Outcome::Unknown)
    }

    /// `Some(true)` if found, `Some(false)` if absent, `None` if unknown.
    pub fn decided(&self) -> Option<bool> {
        match self {
            Outcome::Found(_) => Some(true),
            Outcome::Absent => Some(false),
            Outcome::Unknown => None,
        }
    }
}

struct Rules {
    sigma: u8,
    delta: usize,
    configs: HashSet<Vec<u8>>,
    edges: HashSet<(u8, u8)>,
}

impl Rules {
    fn new(problem: &LclProblem) -> Self {
        let mut configs = HashSet::new();
        for c in problem.vertex_configs() {
            let mut raw: Vec<u8> = c.labels().iter().map(|l| l.0).collect();
            raw.sort_unstable();
            configs.insert(raw);
        }
        let mut edges = HashSet::new();
        for e in problem.edge_configs() {
            let (a, b) = e.labels();
            edges.insert((a.0, b.0));
            edges.insert((b.0, a.0));
        }
        Rules {
            sigma: problem.num_labels() as u8,
            delta: problem.delta(),
            configs,
            edges,
        }
    }

    fn config_ok(&self, ports: &[u8]) -> bool {
        let mut s = ports.to_vec();
        s.sort_unstable();
        self.configs.contains(&s)
    }

    fn edge_ok(&self, a: u8, b: u8) -> bool {
        self.edges.contains(&(a, b))
    }

    /// Every port vector over Σ^Δ whose multiset is allowed.
    fn port_vectors(&self) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut cur = vec![0u8; self.delta];
        loop {
            if self.config_ok(&cur) {
                out.push(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == self.delta {
                    return out;
                }
                cur[i] += 1;
                if cur[i] < self.sigma {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }
}

/// Checks a labeling with a double loop over vertices and ports.
pub fn naive_is_valid(problem: &LclProblem, tree: &PortTree, labeling: &HalfEdgeLabeling) -> bool {
    let rules = Rules::new(problem);
    if labeling.num_vertices() != tree.len() || labeling.delta() != tree.delta() {
        return false;
    }
    for v in 0..tree.len() {
        let raw: Vec<u8> = labeling.ports(v).iter().map(|l| l.0).collect();
        if !rules.config_ok(&raw) {
            return false;
        }
        for p in 0..tree.delta() {
            if let Port::Edge { to, port } = tree.port(v, p) {
                if !rules.edge_ok(raw[p], labeling.get(to, port).0) {
                    return false;
                }
            }
        }
    }
    true
}

struct Search<'a> {
    rules: &'a Rules,
    tree: &'a PortTree,
    order: Vec<usize>,
    candidates: Vec<Vec<Vec<u8>>>,
    assigned: Vec<Option<usize>>,
    nodes: u64,
    limit: u64,
}

impl Search<'_> {
    fn fits(&self, v: usize, ports: &[u8]) -> bool {
        (0..self.tree.delta()).all(|p| match self.tree.port(v, p) {
            Port::Edge { to, port } => match self.assigned[to] {
                Some(ci) => self.rules.edge_ok(ports[p], self.candidates[to][ci][port]),
                None => true,
            },
            Port::Virtual => true,
        })
    }

    /// Calls `visit` on every complete valid labeling until it returns
    /// false. Returns `None` when the node budget runs out.
    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&Self) -> bool) -> Option<bool> {
        if depth == self.order.len() {
            return Some(visit(self));
        }
        let v = self.order[depth];
        for ci in 0..self.candidates[v].len() {
            self.nodes += 1;
            if self.nodes > self.limit {
                return None;
            }
            if !self.fits(v, &self.candidates[v][ci]) {
                continue;
            }
            self.assigned[v] = Some(ci);
            let go_on = self.run(depth + 1, visit)?;
            self.assigned[v] = None;
            if !go_on {
                return Some(false);
            }
        }
        Some(true)
    }

    /// Drops candidates that no candidate of some neighbour can sit next to,
    /// until nothing changes. Never removes a vector used by a solution.
    fn prune(&mut self) {
        let tree = self.tree;
        loop {
            let mut changed = false;
            for v in 0..tree.len() {
                for p in 0..tree.delta() {
                    let Port::Edge { to, port } = tree.port(v, p) else {
                        continue;
                    };
                    let theirs: HashSet<u8> = self.candidates[to].iter().map(|c| c[port]).collect();
                    let before = self.candidates[v].len();
                    let rules = self.rules;
                    self.candidates[v].retain(|c| theirs.iter().any(|&b| rules.edge_ok(c[p], b)));
                    changed |= self.candidates[v].len() != before;
                }
            }
            if !changed {
                return;
            }
        }
    }

    fn labeling(&self) -> HalfEdgeLabeling {
        let ports = (0..self.tree.len())
            .map(|v| {
                let ci = self.assigned[v].expect("complete");
                self.candidates[v][ci].iter().map(|&x| Label(x)).collect()
            })
            .collect();
        HalfEdgeLabeling::from_ports(self.tree.delta(), ports).expect("delta ports each")
    }
}

fn new_search<'a>(
    rules: &'a Rules,
    tree: &'a PortTree,
    fixed: &HashMap<(usize, usize), Label>,
    limit: u64,
) -> Search<'a> {
    let n = tree.len();
    let all = rules.port_vectors();
    let candidates = (0..n)
        .map(|v| {
            all.iter()
                .filter(|c| {
                    (0..tree.delta()).all(|p| fixed.get(&(v, p)).map_or(true, |l| l.0 == c[p]))
                })
                .cloned()
                .collect()
        })
        .collect();
    // depth-first order so each vertex after the first meets an assigned one
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for p in (0..tree.delta()).rev() {
                if let Port::Edge { to, .. } = tree.port(v, p) {
                    if !seen[to] {
                        seen[to] = true;
                        stack.push(to);
                    }
                }
            }
        }
    }
    Search {
        rules,
        tree,
        order,
        candidates,
        assigned: vec![None; n],
        nodes: 0,
        limit,
    }
}

/// Finds some valid labeling of `tree`, or proves there is none.
pub fn brute_force_solve(
    problem: &LclProblem,
    tree: &PortTree,
    budget: OracleBudget,
) -> Outcome<HalfEdgeLabeling> {
    if tree.len() > budget.max_vertices {
        return Outcome::Unknown;
    }
    let rules = Rules::new(problem);
    let mut search = new_search(&rules, tree, &HashMap::new(), budget.max_labelings);
    search.prune();
    let mut found = None;
    match search.run(0, &mut |s| {
        found = Some(s.labeling());
        false
    }) {
        None => Outcome::Unknown,
        Some(_) => match found {
            Some(l) => {
                assert!(naive_is_valid(problem, tree, &l), "oracle produced an invalid labeling");
                Outcome::Found(l)
            }
            None => Outcome::Absent,
        },
    }
}

/// Counts valid labelings by walking the full product of per-vertex port
/// vectors without pruning. Only meant for a handful of vertices.
pub fn count_labelings_exhaustive(problem: &LclProblem, tree: &PortTree) -> u64 {
    let rules = Rules::new(problem);
    let all = rules.port_vectors();
    let n = tree.len();
    if all.is_empty() {
        return 0;
    }
    let mut idx = vec![0usize; n];
    let mut count = 0;
    loop {
        let ports: Vec<Vec<Label>> = idx
            .iter()
            .map(|&i| all[i].iter().map(|&x| Label(x)).collect())
            .collect();
        let labeling = HalfEdgeLabeling::from_ports(tree.delta(), ports).expect("delta ports");
        if naive_is_valid(problem, tree, &labeling) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return count;
            }
            idx[i] += 1;
            if idx[i] < all.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// One interior vertex of a path: its multiset and the labels on the ports
/// toward the previous and the next vertex.
pub type OracleStep = (VertexConfig, Label, Label);

/// Searches for a labeling of the `k − 2` interior vertices of a `k`-vertex
/// path whose end half-edges carry `a1` and `a2`, with interior multisets
/// from `subset`.
pub fn brute_force_connects(
    problem: &LclProblem,
    subset: &[VertexConfig],
    (a1, c1): (Label, &VertexConfig),
    (a2, c2): (Label, &VertexConfig),
    k: usize,
    budget: OracleBudget,
) -> Outcome<Vec<OracleStep>> {
    assert!(k >= 2, "a path has at least two vertices");
    assert!(c1.labels().contains(&a1) && c2.labels().contains(&a2), "endpoint label not in its config");
    if k > budget.max_vertices {
        return Outcome::Unknown;
    }
    let rules = Rules::new(problem);
    if k == 2 {
        return if rules.edge_ok(a1.0, a2.0) {
            Outcome::Found(Vec::new())
        } else {
            Outcome::Absent
        };
    }
    // (config, in, out) triples with in and out on distinct ports
    let mut steps: BTreeSet<(Vec<u8>, u8, u8)> = BTreeSet::new();
    for c in subset {
        let raw: Vec<u8> = c.labels().iter().map(|l| l.0).collect();
        for i in 0..raw.len() {
            for j in 0..raw.len() {
                if i != j {
                    let mut sorted = raw.clone();
                    sorted.sort_unstable();
                    steps.insert((sorted, raw[i], raw[j]));
                }
            }
        }
    }
    let steps: Vec<(Vec<u8>, u8, u8)> = steps.into_iter().collect();
    let mut search = PathSearch {
        rules: &rules,
        steps: &steps,
        interior: k - 2,
        last: a2.0,
        failed: HashSet::new(),
        chosen: Vec::new(),
        nodes: 0,
        limit: budget.max_labelings,
    };
    match search.run(0, a1.0) {
        None => Outcome::Unknown,
        Some(false) => Outcome::Absent,
        Some(true) => Outcome::Found(
            search
                .chosen
                .iter()
                .map(|&i| {
                    let (c, x, y) = &steps[i];
                    (
                        VertexConfig::new(c.iter().map(|&l| Label(l)).collect()),
                        Label(*x),
                        Label(*y),
                    )
                })
                .collect(),
        ),
    }
}

struct PathSearch<'a> {
    rules: &'a Rules,
    steps: &'a [(Vec<u8>, u8, u8)],
    interior: usize,
    last: u8,
    /// `(position, incoming label)` pairs known to lead nowhere.
    failed: HashSet<(usize, u8)>,
    chosen: Vec<usize>,
    nodes: u64,
    limit: u64,
}

impl PathSearch<'_> {
    fn run(&mut self, pos: usize, prev: u8) -> Option<bool> {
        if pos == self.interior {
            return Some(self.rules.edge_ok(prev, self.last));
        }
        if self.failed.contains(&(pos, prev)) {
            return Some(false);
        }
        for (i, &(_, x, y)) in self.steps.iter().enumerate() {
            self.nodes += 1;
            if self.nodes > self.limit {
                return None;
            }
            if !self.rules.edge_ok(prev, x) {
                continue;
            }
            self.chosen.push(i);
            if self.run(pos + 1, y)? {
                return Some(true);
            }
            self.chosen.pop();
        }
        self.failed.insert((pos, prev));
        Some(false)
    }
}

/// The YES tuples of the extendability table. Every tuple of sorted pole
/// multisets is tried in turn: the pole candidates are cut down to port
/// vectors showing that multiset on the virtual ports, and a labeling of the
/// whole tree respecting `partial` is searched for.
pub fn brute_force_h_table(
    problem: &LclProblem,
    tree: &PortTree,
    poles: &[usize],
    partial: &[(usize, usize, Label)],
    budget: OracleBudget,
) -> Outcome<BTreeSet<Vec<Vec<Label>>>> {
    if tree.len() > budget.max_vertices {
        return Outcome::Unknown;
    }
    let rules = Rules::new(problem);
    let fixed: HashMap<(usize, usize), Label> = partial.iter().map(|&(v, p, l)| ((v, p), l)).collect();
    let base = new_search(&rules, tree, &fixed, budget.max_labelings);
    let virtual_of = |v: usize, ports: &[u8]| -> Vec<Label> {
        let mut m: Vec<Label> = (0..tree.delta())
            .filter(|&p| tree.port(v, p) == Port::Virtual)
            .map(|p| Label(ports[p]))
            .collect();
        m.sort();
        m
    };
    // the multisets each pole can show at all
    let options: Vec<Vec<Vec<Label>>> = poles
        .iter()
        .map(|&v| {
            let set: BTreeSet<Vec<Label>> = base.candidates[v].iter().map(|c| virtual_of(v, c)).collect();
            set.into_iter().collect()
        })
        .collect();
    let mut yes = BTreeSet::new();
    let mut spent = 0;
    for tuple in options.iter().map(|o| o.iter()).multi_cartesian_product() {
        let mut search = new_search(&rules, tree, &fixed, budget.max_labelings.saturating_sub(spent));
        for (&v, want) in poles.iter().zip(&tuple) {
            search.candidates[v].retain(|c| virtual_of(v, c) == **want);
        }
        search.prune();
        let mut hit = false;
        let done = search.run(0, &mut |_| {
            hit = true;
            false
        });
        spent += search.nodes;
        if done.is_none() {
            return Outcome::Unknown;
        }
        if hit {
            yes.insert(tuple.into_iter().cloned().collect());
        }
    }
    if yes.is_empty() {
        Outcome::Absent
    } else {
        Outcome::Found(yes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::tree::{gen_tree, TreeGenSpec, TreeModel};

    fn cfg(p: &LclProblem, s: &str) -> VertexConfig {
        let names: Vec<String> = s.chars().map(|c| c.to_string()).collect();
        p.config_from_names(&names).unwrap()
    }

    #[test]
    fn matching_single_vertex() {
        let p = fixtures::perfect_matching();
        let t = gen_tree(&TreeGenSpec {
            n: 1,
            delta: 3,
            seed: 0,
            model: TreeModel::Path,
        })
        .unwrap();
        match brute_force_solve(&p, &t, OracleBudget::default()) {
            Outcome::Found(l) => assert_eq!(l.config(0), cfg(&p, "MUU")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn three_coloring_small_trees() {
        let p = fixtures::three_coloring();
        for seed in 0..20 {
            let t = gen_tree(&TreeGenSpec::uniform(10, 3, seed)).unwrap();
            assert!(brute_force_solve(&p, &t, OracleBudget::default()).is_found());
        }
    }

    #[test]
    fn empty_config_set_has_no_solution() {
        let p = LclProblem::new(3, vec!["a".into()], vec![], vec![(Label(0), Label(0))]).unwrap();
        let t = gen_tree(&TreeGenSpec::uniform(3, 3, 0)).unwrap();
        assert_eq!(brute_force_solve(&p, &t, OracleBudget::default()), Outcome::Absent);
        assert_eq!(count_labelings_exhaustive(&p, &t), 0);
    }

    #[test]
    fn budget_runs_out() {
        let p = fixtures::two_coloring();
        let t = gen_tree(&TreeGenSpec::uniform(20, 3, 0)).unwrap();
        let tiny = OracleBudget {
            max_vertices: 24,
            max_labelings: 3,
        };
        assert_eq!(brute_force_solve(&p, &t, tiny), Outcome::Unknown);
        let small = OracleBudget {
            max_vertices: 5,
            max_labelings: 1000,
        };
        assert_eq!(brute_force_solve(&p, &t, small), Outcome::Unknown);
    }

    #[test]
    fn connects_examples() {
        let p = fixtures::three_coloring();
        let one = p.label_by_name("1").unwrap();
        let c = cfg(&p, "111");
        let b = OracleBudget::default();
        let w = brute_force_connects(&p, p.vertex_configs(), (one, &c), (one, &c), 3, b);
        match w {
            Outcome::Found(steps) => {
                assert_eq!(steps.len(), 1);
                assert_ne!(steps[0].1, one);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            brute_force_connects(&p, p.vertex_configs(), (one, &c), (one, &c), 2, b),
            Outcome::Absent
        );
        assert_eq!(brute_force_connects(&p, &[], (one, &c), (one, &c), 4, b), Outcome::Absent);

        let m = fixtures::perfect_matching();
        let lm = m.label_by_name("M").unwrap();
        let c = cfg(&m, "MUU");
        assert_eq!(
            brute_force_connects(&m, m.vertex_configs(), (lm, &c), (lm, &c), 3, b),
            Outcome::Absent
        );
        assert!(brute_force_connects(&m, m.vertex_configs(), (lm, &c), (lm, &c), 4, b).is_found());
    }

    #[test]
    fn h_table_single_vertex() {
        let p = fixtures::three_coloring();
        let t = gen_tree(&TreeGenSpec {
            n: 1,
            delta: 3,
            seed: 0,
            model: TreeModel::Path,
        })
        .unwrap();
        match brute_force_h_table(&p, &t, &[0], &[], OracleBudget::default()) {
            Outcome::Found(yes) => assert_eq!(yes.len(), 3),
            other => panic!("{other:?}"),
        }
    }
}

//! Constructive labeling from an ℓ-full set over a layered decomposition.
//!
//! Layers are labeled from the top down. A rake vertex copies the label its
//! single later neighbour shows it and answers with a fixed compatible
//! configuration; a compress path is filled by a path-automaton witness
//! between its two already-labeled attachment vertices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lcl::{is_valid_labeling, HalfEdgeLabeling, Label, LclProblem, VertexConfig};
use crate::path::{build_state_graph, Fullness, PathError, PathStateGraph};
use crate::rake_compress::{layered_decomposition, log_star, simulated_rounds, LayeredDecomposition};
use crate::toast::ToastError;
use crate::tree::PortTree;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Path(#[from] PathError),
    #[error("the subset is not {ell}-full")]
    NotFull { ell: usize },
    #[error("empty subset")]
    EmptySubset,
    #[error("no configuration in the subset can sit across an edge from label {label}")]
    MissingExtension { label: String },
    #[error("no labeling of a {k}-vertex path between {a1} and {a2}")]
    NoWitness { a1: String, a2: String, k: usize },
    #[error("toast parameter q = {q} is below 2ell + 2 = {need}")]
    QTooSmall { q: usize, need: usize },
    #[error(transparent)]
    Toast(#[from] ToastError),
    #[error("reserved path segments overlap at vertex {0}")]
    SegmentOverlap(usize),
    #[error("internal error: output has {0} violations")]
    Invalid(usize),
}

/// A verified ℓ-full subset together with the lookup data used while
/// labeling.
#[derive(Clone, Debug)]
pub struct FullSubset {
    pub ell: usize,
    pub graph: PathStateGraph,
    /// For each label `a`: the smallest `(c', a')` with `a' ∈ c'` and
    /// `{a, a'} ∈ ℰ`.
    pub answer: Vec<Option<(VertexConfig, Label)>>,
}

impl FullSubset {
    /// Checks fullness and the one-step extension property.
    pub fn new(
        problem: &LclProblem,
        subset: &[VertexConfig],
        ell: usize,
    ) -> Result<Self, SolveError> {
        if subset.is_empty() {
            return Err(SolveError::EmptySubset);
        }
        let graph = build_state_graph(problem, subset)?;
        if ell < 2 || !Fullness::new(&graph).is_ell_full(ell) {
            return Err(SolveError::NotFull { ell });
        }
        let answer: Vec<Option<(VertexConfig, Label)>> = problem
            .labels()
            .map(|a| {
                graph.subset().iter().find_map(|c| {
                    c.distinct()
                        .find(|&b| problem.edge_allowed(a, b))
                        .map(|b| (c.clone(), b))
                })
            })
            .collect();
        for &a in graph.labels() {
            if answer[a.index()].is_none() {
                return Err(SolveError::MissingExtension {
                    label: problem.label_name(a).to_string(),
                });
            }
        }
        Ok(FullSubset { ell, graph, answer })
    }

    pub fn smallest(&self) -> &VertexConfig {
        &self.graph.subset()[0]
    }

    pub(crate) fn answer(&self, a: Label) -> &(VertexConfig, Label) {
        self.answer[a.index()]
            .as_ref()
            .expect("checked for every subset label")
    }

    pub(crate) fn witness(
        &self,
        problem: &LclProblem,
        a1: Label,
        a2: Label,
        k: usize,
    ) -> Result<Vec<crate::path::InteriorVertex>, SolveError> {
        self.graph.extend(a1, a2, k).ok_or_else(|| SolveError::NoWitness {
            a1: problem.label_name(a1).to_string(),
            a2: problem.label_name(a2).to_string(),
            k,
        })
    }
}

/// Writes `config` around `v`: fixed ports first, then the remaining labels
/// in increasing order on the free ports in increasing order.
pub(crate) fn assign_ports(
    labeling: &mut HalfEdgeLabeling,
    v: usize,
    config: &VertexConfig,
    fixed: &[(usize, Label)],
) {
    let take: Vec<Label> = fixed.iter().map(|&(_, l)| l).collect();
    let rest = config.remove_all(&take).expect("fixed labels belong to the config");
    let mut rest = rest.into_iter();
    for p in 0..labeling.delta() {
        let label = match fixed.iter().find(|&&(q, _)| q == p) {
            Some(&(_, l)) => l,
            None => rest.next().expect("config has delta labels"),
        };
        labeling.set(v, p, label);
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub labeling: HalfEdgeLabeling,
    pub decomposition: LayeredDecomposition,
}

/// Labels `tree` using only configurations of the ℓ-full `subset`.
pub fn solve_log(
    problem: &LclProblem,
    subset: &[VertexConfig],
    ell: usize,
    tree: &PortTree,
) -> Result<Solution, SolveError> {
    let full = FullSubset::new(problem, subset, ell)?;
    solve_log_with(problem, &full, tree)
}

pub fn solve_log_with(
    problem: &LclProblem,
    full: &FullSubset,
    tree: &PortTree,
) -> Result<Solution, SolveError> {
    let ell_prime = full.ell.saturating_sub(2).max(1);
    let d = layered_decomposition(tree, ell_prime);
    let n = tree.len();
    let mut labeling = HalfEdgeLabeling::new(n, tree.delta(), Label(0));
    let key = |v: usize| d.layers[v].key();

    let mut paths_by_key = vec![Vec::new(); d.layers.iter().map(|l| l.key() + 1).max().unwrap_or(0)];
    for p in d.compress_paths(tree) {
        paths_by_key[p.layer.key()].push(p);
    }

    for (layer, vertices) in d.top_down() {
        if layer.is_rake() {
            for v in vertices {
                let later: Vec<(usize, usize, usize)> = tree
                    .neighbors(v)
                    .filter(|&(_, to, _)| key(to) > key(v))
                    .collect();
                match later.as_slice() {
                    [] => assign_ports(&mut labeling, v, full.smallest(), &[]),
                    [(p, to, q)] => {
                        let (c, b) = full.answer(labeling.get(*to, *q));
                        assign_ports(&mut labeling, v, c, &[(*p, *b)]);
                    }
                    _ => unreachable!("decomposition invariant"),
                }
            }
        } else {
            for path in &paths_by_key[layer.key()] {
                let vs = &path.vertices;
                let s = vs.len();
                let pu = tree.port_to(path.u, vs[0]).expect("u is adjacent to v1");
                let pw = tree.port_to(path.w, vs[s - 1]).expect("w is adjacent to vs");
                let a1 = labeling.get(path.u, pu);
                let a2 = labeling.get(path.w, pw);
                let inner = full.witness(problem, a1, a2, s + 2)?;
                for (j, iv) in inner.iter().enumerate() {
                    let prev = if j == 0 { path.u } else { vs[j - 1] };
                    let next = if j + 1 == s { path.w } else { vs[j + 1] };
                    let p_in = tree.port_to(vs[j], prev).unwrap();
                    let p_out = tree.port_to(vs[j], next).unwrap();
                    assign_ports(
                        &mut labeling,
                        vs[j],
                        &iv.config,
                        &[(p_in, iv.in_label), (p_out, iv.out_label)],
                    );
                }
            }
        }
    }

    let report = is_valid_labeling(problem, tree, &labeling).expect("sizes match");
    if !report.is_valid() {
        return Err(SolveError::Invalid(report.num_violations()));
    }
    Ok(Solution {
        labeling,
        decomposition: d,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundsReport {
    pub n: usize,
    pub depth: usize,
    pub ell_prime: usize,
    pub promotion_passes: usize,
    pub log_star_n: usize,
    pub simulated_rounds: usize,
    /// `simulated_rounds / log2 n`, with `log2 n` floored at 1.
    pub ratio: f64,
}

pub fn round_report(tree: &PortTree, d: &LayeredDecomposition) -> RoundsReport {
    let n = tree.len();
    let rounds = simulated_rounds(d);
    RoundsReport {
        n,
        depth: d.depth(),
        ell_prime: d.ell_prime,
        promotion_passes: d.promotion_passes,
        log_star_n: log_star(n),
        simulated_rounds: rounds,
        ratio: rounds as f64 / (n as f64).log2().max(1.0),
    }
}

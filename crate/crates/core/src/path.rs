//! Path automaton over `(configuration, outgoing label)` states.
//!
//! A state `(c, a)` describes one interior vertex of a path whose half-edge
//! toward the next vertex carries `a`. The automaton decides which endpoint
//! label pairs can be joined by a valid path of exactly `k` vertices, and its
//! eventual periodicity turns "for all k ≥ ℓ" into a finite check.

use std::collections::HashMap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::{Bits, BoolMatrix};
use crate::lcl::{Label, LclProblem, VertexConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("configuration {0} is not in the vertex constraint")]
    NotInProblem(String),
    #[error("label {label} does not occur in configuration {config}")]
    LabelNotInConfig { label: String, config: String },
    #[error("configuration {0} is not in the subset")]
    NotInSubset(String),
    #[error("path length must be at least 2, got {0}")]
    TooShort(usize),
    #[error("ell must be at least 2, got {0}")]
    EllTooSmall(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathState {
    pub config: VertexConfig,
    pub out_label: Label,
}

/// One interior vertex of an extended path. `in_label` faces the previous
/// vertex and `out_label` the next one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteriorVertex {
    pub config: VertexConfig,
    pub in_label: Label,
    pub out_label: Label,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicityCertificate {
    /// Index `K` after which the step powers repeat.
    pub index: usize,
    /// Period `P ≥ 1`.
    pub period: usize,
}

impl PeriodicityCertificate {
    /// Recomputes `step^K` and `step^(K+P)` and compares them.
    pub fn verify(&self, graph: &PathStateGraph) -> bool {
        self.period >= 1
            && graph.step.pow(self.index as u64)
                == graph.step.pow((self.index + self.period) as u64)
    }

    /// Exponent in `[K, K+P)` whose power equals `step^j`.
    pub fn reduce(&self, j: usize) -> usize {
        if j < self.index {
            j
        } else {
            self.index + (j - self.index) % self.period
        }
    }
}

#[derive(Clone, Debug)]
pub struct PathStateGraph {
    sigma: usize,
    subset: Vec<VertexConfig>,
    states: Vec<PathState>,
    step: BoolMatrix,
    /// `entry[a]`: states enterable from a neighbour whose facing label is `a`.
    entry: Vec<Bits>,
    /// `exit[a]`: states whose outgoing label may meet `a` on an edge.
    exit: Vec<Bits>,
    /// Distinct labels occurring in the subset, increasing.
    labels: Vec<Label>,
    allowed: Vec<bool>,
}

/// Builds the state graph for `subset`, which must be drawn from 𝒱.
pub fn build_state_graph(
    problem: &LclProblem,
    subset: &[VertexConfig],
) -> Result<PathStateGraph, PathError> {
    let mut subset = subset.to_vec();
    subset.sort();
    subset.dedup();
    for c in &subset {
        if !problem.has_vertex_config(c) {
            return Err(PathError::NotInProblem(problem.format_config(c)));
        }
    }
    let sigma = problem.num_labels();
    let states: Vec<PathState> = subset
        .iter()
        .flat_map(|c| {
            c.distinct().map(move |a| PathState {
                config: c.clone(),
                out_label: a,
            })
        })
        .collect();
    let n = states.len();
    let allowed: Vec<bool> = (0..sigma * sigma)
        .map(|i| problem.edge_allowed(Label((i / sigma) as u8), Label((i % sigma) as u8)))
        .collect();

    let mut entry = vec![Bits::new(n); sigma];
    let mut exit = vec![Bits::new(n); sigma];
    for (j, s) in states.iter().enumerate() {
        for a in 0..sigma {
            let a = Label(a as u8);
            let enterable = s.config.distinct().any(|a_in| {
                problem.edge_allowed(a, a_in) && s.config.contains_pair(a_in, s.out_label)
            });
            entry[a.index()].set(j, enterable);
            exit[a.index()].set(j, problem.edge_allowed(s.out_label, a));
        }
    }
    let mut step = BoolMatrix::zeros(n);
    for (i, s) in states.iter().enumerate() {
        for j in entry[s.out_label.index()].ones() {
            step.set(i, j, true);
        }
    }
    let labels = subset
        .iter()
        .flat_map(|c| c.labels().iter().copied())
        .sorted()
        .dedup()
        .collect();
    Ok(PathStateGraph {
        sigma,
        subset,
        states,
        step,
        entry,
        exit,
        labels,
        allowed,
    })
}

impl PathStateGraph {
    pub fn states(&self) -> &[PathState] {
        &self.states
    }

    pub fn step(&self) -> &BoolMatrix {
        &self.step
    }

    pub fn subset(&self) -> &[VertexConfig] {
        &self.subset
    }

    /// Labels that occur in some configuration of the subset.
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    fn allowed(&self, a: Label, b: Label) -> bool {
        self.allowed[a.index() * self.sigma + b.index()]
    }

    pub fn entry(&self, a: Label) -> &Bits {
        &self.entry[a.index()]
    }

    /// Whether a `k`-vertex path whose end vertices face the path with `a1`
    /// and `a2` can be completed using subset configurations inside.
    pub fn connects_labels(&self, a1: Label, a2: Label, k: usize) -> bool {
        assert!(k >= 2);
        if k == 2 {
            return self.allowed(a1, a2);
        }
        let mut reach = self.entry[a1.index()].clone();
        for _ in 3..k {
            if !reach.any() {
                return false;
            }
            reach = reach.mul(&self.step);
        }
        reach.intersects(&self.exit[a2.index()])
    }

    /// Interior witness for [`connects_labels`](Self::connects_labels),
    /// choosing the smallest state index at every position.
    pub fn extend(&self, a1: Label, a2: Label, k: usize) -> Option<Vec<InteriorVertex>> {
        assert!(k >= 2);
        if k == 2 {
            return self.allowed(a1, a2).then(Vec::new);
        }
        let mut layers = vec![self.entry[a1.index()].clone()];
        for _ in 3..k {
            let next = layers.last().unwrap().mul(&self.step);
            layers.push(next);
        }
        let mut last = layers.last().unwrap().clone();
        last = intersection(&last, &self.exit[a2.index()]);
        let mut s = last.ones().next()?;
        let mut chosen = vec![s];
        for layer in layers.iter().rev().skip(1) {
            s = layer.ones().find(|&p| self.step.get(p, s)).expect("layer reaches its successor");
            chosen.push(s);
        }
        chosen.reverse();
        let mut prev = a1;
        let mut out = Vec::with_capacity(chosen.len());
        for s in chosen {
            let st = &self.states[s];
            let in_label = st
                .config
                .distinct()
                .find(|&b| self.allowed(prev, b) && st.config.contains_pair(b, st.out_label))
                .expect("entry condition holds");
            out.push(InteriorVertex {
                config: st.config.clone(),
                in_label,
                out_label: st.out_label,
            });
            prev = st.out_label;
        }
        Some(out)
    }
}

fn intersection(a: &Bits, b: &Bits) -> Bits {
    let mut out = Bits::new(a.len());
    for i in a.ones().filter(|&i| b.get(i)) {
        out.set(i, true);
    }
    out
}

fn check_endpoint(
    problem: &LclProblem,
    graph: &PathStateGraph,
    a: Label,
    c: &VertexConfig,
) -> Result<(), PathError> {
    if graph.subset.binary_search(c).is_err() {
        return Err(PathError::NotInSubset(problem.format_config(c)));
    }
    if !c.contains(a) {
        return Err(PathError::LabelNotInConfig {
            label: problem.label_name(a).to_string(),
            config: problem.format_config(c),
        });
    }
    Ok(())
}

/// Path connectivity between the endpoint states `(c1, a1)` and `(c2, a2)`
/// over exactly `k` vertices.
pub fn connects(
    problem: &LclProblem,
    graph: &PathStateGraph,
    (a1, c1): (Label, &VertexConfig),
    (a2, c2): (Label, &VertexConfig),
    k: usize,
) -> Result<bool, PathError> {
    if k < 2 {
        return Err(PathError::TooShort(k));
    }
    check_endpoint(problem, graph, a1, c1)?;
    check_endpoint(problem, graph, a2, c2)?;
    Ok(graph.connects_labels(a1, a2, k))
}

/// Labels the `k − 2` interior vertices of a path between `(c1, a1)` and
/// `(c2, a2)`, or `None` if no labeling exists.
pub fn extend_path(
    problem: &LclProblem,
    subset: &[VertexConfig],
    (a1, c1): (Label, &VertexConfig),
    (a2, c2): (Label, &VertexConfig),
    k: usize,
) -> Result<Option<Vec<InteriorVertex>>, PathError> {
    if k < 2 {
        return Err(PathError::TooShort(k));
    }
    let graph = build_state_graph(problem, subset)?;
    check_endpoint(problem, &graph, a1, c1)?;
    check_endpoint(problem, &graph, a2, c2)?;
    Ok(graph.extend(a1, a2, k))
}

/// Finds the first repeat in `step^0, step^1, …`.
pub fn compute_periodicity(graph: &PathStateGraph) -> PeriodicityCertificate {
    let mut seen: HashMap<BoolMatrix, usize> = HashMap::new();
    let mut power = BoolMatrix::identity(graph.step.dim());
    for j in 0.. {
        if let Some(&i) = seen.get(&power) {
            return PeriodicityCertificate {
                index: i,
                period: j - i,
            };
        }
        let next = power.mul(&graph.step);
        seen.insert(power, j);
        power = next;
    }
    unreachable!()
}

/// Per-length connectivity summary of a subset, valid for every `k ≥ 2`.
#[derive(Clone, Debug)]
pub struct Fullness {
    pub certificate: PeriodicityCertificate,
    /// `good[k]` for `k ∈ [0, K+P+2]`: every label pair connects at length `k`.
    /// Entries 0 and 1 are unused.
    good: Vec<bool>,
}

impl Fullness {
    pub fn new(graph: &PathStateGraph) -> Self {
        let certificate = compute_periodicity(graph);
        let top = certificate.index + certificate.period + 2;
        let mut good = vec![false; top + 1];
        let labels = graph.labels();
        if labels.is_empty() {
            good.iter_mut().for_each(|g| *g = true);
        } else {
            for g in good.iter_mut().take(top + 1).skip(2) {
                *g = true;
            }
            for &a2 in labels {
                for &a1 in labels {
                    if !graph.allowed(a1, a2) {
                        good[2] = false;
                    }
                }
            }
            for &a1 in labels {
                let mut reach = graph.entry[a1.index()].clone();
                for g in good.iter_mut().take(top + 1).skip(3) {
                    if labels
                        .iter()
                        .any(|&a2| !reach.intersects(&graph.exit[a2.index()]))
                    {
                        *g = false;
                    }
                    reach = reach.mul(&graph.step);
                }
            }
        }
        Fullness { certificate, good }
    }

    /// Whether every label pair connects at length `k`.
    pub fn good_at(&self, k: usize) -> bool {
        if k < 3 {
            return self.good[k];
        }
        self.good[self.certificate.reduce(k - 3) + 3]
    }

    pub fn is_ell_full(&self, ell: usize) -> bool {
        let start = ell.max(self.certificate.index + 3);
        (ell..start + self.certificate.period).all(|k| self.good_at(k))
    }

    /// Smallest `ℓ ≥ 2` for which the subset is ℓ-full.
    pub fn minimal_ell(&self) -> Option<usize> {
        let top = self.good.len() - 1;
        let window = self.certificate.index + 3..=top;
        if !window.clone().all(|k| self.good[k]) {
            return None;
        }
        let mut ell = self.certificate.index + 3;
        while ell > 2 && self.good[ell - 1] {
            ell -= 1;
        }
        Some(ell)
    }
}

pub fn is_ell_full(
    problem: &LclProblem,
    subset: &[VertexConfig],
    ell: usize,
) -> Result<bool, PathError> {
    if ell < 2 {
        return Err(PathError::EllTooSmall(ell));
    }
    let graph = build_state_graph(problem, subset)?;
    Ok(Fullness::new(&graph).is_ell_full(ell))
}

pub fn minimal_ell(problem: &LclProblem, subset: &[VertexConfig]) -> Result<Option<usize>, PathError> {
    let graph = build_state_graph(problem, subset)?;
    Ok(Fullness::new(&graph).minimal_ell())
}

#[derive(Clone, Debug)]
pub struct FullSet {
    pub subset: Vec<VertexConfig>,
    pub ell: usize,
    pub certificate: PeriodicityCertificate,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub found: Option<FullSet>,
    /// Every nonempty subset was examined.
    pub exhaustive: bool,
    pub subsets_examined: u64,
    /// Certificate of the full 𝒱, when it was examined.
    pub full_certificate: Option<PeriodicityCertificate>,
}

impl SearchOutcome {
    /// A set was found, or the search proved none exists.
    pub fn is_definitive(&self) -> bool {
        self.found.is_some() || self.exhaustive
    }
}

/// Searches subsets of 𝒱 by decreasing size, lexicographic within a size,
/// examining at most `budget` of them.
pub fn find_ell_full_set(problem: &LclProblem, budget: u64) -> SearchOutcome {
    let configs = problem.vertex_configs();
    let mut examined = 0;
    let mut full_certificate = None;
    for size in (1..=configs.len()).rev() {
        for subset in configs.iter().cloned().combinations(size) {
            if examined == budget {
                return SearchOutcome {
                    found: None,
                    exhaustive: false,
                    subsets_examined: examined,
                    full_certificate,
                };
            }
            examined += 1;
            let graph = build_state_graph(problem, &subset).expect("subset drawn from the problem");
            let fullness = Fullness::new(&graph);
            if size == configs.len() {
                full_certificate = Some(fullness.certificate);
            }
            if let Some(ell) = fullness.minimal_ell() {
                return SearchOutcome {
                    found: Some(FullSet {
                        subset,
                        ell,
                        certificate: fullness.certificate,
                    }),
                    exhaustive: false,
                    subsets_examined: examined,
                    full_certificate,
                };
            }
        }
    }
    SearchOutcome {
        found: None,
        exhaustive: true,
        subsets_examined: examined,
        full_certificate,
    }
}

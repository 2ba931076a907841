//! LCL problems in list form: an alphabet, the allowed vertex multisets and
//! the allowed edge multisets, plus half-edge labelings and their validation.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{Port, PortTree};

/// Dense label id, an index into [`LclProblem::labels`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label(pub u8);

impl Label {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A size-Δ multiset of labels, kept sorted so equality is positional.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexConfig(Vec<Label>);

impl VertexConfig {
    pub fn new(mut labels: Vec<Label>) -> Self {
        labels.sort_unstable();
        VertexConfig(labels)
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, label: Label) -> bool {
        self.0.binary_search(&label).is_ok()
    }

    pub fn count(&self, label: Label) -> usize {
        self.0.iter().filter(|&&l| l == label).count()
    }

    /// Distinct labels in increasing order.
    pub fn distinct(&self) -> impl Iterator<Item = Label> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, l)| *i == 0 || self.0[i - 1] != **l)
            .map(|(_, l)| *l)
    }

    /// Whether `{a, b}` is a sub-multiset of this configuration.
    pub fn contains_pair(&self, a: Label, b: Label) -> bool {
        if a == b {
            self.count(a) >= 2
        } else {
            self.contains(a) && self.contains(b)
        }
    }

    /// Removes one copy of each given label, or returns `None` if one is missing.
    pub fn remove_all(&self, take: &[Label]) -> Option<Vec<Label>> {
        let mut rest = self.0.clone();
        for l in take {
            let pos = rest.iter().position(|x| x == l)?;
            rest.remove(pos);
        }
        Some(rest)
    }
}

/// A size-2 multiset of labels, stored as `(min, max)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeConfig(Label, Label);

impl EdgeConfig {
    pub fn new(a: Label, b: Label) -> Self {
        if a <= b {
            EdgeConfig(a, b)
        } else {
            EdgeConfig(b, a)
        }
    }

    pub fn labels(&self) -> (Label, Label) {
        (self.0, self.1)
    }
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("delta must be at least 3, got {0}")]
    DeltaTooSmall(usize),
    #[error("too many labels ({0}); at most 256 are supported")]
    TooManyLabels(usize),
    #[error("duplicate label name {0:?}")]
    DuplicateLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("{kind} config {index} has {found} labels, expected {expected}")]
    Arity {
        kind: &'static str,
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("label id {0} is out of range")]
    LabelOutOfRange(u8),
}

/// An LCL problem Π = (Σ, 𝒱, ℰ) on Δ-regular trees.
#[derive(Clone, Debug)]
pub struct LclProblem {
    delta: usize,
    labels: Vec<String>,
    vertex_configs: Vec<VertexConfig>,
    edge_configs: Vec<EdgeConfig>,
    edge_ok: Vec<bool>,
    vertex_set: HashSet<VertexConfig>,
}

impl PartialEq for LclProblem {
    fn eq(&self, other: &Self) -> bool {
        self.delta == other.delta
            && self.labels == other.labels
            && self.vertex_configs == other.vertex_configs
            && self.edge_configs == other.edge_configs
    }
}

impl Eq for LclProblem {}

impl LclProblem {
    /// Builds a problem from label ids. Configurations are canonicalized,
    /// sorted and deduplicated.
    pub fn new(
        delta: usize,
        labels: Vec<String>,
        vertex_configs: Vec<Vec<Label>>,
        edge_configs: Vec<(Label, Label)>,
    ) -> Result<Self, ProblemError> {
        if delta < 3 {
            return Err(ProblemError::DeltaTooSmall(delta));
        }
        if labels.len() > 256 {
            return Err(ProblemError::TooManyLabels(labels.len()));
        }
        let mut seen = HashSet::new();
        for name in &labels {
            if !seen.insert(name.as_str()) {
                return Err(ProblemError::DuplicateLabel(name.clone()));
            }
        }
        let sigma = labels.len();
        let check = |l: Label| {
            if l.index() < sigma {
                Ok(())
            } else {
                Err(ProblemError::LabelOutOfRange(l.0))
            }
        };
        let mut vcs = Vec::with_capacity(vertex_configs.len());
        for (index, c) in vertex_configs.into_iter().enumerate() {
            if c.len() != delta {
                return Err(ProblemError::Arity {
                    kind: "vertex",
                    index,
                    found: c.len(),
                    expected: delta,
                });
            }
            for &l in &c {
                check(l)?;
            }
            vcs.push(VertexConfig::new(c));
        }
        vcs.sort();
        vcs.dedup();
        let mut ecs = Vec::with_capacity(edge_configs.len());
        for (a, b) in edge_configs {
            check(a)?;
            check(b)?;
            ecs.push(EdgeConfig::new(a, b));
        }
        ecs.sort();
        ecs.dedup();
        let mut edge_ok = vec![false; sigma * sigma];
        for e in &ecs {
            let (a, b) = e.labels();
            edge_ok[a.index() * sigma + b.index()] = true;
            edge_ok[b.index() * sigma + a.index()] = true;
        }
        let vertex_set = vcs.iter().cloned().collect();
        Ok(LclProblem {
            delta,
            labels,
            vertex_configs: vcs,
            edge_configs: ecs,
            edge_ok,
            vertex_set,
        })
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> {
        (0..self.labels.len()).map(|i| Label(i as u8))
    }

    pub fn label_name(&self, l: Label) -> &str {
        &self.labels[l.index()]
    }

    pub fn label_names(&self) -> &[String] {
        &self.labels
    }

    pub fn label_by_name(&self, name: &str) -> Option<Label> {
        self.labels
            .iter()
            .position(|n| n == name)
            .map(|i| Label(i as u8))
    }

    /// 𝒱 in canonical (sorted) order.
    pub fn vertex_configs(&self) -> &[VertexConfig] {
        &self.vertex_configs
    }

    /// ℰ in canonical (sorted) order.
    pub fn edge_configs(&self) -> &[EdgeConfig] {
        &self.edge_configs
    }

    #[inline]
    pub fn edge_allowed(&self, a: Label, b: Label) -> bool {
        self.edge_ok[a.index() * self.labels.len() + b.index()]
    }

    pub fn has_vertex_config(&self, c: &VertexConfig) -> bool {
        self.vertex_set.contains(c)
    }

    pub fn config_to_names(&self, c: &VertexConfig) -> Vec<String> {
        c.labels()
            .iter()
            .map(|&l| self.label_name(l).to_string())
            .collect()
    }

    pub fn config_from_names<S: AsRef<str>>(
        &self,
        names: &[S],
    ) -> Result<VertexConfig, ProblemError> {
        if names.len() != self.delta {
            return Err(ProblemError::Arity {
                kind: "vertex",
                index: 0,
                found: names.len(),
                expected: self.delta,
            });
        }
        let labels = names
            .iter()
            .map(|n| {
                self.label_by_name(n.as_ref())
                    .ok_or_else(|| ProblemError::UnknownLabel(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(VertexConfig::new(labels))
    }

    pub fn format_config(&self, c: &VertexConfig) -> String {
        format!("{{{}}}", self.config_to_names(c).join(","))
    }
}

#[derive(Serialize, Deserialize)]
struct ProblemFile {
    delta: usize,
    labels: Vec<String>,
    vertex_configs: Vec<Vec<String>>,
    edge_configs: Vec<Vec<String>>,
}

pub(crate) fn syntax_error(e: serde_json::Error) -> ProblemError {
    ProblemError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses the JSON problem format.
pub fn parse_problem(text: &str) -> Result<LclProblem, ProblemError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(syntax_error)?;
    if file.delta < 3 {
        return Err(ProblemError::DeltaTooSmall(file.delta));
    }
    let index: HashMap<&str, Label> = file
        .labels
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), Label(i.min(255) as u8)))
        .collect();
    let lookup = |n: &String| {
        index
            .get(n.as_str())
            .copied()
            .ok_or_else(|| ProblemError::UnknownLabel(n.clone()))
    };
    let mut vcs = Vec::new();
    for (i, c) in file.vertex_configs.iter().enumerate() {
        if c.len() != file.delta {
            return Err(ProblemError::Arity {
                kind: "vertex",
                index: i,
                found: c.len(),
                expected: file.delta,
            });
        }
        vcs.push(c.iter().map(lookup).collect::<Result<Vec<_>, _>>()?);
    }
    let mut ecs = Vec::new();
    for (i, e) in file.edge_configs.iter().enumerate() {
        if e.len() != 2 {
            return Err(ProblemError::Arity {
                kind: "edge",
                index: i,
                found: e.len(),
                expected: 2,
            });
        }
        ecs.push((lookup(&e[0])?, lookup(&e[1])?));
    }
    LclProblem::new(file.delta, file.labels, vcs, ecs)
}

/// Canonical JSON form of a problem.
pub fn serialize_problem(problem: &LclProblem) -> String {
    let file = ProblemFile {
        delta: problem.delta,
        labels: problem.labels.clone(),
        vertex_configs: problem
            .vertex_configs
            .iter()
            .map(|c| problem.config_to_names(c))
            .collect(),
        edge_configs: problem
            .edge_configs
            .iter()
            .map(|e| {
                let (a, b) = e.labels();
                vec![
                    problem.label_name(a).to_string(),
                    problem.label_name(b).to_string(),
                ]
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("problem serializes")
}

/// One label per port of every vertex, stored flat as `vertex * Δ + port`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HalfEdgeLabeling {
    delta: usize,
    labels: Vec<Label>,
}

impl HalfEdgeLabeling {
    pub fn new(n: usize, delta: usize, fill: Label) -> Self {
        HalfEdgeLabeling {
            delta,
            labels: vec![fill; n * delta],
        }
    }

    pub fn from_ports(delta: usize, ports: Vec<Vec<Label>>) -> Option<Self> {
        if ports.iter().any(|p| p.len() != delta) {
            return None;
        }
        Some(HalfEdgeLabeling {
            delta,
            labels: ports.into_iter().flatten().collect(),
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len() / self.delta
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    #[inline]
    pub fn get(&self, v: usize, port: usize) -> Label {
        self.labels[v * self.delta + port]
    }

    #[inline]
    pub fn set(&mut self, v: usize, port: usize, l: Label) {
        self.labels[v * self.delta + port] = l;
    }

    pub fn ports(&self, v: usize) -> &[Label] {
        &self.labels[v * self.delta..(v + 1) * self.delta]
    }

    pub fn ports_mut(&mut self, v: usize) -> &mut [Label] {
        &mut self.labels[v * self.delta..(v + 1) * self.delta]
    }

    pub fn config(&self, v: usize) -> VertexConfig {
        VertexConfig::new(self.ports(v).to_vec())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelingError {
    #[error("labeling covers {labeling} vertices but the tree has {tree}")]
    VertexCount { labeling: usize, tree: usize },
    #[error("labeling has {labeling} ports per vertex but the tree has {tree}")]
    PortCount { labeling: usize, tree: usize },
}

/// An edge violation, identified by both half-edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeViolation {
    pub u: usize,
    pub pu: usize,
    pub v: usize,
    pub pv: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub vertex_violations: Vec<usize>,
    pub edge_violations: Vec<EdgeViolation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.vertex_violations.is_empty() && self.edge_violations.is_empty()
    }

    pub fn num_violations(&self) -> usize {
        self.vertex_violations.len() + self.edge_violations.len()
    }
}

/// Checks every vertex multiset against 𝒱 and every real edge against ℰ.
/// Virtual ports only take part in the vertex constraint.
pub fn is_valid_labeling(
    problem: &LclProblem,
    tree: &PortTree,
    labeling: &HalfEdgeLabeling,
) -> Result<ValidityReport, LabelingError> {
    if labeling.num_vertices() != tree.len() {
        return Err(LabelingError::VertexCount {
            labeling: labeling.num_vertices(),
            tree: tree.len(),
        });
    }
    if labeling.delta() != tree.delta() {
        return Err(LabelingError::PortCount {
            labeling: labeling.delta(),
            tree: tree.delta(),
        });
    }
    let mut report = ValidityReport::default();
    for v in 0..tree.len() {
        if !problem.has_vertex_config(&labeling.config(v)) {
            report.vertex_violations.push(v);
        }
        for (p, port) in tree.ports(v).iter().enumerate() {
            if let Port::Edge { to, port: q } = *port {
                // each edge once
                if (v, p) < (to, q)
                    && !problem.edge_allowed(labeling.get(v, p), labeling.get(to, q))
                {
                    report.edge_violations.push(EdgeViolation {
                        u: v,
                        pu: p,
                        v: to,
                        pv: q,
                    });
                }
            }
        }
    }
    Ok(report)
}

#[derive(Serialize, Deserialize)]
struct LabelingRecord {
    vertex: usize,
    ports: Vec<String>,
}

/// Serializes a labeling as an array of `{vertex, ports}` records.
pub fn serialize_labeling(problem: &LclProblem, labeling: &HalfEdgeLabeling) -> String {
    let records: Vec<LabelingRecord> = (0..labeling.num_vertices())
        .map(|v| LabelingRecord {
            vertex: v,
            ports: labeling
                .ports(v)
                .iter()
                .map(|&l| problem.label_name(l).to_string())
                .collect(),
        })
        .collect();
    serde_json::to_string_pretty(&records).expect("labeling serializes")
}

#[derive(Debug, Error)]
pub enum LabelingParseError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("vertex {0} listed twice")]
    DuplicateVertex(usize),
    #[error("vertex {0} missing from labeling")]
    MissingVertex(usize),
}

pub fn parse_labeling(
    problem: &LclProblem,
    text: &str,
) -> Result<HalfEdgeLabeling, LabelingParseError> {
    let records: Vec<LabelingRecord> = serde_json::from_str(text).map_err(syntax_error)?;
    let n = records.len();
    let mut slots: Vec<Option<Vec<Label>>> = vec![None; n];
    for r in records {
        if r.ports.len() != problem.delta() {
            return Err(ProblemError::Arity {
                kind: "labeling",
                index: r.vertex,
                found: r.ports.len(),
                expected: problem.delta(),
            }
            .into());
        }
        if r.vertex >= n {
            return Err(LabelingParseError::MissingVertex(n));
        }
        if slots[r.vertex].is_some() {
            return Err(LabelingParseError::DuplicateVertex(r.vertex));
        }
        let labels = r
            .ports
            .iter()
            .map(|name| {
                problem
                    .label_by_name(name)
                    .ok_or_else(|| ProblemError::UnknownLabel(name.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        slots[r.vertex] = Some(labels);
    }
    let ports = slots
        .into_iter()
        .enumerate()
        .map(|(v, s)| s.ok_or(LabelingParseError::MissingVertex(v)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HalfEdgeLabeling::from_ports(problem.delta(), ports).expect("arity checked"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::tree::{gen_tree, TreeGenSpec, TreeModel};

    #[test]
    fn three_coloring_transcription() {
        let p = fixtures::three_coloring();
        assert_eq!(p.vertex_configs().len(), 3);
        assert_eq!(p.edge_configs().len(), 3);
    }

    #[test]
    fn matching_transcription() {
        let p = fixtures::perfect_matching();
        assert_eq!(p.vertex_configs().len(), 1);
        assert_eq!(p.edge_configs().len(), 2);
    }

    #[test]
    fn short_vertex_config_rejected() {
        let text = r#"{"delta":3,"labels":["a","b"],"vertex_configs":[["a","b"]],"edge_configs":[]}"#;
        assert!(matches!(
            parse_problem(text),
            Err(ProblemError::Arity { kind: "vertex", found: 2, .. })
        ));
    }

    #[test]
    fn unknown_label_and_small_delta() {
        let text = r#"{"delta":3,"labels":["a"],"vertex_configs":[["a","a","z"]],"edge_configs":[]}"#;
        assert!(matches!(parse_problem(text), Err(ProblemError::UnknownLabel(n)) if n == "z"));
        let text = r#"{"delta":2,"labels":["a"],"vertex_configs":[],"edge_configs":[]}"#;
        assert!(matches!(parse_problem(text), Err(ProblemError::DeltaTooSmall(2))));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_problem("{\"delta\": 3,\n \"labels\": [}").unwrap_err();
        match err {
            ProblemError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_vertex_constraint_serializes() {
        let p = LclProblem::new(3, vec!["x".into()], vec![], vec![]).unwrap();
        let text = serialize_problem(&p);
        assert!(text.contains("\"vertex_configs\": []"));
        assert_eq!(parse_problem(&text).unwrap(), p);
    }

    #[test]
    fn permuted_configs_are_equal() {
        let a = VertexConfig::new(vec![Label(2), Label(0), Label(1)]);
        let b = VertexConfig::new(vec![Label(1), Label(2), Label(0)]);
        assert_eq!(a, b);
        assert!(a.contains_pair(Label(0), Label(2)));
        assert!(!a.contains_pair(Label(0), Label(0)));
    }

    fn path(n: usize) -> PortTree {
        gen_tree(&TreeGenSpec {
            n,
            delta: 3,
            seed: 0,
            model: TreeModel::Path,
        })
        .unwrap()
    }

    #[test]
    fn two_vertex_colorings() {
        let p = fixtures::three_coloring();
        let t = path(2);
        let c = |name: &str| p.label_by_name(name).unwrap();
        let good =
            HalfEdgeLabeling::from_ports(3, vec![vec![c("1"); 3], vec![c("2"); 3]]).unwrap();
        assert!(is_valid_labeling(&p, &t, &good).unwrap().is_valid());
        let bad = HalfEdgeLabeling::new(2, 3, c("1"));
        let report = is_valid_labeling(&p, &t, &bad).unwrap();
        assert!(report.vertex_violations.is_empty());
        assert_eq!(report.edge_violations.len(), 1);
    }

    #[test]
    fn matching_single_vertex_uses_virtual_port() {
        let p = fixtures::perfect_matching();
        let t = path(1);
        let m = p.label_by_name("M").unwrap();
        let u = p.label_by_name("U").unwrap();
        let l = HalfEdgeLabeling::from_ports(3, vec![vec![m, u, u]]).unwrap();
        assert!(is_valid_labeling(&p, &t, &l).unwrap().is_valid());
    }

    #[test]
    fn labeling_size_mismatch() {
        let p = fixtures::three_coloring();
        let l = HalfEdgeLabeling::new(3, 3, Label(0));
        assert_eq!(
            is_valid_labeling(&p, &path(2), &l),
            Err(LabelingError::VertexCount {
                labeling: 3,
                tree: 2
            })
        );
    }

    #[test]
    fn labeling_file_lists_every_vertex() {
        let p = fixtures::perfect_matching();
        let m = p.label_by_name("M").unwrap();
        let u = p.label_by_name("U").unwrap();
        let l = HalfEdgeLabeling::from_ports(3, vec![vec![m, u, u], vec![m, u, u]]).unwrap();
        let text = serialize_labeling(&p, &l);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v[1]["vertex"], 1);
        assert_eq!(v[1]["ports"][0], "M");
        assert_eq!(parse_labeling(&p, &text).unwrap(), l);
    }
}

//! Finite Δ-regular trees: every vertex owns exactly Δ ports, each either
//! wired to a port of a neighbour or left virtual.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Port {
    Edge { to: usize, port: usize },
    Virtual,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("port {port} of vertex {vertex} out of range")]
    PortOutOfRange { vertex: usize, port: usize },
    #[error("port asymmetry at vertex {vertex} port {port}")]
    PortAsymmetry { vertex: usize, port: usize },
    #[error("self loop at vertex {0}")]
    SelfLoop(usize),
    #[error("cycle detected through edge {u}-{v}")]
    CycleDetected { u: usize, v: usize },
    #[error("tree is disconnected: {edges} edges for {n} vertices")]
    Disconnected { n: usize, edges: usize },
    #[error("tree must have at least one vertex")]
    Empty,
    #[error("no free port at vertex {0}")]
    NoFreePort(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PortTree {
    delta: usize,
    ports: Vec<Port>,
}

impl PortTree {
    /// Builds a tree from per-vertex port tables and checks every invariant:
    /// port symmetry, no self loops, acyclic and connected.
    pub fn from_ports(delta: usize, ports: Vec<Vec<Port>>) -> Result<Self, TreeError> {
        let n = ports.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        let mut flat = Vec::with_capacity(n * delta);
        for (v, row) in ports.into_iter().enumerate() {
            if row.len() != delta {
                return Err(TreeError::PortOutOfRange {
                    vertex: v,
                    port: row.len(),
                });
            }
            flat.extend(row);
        }
        let tree = PortTree { delta, ports: flat };
        tree.check()?;
        Ok(tree)
    }

    fn check(&self) -> Result<(), TreeError> {
        let n = self.len();
        let mut uf = UnionFind::new(n);
        let mut edges = 0;
        for v in 0..n {
            for p in 0..self.delta {
                if let Port::Edge { to, port } = self.port(v, p) {
                    if to >= n {
                        return Err(TreeError::VertexOutOfRange(to));
                    }
                    if port >= self.delta {
                        return Err(TreeError::PortOutOfRange { vertex: to, port });
                    }
                    if to == v {
                        return Err(TreeError::SelfLoop(v));
                    }
                    if self.port(to, port) != (Port::Edge { to: v, port: p }) {
                        return Err(TreeError::PortAsymmetry { vertex: v, port: p });
                    }
                    if (v, p) < (to, port) {
                        if !uf.union(v, to) {
                            return Err(TreeError::CycleDetected { u: v, v: to });
                        }
                        edges += 1;
                    }
                }
            }
        }
        if edges != n - 1 {
            return Err(TreeError::Disconnected { n, edges });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ports.len() / self.delta
    }

    pub fn is_empty(&self) -> bool {
        self.ports.is_empty()
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    #[inline]
    pub fn port(&self, v: usize, p: usize) -> Port {
        self.ports[v * self.delta + p]
    }

    pub fn ports(&self, v: usize) -> &[Port] {
        &self.ports[v * self.delta..(v + 1) * self.delta]
    }

    /// `(own port, neighbour, neighbour's port)` for every real edge at `v`.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.ports(v).iter().enumerate().filter_map(|(p, port)| match *port {
            Port::Edge { to, port } => Some((p, to, port)),
            Port::Virtual => None,
        })
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }

    /// Number of virtual ports at `v`.
    pub fn residual(&self, v: usize) -> usize {
        self.delta - self.degree(v)
    }

    /// Port of `v` that leads to `u`, if they are adjacent.
    pub fn port_to(&self, v: usize, u: usize) -> Option<usize> {
        self.neighbors(v).find(|&(_, to, _)| to == u).map(|(p, _, _)| p)
    }

    pub fn num_edges(&self) -> usize {
        self.len() - 1
    }

    /// Every edge once, as `(u, pu, v, pv)` with `(u, pu) < (v, pv)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        (0..self.len()).flat_map(move |v| {
            self.neighbors(v)
                .filter(move |&(p, to, q)| (v, p) < (to, q))
                .map(move |(p, to, q)| (v, p, to, q))
        })
    }

    /// BFS distances from a set of sources; unreachable entries are `usize::MAX`.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for (_, to, _) in self.neighbors(v) {
                if dist[to] == usize::MAX {
                    dist[to] = dist[v] + 1;
                    queue.push_back(to);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: usize, v: usize) -> usize {
        self.distances_from(&[u])[v]
    }

    /// Vertices within distance `r` of `v`, in increasing id order.
    pub fn ball(&self, v: usize, r: usize) -> Vec<usize> {
        self.distances_from(&[v])
            .into_iter()
            .enumerate()
            .filter(|&(_, d)| d <= r)
            .map(|(u, _)| u)
            .collect()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Incremental construction that always wires the lowest free port.
#[derive(Clone, Debug)]
pub struct TreeBuilder {
    delta: usize,
    ports: Vec<Vec<Port>>,
}

impl TreeBuilder {
    pub fn new(delta: usize) -> Self {
        TreeBuilder {
            delta,
            ports: Vec::new(),
        }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.ports.push(vec![Port::Virtual; self.delta]);
        self.ports.len() - 1
    }

    pub fn free_ports(&self, v: usize) -> usize {
        self.ports[v].iter().filter(|p| **p == Port::Virtual).count()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(usize, usize), TreeError> {
        let pu = self.first_free(u).ok_or(TreeError::NoFreePort(u))?;
        let pv = self.first_free(v).ok_or(TreeError::NoFreePort(v))?;
        self.ports[u][pu] = Port::Edge { to: v, port: pv };
        self.ports[v][pv] = Port::Edge { to: u, port: pu };
        Ok((pu, pv))
    }

    fn first_free(&self, v: usize) -> Option<usize> {
        self.ports[v].iter().position(|p| *p == Port::Virtual)
    }

    pub fn len(&self) -> usize {
        self.ports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ports.is_empty()
    }

    pub fn build(self) -> Result<PortTree, TreeError> {
        PortTree::from_ports(self.delta, self.ports)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeModel {
    /// Each new vertex attaches to a uniformly random vertex with a free port.
    UniformAttachmentCapped,
    Path,
    Star,
    /// A spine whose vertices carry as many leaves as their ports allow.
    Caterpillar,
    /// Breadth-first complete tree where every vertex gets Δ − 1 children.
    Balanced,
}

impl std::str::FromStr for TreeModel {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" | "uniform-attachment-capped" => Ok(TreeModel::UniformAttachmentCapped),
            "path" => Ok(TreeModel::Path),
            "star" => Ok(TreeModel::Star),
            "caterpillar" => Ok(TreeModel::Caterpillar),
            "balanced" => Ok(TreeModel::Balanced),
            other => Err(TreeError::InvalidSpec(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeGenSpec {
    pub n: usize,
    pub delta: usize,
    pub seed: u64,
    pub model: TreeModel,
}

impl TreeGenSpec {
    pub fn uniform(n: usize, delta: usize, seed: u64) -> Self {
        TreeGenSpec {
            n,
            delta,
            seed,
            model: TreeModel::UniformAttachmentCapped,
        }
    }
}

/// Generates a tree deterministically from the spec.
///
/// For the uniform model the first `m` vertices of a tree generated with
/// `n > m` form exactly the tree generated with `n = m` and the same seed.
pub fn gen_tree(spec: &TreeGenSpec) -> Result<PortTree, TreeError> {
    let TreeGenSpec { n, delta, seed, model } = *spec;
    if n == 0 {
        return Err(TreeError::InvalidSpec("n must be at least 1".into()));
    }
    if delta < 3 {
        return Err(TreeError::InvalidSpec("delta must be at least 3".into()));
    }
    let mut b = TreeBuilder::new(delta);
    b.add_vertex();
    match model {
        TreeModel::UniformAttachmentCapped => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut open = vec![0usize];
            for _ in 1..n {
                let i = rng.gen_range(0..open.len());
                let parent = open[i];
                let v = b.add_vertex();
                b.add_edge(parent, v)?;
                if b.free_ports(parent) == 0 {
                    open.swap_remove(i);
                }
                open.push(v);
            }
        }
        TreeModel::Path => {
            for v in 1..n {
                b.add_vertex();
                b.add_edge(v - 1, v)?;
            }
        }
        TreeModel::Star => {
            if n > delta + 1 {
                return Err(TreeError::InvalidSpec(format!(
                    "a star with delta {delta} has at most {} vertices",
                    delta + 1
                )));
            }
            for _ in 1..n {
                let v = b.add_vertex();
                b.add_edge(0, v)?;
            }
        }
        TreeModel::Caterpillar => {
            let mut spine = 0;
            for _ in 1..n {
                let v = b.add_vertex();
                if b.free_ports(spine) > 1 {
                    b.add_edge(spine, v)?;
                } else {
                    b.add_edge(spine, v)?;
                    spine = v;
                }
            }
        }
        TreeModel::Balanced => {
            for v in 1..n {
                b.add_vertex();
                b.add_edge((v - 1) / (delta - 1), v)?;
            }
        }
    }
    b.build()
}

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    u: usize,
    pu: usize,
    v: usize,
    pv: usize,
}

#[derive(Serialize, Deserialize)]
struct TreeFile {
    n: usize,
    delta: usize,
    edges: Vec<EdgeRecord>,
}

pub fn serialize_tree(tree: &PortTree) -> String {
    let file = TreeFile {
        n: tree.len(),
        delta: tree.delta(),
        edges: tree
            .edges()
            .map(|(u, pu, v, pv)| EdgeRecord { u, pu, v, pv })
            .collect(),
    };
    serde_json::to_string(&file).expect("tree serializes")
}

/// Parses the edge-list tree format; unlisted ports are virtual.
pub fn parse_tree(text: &str) -> Result<PortTree, TreeError> {
    let file: TreeFile = serde_json::from_str(text).map_err(|e| TreeError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.n == 0 {
        return Err(TreeError::Empty);
    }
    let mut ports = vec![vec![Port::Virtual; file.delta]; file.n];
    for e in &file.edges {
        for (v, p) in [(e.u, e.pu), (e.v, e.pv)] {
            if v >= file.n {
                return Err(TreeError::VertexOutOfRange(v));
            }
            if p >= file.delta {
                return Err(TreeError::PortOutOfRange { vertex: v, port: p });
            }
            if ports[v][p] != Port::Virtual {
                return Err(TreeError::PortAsymmetry { vertex: v, port: p });
            }
        }
        if e.u == e.v {
            return Err(TreeError::SelfLoop(e.u));
        }
        ports[e.u][e.pu] = Port::Edge { to: e.v, port: e.pv };
        ports[e.v][e.pv] = Port::Edge { to: e.u, port: e.pu };
    }
    PortTree::from_ports(file.delta, ports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, model: TreeModel) -> TreeGenSpec {
        TreeGenSpec {
            n,
            delta: 3,
            seed: 1,
            model,
        }
    }

    #[test]
    fn single_vertex_is_all_virtual() {
        let t = gen_tree(&spec(1, TreeModel::UniformAttachmentCapped)).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.residual(0), 3);
    }

    #[test]
    fn star_shape() {
        let t = gen_tree(&spec(4, TreeModel::Star)).unwrap();
        assert_eq!(t.degree(0), 3);
        for v in 1..4 {
            assert_eq!(t.degree(v), 1);
            assert_eq!(t.residual(v), 2);
        }
        assert_eq!(t.ball(0, 1), vec![0, 1, 2, 3]);
        assert!(gen_tree(&spec(5, TreeModel::Star)).is_err());
    }

    #[test]
    fn path_shape_and_metric() {
        let t = gen_tree(&spec(10, TreeModel::Path)).unwrap();
        assert_eq!(t.residual(0), 2);
        assert_eq!(t.residual(9), 2);
        assert!((1..9).all(|v| t.residual(v) == 1));
        assert_eq!(t.distance(0, 9), 9);
        assert_eq!(t.distance(4, 4), 0);
        assert_eq!(t.ball(4, 0), vec![4]);
    }

    #[test]
    fn caterpillar_and_balanced_respect_degree() {
        for model in [TreeModel::Caterpillar, TreeModel::Balanced] {
            let t = gen_tree(&TreeGenSpec {
                n: 100,
                delta: 4,
                seed: 0,
                model,
            })
            .unwrap();
            assert_eq!(t.len(), 100);
            assert!((0..100).all(|v| t.degree(v) <= 4));
        }
    }

    #[test]
    fn uniform_prefix_property() {
        let big = gen_tree(&TreeGenSpec::uniform(200, 3, 9)).unwrap();
        let small = gen_tree(&TreeGenSpec::uniform(50, 3, 9)).unwrap();
        for (u, pu, v, pv) in small.edges() {
            assert_eq!(big.port(u, pu), Port::Edge { to: v, port: pv });
        }
    }

    #[test]
    fn roundtrip_is_identical() {
        let t = gen_tree(&spec(4, TreeModel::Star)).unwrap();
        assert_eq!(parse_tree(&serialize_tree(&t)).unwrap(), t);
    }

    #[test]
    fn cycle_detected() {
        let text = r#"{"n":3,"delta":3,"edges":[
            {"u":0,"pu":0,"v":1,"pv":0},{"u":1,"pu":1,"v":2,"pv":0},{"u":2,"pu":1,"v":0,"pv":1}]}"#;
        let err = parse_tree(text).unwrap_err();
        assert!(matches!(err, TreeError::CycleDetected { .. }));
        assert!(err.to_string().contains("cycle detected"));
    }

    #[test]
    fn port_asymmetry_detected() {
        let text = r#"{"n":3,"delta":3,"edges":[
            {"u":0,"pu":0,"v":1,"pv":0},{"u":0,"pu":0,"v":2,"pv":0}]}"#;
        let err = parse_tree(text).unwrap_err();
        assert!(err.to_string().contains("port asymmetry"));
        let one_sided = vec![
            vec![Port::Edge { to: 1, port: 0 }, Port::Virtual, Port::Virtual],
            vec![Port::Virtual; 3],
        ];
        assert!(matches!(
            PortTree::from_ports(3, one_sided),
            Err(TreeError::PortAsymmetry { vertex: 0, port: 0 })
        ));
    }

    #[test]
    fn disconnected_detected() {
        let text = r#"{"n":3,"delta":3,"edges":[{"u":0,"pu":0,"v":1,"pv":0}]}"#;
        assert!(matches!(parse_tree(text), Err(TreeError::Disconnected { .. })));
    }
}

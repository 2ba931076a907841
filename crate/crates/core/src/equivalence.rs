//! Extendability tables of poled trees.
//!
//! For a tree with poles `v1..vk`, the table maps every tuple of label
//! multisets placed on the poles' virtual half-edges to whether the rest of
//! the tree can be labeled correctly around them. Two poled trees with the
//! same pole arities are equivalent when their tables coincide.

use std::collections::{HashMap, HashSet};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::Bits;
use crate::lcl::{Label, LclProblem};
use crate::tree::{gen_tree, Port, PortTree, TreeGenSpec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EquivError {
    #[error("pole {0} is listed twice")]
    DuplicatePole(usize),
    #[error("pole {0} has no virtual half-edge")]
    NoResidual(usize),
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("partial label on vertex {vertex} port {port} is out of range")]
    BadPartial { vertex: usize, port: usize },
    #[error("expected rooted tables, table {0} has {1} poles")]
    NotRooted(usize, usize),
    #[error("root of table {0} has fewer than 2 virtual half-edges")]
    ArityUnderflow(usize),
    #[error("pole arities differ: {0:?} vs {1:?}")]
    SignatureMismatch(Vec<usize>, Vec<usize>),
    #[error("replaced vertex set is empty or disconnected")]
    BadSubtree,
    #[error("pole {0} of the tree lies in the replaced part but is not one of its poles")]
    PoleNotKept(usize),
    #[error("edge {0}-{1} leaves the replaced part at a non-pole")]
    CutAtNonPole(usize, usize),
}

/// A tree with designated poles and optional fixed half-edge labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoledTree {
    pub tree: PortTree,
    pub poles: Vec<usize>,
    /// `(vertex, port, label)` constraints.
    pub partial: Vec<(usize, usize, Label)>,
}

impl PoledTree {
    pub fn new(tree: PortTree, poles: Vec<usize>) -> Result<Self, EquivError> {
        Self::with_partial(tree, poles, Vec::new())
    }

    pub fn with_partial(
        tree: PortTree,
        poles: Vec<usize>,
        partial: Vec<(usize, usize, Label)>,
    ) -> Result<Self, EquivError> {
        for (i, &p) in poles.iter().enumerate() {
            if p >= tree.len() {
                return Err(EquivError::VertexOutOfRange(p));
            }
            if poles[..i].contains(&p) {
                return Err(EquivError::DuplicatePole(p));
            }
            if tree.residual(p) == 0 {
                return Err(EquivError::NoResidual(p));
            }
        }
        for &(v, p, _) in &partial {
            if v >= tree.len() || p >= tree.delta() {
                return Err(EquivError::BadPartial { vertex: v, port: p });
            }
        }
        Ok(PoledTree {
            tree,
            poles,
            partial,
        })
    }

    pub fn rooted(tree: PortTree, root: usize) -> Result<Self, EquivError> {
        Self::new(tree, vec![root])
    }

    /// Residual arity of every pole.
    pub fn signature(&self) -> Vec<usize> {
        self.poles.iter().map(|&p| self.tree.residual(p)).collect()
    }
}

/// Lexicographic enumeration of the size-`size` multisets over `sigma` labels.
#[derive(Clone, Debug)]
pub struct MultisetIndex {
    list: Vec<Vec<Label>>,
    rank: HashMap<Vec<Label>, u32>,
}

impl MultisetIndex {
    pub fn new(sigma: usize, size: usize) -> Self {
        let list: Vec<Vec<Label>> = (0..sigma)
            .map(|i| Label(i as u8))
            .combinations_with_replacement(size)
            .collect();
        let rank = list
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i as u32))
            .collect();
        MultisetIndex { list, rank }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn get(&self, i: usize) -> &[Label] {
        &self.list[i]
    }

    /// Rank of a sorted multiset.
    pub fn rank(&self, sorted: &[Label]) -> usize {
        self.rank[sorted] as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Label]> {
        self.list.iter().map(|m| m.as_slice())
    }
}

fn with_label(m: &[Label], extra: Label) -> Vec<Label> {
    let mut v = m.to_vec();
    let pos = v.partition_point(|&l| l <= extra);
    v.insert(pos, extra);
    v
}

/// Dense YES/NO table over all tuples of pole multisets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HTable {
    signature: Vec<usize>,
    sigma: usize,
    bits: Bits,
}

impl HTable {
    fn empty(sigma: usize, signature: Vec<usize>) -> Self {
        let len = signature
            .iter()
            .map(|&r| MultisetIndex::new(sigma, r).len())
            .product();
        HTable {
            signature,
            sigma,
            bits: Bits::new(len),
        }
    }

    pub fn signature(&self) -> &[usize] {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_yes(&self) -> usize {
        self.bits.count_ones()
    }

    fn indexes(&self) -> Vec<MultisetIndex> {
        self.signature
            .iter()
            .map(|&r| MultisetIndex::new(self.sigma, r))
            .collect()
    }

    fn flat(&self, ranks: &[usize]) -> usize {
        let idx = self.indexes();
        ranks
            .iter()
            .zip(&idx)
            .fold(0, |acc, (&r, m)| acc * m.len() + r)
    }

    pub fn get_ranks(&self, ranks: &[usize]) -> bool {
        self.bits.get(self.flat(ranks))
    }

    /// Looks up a tuple of multisets, one per pole, each in any order.
    pub fn get(&self, tuple: &[Vec<Label>]) -> bool {
        let idx = self.indexes();
        let ranks: Vec<usize> = tuple
            .iter()
            .zip(&idx)
            .map(|(m, ix)| {
                let mut m = m.clone();
                m.sort();
                ix.rank(&m)
            })
            .collect();
        self.bits.get(
            ranks
                .iter()
                .zip(&idx)
                .fold(0, |acc, (&r, m)| acc * m.len() + r),
        )
    }

    /// All YES tuples as rank vectors.
    pub fn yes_tuples(&self) -> Vec<Vec<usize>> {
        let sizes: Vec<usize> = self.indexes().iter().map(|m| m.len()).collect();
        self.bits
            .ones()
            .map(|mut flat| {
                let mut ranks = vec![0; sizes.len()];
                for i in (0..sizes.len()).rev() {
                    ranks[i] = flat % sizes[i];
                    flat /= sizes[i];
                }
                ranks
            })
            .collect()
    }

    /// All YES tuples as sorted multisets, one per pole.
    pub fn yes_multisets(&self) -> Vec<Vec<Vec<Label>>> {
        let idx = self.indexes();
        self.yes_tuples()
            .into_iter()
            .map(|ranks| ranks.iter().zip(&idx).map(|(&r, m)| m.get(r).to_vec()).collect())
            .collect()
    }

    fn set_ranks(&mut self, ranks: &[usize]) {
        let i = self.flat(ranks);
        self.bits.set(i, true);
    }
}

const UNSET: u32 = u32::MAX;

/// Distinct orderings of a sorted multiset.
fn distinct_permutations(sorted: &[Label]) -> Vec<Vec<Label>> {
    fn go(counts: &mut Vec<(Label, usize)>, cur: &mut Vec<Label>, len: usize, out: &mut Vec<Vec<Label>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in 0..counts.len() {
            if counts[i].1 > 0 {
                counts[i].1 -= 1;
                cur.push(counts[i].0);
                go(counts, cur, len, out);
                cur.pop();
                counts[i].1 += 1;
            }
        }
    }
    let mut counts: Vec<(Label, usize)> = sorted
        .iter()
        .copied()
        .dedup_with_count()
        .map(|(c, l)| (l, c))
        .collect();
    let mut out = Vec::new();
    go(&mut counts, &mut Vec::new(), sorted.len(), &mut out);
    out
}

/// Computes the extendability table by dynamic programming over the tree
/// rooted at vertex 0.
pub fn h_table(problem: &LclProblem, poled: &PoledTree) -> HTable {
    let tree = &poled.tree;
    let n = tree.len();
    let delta = tree.delta();
    let sigma = problem.num_labels();
    let k = poled.poles.len();
    let pole_of: HashMap<usize, usize> = poled.poles.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let idx: Vec<MultisetIndex> = poled
        .signature()
        .iter()
        .map(|&r| MultisetIndex::new(sigma, r))
        .collect();
    let mut fixed: HashMap<(usize, usize), Label> = HashMap::new();
    for &(v, p, l) in &poled.partial {
        fixed.insert((v, p), l);
    }

    let mut order = vec![0];
    let mut parent = vec![usize::MAX; n];
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for (_, to, _) in tree.neighbors(v) {
            if to != parent[v] {
                parent[to] = v;
                order.push(to);
            }
        }
    }

    let perms: Vec<Vec<Label>> = problem
        .vertex_configs()
        .iter()
        .flat_map(|c| distinct_permutations(c.labels()))
        .collect();

    // up[v][b]: pole tuples realizable below v when v's half-edge toward its
    // parent carries b
    let mut up: Vec<Vec<HashSet<Vec<u32>>>> = vec![Vec::new(); n];
    for &v in order.iter().rev() {
        let mut sets = vec![HashSet::new(); sigma.max(1)];
        // child-side sets seen from v: any label b' on the child that meets b
        let mut toward: HashMap<usize, Vec<HashSet<Vec<u32>>>> = HashMap::new();
        for (_, to, _) in tree.neighbors(v) {
            if to == parent[v] {
                continue;
            }
            let child = &up[to];
            let g: Vec<HashSet<Vec<u32>>> = (0..sigma)
                .map(|b| {
                    let mut s = HashSet::new();
                    for b2 in 0..sigma {
                        if problem.edge_allowed(Label(b as u8), Label(b2 as u8)) {
                            s.extend(child[b2].iter().cloned());
                        }
                    }
                    s
                })
                .collect();
            toward.insert(to, g);
        }
        'perm: for perm in &perms {
            for p in 0..delta {
                if let Some(&l) = fixed.get(&(v, p)) {
                    if perm[p] != l {
                        continue 'perm;
                    }
                }
            }
            let mut base = vec![UNSET; k];
            if let Some(&i) = pole_of.get(&v) {
                let virt: Vec<Label> = (0..delta)
                    .filter(|&p| tree.port(v, p) == Port::Virtual)
                    .map(|p| perm[p])
                    .sorted()
                    .collect();
                base[i] = idx[i].rank(&virt) as u32;
            }
            let mut acc: Vec<Vec<u32>> = vec![base];
            let mut key = 0;
            for (p, to, _) in tree.neighbors(v) {
                if to == parent[v] {
                    key = perm[p].index();
                    continue;
                }
                let g = &toward[&to][perm[p].index()];
                if g.is_empty() {
                    continue 'perm;
                }
                let mut next = Vec::with_capacity(acc.len() * g.len());
                for a in &acc {
                    for b in g {
                        next.push(a.iter().zip(b).map(|(&x, &y)| if x == UNSET { y } else { x }).collect());
                    }
                }
                next.sort();
                next.dedup();
                acc = next;
            }
            sets[key].extend(acc);
        }
        for (_, to, _) in tree.neighbors(v) {
            if to != parent[v] {
                up[to] = Vec::new();
            }
        }
        up[v] = sets;
    }

    let mut table = HTable::empty(sigma, poled.signature());
    for set in &up[0] {
        for t in set {
            let ranks: Vec<usize> = t.iter().map(|&x| x as usize).collect();
            table.set_ranks(&ranks);
        }
    }
    table
}

/// Appends a rooted tree to the `t` end of a prefix. A one-pole prefix is a
/// single rooted tree whose pole plays both ends.
fn append(problem: &LclProblem, prefix: &HTable, rooted: &HTable, index: usize) -> Result<HTable, EquivError> {
    let sigma = problem.num_labels();
    let r = rooted.signature[0];
    if r < 2 {
        return Err(EquivError::ArityUnderflow(index));
    }
    let root_idx = MultisetIndex::new(sigma, r);
    let new_t = MultisetIndex::new(sigma, r - 1);
    // entries[y]: ranks of I_t' such that I_t' + {y} is YES for the new root
    let mut entries: Vec<Vec<usize>> = vec![Vec::new(); sigma];
    for (i, m) in new_t.iter().enumerate() {
        for (y, e) in entries.iter_mut().enumerate() {
            let full = with_label(m, Label(y as u8));
            if rooted.bits.get(root_idx.rank(&full)) {
                e.push(i);
            }
        }
    }
    let reach_from = |x: Label| -> Vec<usize> {
        let mut out: Vec<usize> = (0..sigma)
            .filter(|&y| problem.edge_allowed(x, Label(y as u8)))
            .flat_map(|y| entries[y].iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    };
    let reach: Vec<Vec<usize>> = (0..sigma).map(|x| reach_from(Label(x as u8))).collect();

    let (s_res, t_side) = match prefix.signature.as_slice() {
        [r1] => {
            if *r1 < 2 {
                return Err(EquivError::ArityUnderflow(0));
            }
            (r1 - 1, None)
        }
        [s, t] => (*s, Some(*t)),
        other => return Err(EquivError::NotRooted(0, other.len())),
    };
    let mut out = HTable::empty(sigma, vec![s_res, r - 1]);
    let prefix_idx = prefix.indexes();
    for ranks in prefix.yes_tuples() {
        // split the old t multiset into the half-edge toward the new root and
        // the rest; for a one-pole prefix the rest is I_s itself
        let old_t = prefix_idx[ranks.len() - 1].get(ranks[ranks.len() - 1]);
        let s_idx = MultisetIndex::new(sigma, s_res);
        for x in old_t.iter().copied().dedup() {
            let s_rank = match t_side {
                None => {
                    let mut rest = old_t.to_vec();
                    let pos = rest.iter().position(|&l| l == x).unwrap();
                    rest.remove(pos);
                    s_idx.rank(&rest)
                }
                Some(_) => ranks[0],
            };
            for &t in &reach[x.index()] {
                out.set_ranks(&[s_rank, t]);
            }
        }
    }
    Ok(out)
}

/// Table of the bipolar tree formed by joining the roots `r1..rk` into a
/// path, computed from the rooted tables alone. For `k = 1` the rooted table
/// is returned unchanged.
pub fn concat_bipolar(problem: &LclProblem, rooted: &[HTable]) -> Result<HTable, EquivError> {
    for (i, t) in rooted.iter().enumerate() {
        if t.signature.len() != 1 {
            return Err(EquivError::NotRooted(i, t.signature.len()));
        }
    }
    let (first, rest) = rooted.split_first().ok_or(EquivError::NotRooted(0, 0))?;
    let mut acc = first.clone();
    for (i, t) in rest.iter().enumerate() {
        acc = append(problem, &acc, t, i + 1)?;
    }
    Ok(acc)
}

/// Joins the roots of rooted trees into a path; poles are the two ends.
pub fn concat_trees(parts: &[PoledTree]) -> PoledTree {
    let delta = parts[0].tree.delta();
    let mut ports: Vec<Vec<Port>> = Vec::new();
    let mut roots = Vec::new();
    let mut partial = Vec::new();
    for part in parts {
        let off = ports.len();
        for v in 0..part.tree.len() {
            ports.push(
                part.tree
                    .ports(v)
                    .iter()
                    .map(|p| match *p {
                        Port::Edge { to, port } => Port::Edge { to: to + off, port },
                        Port::Virtual => Port::Virtual,
                    })
                    .collect(),
            );
        }
        roots.push(part.poles[0] + off);
        partial.extend(part.partial.iter().map(|&(v, p, l)| (v + off, p, l)));
    }
    for w in roots.windows(2) {
        connect(&mut ports, w[0], w[1]);
    }
    let tree = PortTree::from_ports(delta, ports).expect("joined trees form a tree");
    let poles = if roots.len() == 1 {
        vec![roots[0]]
    } else {
        vec![roots[0], *roots.last().unwrap()]
    };
    PoledTree::with_partial(tree, poles, partial).expect("ends keep a virtual half-edge")
}

fn connect(ports: &mut [Vec<Port>], a: usize, b: usize) {
    let pa = ports[a].iter().position(|p| *p == Port::Virtual).expect("free port");
    let pb = ports[b].iter().position(|p| *p == Port::Virtual).expect("free port");
    ports[a][pa] = Port::Edge { to: b, port: pb };
    ports[b][pb] = Port::Edge { to: a, port: pa };
}

/// Replaces the subtree induced by `part` (with poles `part_poles`) by
/// `replacement` and reports whether the table of the whole tree is
/// unchanged.
pub fn check_replacement(
    problem: &LclProblem,
    t: &PoledTree,
    part: &[usize],
    part_poles: &[usize],
    replacement: &PoledTree,
) -> Result<bool, EquivError> {
    let (_, star) = replace(t, part, part_poles, replacement)?;
    Ok(h_table(problem, &star) == h_table(problem, t))
}

/// The subtree induced by `part` with poles `part_poles`, after checking that
/// it is connected, keeps the tree's poles inside it and is cut only at its
/// poles.
pub fn induced(t: &PoledTree, part: &[usize], part_poles: &[usize]) -> Result<PoledTree, EquivError> {
    let tree = &t.tree;
    let n = tree.len();
    let delta = tree.delta();
    let mut in_part = vec![false; n];
    for &v in part {
        if v >= n {
            return Err(EquivError::VertexOutOfRange(v));
        }
        in_part[v] = true;
    }
    if part.is_empty() {
        return Err(EquivError::BadSubtree);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![part[0]];
    seen[part[0]] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for (_, to, _) in tree.neighbors(v) {
            if in_part[to] && !seen[to] {
                seen[to] = true;
                count += 1;
                stack.push(to);
            }
        }
    }
    if count != part.len() {
        return Err(EquivError::BadSubtree);
    }
    for &p in &t.poles {
        if in_part[p] && !part_poles.contains(&p) {
            return Err(EquivError::PoleNotKept(p));
        }
    }
    for (u, _, v, _) in tree.edges() {
        if in_part[u] != in_part[v] {
            let inner = if in_part[u] { u } else { v };
            if !part_poles.contains(&inner) {
                return Err(EquivError::CutAtNonPole(u, v));
            }
        }
    }

    // T': the part on its own
    let mut new_id = vec![usize::MAX; n];
    for (i, &v) in part.iter().enumerate() {
        new_id[v] = i;
    }
    let sub_ports: Vec<Vec<Port>> = part
        .iter()
        .map(|&v| {
            tree.ports(v)
                .iter()
                .map(|p| match *p {
                    Port::Edge { to, port } if in_part[to] => Port::Edge { to: new_id[to], port },
                    _ => Port::Virtual,
                })
                .collect()
        })
        .collect();
    let sub_tree = PortTree::from_ports(delta, sub_ports).expect("connected part");
    let sub_partial = t
        .partial
        .iter()
        .filter(|&&(v, _, _)| in_part[v])
        .map(|&(v, p, l)| (new_id[v], p, l))
        .collect();
    PoledTree::with_partial(
        sub_tree,
        part_poles.iter().map(|&v| new_id[v]).collect(),
        sub_partial,
    )
}

/// Builds `T'` (the part with its poles) and `T*` (the tree with the part
/// swapped out). Cut edges attach to the lowest free port of the matching
/// replacement pole.
pub fn replace(
    t: &PoledTree,
    part: &[usize],
    part_poles: &[usize],
    replacement: &PoledTree,
) -> Result<(PoledTree, PoledTree), EquivError> {
    let sub = induced(t, part, part_poles)?;
    let tree = &t.tree;
    let n = tree.len();
    let delta = tree.delta();
    let mut in_part = vec![false; n];
    for &v in part {
        in_part[v] = true;
    }
    if sub.signature() != replacement.signature() {
        return Err(EquivError::SignatureMismatch(
            sub.signature(),
            replacement.signature(),
        ));
    }

    // T*: outside vertices first, then the replacement
    let outside: Vec<usize> = (0..n).filter(|&v| !in_part[v]).collect();
    let mut out_id = vec![usize::MAX; n];
    for (i, &v) in outside.iter().enumerate() {
        out_id[v] = i;
    }
    let off = outside.len();
    let mut ports: Vec<Vec<Port>> = outside
        .iter()
        .map(|&v| {
            tree.ports(v)
                .iter()
                .map(|p| match *p {
                    Port::Edge { to, port } if !in_part[to] => Port::Edge { to: out_id[to], port },
                    _ => Port::Virtual,
                })
                .collect()
        })
        .collect();
    for v in 0..replacement.tree.len() {
        ports.push(
            replacement
                .tree
                .ports(v)
                .iter()
                .map(|p| match *p {
                    Port::Edge { to, port } => Port::Edge { to: to + off, port },
                    Port::Virtual => Port::Virtual,
                })
                .collect(),
        );
    }
    let pole_image = |v: usize| {
        let i = part_poles.iter().position(|&p| p == v).expect("cut at a pole");
        replacement.poles[i] + off
    };
    for (u, pu, v, pv) in tree.edges() {
        if in_part[u] == in_part[v] {
            continue;
        }
        let (inner, (outer, po)) = if in_part[u] { (u, (v, pv)) } else { (v, (u, pu)) };
        let x = pole_image(inner);
        let px = ports[x].iter().position(|p| *p == Port::Virtual).expect("pole has room");
        ports[x][px] = Port::Edge { to: out_id[outer], port: po };
        ports[out_id[outer]][po] = Port::Edge { to: x, port: px };
    }
    let star_tree = PortTree::from_ports(delta, ports).expect("replacement keeps a tree");
    let mut partial: Vec<(usize, usize, Label)> = t
        .partial
        .iter()
        .filter(|&&(v, _, _)| !in_part[v])
        .map(|&(v, p, l)| (out_id[v], p, l))
        .collect();
    partial.extend(replacement.partial.iter().map(|&(v, p, l)| (v + off, p, l)));
    let poles = t
        .poles
        .iter()
        .map(|&p| if in_part[p] { pole_image(p) } else { out_id[p] })
        .collect();
    let star = PoledTree::with_partial(star_tree, poles, partial)?;
    Ok((sub, star))
}

/// First `a < b` whose prefix concatenations have equal tables.
pub fn pumping_decompose(
    problem: &LclProblem,
    rooted: &[HTable],
) -> Result<Option<(usize, usize)>, EquivError> {
    let mut prefixes: Vec<HTable> = Vec::new();
    let mut acc: Option<HTable> = None;
    for (i, t) in rooted.iter().enumerate() {
        let next = match acc {
            None => {
                if t.signature.len() != 1 {
                    return Err(EquivError::NotRooted(i, t.signature.len()));
                }
                t.clone()
            }
            Some(ref p) => append(problem, p, t, i)?,
        };
        if let Some(a) = prefixes.iter().position(|p| *p == next) {
            return Ok(Some((a + 1, i + 1)));
        }
        prefixes.push(next.clone());
        acc = Some(next);
    }
    Ok(None)
}

/// Tables of `X ∘ Y^i ∘ Z` for `i = 0..=reps`, with `X = rooted[..a]`,
/// `Y = rooted[a..b]` and `Z = rooted[b..]`.
pub fn pumped_tables(
    problem: &LclProblem,
    rooted: &[HTable],
    (a, b): (usize, usize),
    reps: usize,
) -> Result<Vec<HTable>, EquivError> {
    (0..=reps)
        .map(|i| {
            let mut seq: Vec<HTable> = rooted[..a].to_vec();
            for _ in 0..i {
                seq.extend_from_slice(&rooted[a..b]);
            }
            seq.extend_from_slice(&rooted[b..]);
            concat_bipolar(problem, &seq)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub trees_sampled: usize,
    pub max_size: usize,
    /// Distinct rooted tables, per root arity.
    pub rooted_classes: Vec<(usize, usize)>,
    /// Distinct bipolar tables reached by joining observed rooted classes.
    pub bipolar_classes: usize,
    /// Observed bipolar classes plus one.
    pub ell_pump_bound: usize,
    /// Whether the bipolar closure stopped growing before the cap.
    pub saturated: bool,
}

/// Distinct rooted tables over random trees of at most `max_size` vertices.
pub fn rooted_census(
    problem: &LclProblem,
    max_size: usize,
    samples: usize,
    seed: u64,
) -> Vec<HTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<HTable> = HashSet::new();
    let mut out = Vec::new();
    for _ in 0..samples {
        let n = rng.gen_range(1..=max_size.max(1));
        let tree = gen_tree(&TreeGenSpec::uniform(n, problem.delta(), rng.gen())).expect("valid spec");
        let root = rng.gen_range(0..n);
        if tree.residual(root) == 0 {
            continue;
        }
        let t = h_table(problem, &PoledTree::rooted(tree, root).expect("root has room"));
        if seen.insert(t.clone()) {
            out.push(t);
        }
    }
    out
}

/// Counts rooted classes and closes the bipolar classes under appending
/// any observed rooted class with at least two free half-edges.
pub fn census(problem: &LclProblem, max_size: usize, samples: usize, seed: u64, cap: usize) -> Census {
    let rooted = rooted_census(problem, max_size, samples, seed);
    let mut per_arity: HashMap<usize, usize> = HashMap::new();
    for t in &rooted {
        *per_arity.entry(t.signature[0]).or_default() += 1;
    }
    let mut rooted_classes: Vec<(usize, usize)> = per_arity.into_iter().collect();
    rooted_classes.sort();
    let joinable: Vec<&HTable> = rooted.iter().filter(|t| t.signature[0] >= 2).collect();
    let mut seen: HashSet<HTable> = HashSet::new();
    let mut frontier: Vec<HTable> = Vec::new();
    for a in &joinable {
        for b in &joinable {
            let t = append(problem, a, b, 1).expect("arity checked");
            if seen.insert(t.clone()) {
                frontier.push(t);
            }
        }
    }
    let mut saturated = true;
    while let Some(p) = frontier.pop() {
        if seen.len() >= cap {
            saturated = false;
            break;
        }
        for b in &joinable {
            if let Ok(t) = append(problem, &p, b, 1) {
                if seen.insert(t.clone()) {
                    frontier.push(t);
                }
            }
        }
    }
    Census {
        trees_sampled: samples,
        max_size,
        rooted_classes,
        bipolar_classes: seen.len(),
        ell_pump_bound: seen.len() + 1,
        saturated,
    }
}

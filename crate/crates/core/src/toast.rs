//! Toasts on finite trees and the inner-to-outer toast solver.
//!
//! A q-toast is a family of connected pieces, pairwise nested or disjoint,
//! whose boundaries are at least `q` apart. On a finite tree the whole
//! vertex set is always a piece, which covers every pair of vertices.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lcl::{HalfEdgeLabeling, Label, LclProblem, VertexConfig};
use crate::solver::{assign_ports, FullSubset, SolveError};
use crate::tree::PortTree;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ToastError {
    #[error("piece {0} is empty")]
    EmptyPiece(usize),
    #[error("piece {0} contains an unknown vertex")]
    UnknownVertex(usize),
    #[error("piece {0} is not connected")]
    Disconnected(usize),
    #[error("pieces {0} and {1} overlap without nesting")]
    NotLaminar(usize, usize),
    #[error("boundaries of pieces {a} and {b} are {distance} apart, need {q}")]
    BoundariesTooClose {
        a: usize,
        b: usize,
        distance: usize,
        q: usize,
    },
    #[error("the whole vertex set is not a piece")]
    MissingWhole,
    #[error("centers {0} and {1} are too close for the q-gap")]
    CentersTooClose(usize, usize),
    #[error("center {0} listed twice")]
    DuplicateCenter(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Toast {
    pub q: usize,
    /// Sorted vertex lists.
    pub pieces: Vec<Vec<usize>>,
}

/// Vertices of `piece` with a neighbour outside it.
pub fn boundary(tree: &PortTree, inside: &[bool], piece: &[usize]) -> Vec<usize> {
    piece
        .iter()
        .copied()
        .filter(|&v| tree.neighbors(v).any(|(_, to, _)| !inside[to]))
        .collect()
}

fn membership(n: usize, piece: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in piece {
        m[v] = true;
    }
    m
}

fn is_connected(tree: &PortTree, inside: &[bool], piece: &[usize]) -> bool {
    let mut seen = vec![false; inside.len()];
    let mut queue = VecDeque::from([piece[0]]);
    seen[piece[0]] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for (_, to, _) in tree.neighbors(v) {
            if inside[to] && !seen[to] {
                seen[to] = true;
                count += 1;
                queue.push_back(to);
            }
        }
    }
    count == piece.len()
}

/// Checks whether adding `piece` to `pieces` keeps the family laminar with
/// q-separated boundaries. Returns the first conflicting index.
fn conflict(
    tree: &PortTree,
    q: usize,
    pieces: &[Vec<usize>],
    piece: &[usize],
) -> Option<(usize, Option<usize>)> {
    let n = tree.len();
    let inside = membership(n, piece);
    let b = boundary(tree, &inside, piece);
    let dist = if b.is_empty() {
        None
    } else {
        Some(tree.distances_from(&b))
    };
    for (j, other) in pieces.iter().enumerate() {
        let common = other.iter().filter(|&&v| inside[v]).count();
        let nested = common == 0 || common == other.len() || common == piece.len();
        if !nested {
            return Some((j, None));
        }
        if let Some(dist) = &dist {
            let other_inside = membership(n, other);
            let d = boundary(tree, &other_inside, other)
                .iter()
                .map(|&v| dist[v])
                .min();
            if let Some(d) = d {
                if d < q {
                    return Some((j, Some(d)));
                }
            }
        }
    }
    None
}

impl Toast {
    pub fn validate(&self, tree: &PortTree) -> Result<(), ToastError> {
        let n = tree.len();
        for (i, piece) in self.pieces.iter().enumerate() {
            if piece.is_empty() {
                return Err(ToastError::EmptyPiece(i));
            }
            if piece.iter().any(|&v| v >= n) {
                return Err(ToastError::UnknownVertex(i));
            }
            if !is_connected(tree, &membership(n, piece), piece) {
                return Err(ToastError::Disconnected(i));
            }
            if let Some((j, d)) = conflict(tree, self.q, &self.pieces[..i], piece) {
                return Err(match d {
                    None => ToastError::NotLaminar(j, i),
                    Some(distance) => ToastError::BoundariesTooClose {
                        a: j,
                        b: i,
                        distance,
                        q: self.q,
                    },
                });
            }
        }
        if !self.pieces.iter().any(|p| p.len() == n) {
            return Err(ToastError::MissingWhole);
        }
        Ok(())
    }
}

/// Balls of radius `q` around the centers plus the whole vertex set.
pub fn build_toast(tree: &PortTree, q: usize, centers: &[usize]) -> Result<Toast, ToastError> {
    build_nested_toast(tree, q, centers, 1)
}

/// Like [`build_toast`], then for `j = 1..levels` adds the balls of radius
/// `q (2^(j+1) − 1)` around each center whenever the family stays a q-toast.
pub fn build_nested_toast(
    tree: &PortTree,
    q: usize,
    centers: &[usize],
    levels: usize,
) -> Result<Toast, ToastError> {
    let n = tree.len();
    for (i, &c) in centers.iter().enumerate() {
        if centers[..i].contains(&c) {
            return Err(ToastError::DuplicateCenter(c));
        }
    }
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    let mut owner = Vec::new();
    for &c in centers {
        let ball = tree.ball(c, q);
        if ball.len() == n {
            continue;
        }
        if let Some((j, _)) = conflict(tree, q, &pieces, &ball) {
            return Err(ToastError::CentersTooClose(owner[j], c));
        }
        pieces.push(ball);
        owner.push(c);
    }
    for j in 1..levels {
        let r = q * ((1usize << (j + 1)) - 1);
        for &c in centers {
            let ball = tree.ball(c, r);
            if ball.len() == n || pieces.contains(&ball) {
                continue;
            }
            if conflict(tree, q, &pieces, &ball).is_none() {
                pieces.push(ball);
            }
        }
    }
    pieces.push((0..n).collect());
    let toast = Toast { q, pieces };
    toast.validate(tree)?;
    Ok(toast)
}

/// Centers chosen in id order at pairwise distance at least `spacing`.
pub fn auto_centers(tree: &PortTree, spacing: usize) -> Vec<usize> {
    let mut centers: Vec<usize> = Vec::new();
    let mut near = vec![usize::MAX; tree.len()];
    for v in 0..tree.len() {
        if near[v] >= spacing {
            centers.push(v);
            let d = tree.distances_from(&[v]);
            for (x, dx) in near.iter_mut().zip(d) {
                *x = (*x).min(dx);
            }
        }
    }
    centers
}

/// Labels `tree` piece by piece, smallest pieces first.
pub fn solve_toast(
    problem: &LclProblem,
    subset: &[VertexConfig],
    ell: usize,
    tree: &PortTree,
    toast: &Toast,
) -> Result<HalfEdgeLabeling, SolveError> {
    let need = 2 * ell + 2;
    if toast.q < need {
        return Err(SolveError::QTooSmall { q: toast.q, need });
    }
    toast.validate(tree)?;
    let full = FullSubset::new(problem, subset, ell)?;
    let n = tree.len();
    let mut labeling = HalfEdgeLabeling::new(n, tree.delta(), Label(0));
    let mut colored = vec![false; n];

    let mut order: Vec<&Vec<usize>> = toast.pieces.iter().collect();
    order.sort_by_key(|p| (p.len(), p[0]));
    for piece in order {
        let inside = membership(n, piece);
        let on_boundary = membership(n, &boundary(tree, &inside, piece));
        for &start in piece {
            if colored[start] {
                continue;
            }
            let region = region_from(tree, &inside, &colored, start);
            color_region(
                problem,
                &full,
                tree,
                &region,
                &on_boundary,
                &mut colored,
                &mut labeling,
            )?;
        }
    }
    let report = crate::lcl::is_valid_labeling(problem, tree, &labeling).expect("sizes match");
    if !report.is_valid() {
        return Err(SolveError::Invalid(report.num_violations()));
    }
    Ok(labeling)
}

/// Uncolored component of the piece containing `start`.
fn region_from(tree: &PortTree, inside: &[bool], colored: &[bool], start: usize) -> Vec<usize> {
    let mut region = vec![start];
    let mut seen = HashMap::from([(start, ())]);
    let mut head = 0;
    while head < region.len() {
        let v = region[head];
        head += 1;
        for (_, to, _) in tree.neighbors(v) {
            if inside[to] && !colored[to] && seen.insert(to, ()).is_none() {
                region.push(to);
            }
        }
    }
    region
}

fn color_region(
    problem: &LclProblem,
    full: &FullSubset,
    tree: &PortTree,
    region: &[usize],
    on_boundary: &[bool],
    colored: &mut [bool],
    labeling: &mut HalfEdgeLabeling,
) -> Result<(), SolveError> {
    let ell = full.ell;
    // the single edge from each region vertex into an already colored piece
    let contact: HashMap<usize, (usize, usize, usize)> = region
        .iter()
        .filter_map(|&v| {
            tree.neighbors(v)
                .find(|&(_, to, _)| colored[to])
                .map(|e| (v, e))
        })
        .collect();
    let touches = |v: usize| contact.get(&v).copied();
    // root: a boundary vertex of the piece, else a vertex next to an inner
    // piece, else the smallest id
    let root = region
        .iter()
        .copied()
        .filter(|&v| on_boundary[v])
        .min()
        .or_else(|| region.iter().copied().filter(|&v| touches(v).is_some()).min())
        .unwrap_or_else(|| *region.iter().min().unwrap());

    let in_region: HashMap<usize, ()> = region.iter().map(|&v| (v, ())).collect();
    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut bfs = vec![root];
    let mut head = 0;
    while head < bfs.len() {
        let v = bfs[head];
        head += 1;
        for (_, to, _) in tree.neighbors(v) {
            if to != root && in_region.contains_key(&to) && !parent.contains_key(&to) {
                parent.insert(to, v);
                bfs.push(to);
            }
        }
    }

    // reserved segments, keyed by their vertex closest to the root
    let mut segment_top: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut reserved: HashMap<usize, ()> = HashMap::new();
    for &v in region {
        if v == root || touches(v).is_none() {
            continue;
        }
        let mut seg = vec![v];
        while seg.len() < ell {
            let up = parent[seg.last().unwrap()];
            if up == root {
                return Err(SolveError::SegmentOverlap(root));
            }
            seg.push(up);
        }
        for &x in &seg {
            if reserved.insert(x, ()).is_some() {
                return Err(SolveError::SegmentOverlap(x));
            }
        }
        seg.reverse();
        segment_top.insert(seg[0], seg);
    }

    for &v in &bfs {
        if colored[v] {
            continue;
        }
        if v == root {
            match touches(v) {
                Some((p, to, q)) => {
                    let (c, b) = full.answer(labeling.get(to, q));
                    assign_ports(labeling, v, c, &[(p, *b)]);
                }
                None => assign_ports(labeling, v, full.smallest(), &[]),
            }
            colored[v] = true;
        } else if let Some(seg) = segment_top.get(&v) {
            let top_parent = parent[&v];
            let a1 = labeling.get(top_parent, tree.port_to(top_parent, v).unwrap());
            let bottom = *seg.last().unwrap();
            let (_, x, xq) = touches(bottom).expect("segment bottom touches an inner piece");
            let a2 = labeling.get(x, xq);
            let inner = full.witness(problem, a1, a2, ell + 2)?;
            for (j, iv) in inner.iter().enumerate() {
                let prev = if j == 0 { top_parent } else { seg[j - 1] };
                let next = if j + 1 == seg.len() { x } else { seg[j + 1] };
                let w = seg[j];
                let p_in = tree.port_to(w, prev).unwrap();
                let p_out = tree.port_to(w, next).unwrap();
                assign_ports(
                    labeling,
                    w,
                    &iv.config,
                    &[(p_in, iv.in_label), (p_out, iv.out_label)],
                );
                colored[w] = true;
            }
        } else {
            debug_assert!(!reserved.contains_key(&v));
            let up = parent[&v];
            let p = tree.port_to(v, up).unwrap();
            let (c, b) = full.answer(labeling.get(up, tree.port_to(up, v).unwrap()));
            assign_ports(labeling, v, c, &[(p, *b)]);
            colored[v] = true;
        }
    }
    Ok(())
}

//! Leaf-labelled trees with exact rational edge weights.
//!
//! Vertex and edge ids are dense indices private to one tree value; only leaf
//! labels are stable across operations. Every edge caches the leaf set on one
//! of its sides, so "does edge `e` lie in the subtree spanned by `I`" is two
//! mask tests: both sides of the split must meet `I`.

use std::collections::VecDeque;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::family::KFamily;
use crate::leafset::{LeafSet, MAX_LEAVES};
use crate::number::Rational;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("a tree needs at least two leaves")]
    TooFewLeaves,
    #[error("a tree on {vertices} vertices has {expected} edges, found {found}")]
    EdgeCount {
        vertices: usize,
        expected: usize,
        found: usize,
    },
    #[error("edge ({0}, {1}) is invalid")]
    BadEdge(VertexId, VertexId),
    #[error("graph is not connected")]
    Disconnected,
    #[error("degree-1 vertex {0} carries no leaf label")]
    UnlabeledLeaf(VertexId),
    #[error("label {0} sits on a vertex of degree > 1")]
    LabelOnInternal(usize),
    #[error("leaf label {0} is used more than once")]
    DuplicateLabel(usize),
    #[error("leaf label {0} is outside 1..={MAX_LEAVES}")]
    LabelRange(usize),
    #[error("leaf labels must be exactly 1..={0}")]
    NonContiguousLabels(usize),
    #[error("{0} is not a leaf of this tree")]
    NotALeaf(usize),
    #[error("expected {expected} edge weights, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("need at least {min} leaves, got {got}")]
    SubsetTooSmall { min: usize, got: usize },
    #[error("k = {k} is outside 2..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("quartet labels must be four distinct leaves")]
    BadQuartet,
    #[error("quartet ({0}, {1} | {2}, {3}) is not resolved that way")]
    NotResolved(usize, usize, usize, usize),
    #[error("leaf {0} belongs to the spanned subtree")]
    LeafInSubtree(usize),
    #[error("path endpoints are not vertices of the spanned subtree")]
    PathOutsideSubtree,
}

/// Buneman index of a quartet `(a, b, c, d)`, relative to the order given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BunemanIndex {
    AbCd,
    AcBd,
    AdBc,
    Star,
}

/// The stalks of a resolved quartet `<a,b|c,d>` and the vertex path joining
/// them (the bridge).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bridge {
    pub stalk_ab: VertexId,
    pub stalk_cd: VertexId,
    pub path: Vec<VertexId>,
}

impl Bridge {
    pub fn num_edges(&self) -> usize {
        self.path.len() - 1
    }
}

#[derive(Debug, Clone)]
pub struct Topology {
    adj: Vec<Vec<(VertexId, EdgeId)>>,
    edges: Vec<(VertexId, VertexId)>,
    labels: Vec<Option<usize>>,
    leaf_vertex: Vec<Option<VertexId>>,
    leaves: LeafSet,
    // leaf set on the `edges[e].1` side
    far_side: Vec<LeafSet>,
}

impl Topology {
    /// Builds a topology from an edge list. `labels[v]` must be set exactly
    /// on the degree-1 vertices.
    pub fn new(
        num_vertices: usize,
        edges: Vec<(VertexId, VertexId)>,
        labels: Vec<Option<usize>>,
    ) -> Result<Self, TreeError> {
        if num_vertices < 2 {
            return Err(TreeError::TooFewLeaves);
        }
        if edges.len() != num_vertices - 1 {
            return Err(TreeError::EdgeCount {
                vertices: num_vertices,
                expected: num_vertices - 1,
                found: edges.len(),
            });
        }
        assert_eq!(labels.len(), num_vertices, "one label slot per vertex");
        let mut adj = vec![Vec::new(); num_vertices];
        for (e, &(u, v)) in edges.iter().enumerate() {
            if u >= num_vertices || v >= num_vertices || u == v {
                return Err(TreeError::BadEdge(u, v));
            }
            adj[u].push((v, e));
            adj[v].push((u, e));
        }

        let mut leaf_vertex = vec![None; MAX_LEAVES];
        let mut leaves = LeafSet::EMPTY;
        for (v, label) in labels.iter().enumerate() {
            match *label {
                Some(l) => {
                    if !(1..=MAX_LEAVES).contains(&l) {
                        return Err(TreeError::LabelRange(l));
                    }
                    if adj[v].len() != 1 {
                        return Err(TreeError::LabelOnInternal(l));
                    }
                    if leaves.contains(l) {
                        return Err(TreeError::DuplicateLabel(l));
                    }
                    leaves = leaves.with(l);
                    leaf_vertex[l - 1] = Some(v);
                }
                None if adj[v].len() == 1 => return Err(TreeError::UnlabeledLeaf(v)),
                None => {}
            }
        }

        // BFS from vertex 0; children are visited after parents.
        let mut parent_edge = vec![usize::MAX; num_vertices];
        let mut seen = vec![false; num_vertices];
        let mut order = Vec::with_capacity(num_vertices);
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(w, e) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent_edge[w] = e;
                    queue.push_back(w);
                }
            }
        }
        if order.len() != num_vertices {
            return Err(TreeError::Disconnected);
        }
        let mut below = vec![LeafSet::EMPTY; num_vertices];
        let mut far_side = vec![LeafSet::EMPTY; edges.len()];
        for &v in order.iter().rev() {
            if let Some(l) = labels[v] {
                below[v] = below[v].with(l);
            }
            let e = parent_edge[v];
            if e != usize::MAX {
                let (a, b) = edges[e];
                let parent = if a == v { b } else { a };
                below[parent] = below[parent] | below[v];
                far_side[e] = if edges[e].1 == v {
                    below[v]
                } else {
                    leaves.minus(below[v])
                };
            }
        }

        Ok(Topology {
            adj,
            edges,
            labels,
            leaf_vertex,
            leaves,
            far_side,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn label(&self, v: VertexId) -> Option<usize> {
        self.labels[v]
    }

    pub fn leaves(&self) -> LeafSet {
        self.leaves
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn leaf_vertex(&self, label: usize) -> Option<VertexId> {
        if (1..=MAX_LEAVES).contains(&label) {
            self.leaf_vertex[label - 1]
        } else {
            None
        }
    }

    fn require_leaf(&self, label: usize) -> Result<VertexId, TreeError> {
        self.leaf_vertex(label).ok_or(TreeError::NotALeaf(label))
    }

    pub(crate) fn require_subset(&self, set: LeafSet) -> Result<(), TreeError> {
        match set.minus(self.leaves).min() {
            Some(bad) => Err(TreeError::NotALeaf(bad)),
            None => Ok(()),
        }
    }

    /// The edge's leaf bipartition, normalised to the side that does not
    /// contain the smallest leaf label.
    pub fn split(&self, e: EdgeId) -> LeafSet {
        let side = self.far_side[e];
        match self.leaves.min() {
            Some(m) if side.contains(m) => self.leaves.minus(side),
            _ => side,
        }
    }

    /// Both sides of the split, `(side of edges[e].0, side of edges[e].1)`.
    pub fn split_sides(&self, e: EdgeId) -> (LeafSet, LeafSet) {
        (self.leaves.minus(self.far_side[e]), self.far_side[e])
    }

    /// Whether edge `e` lies in the minimal subtree spanning `set`.
    pub fn edge_spans(&self, e: EdgeId, set: LeafSet) -> bool {
        let side = self.far_side[e];
        side.intersects(set) && self.leaves.minus(side).intersects(set)
    }

    pub fn is_essential(&self) -> bool {
        self.adj.iter().all(|a| a.len() != 2)
    }

    /// `true` for every edge lying on some leaf's twig.
    pub fn twig_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.num_edges()];
        for label in self.leaves.iter() {
            for e in self.twig_edges_of(self.leaf_vertex[label - 1].unwrap()) {
                mask[e] = true;
            }
        }
        mask
    }

    fn twig_edges_of(&self, leaf: VertexId) -> Vec<EdgeId> {
        let mut out = Vec::new();
        let (mut prev, mut cur) = (usize::MAX, leaf);
        loop {
            let next = self.adj[cur].iter().find(|&&(w, _)| w != prev).copied();
            let Some((w, e)) = next else { break };
            out.push(e);
            if self.adj[w].len() != 2 {
                break;
            }
            prev = cur;
            cur = w;
        }
        out
    }

    /// Edges of the twig of `label`, leaf end first.
    pub fn twig_edges(&self, label: usize) -> Result<Vec<EdgeId>, TreeError> {
        Ok(self.twig_edges_of(self.require_leaf(label)?))
    }

    pub fn internal_edges(&self) -> Vec<EdgeId> {
        let mask = self.twig_mask();
        (0..self.num_edges()).filter(|&e| !mask[e]).collect()
    }

    /// Vertex sequence of the unique path from `from` to `to`.
    pub fn path_vertices(&self, from: VertexId, to: VertexId) -> Vec<VertexId> {
        let mut prev = vec![usize::MAX; self.num_vertices()];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &(w, _) in &self.adj[v] {
                if prev[w] == usize::MAX {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// The unique vertex common to the three pairwise paths.
    pub fn median(&self, x: VertexId, y: VertexId, z: VertexId) -> VertexId {
        let to_y = self.path_vertices(x, y);
        let to_z = self.path_vertices(x, z);
        let common = to_y.iter().zip(&to_z).take_while(|(a, b)| a == b).count();
        to_y[common - 1]
    }

    /// Every edge splits the leaves into two sides, one of size at least `k`.
    pub fn is_pseudostar(&self, k: usize) -> bool {
        let n = self.num_leaves();
        (0..self.num_edges()).all(|e| {
            let side = self.far_side[e].len();
            side.max(n - side) >= k
        })
    }

    /// Normalised splits of all edges not incident to a leaf, sorted.
    /// Two essential topologies on the same leaf set are equal iff these are.
    pub fn nontrivial_splits(&self) -> Vec<LeafSet> {
        let mut splits: Vec<LeafSet> = (0..self.num_edges())
            .map(|e| self.split(e))
            .filter(|s| s.len() >= 2 && self.leaves.minus(*s).len() >= 2)
            .collect();
        splits.sort_unstable();
        splits.dedup();
        splits
    }

    pub fn quartet_topology(&self, quartet: [usize; 4]) -> Result<BunemanIndex, TreeError> {
        let [a, b, c, d] = quartet;
        let q = LeafSet::from_labels(quartet);
        if q.len() != 4 {
            return Err(TreeError::BadQuartet);
        }
        self.require_subset(q)?;
        let pairs = [
            (LeafSet::from_labels([a, b]), BunemanIndex::AbCd),
            (LeafSet::from_labels([a, c]), BunemanIndex::AcBd),
            (LeafSet::from_labels([a, d]), BunemanIndex::AdBc),
        ];
        for e in 0..self.num_edges() {
            let side = self.far_side[e] & q;
            for &(pair, index) in &pairs {
                if side == pair || side == q.minus(pair) {
                    return Ok(index);
                }
            }
        }
        Ok(BunemanIndex::Star)
    }

    pub fn bridge_and_stalks(&self, a: usize, b: usize, c: usize, d: usize) -> Result<Bridge, TreeError> {
        if self.quartet_topology([a, b, c, d])? != BunemanIndex::AbCd {
            return Err(TreeError::NotResolved(a, b, c, d));
        }
        let [va, vb, vc, vd] = [a, b, c, d].map(|l| self.leaf_vertex[l - 1].unwrap());
        let stalk_ab = self.median(va, vb, vc);
        let stalk_cd = self.median(vc, vd, va);
        Ok(Bridge {
            stalk_ab,
            stalk_cd,
            path: self.path_vertices(stalk_ab, stalk_cd),
        })
    }

    /// Vertices of the minimal subtree spanning `set`.
    pub fn spanned_vertices(&self, set: LeafSet) -> Vec<bool> {
        let mut inside = vec![false; self.num_vertices()];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if self.edge_spans(e, set) {
                inside[u] = true;
                inside[v] = true;
            }
        }
        inside
    }

    /// Whether leaf `x` clings to the path `path_ends` as to the subtree
    /// spanned by `spanned`: the vertex where `x` meets that subtree lies on
    /// the path.
    pub fn clings_to(&self, x: usize, path_ends: (VertexId, VertexId), spanned: LeafSet) -> Result<bool, TreeError> {
        let vx = self.require_leaf(x)?;
        self.require_subset(spanned)?;
        if spanned.contains(x) {
            return Err(TreeError::LeafInSubtree(x));
        }
        let anchor = spanned.min().ok_or(TreeError::SubsetTooSmall { min: 1, got: 0 })?;
        let inside = self.spanned_vertices(spanned);
        let (s0, s1) = path_ends;
        if s0 >= self.num_vertices() || s1 >= self.num_vertices() || !inside[s0] || !inside[s1] {
            return Err(TreeError::PathOutsideSubtree);
        }
        let toward = self.path_vertices(vx, self.leaf_vertex[anchor - 1].unwrap());
        let attach = *toward
            .iter()
            .find(|&&v| inside[v])
            .expect("path ends inside the subtree");
        Ok(self.path_vertices(s0, s1).contains(&attach))
    }
}

/// A topology with one exact weight per edge.
#[derive(Debug, Clone)]
pub struct WeightedTree {
    topology: Topology,
    weights: Vec<Rational>,
}

impl WeightedTree {
    pub fn new(topology: Topology, weights: Vec<Rational>) -> Result<Self, TreeError> {
        if weights.len() != topology.num_edges() {
            return Err(TreeError::WeightCount {
                expected: topology.num_edges(),
                found: weights.len(),
            });
        }
        Ok(WeightedTree { topology, weights })
    }

    pub fn from_edges(
        num_vertices: usize,
        edges: Vec<(VertexId, VertexId, Rational)>,
        labels: Vec<Option<usize>>,
    ) -> Result<Self, TreeError> {
        let (pairs, weights): (Vec<_>, Vec<_>) = edges.into_iter().map(|(u, v, w)| ((u, v), w)).unzip();
        WeightedTree::new(Topology::new(num_vertices, pairs, labels)?, weights)
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn weight(&self, e: EdgeId) -> &Rational {
        &self.weights[e]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn leaves(&self) -> LeafSet {
        self.topology.leaves()
    }

    pub fn num_leaves(&self) -> usize {
        self.topology.num_leaves()
    }

    pub fn into_parts(self) -> (Topology, Vec<Rational>) {
        (self.topology, self.weights)
    }

    /// Weight of the minimal subtree spanning `set` (zero for fewer than two
    /// leaves).
    pub fn k_weight(&self, set: LeafSet) -> Result<Rational, TreeError> {
        self.topology.require_subset(set)?;
        Ok(self.spanning_weight(set, |_| true))
    }

    fn spanning_weight(&self, set: LeafSet, keep: impl Fn(EdgeId) -> bool) -> Rational {
        let mut total = Rational::zero();
        for e in 0..self.topology.num_edges() {
            if keep(e) && self.topology.edge_spans(e, set) {
                total += &self.weights[e];
            }
        }
        total
    }

    /// Sum of the weights of those edges of the subtree spanning `set` that
    /// are internal edges of the whole tree.
    pub fn internal_restricted_weight(&self, set: LeafSet) -> Result<Rational, TreeError> {
        self.topology.require_subset(set)?;
        let twig = self.topology.twig_mask();
        Ok(self.spanning_weight(set, |e| !twig[e]))
    }

    pub fn twig_weight(&self, label: usize) -> Result<Rational, TreeError> {
        Ok(self
            .topology
            .twig_edges(label)?
            .into_iter()
            .map(|e| &self.weights[e])
            .sum())
    }

    /// The family of all `k`-weights. Leaves must be labelled `1..=n`.
    pub fn k_dissimilarity(&self, k: usize) -> Result<KFamily, TreeError> {
        let n = self.num_leaves();
        if self.leaves() != LeafSet::full(n) {
            return Err(TreeError::NonContiguousLabels(n));
        }
        if k < 2 || k + 1 > n {
            return Err(TreeError::KOutOfRange {
                k,
                max: n.saturating_sub(1),
            });
        }
        Ok(KFamily::from_fn(n, k, |set| self.spanning_weight(set, |_| true)).expect("range checked above"))
    }

    /// Internal edges all strictly positive.
    pub fn is_internal_positive(&self) -> bool {
        self.topology
            .internal_edges()
            .iter()
            .all(|&e| self.weights[e].is_positive())
    }

    pub fn is_positive(&self) -> bool {
        self.weights.iter().all(Signed::is_positive)
    }

    /// The minimal subtree spanning `set`, weights inherited. Vertices of
    /// degree 2 are kept.
    pub fn restrict(&self, set: LeafSet) -> Result<WeightedTree, TreeError> {
        self.topology.require_subset(set)?;
        if set.len() < 2 {
            return Err(TreeError::SubsetTooSmall { min: 2, got: set.len() });
        }
        let topo = &self.topology;
        let mut remap = vec![usize::MAX; topo.num_vertices()];
        let mut labels = Vec::new();
        let mut edges = Vec::new();
        let mut index = |v: VertexId, labels: &mut Vec<Option<usize>>| {
            if remap[v] == usize::MAX {
                remap[v] = labels.len();
                labels.push(topo.label(v));
            }
            remap[v]
        };
        for e in 0..topo.num_edges() {
            if topo.edge_spans(e, set) {
                let (u, v) = topo.endpoints(e);
                let (u, v) = (index(u, &mut labels), index(v, &mut labels));
                edges.push((u, v, self.weights[e].clone()));
            }
        }
        WeightedTree::from_edges(labels.len(), edges, labels)
    }

    /// Suppresses every degree-2 vertex, summing the weights of the merged
    /// edges. Pairwise leaf distances are unchanged.
    pub fn essentialize(&self) -> WeightedTree {
        let topo = &self.topology;
        let kept: Vec<VertexId> = (0..topo.num_vertices()).filter(|&v| topo.degree(v) != 2).collect();
        let mut remap = vec![usize::MAX; topo.num_vertices()];
        for (i, &v) in kept.iter().enumerate() {
            remap[v] = i;
        }
        let mut edges = Vec::new();
        for &start in &kept {
            for &(first, e0) in topo.neighbors(start) {
                let mut weight = self.weights[e0].clone();
                let (mut prev, mut cur) = (start, first);
                while topo.degree(cur) == 2 {
                    let &(next, e) = topo.neighbors(cur).iter().find(|&&(w, _)| w != prev).unwrap();
                    weight += &self.weights[e];
                    prev = cur;
                    cur = next;
                }
                if start < cur {
                    edges.push((remap[start], remap[cur], weight));
                }
            }
        }
        let labels = kept.iter().map(|&v| topo.label(v)).collect();
        WeightedTree::from_edges(kept.len(), edges, labels).expect("suppression keeps a valid tree")
    }
}

impl PartialEq for WeightedTree {
    fn eq(&self, other: &Self) -> bool {
        self.leaves() == other.leaves() && self.to_newick() == other.to_newick()
    }
}

impl Eq for WeightedTree {}

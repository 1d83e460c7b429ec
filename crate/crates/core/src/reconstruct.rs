//! Rebuilding the essential pseudostar that realizes a k-dissimilarity family.
//!
//! Pipeline: pair table, 4-point check, tree realizing the pair table,
//! pseudostar check, rescaling of internal edges through the quartet
//! classes, and finally the twig weights.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::family::{
    four_point_check, q_classes, q_hat, s_table, split_denominator, FourPointViolation, KFamily, PairTable, QClass,
    QClassError, QMembership,
};
use crate::leafset::LeafSet;
use crate::number::{int, Rational};
use crate::tree::{Topology, WeightedTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairTreeError {
    #[error("a pair table needs at least two indices")]
    TooFewLeaves,
    #[error("leaf {0} cannot be placed consistently; the table is not a tree metric")]
    Inconsistent(usize),
    #[error("built tree gives {found} for pair ({i}, {j}) instead of {expected}")]
    Mismatch {
        i: usize,
        j: usize,
        expected: String,
        found: String,
    },
}

/// Essential tree with positive internal weights whose leaf-to-leaf path
/// weights are exactly the table's values (twigs may be negative).
///
/// Leaves are inserted in label order. Each leaf is first normalised so its
/// twig has length 1, which keeps every attachment point strictly inside the
/// tree built so far; the twig offsets are undone at the end.
pub fn tree_from_pair_table(p: &PairTable) -> Result<WeightedTree, PairTreeError> {
    let n = p.n();
    if n < 2 {
        return Err(PairTreeError::TooFewLeaves);
    }
    if n == 2 {
        let tree = WeightedTree::from_edges(2, vec![(0, 1, p.get(1, 2).clone())], vec![Some(1), Some(2)])
            .expect("two-leaf tree");
        return Ok(tree);
    }

    // offset[i] = distance from i to its nearest branching point
    let offset: Vec<Rational> = (1..=n)
        .map(|i| {
            LeafSet::full(n)
                .without(i)
                .subsets(2)
                .map(|pair| {
                    let (j, l) = (pair.min().unwrap(), pair.max().unwrap());
                    (p.get(i, j) + p.get(i, l) - p.get(j, l)) / int(2)
                })
                .min()
                .unwrap()
        })
        .collect();
    let two = int(2);
    let dist = |i: usize, j: usize| -> Rational { p.get(i, j) - &offset[i - 1] - &offset[j - 1] + &two };

    let mut b = Builder::default();
    let leaf1 = b.vertex(Some(1));
    let leaf2 = b.vertex(Some(2));
    let d12 = dist(1, 2);
    if !d12.is_positive() {
        return Err(PairTreeError::Inconsistent(2));
    }
    b.edge(leaf1, leaf2, d12);
    let mut leaf_vertex = vec![leaf1, leaf2];

    for x in 3..=n {
        let dix = dist(1, x);
        let (best, reach) = (2..x)
            .map(|j| (j, (&dix + dist(1, j) - dist(j, x)) / int(2)))
            .fold(None::<(usize, Rational)>, |acc, (j, a)| match acc {
                Some((_, ref best)) if *best >= a => acc,
                _ => Some((j, a)),
            })
            .unwrap();
        let pendant = &dix - &reach;
        if !reach.is_positive() || reach >= dist(1, best) || !pendant.is_positive() {
            return Err(PairTreeError::Inconsistent(x));
        }
        let anchor = b.point_on_path(leaf_vertex[0], leaf_vertex[best - 1], &reach);
        let leaf = b.vertex(Some(x));
        b.edge(anchor, leaf, pendant);
        leaf_vertex.push(leaf);
    }

    for (i, &v) in leaf_vertex.iter().enumerate() {
        let e = b.adj[v][0];
        b.edges[e].2 += &offset[i] - int(1);
    }

    let tree = b.finish();
    for pair in LeafSet::full(n).subsets(2) {
        let (i, j) = (pair.min().unwrap(), pair.max().unwrap());
        let found = tree.k_weight(pair).expect("labels 1..=n");
        if &found != p.get(i, j) {
            return Err(PairTreeError::Mismatch {
                i,
                j,
                expected: crate::number::format_rational(p.get(i, j)),
                found: crate::number::format_rational(&found),
            });
        }
    }
    Ok(tree)
}

#[derive(Default)]
struct Builder {
    labels: Vec<Option<usize>>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize, Rational)>,
}

impl Builder {
    fn vertex(&mut self, label: Option<usize>) -> usize {
        self.labels.push(label);
        self.adj.push(Vec::new());
        self.labels.len() - 1
    }

    fn edge(&mut self, u: usize, v: usize, w: Rational) -> usize {
        self.edges.push((u, v, w));
        let e = self.edges.len() - 1;
        self.adj[u].push(e);
        self.adj[v].push(e);
        e
    }

    fn other(&self, e: usize, v: usize) -> usize {
        let (a, b, _) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Vertex at distance `reach` from `from` along the path to `to`,
    /// subdividing an edge if the point falls strictly inside it.
    fn point_on_path(&mut self, from: usize, to: usize, reach: &Rational) -> usize {
        let mut via = vec![usize::MAX; self.adj.len()];
        let mut stack = vec![from];
        via[from] = usize::MAX - 1;
        while let Some(v) = stack.pop() {
            for &e in &self.adj[v] {
                let w = self.other(e, v);
                if via[w] == usize::MAX {
                    via[w] = e;
                    stack.push(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut cur = to;
        while cur != from {
            let e = via[cur];
            path.push(e);
            cur = self.other(e, cur);
        }
        path.reverse();

        let mut travelled = Rational::zero();
        let mut at = from;
        for e in path {
            let next = self.other(e, at);
            let end = &travelled + &self.edges[e].2;
            if &end == reach {
                return next;
            }
            if &end > reach {
                let mid = self.vertex(None);
                let head = reach - &travelled;
                let tail = &self.edges[e].2 - &head;
                // e becomes at–mid, a new edge carries mid–next
                let (a, _, _) = self.edges[e];
                if a == at {
                    self.edges[e].1 = mid;
                } else {
                    self.edges[e].0 = mid;
                }
                self.edges[e].2 = head;
                self.adj[mid].push(e);
                let slot = self.adj[next].iter().position(|&x| x == e).unwrap();
                self.adj[next].remove(slot);
                self.edge(mid, next, tail);
                return mid;
            }
            travelled = end;
            at = next;
        }
        unreachable!("reach is strictly inside the path");
    }

    fn finish(self) -> WeightedTree {
        WeightedTree::from_edges(self.labels.len(), self.edges, self.labels).expect("builder keeps a tree")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RescaleError {
    #[error("internal edge with split {0} matches no quartet class")]
    UnmatchedEdge(LeafSet),
    #[error("quartet class {0:?} matches no internal edge")]
    UnmatchedClass([usize; 4]),
    #[error("split {0} has both sides smaller than k")]
    ZeroDenominator(LeafSet),
    #[error("edge {split}: class weight {from_class} differs from rescaled edge weight {from_edge}")]
    RouteMismatch {
        split: LeafSet,
        from_class: String,
        from_edge: String,
    },
}

/// Replaces each internal weight `w'(e)` of the pair-table tree by the
/// k-tree weight: the matching class's `wtilde`, which must equal
/// `2 w'(e) / (C(|A|-2, k-2) + C(|B|-2, k-2))` for the edge's split `A|B`.
pub fn rescale_internal(tprime: &WeightedTree, classes: &[QClass], k: usize) -> Result<WeightedTree, RescaleError> {
    let topo = tprime.topology();
    let mut weights = tprime.weights().to_vec();
    let mut used = vec![false; classes.len()];
    for e in topo.internal_edges() {
        let (side_a, side_b) = topo.split_sides(e);
        let split = topo.split(e);
        let idx = classes
            .iter()
            .position(|c| c.has_split(side_a))
            .ok_or(RescaleError::UnmatchedEdge(split))?;
        used[idx] = true;
        let denominator = split_denominator(side_a.len(), side_b.len(), k);
        if denominator == 0 {
            return Err(RescaleError::ZeroDenominator(split));
        }
        let from_edge = tprime.weight(e) * int(2) / int(denominator as i64);
        let from_class = &classes[idx].wtilde;
        if &from_edge != from_class {
            return Err(RescaleError::RouteMismatch {
                split,
                from_class: crate::number::format_rational(from_class),
                from_edge: crate::number::format_rational(&from_edge),
            });
        }
        weights[e] = from_edge;
    }
    if let Some(i) = used.iter().position(|u| !u) {
        return Err(RescaleError::UnmatchedClass(classes[i].quartet));
    }
    let topology: Topology = topo.clone();
    Ok(WeightedTree::new(topology, weights).expect("same edge count"))
}

/// `X_{ij}`: the `k - 1` smallest indices of `{1..n} - {i, j}`.
pub fn canonical_x(n: usize, k: usize, i: usize, j: usize) -> LeafSet {
    LeafSet::full(n).without(i).without(j).iter().take(k - 1).collect()
}

/// `D_{jX} - D_{iX} + q(iX) - q(jX)`: equals `twig(j) - twig(i)` for every
/// `X` when the family comes from a tree.
pub fn delta(f: &KFamily, classes: &[QClass], i: usize, j: usize, x: LeafSet) -> Rational {
    delta_with(f, classes, i, j, x, QMembership::SidesMeet)
}

pub fn delta_with(f: &KFamily, classes: &[QClass], i: usize, j: usize, x: LeafSet, m: QMembership) -> Rational {
    if i == j {
        return Rational::zero();
    }
    let ix = x.with(i);
    let jx = x.with(j);
    f.get(jx) - f.get(ix) + q_hat(classes, ix, m) - q_hat(classes, jx, m)
}

/// `D_I - sum_{j in I} delta(i, j, X_ij) - q(I)`: equals `k * twig(i)` for
/// every `I` and every choice of the `X_ij` when the family comes from a
/// tree. `I` need not contain `i`.
pub fn tau(
    f: &KFamily,
    classes: &[QClass],
    i: usize,
    subset: LeafSet,
    x_of: &dyn Fn(usize, usize) -> LeafSet,
) -> Rational {
    tau_with(f, classes, i, subset, x_of, QMembership::SidesMeet)
}

pub fn tau_with(
    f: &KFamily,
    classes: &[QClass],
    i: usize,
    subset: LeafSet,
    x_of: &dyn Fn(usize, usize) -> LeafSet,
    m: QMembership,
) -> Rational {
    let mut value = f.get(subset) - q_hat(classes, subset, m);
    for j in subset.iter().filter(|&j| j != i) {
        value -= delta_with(f, classes, i, j, x_of(i, j), m);
    }
    value
}

/// `tau_i(I)` with canonical `X` for every leaf `i` and every k-subset `I`.
/// Returns the values at `I = {1..k}`, or the first `(i, I, expected, found)`
/// where they differ.
pub(crate) fn sweep_canonical_tau(
    f: &KFamily,
    classes: &[QClass],
) -> Result<Vec<Rational>, (usize, LeafSet, Rational, Rational)> {
    let (n, k) = (f.n(), f.k());
    // tau_i(I) = (D_I - q(I)) - sum_{j in I, j != i} delta(i, j, X_ij)
    let deltas: Vec<Vec<Rational>> = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| delta(f, classes, i, j, canonical_x(n, k, i, j)))
                .collect()
        })
        .collect();
    let tau_at = |i: usize, subset: LeafSet, base: &Rational| -> Rational {
        let mut value = base.clone();
        for j in subset.iter().filter(|&j| j != i) {
            value -= &deltas[i - 1][j - 1];
        }
        value
    };
    let canonical_i = LeafSet::full(k);
    let canonical_base = f.get(canonical_i) - q_hat(classes, canonical_i, QMembership::SidesMeet);
    let tau: Vec<Rational> = (1..=n).map(|i| tau_at(i, canonical_i, &canonical_base)).collect();
    for (subset, d) in f.iter() {
        let base = d - q_hat(classes, subset, QMembership::SidesMeet);
        for i in 1..=n {
            let found = tau_at(i, subset, &base);
            if found != tau[i - 1] {
                return Err((i, subset, tau[i - 1].clone(), found));
            }
        }
    }
    Ok(tau)
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub tree: WeightedTree,
    /// `tau[i - 1] = k * twig(i)`.
    pub tau: Vec<Rational>,
    pub classes: Vec<QClass>,
    pub pair_table: PairTable,
    /// The tree realizing the pair table, before rescaling.
    pub pair_tree: WeightedTree,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReconstructFailure {
    #[error("k = {k} is outside 2..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("pair table violates the 4-point condition on {:?} (sums {})", .0.quartet, fmt_sums(&.0.sums))]
    FourPoint(FourPointViolation),
    #[error("pair table is not realizable: {0}")]
    PairTree(PairTreeError),
    #[error("pair-table tree is not a pseudostar of kind (n, {k}): split {split}")]
    NotPseudostar { split: LeafSet, k: usize },
    #[error("quartet classes: {0}")]
    Classes(QClassError),
    #[error("rescaling: {0}")]
    Rescale(RescaleError),
    #[error("twig value of leaf {leaf} is {found} on {subset} but {expected} on the canonical subset")]
    TwigNotConstant {
        leaf: usize,
        subset: LeafSet,
        expected: String,
        found: String,
    },
}

fn fmt_sums(sums: &[Rational; 3]) -> String {
    sums.iter()
        .map(crate::number::format_rational)
        .collect::<Vec<_>>()
        .join(", ")
}

impl ReconstructFailure {
    /// Pipeline stage that failed (1-based; 0 for bad input).
    pub fn stage(&self) -> u8 {
        match self {
            ReconstructFailure::KOutOfRange { .. } => 0,
            ReconstructFailure::FourPoint(_) => 2,
            ReconstructFailure::PairTree(_) => 3,
            ReconstructFailure::NotPseudostar { .. } => 4,
            ReconstructFailure::Classes(_) | ReconstructFailure::Rescale(_) => 5,
            ReconstructFailure::TwigNotConstant { .. } => 6,
        }
    }

    pub fn stage_name(&self) -> &'static str {
        match self.stage() {
            0 => "input",
            2 => "four_point",
            3 => "pair_tree",
            4 => "pseudostar",
            5 => "rescale",
            _ => "twigs",
        }
    }
}

/// Reconstructs the unique essential pseudostar of kind `(n, k)` with
/// positive internal weights that could realize `f`. The result still has
/// to be verified against `f` (see [`crate::checker::decide`]).
pub fn reconstruct(f: &KFamily) -> Result<ReconstructionResult, ReconstructFailure> {
    let (n, k) = (f.n(), f.k());
    if k < 2 || k + 1 > n {
        return Err(ReconstructFailure::KOutOfRange {
            k,
            max: n.saturating_sub(1),
        });
    }
    let pair_table = s_table(f);
    four_point_check(&pair_table).map_err(ReconstructFailure::FourPoint)?;
    let pair_tree = tree_from_pair_table(&pair_table).map_err(ReconstructFailure::PairTree)?;

    if k == 2 {
        let tau = (1..=n).map(|i| pair_tree.twig_weight(i).unwrap() * int(2)).collect();
        return Ok(ReconstructionResult {
            tree: pair_tree.clone(),
            tau,
            classes: Vec::new(),
            pair_table,
            pair_tree,
        });
    }

    let topo = pair_tree.topology();
    if let Some(e) = (0..topo.num_edges()).find(|&e| {
        let side = topo.split(e).len();
        side < k && n - side < k
    }) {
        return Err(ReconstructFailure::NotPseudostar {
            split: topo.split(e),
            k,
        });
    }

    let classes = q_classes(&pair_table, k).map_err(ReconstructFailure::Classes)?;
    let rescaled = rescale_internal(&pair_tree, &classes, k).map_err(ReconstructFailure::Rescale)?;

    let tau = sweep_canonical_tau(f, &classes).map_err(|(leaf, subset, expected, found)| {
        ReconstructFailure::TwigNotConstant {
            leaf,
            subset,
            expected: crate::number::format_rational(&expected),
            found: crate::number::format_rational(&found),
        }
    })?;

    let (topology, mut weights) = rescaled.into_parts();
    let kq = int(k as i64);
    for i in 1..=n {
        let leaf = topology.leaf_vertex(i).unwrap();
        let (_, e) = topology.neighbors(leaf)[0];
        weights[e] = &tau[i - 1] / &kq;
    }
    let tree = WeightedTree::new(topology, weights).expect("same edge count");
    Ok(ReconstructionResult {
        tree,
        tau,
        classes,
        pair_table,
        pair_tree,
    })
}

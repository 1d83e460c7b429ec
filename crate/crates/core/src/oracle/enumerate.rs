//! Every essential tree topology on leaves `{1..n}`, built by inserting
//! leaves one at a time into an edge or onto an internal vertex.

use std::collections::HashSet;

use crate::leafset::LeafSet;
use crate::tree::Topology;

/// Largest `n` the catalog supports.
pub const MAX_CATALOG_LEAVES: usize = 8;

/// A growable tree used while inserting leaves.
#[derive(Debug, Clone)]
pub(crate) struct Proto {
    pub(crate) edges: Vec<(usize, usize)>,
    pub(crate) labels: Vec<Option<usize>>,
}

/// Where the next leaf goes.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Slot {
    Edge(usize),
    Vertex(usize),
}

impl Proto {
    pub(crate) fn star3() -> Self {
        Proto {
            edges: vec![(0, 1), (0, 2), (0, 3)],
            labels: vec![None, Some(1), Some(2), Some(3)],
        }
    }

    pub(crate) fn slots(&self) -> Vec<Slot> {
        let edges = (0..self.edges.len()).map(Slot::Edge);
        let vertices = self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_none())
            .map(|(v, _)| Slot::Vertex(v));
        edges.chain(vertices).collect()
    }

    pub(crate) fn insert(&self, slot: Slot, label: usize) -> Proto {
        let mut out = self.clone();
        let leaf = out.labels.len();
        out.labels.push(Some(label));
        match slot {
            Slot::Vertex(v) => out.edges.push((v, leaf)),
            Slot::Edge(e) => {
                let (u, v) = out.edges[e];
                let mid = out.labels.len();
                out.labels.push(None);
                out.edges[e] = (u, mid);
                out.edges.push((mid, v));
                out.edges.push((mid, leaf));
            }
        }
        out
    }

    /// Merges the endpoints of every edge with `drop[e]` set.
    pub(crate) fn contract(&self, drop: &[bool]) -> Proto {
        let mut root: Vec<usize> = (0..self.labels.len()).collect();
        fn find(root: &mut [usize], mut v: usize) -> usize {
            while root[v] != v {
                root[v] = root[root[v]];
                v = root[v];
            }
            v
        }
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if drop[e] {
                let (ru, rv) = (find(&mut root, u), find(&mut root, v));
                root[ru.max(rv)] = ru.min(rv);
            }
        }
        let mut index = vec![usize::MAX; self.labels.len()];
        let mut labels = Vec::new();
        for v in 0..self.labels.len() {
            let r = find(&mut root, v);
            if index[r] == usize::MAX {
                index[r] = labels.len();
                labels.push(None);
            }
            if let Some(l) = self.labels[v] {
                labels[index[r]] = Some(l);
            }
        }
        let edges = self
            .edges
            .iter()
            .zip(drop)
            .filter(|(_, &d)| !d)
            .map(|(&(u, v), _)| (index[find(&mut root, u)], index[find(&mut root, v)]))
            .collect();
        Proto { edges, labels }
    }

    pub(crate) fn topology(&self) -> Topology {
        Topology::new(self.labels.len(), self.edges.clone(), self.labels.clone()).expect("insertion keeps a valid tree")
    }
}

fn key(topology: &Topology) -> Vec<u64> {
    let mut splits: Vec<u64> = topology.nontrivial_splits().into_iter().map(LeafSet::bits).collect();
    splits.sort_unstable();
    splits
}

/// All essential topologies on `{1..n}`, `3 <= n <= 8`, ordered by number
/// of internal edges and then by their sorted split masks.
pub fn enumerate_topologies(n: usize) -> Vec<Topology> {
    assert!(
        (3..=MAX_CATALOG_LEAVES).contains(&n),
        "catalog covers 3..={MAX_CATALOG_LEAVES} leaves"
    );
    let mut level = vec![Proto::star3()];
    for label in 4..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for proto in &level {
            for slot in proto.slots() {
                let child = proto.insert(slot, label);
                if seen.insert(key(&child.topology())) {
                    next.push(child);
                }
            }
        }
        level = next;
    }
    let mut keyed: Vec<(Vec<u64>, Topology)> = level
        .iter()
        .map(|p| {
            let t = p.topology();
            (key(&t), t)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    keyed.into_iter().map(|(_, t)| t).collect()
}

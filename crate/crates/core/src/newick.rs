//! Newick reading and canonical writing.
//!
//! Input is rooted Newick with integer leaf labels `1..n`; branch lengths are
//! decimals or `p/q` literals and are required on every non-root edge. The
//! root orientation is dropped on reading: a root of degree two is
//! suppressed and its two branch lengths are summed.
//!
//! Output is canonical: rooted at the neighbour of the smallest leaf, children
//! ordered by their smallest descendant label, weights printed as integers or
//! lowest-terms `p/q`.

use std::fmt::Write;

use thiserror::Error;

use crate::leafset::LeafSet;
use crate::number::{format_rational, parse_rational, Rational};
use crate::tree::{TreeError, VertexId, WeightedTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NewickError {
    #[error("unexpected {found} at byte {pos}, expected {expected}")]
    Syntax {
        pos: usize,
        found: String,
        expected: &'static str,
    },
    #[error("leaf label `{0}` is not a positive integer")]
    BadLabel(String),
    #[error("leaf label {0} appears more than once")]
    DuplicateLabel(usize),
    #[error("leaf labels must be exactly 1..={0}")]
    NonContiguousLabels(usize),
    #[error("missing branch length above {0}")]
    MissingLength(String),
    #[error("bad branch length `{0}`")]
    BadLength(String),
    #[error("tree has fewer than two leaves")]
    TooFewLeaves,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

struct Node {
    label: Option<String>,
    length: Option<Rational>,
    children: Vec<usize>,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    nodes: Vec<Node>,
}

const DELIMS: &[char] = &['(', ')', ',', ':', ';'];

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, want: char, expected: &'static str) -> Result<(), NewickError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            other => Err(self.syntax(other, expected)),
        }
    }

    fn syntax(&self, found: Option<char>, expected: &'static str) -> NewickError {
        let found = found.map_or("end of input".to_string(), |c| format!("`{c}`"));
        NewickError::Syntax {
            pos: self.pos,
            found,
            expected,
        }
    }

    fn token(&mut self) -> Option<String> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let end = rest
            .find(|c: char| DELIMS.contains(&c) || c.is_whitespace())
            .unwrap_or(rest.len());
        if end == 0 {
            return None;
        }
        self.pos += end;
        Some(rest[..end].to_string())
    }

    fn subtree(&mut self) -> Result<usize, NewickError> {
        let mut children = Vec::new();
        if self.peek() == Some('(') {
            self.pos += 1;
            loop {
                children.push(self.subtree()?);
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    other => return Err(self.syntax(other, "`,` or `)`")),
                }
            }
        }
        let label = self.token();
        if children.is_empty() && label.is_none() {
            let found = self.peek();
            return Err(self.syntax(found, "a leaf label or `(`"));
        }
        let length = if self.peek() == Some(':') {
            self.pos += 1;
            let text = self.token().ok_or_else(|| {
                let found = self.src[self.pos..].chars().next();
                self.syntax(found, "a branch length")
            })?;
            Some(parse_rational(&text).map_err(|_| NewickError::BadLength(text))?)
        } else {
            None
        };
        self.nodes.push(Node {
            label,
            length,
            children,
        });
        Ok(self.nodes.len() - 1)
    }
}

/// Reads a rooted Newick string as an unrooted weighted tree.
pub fn parse_newick(text: &str) -> Result<WeightedTree, NewickError> {
    let mut parser = Parser {
        src: text,
        pos: 0,
        nodes: Vec::new(),
    };
    let mut root = parser.subtree()?;
    parser.expect(';', "`;`")?;
    if let Some(c) = parser.peek() {
        return Err(parser.syntax(Some(c), "end of input"));
    }
    let nodes = parser.nodes;

    // a root with a single child contributes nothing but a dangling edge
    while nodes[root].children.len() == 1 {
        root = nodes[root].children[0];
    }
    if nodes[root].children.is_empty() {
        return Err(NewickError::TooFewLeaves);
    }

    let mut labels: Vec<Option<usize>> = vec![None; nodes.len()];
    let mut seen = LeafSet::EMPTY;
    for (id, node) in nodes.iter().enumerate() {
        if !node.children.is_empty() {
            continue;
        }
        let raw = node.label.clone().unwrap_or_default();
        let label: usize = raw.parse().map_err(|_| NewickError::BadLabel(raw.clone()))?;
        if label == 0 || label > crate::leafset::MAX_LEAVES {
            return Err(NewickError::BadLabel(raw));
        }
        if seen.contains(label) {
            return Err(NewickError::DuplicateLabel(label));
        }
        seen = seen.with(label);
        labels[id] = Some(label);
    }
    let n = seen.len();
    if n < 2 {
        return Err(NewickError::TooFewLeaves);
    }
    if seen != LeafSet::full(n) {
        return Err(NewickError::NonContiguousLabels(n));
    }

    let describe = |id: usize| -> String {
        match &nodes[id].label {
            Some(l) => format!("`{l}`"),
            None => "an internal node".to_string(),
        }
    };
    let length_of = |id: usize| -> Result<Rational, NewickError> {
        nodes[id]
            .length
            .clone()
            .ok_or_else(|| NewickError::MissingLength(describe(id)))
    };

    // Collect edges from the subtree rooted at `root`, renumbering densely.
    let mut remap = vec![usize::MAX; nodes.len()];
    let mut vertex_labels = Vec::new();
    let mut edges = Vec::new();
    let mut stack = vec![root];
    remap[root] = 0;
    vertex_labels.push(labels[root]);
    while let Some(id) = stack.pop() {
        for &child in &nodes[id].children {
            remap[child] = vertex_labels.len();
            vertex_labels.push(labels[child]);
            edges.push((remap[id], remap[child], length_of(child)?));
            stack.push(child);
        }
    }

    if nodes[root].children.len() == 2 {
        // suppress the degree-2 root
        let (a, wa) = (edges[0].1, edges[0].2.clone());
        let (b, wb) = (edges[1].1, edges[1].2.clone());
        let first_two: Vec<_> = edges.drain(..2).collect();
        debug_assert!(first_two.iter().all(|e| e.0 == 0));
        edges.push((a, b, wa + wb));
        // drop vertex 0 and shift the rest down by one
        vertex_labels.remove(0);
        for e in &mut edges {
            e.0 -= 1;
            e.1 -= 1;
        }
    }
    Ok(WeightedTree::from_edges(vertex_labels.len(), edges, vertex_labels)?)
}

impl WeightedTree {
    /// Canonical Newick string; see the module docs for the normal form.
    pub fn to_newick(&self) -> String {
        let topo = self.topology();
        let first = topo.leaves().min().expect("trees have leaves");
        let leaf = topo.leaf_vertex(first).unwrap();
        let (root, leaf_edge) = topo.neighbors(leaf)[0];
        let mut out = String::new();
        if topo.label(root).is_some() {
            // two leaves joined by a single edge
            let other = topo.label(root).unwrap();
            write!(out, "({first}:{},{other}:0);", format_rational(self.weight(leaf_edge))).unwrap();
            return out;
        }
        let (body, _) = self.write_children(root, usize::MAX);
        out.push_str(&body);
        out.push(';');
        out
    }

    fn write_children(&self, v: VertexId, parent: VertexId) -> (String, usize) {
        let topo = self.topology();
        let mut parts: Vec<(usize, String)> = topo
            .neighbors(v)
            .iter()
            .filter(|&&(w, _)| w != parent)
            .map(|&(w, e)| {
                let (text, min_label) = match topo.label(w) {
                    Some(l) => (l.to_string(), l),
                    None => self.write_children(w, v),
                };
                (min_label, format!("{text}:{}", format_rational(self.weight(e))))
            })
            .collect();
        parts.sort_by_key(|(m, _)| *m);
        let min_label = parts[0].0;
        let body = parts.into_iter().map(|(_, s)| s).collect::<Vec<_>>().join(",");
        (format!("({body})"), min_label)
    }
}

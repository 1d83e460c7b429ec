//! Exact decision, reconstruction and evaluation of k-dissimilarity families
//! of weighted trees.
//!
//! A family `{D_I}` indexed by the k-subsets of `{1..n}` is *ip-l-treelike*
//! when some tree with leaf set `{1..n}` and positive internal edge weights
//! has `D_I` as the weight of the minimal subtree spanning `I`, for every `I`.
//! This crate decides that property, rebuilds the unique essential pseudostar
//! realization when it exists, and ships a brute-force oracle that
//! enumerates every topology for small `n` to cross-check the decision.
//!
//! All arithmetic is exact ([`Rational`] is an arbitrary-precision fraction).
//!
//! ```
//! use treelike::{parse_newick, decide};
//!
//! let tree = parse_newick("(1:1,2:1,(3:1,4:1,5:1):2);").unwrap();
//! let family = tree.k_dissimilarity(3).unwrap();
//! let verdict = decide(&family).unwrap();
//! assert!(verdict.ip_l_treelike);
//! assert_eq!(verdict.tree.unwrap().to_newick(), "(1:1,2:1,(3:1,4:1,5:1):2);");
//! ```

#![allow(clippy::result_large_err)]

pub mod checker;
pub mod cli;
pub mod family;
pub mod io;
pub mod leafset;
pub mod newick;
pub mod number;
pub mod oracle;
pub mod reconstruct;
pub mod tree;

pub use checker::{decide, Verdict};
pub use family::{KFamily, PairTable, QClass};
pub use leafset::LeafSet;
pub use newick::parse_newick;
pub use number::Rational;
pub use reconstruct::{reconstruct, ReconstructionResult};
pub use tree::{BunemanIndex, Topology, WeightedTree};

//! Brute-force oracle: try every topology on `{1..n}` (n <= 8) and solve for
//! edge weights exactly.

mod enumerate;
mod linear;
mod random;

use std::sync::OnceLock;

use num_traits::Signed;
use thiserror::Error;

pub use enumerate::{enumerate_topologies, MAX_CATALOG_LEAVES};
pub use linear::{solve, strictly_feasible, AffineSolution, Strict};
pub use random::{random_non_pseudostar, random_pseudostar, random_topology, random_tree, random_weights, WeightRange};

use crate::family::KFamily;
use crate::leafset::LeafSet;
use crate::number::int;
use crate::tree::{Topology, WeightedTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the oracle handles 3..={MAX_CATALOG_LEAVES} leaves, got {0}")]
    TooManyLeaves(usize),
    #[error("family leaf set does not match the topology")]
    LeafMismatch,
}

/// Which edge weights must be strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignConstraint {
    None,
    InternalPositive,
    AllPositive,
}

#[derive(Debug, Clone)]
pub struct Realization {
    pub tree: WeightedTree,
    /// Whether the weights are the only solution on this topology.
    pub unique: bool,
}

/// Shared per-`n` catalogs.
pub fn catalog(n: usize) -> Result<&'static [Topology], OracleError> {
    static CATALOGS: [OnceLock<Vec<Topology>>; MAX_CATALOG_LEAVES + 1] =
        [const { OnceLock::new() }; MAX_CATALOG_LEAVES + 1];
    if !(3..=MAX_CATALOG_LEAVES).contains(&n) {
        return Err(OracleError::TooManyLeaves(n));
    }
    Ok(CATALOGS[n].get_or_init(|| enumerate_topologies(n)))
}

/// Edge weights on `topology` realizing `f` under `sign`, if any.
pub fn realize_with(
    topology: &Topology,
    f: &KFamily,
    sign: SignConstraint,
) -> Result<Option<Realization>, OracleError> {
    if topology.leaves() != LeafSet::full(f.n()) {
        return Err(OracleError::LeafMismatch);
    }
    let edges = topology.num_edges();
    let (rows, rhs): (Vec<Vec<i64>>, Vec<_>) = f
        .iter()
        .map(|(subset, d)| {
            (
                (0..edges).map(|e| i64::from(topology.edge_spans(e, subset))).collect(),
                d.clone(),
            )
        })
        .unzip();
    let Some(solution) = solve(&rows, &rhs) else {
        return Ok(None);
    };

    let constrained: Vec<usize> = match sign {
        SignConstraint::None => Vec::new(),
        SignConstraint::InternalPositive => topology.internal_edges(),
        SignConstraint::AllPositive => (0..edges).collect(),
    };
    let system = constrained
        .iter()
        .map(|&e| Strict {
            coeffs: solution.kernel.iter().map(|dir| dir[e].clone()).collect(),
            constant: solution.particular[e].clone(),
        })
        .collect();
    let Some(y) = strictly_feasible(system, solution.dimension()) else {
        return Ok(None);
    };
    let weights = solution.point(&y);
    debug_assert!(constrained.iter().all(|&e| weights[e].is_positive()));
    let tree = WeightedTree::new(topology.clone(), weights).expect("one weight per edge");
    Ok(Some(Realization {
        tree,
        unique: solution.dimension() == 0,
    }))
}

/// `realize_with` with internal edges (or all edges) required positive.
pub fn realize_exact(topology: &Topology, f: &KFamily, all_positive: bool) -> Result<Option<Realization>, OracleError> {
    let sign = if all_positive {
        SignConstraint::AllPositive
    } else {
        SignConstraint::InternalPositive
    };
    realize_with(topology, f, sign)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteVerdict {
    pub ip_l_treelike: bool,
    pub p_l_treelike: bool,
}

/// Decides both properties by trying every topology.
pub fn brute_decide(f: &KFamily) -> Result<BruteVerdict, OracleError> {
    let mut verdict = BruteVerdict {
        ip_l_treelike: false,
        p_l_treelike: false,
    };
    for topology in catalog(f.n())? {
        if !verdict.ip_l_treelike && realize_with(topology, f, SignConstraint::InternalPositive)?.is_some() {
            verdict.ip_l_treelike = true;
        }
        if !verdict.p_l_treelike && realize_with(topology, f, SignConstraint::AllPositive)?.is_some() {
            verdict.p_l_treelike = true;
        }
        if verdict.p_l_treelike {
            break;
        }
    }
    Ok(verdict)
}

/// Every topology admitting an internal-positive realization of `f`.
pub fn all_realizations(f: &KFamily) -> Result<Vec<Realization>, OracleError> {
    let mut out = Vec::new();
    for topology in catalog(f.n())? {
        if let Some(r) = realize_with(topology, f, SignConstraint::InternalPositive)? {
            out.push(r);
        }
    }
    Ok(out)
}

/// Whether the weights of `tree` meet `sign`.
pub fn satisfies(tree: &WeightedTree, sign: SignConstraint) -> bool {
    let twig = tree.topology().twig_mask();
    tree.weights().iter().zip(twig).all(|(w, is_twig)| match sign {
        SignConstraint::None => true,
        SignConstraint::InternalPositive => is_twig || *w > int(0),
        SignConstraint::AllPositive => *w > int(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newick::parse_newick;

    #[test]
    fn realizes_t5_only_on_its_topology() {
        let t = parse_newick("(1:1,2:1,(3:1,4:1,5:1):2);").unwrap();
        let f = t.k_dissimilarity(3).unwrap();
        let found = all_realizations(&f).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].tree, t);
        assert!(found[0].unique);
        assert_eq!(
            brute_decide(&f).unwrap(),
            BruteVerdict {
                ip_l_treelike: true,
                p_l_treelike: true
            }
        );
    }

    #[test]
    fn non_pseudostar_has_free_directions() {
        let t = parse_newick("((1:1,2:1):2,3:1,4:1);").unwrap();
        let f = t.k_dissimilarity(3).unwrap();
        let r = realize_exact(t.topology(), &f, false).unwrap().unwrap();
        assert!(!r.unique);
        assert_eq!(r.tree.k_dissimilarity(3).unwrap(), f);
        assert!(satisfies(&r.tree, SignConstraint::InternalPositive));
    }

    #[test]
    fn negative_twig_is_ip_not_p() {
        let t = parse_newick("(1:-1,2:1,(3:1,4:1,5:1):2);").unwrap();
        let f = t.k_dissimilarity(3).unwrap();
        assert_eq!(
            brute_decide(&f).unwrap(),
            BruteVerdict {
                ip_l_treelike: true,
                p_l_treelike: false
            }
        );
    }

    #[test]
    fn rejects_large_n() {
        let f = KFamily::from_fn(9, 3, |_| int(1)).unwrap();
        assert_eq!(brute_decide(&f).unwrap_err(), OracleError::TooManyLeaves(9));
    }
}

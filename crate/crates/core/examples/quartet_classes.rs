//! Internal edges recovered from the pair table: one class of quartets per
//! edge, with its leaf bipartition and rescaled weight.

use treelike::family::{q_classes, q_hat, s_table, QMembership};
use treelike::number::format_rational;
use treelike::oracle::{random_pseudostar, WeightRange};
use treelike::LeafSet;

fn main() {
    let (n, k) = (8, 3);
    let tree = random_pseudostar(n, k, 5, &WeightRange::with_negative_twigs(4));
    println!("tree: {}", tree.to_newick());
    let family = tree.k_dissimilarity(k).unwrap();
    let classes = q_classes(&s_table(&family), k).unwrap();
    for class in &classes {
        println!(
            "  {} | {}  weight {}  ({} quartets, e.g. {:?})",
            class.side_ab,
            class.side_cd,
            format_rational(&class.wtilde),
            class.members.len(),
            class.quartet
        );
    }
    let w = LeafSet::from_labels([1, 4, 7]);
    println!(
        "internal weight spanned by {w}: {} (tree says {})",
        format_rational(&q_hat(&classes, w, QMembership::SidesMeet)),
        format_rational(&tree.internal_restricted_weight(w).unwrap())
    );
}

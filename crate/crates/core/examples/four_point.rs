//! The pair table `S_ij` (sum of `D_I` over k-sets containing i and j) and
//! the 4-point condition, on a tree family and on a perturbed copy.

use treelike::family::{four_point_check, s_table};
use treelike::number::{format_rational, int};
use treelike::{parse_newick, LeafSet};

fn main() {
    let tree = parse_newick("(1:1,2:1,(3:1,4:1,5:1):2);").unwrap();
    let family = tree.k_dissimilarity(3).unwrap();
    let pairs = s_table(&family);
    for ((i, j), s) in pairs.iter() {
        println!("S_{i}{j} = {}", format_rational(s));
    }
    println!("4-point condition: {:?}", four_point_check(&pairs).map(|_| "holds"));

    let bumped = family.with_value(LeafSet::from_labels([1, 2, 3]), int(6));
    match four_point_check(&s_table(&bumped)) {
        Ok(()) => println!("perturbed family still satisfies the 4-point condition"),
        Err(v) => println!(
            "D{{1,2,3}} = 6 breaks it on {:?}: pairing sums {}",
            v.quartet,
            v.sums.iter().map(format_rational).collect::<Vec<_>>().join(", ")
        ),
    }
}

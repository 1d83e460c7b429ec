//! Random pseudostars (twigs of any sign) survive k-weights -> reconstruct.

use treelike::oracle::{random_pseudostar, WeightRange};
use treelike::reconstruct::reconstruct;

fn main() {
    let range = WeightRange::with_negative_twigs(5);
    for (n, k) in [(5, 3), (7, 4), (9, 4), (12, 5)] {
        let mut ok = 0;
        for seed in 0..50 {
            let tree = random_pseudostar(n, k, seed, &range);
            let family = tree.k_dissimilarity(k).unwrap();
            if reconstruct(&family).is_ok_and(|r| r.tree == tree) {
                ok += 1;
            }
        }
        println!("n = {n:>2}, k = {k}: {ok}/50 reproduced");
    }
    let sample = random_pseudostar(7, 4, 0, &range);
    println!("e.g. {}", sample.to_newick());
}

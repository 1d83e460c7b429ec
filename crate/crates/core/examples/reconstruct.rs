//! The reconstruction pipeline stage by stage: pair table, pair-table tree,
//! rescaled internal edges, twig values.

use treelike::number::{format_rational, int};
use treelike::reconstruct::reconstruct;
use treelike::{KFamily, LeafSet};

fn main() {
    // the family of (1:1,2:1,(3:1,4:1,5:1):2) with D{3,4,5} lowered to 4
    let family = KFamily::from_fn(5, 3, |s| {
        if s == LeafSet::from_labels([3, 4, 5]) {
            int(4)
        } else {
            int(5)
        }
    })
    .unwrap();
    match reconstruct(&family) {
        Ok(r) => {
            println!("pair-table tree: {}", r.pair_tree.to_newick());
            for class in &r.classes {
                println!(
                    "edge {} | {}: gap {}, weight {}",
                    class.side_ab, class.side_cd, class.gap, class.wtilde
                );
            }
            let tau: Vec<String> = r.tau.iter().map(format_rational).collect();
            println!("tau = k * twig: {}", tau.join(", "));
            println!("tree: {}", r.tree.to_newick());
        }
        Err(e) => println!("failed at stage {} ({}): {e}", e.stage(), e.stage_name()),
    }
}

//! k-weights of a weighted tree.
//!
//! cargo run --example kweights -- "(1:1,2:1,(3:1,4:1,5:1):2);" 3

use treelike::number::format_rational;
use treelike::parse_newick;

fn main() {
    let mut args = std::env::args().skip(1);
    let newick = args.next().unwrap_or_else(|| "(1:1,2:1,(3:1,4:1,5:1):2);".to_string());
    let k: usize = args.next().map_or(3, |s| s.parse().expect("k must be an integer"));

    let tree = parse_newick(&newick).expect("valid Newick");
    let family = tree.k_dissimilarity(k).expect("2 <= k <= n - 1");
    println!("{} ({} leaves), k = {k}", tree.to_newick(), tree.num_leaves());
    for (subset, value) in family.iter() {
        println!("  D{subset} = {}", format_rational(value));
    }
}

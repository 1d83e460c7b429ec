//! Deciding tree-likeness with diagnostics, on a few small families.

use treelike::checker::decide;
use treelike::io::verdict_to_json;
use treelike::number::int;
use treelike::{parse_newick, KFamily, LeafSet};

fn main() {
    let base = parse_newick("(1:1,2:1,(3:1,4:1,5:1):2);")
        .unwrap()
        .k_dissimilarity(3)
        .unwrap();
    let negative_twig = parse_newick("(1:-1,2:1,(3:1,4:1,5:1):2);")
        .unwrap()
        .k_dissimilarity(3)
        .unwrap();
    let cases: [(&str, KFamily); 4] = [
        ("5-leaf tree", base.clone()),
        ("D{1,2,3} = 6", base.with_value(LeafSet::from_labels([1, 2, 3]), int(6))),
        ("D{1,2,4} = 7", base.with_value(LeafSet::from_labels([1, 2, 4]), int(7))),
        ("twig(1) = -1", negative_twig),
    ];
    for (name, family) in cases {
        let verdict = decide(&family).unwrap();
        println!("== {name}");
        println!(
            "{}",
            serde_json::to_string_pretty(&verdict_to_json(&verdict, true)).unwrap()
        );
    }
}

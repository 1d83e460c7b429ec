//! Parsing and canonical printing. Degree-2 roots are suppressed, children
//! are ordered by their smallest leaf, lengths are printed as fractions.

use treelike::parse_newick;

fn main() {
    for text in [
        "((1:1,2:1):0.5,3:1);",
        "(2:1.5,(3:1,1:-0.25):2);",
        "((5:1,4:1):1,(3:1,(2:2,1:1):3):1);",
        "(1:1,2:1",
    ] {
        match parse_newick(text) {
            Ok(tree) => {
                let topo = tree.topology();
                println!("{text:<40} -> {}", tree.to_newick());
                println!("{:<40}    internal splits: {:?}", "", topo.nontrivial_splits());
            }
            Err(e) => println!("{text:<40} -> error: {e}"),
        }
    }
}
